#include "wahm/hierarchy.hpp"

#include <algorithm>
#include <cmath>

#include "wahm/error.hpp"
#include "wahm/mesh.hpp"

namespace wahm {

namespace {

CellId ancestor_or_self(const CellId& cell, int level) {
  return cell.level == level ? cell : parent(cell, level);
}

// Whether every level-`target` descendant of `cell` (target > cell.level) satisfies pred.
template <class Pred>
bool all_descendants(const CellId& cell, int target, int dim, Pred&& pred) {
  const int shift = target - cell.level;
  Index lo{}, hi{};
  for (int i = 0; i < dim; ++i) {
    lo[i] = cell.index[i] << shift;
    hi[i] = lo[i] + (1 << shift) - 1;
  }
  bool ok = true;
  for_each_in_box(dim, lo, hi, [&](const Index& k) {
    if (ok && !pred(k)) ok = false;
  });
  return ok;
}

}  // namespace

SubdomainHierarchy::SubdomainHierarchy(Domain domain, int degree, std::vector<LevelSet> refined)
    : domain_(domain), degree_(degree), level0_(full_grid(domain, 0)), refined_(std::move(refined)) {
  if (degree_ < 1) throw Error(ErrorCode::InvalidArgument, "degree must be >= 1");
  for (std::size_t i = 0; i < refined_.size(); ++i) {
    const int level = static_cast<int>(i);
    const int l = level + 1;
    if (refined_[i].empty()) {
      throw Error(ErrorCode::InvalidHierarchy,
                  "Omega_" + std::to_string(l) + " is empty below the deepest level");
    }
    for (const auto& k : refined_[i]) {
      const CellId c{level, k};
      if (!domain_.contains(c)) {
        throw Error(ErrorCode::InvalidHierarchy,
                    "Omega_" + std::to_string(l) + " cell " + to_string(c, dim()) + " outside domain");
      }
      if (level >= 1 && !refined_[i - 1].contains(parent(c).index)) {
        throw Error(ErrorCode::InvalidHierarchy, "Omega_" + std::to_string(l) + " cell " +
                                                     to_string(c, dim()) + " not inside Omega_" +
                                                     std::to_string(l - 1));
      }
    }
  }
}

SubdomainHierarchy SubdomainHierarchy::uniform(Domain domain, int degree) {
  return SubdomainHierarchy(domain, degree, {});
}

const LevelSet& SubdomainHierarchy::subdomain(int l) const {
  static const LevelSet empty;
  if (l == 0) return level0_;
  if (l < 0 || l >= depth()) return empty;
  return refined_[l - 1];
}

LevelSet SubdomainHierarchy::subdomain_cells(int l) const {
  if (l == 0) return level0_;
  return refine_to_level(subdomain(l), l - 1, l, dim());
}

bool SubdomainHierarchy::contains(int l, const CellId& cell) const {
  if (l == 0) return domain_.contains(cell);
  if (l >= depth()) return false;
  const int g = l - 1;
  const LevelSet& s = refined_[g];
  if (cell.level >= g) return s.contains(ancestor_or_self(cell, g).index);
  return all_descendants(cell, g, dim(), [&](const Index& k) { return s.contains(k); });
}

SubdomainHierarchy SubdomainHierarchy::with_additions(const std::vector<LevelSet>& added) const {
  std::vector<LevelSet> next = refined_;
  if (added.size() > next.size()) next.resize(added.size());
  for (std::size_t i = 0; i < added.size(); ++i) next[i].merge(added[i]);
  while (!next.empty() && next.back().empty()) next.pop_back();
  return SubdomainHierarchy(domain_, degree_, std::move(next));
}

std::vector<LevelSet> compute_active(const SubdomainHierarchy& h) {
  std::vector<LevelSet> active(h.depth());
  for (int l = 0; l < h.depth(); ++l) {
    active[l] = h.subdomain_cells(l).difference(h.subdomain(l + 1));
  }
  return active;
}

LevelSet compute_omega(const SubdomainHierarchy& h, int l) {
  if (l == 0) return h.subdomain(0);
  LevelSet out;
  const LevelSet& stored = h.subdomain(l);
  for (const auto& k : h.subdomain_cells(l)) {
    const CellId q{l, k};
    bool inside = true;
    for (const auto& e : support_extension(q, h.degree(), h.domain())) {
      if (!stored.contains(parent(CellId{l, e}).index)) {
        inside = false;
        break;
      }
    }
    if (inside) out.insert(k);
  }
  return out;
}

LevelSet omega_of_set(const LevelSet& cells, int level, int p, const Domain& domain) {
  LevelSet out;
  for (const auto& k : cells) {
    const CellId q{level, k};
    if (support_extension(q, p, domain).is_subset_of(cells)) out.insert(k);
  }
  return out;
}

HierarchicalMesh::HierarchicalMesh(SubdomainHierarchy hierarchy) : hierarchy_(std::move(hierarchy)) {
  active_ = compute_active(hierarchy_);
  omega_.resize(hierarchy_.depth());
  for (int l = 0; l < hierarchy_.depth(); ++l) omega_[l] = compute_omega(hierarchy_, l);
}

const LevelSet& HierarchicalMesh::active(int l) const {
  static const LevelSet empty;
  if (l < 0 || l >= depth()) return empty;
  return active_[l];
}

const LevelSet& HierarchicalMesh::omega(int l) const {
  static const LevelSet empty;
  if (l < 0 || l >= depth()) return empty;
  return omega_[l];
}

bool HierarchicalMesh::is_active(const CellId& cell) const { return active(cell.level).contains(cell.index); }

std::size_t HierarchicalMesh::num_active() const {
  std::size_t n = 0;
  for (const auto& a : active_) n += a.size();
  return n;
}

std::vector<CellId> HierarchicalMesh::active_cells() const {
  std::vector<CellId> out;
  out.reserve(num_active());
  for (int l = 0; l < depth(); ++l) {
    for (const auto& k : active_[l]) out.push_back({l, k});
  }
  return out;
}

bool HierarchicalMesh::in_omega(int l, const CellId& cell) const {
  if (l < 0 || l >= depth()) return false;
  const LevelSet& w = omega_[l];
  if (cell.level >= l) return w.contains(ancestor_or_self(cell, l).index);
  return all_descendants(cell, l, dim(), [&](const Index& k) { return w.contains(k); });
}

std::vector<CellId> HierarchicalMesh::active_cover(const CellId& cell) const {
  for (int j = std::min(cell.level, depth() - 1); j >= 0; --j) {
    const CellId a = j == cell.level ? cell : parent(cell, j);
    if (is_active(a)) return {cell};
  }
  if (!domain().contains(cell)) throw Error(ErrorCode::CellOutsideDomain, to_string(cell, dim()));
  std::vector<CellId> out;
  for (const auto& k : children(cell, dim())) {
    auto sub = active_cover({cell.level + 1, k});
    out.insert(out.end(), sub.begin(), sub.end());
  }
  return out;
}

CellId HierarchicalMesh::locate(const std::array<double, kMaxDim>& x) const {
  for (int l = depth() - 1; l >= 0; --l) {
    const int n = domain().cells_per_axis(l);
    CellId c{l, {}};
    for (int i = 0; i < dim(); ++i) {
      c.index[i] = std::clamp(static_cast<int>(std::floor(x[i] * n)), 0, n - 1);
    }
    if (active_[l].contains(c.index)) return c;
  }
  throw Error(ErrorCode::CellOutsideDomain, "point not covered by active cells");
}

AdmissibilityReport is_weakly_admissible(const HierarchicalMesh& mesh) {
  for (int l = 1; l < mesh.depth(); ++l) {
    for (const auto& k : mesh.omega(l)) {
      const CellId q{l, k};
      if (!mesh.omega(l - 1).contains(parent(q).index)) return {false, l, q};
    }
  }
  return {};
}

AdmissibilityReport is_strictly_admissible(const HierarchicalMesh& mesh, int m) {
  if (m < 2) throw Error(ErrorCode::InvalidArgument, "admissibility class must be >= 2");
  const auto& h = mesh.hierarchy();
  for (int l = m; l < mesh.depth(); ++l) {
    const int target = l - m + 1;
    for (const auto& k : h.subdomain(l)) {
      const CellId c{l - 1, k};
      if (!mesh.omega(target).contains(ancestor_or_self(c, target).index)) return {false, l, c};
    }
  }
  return {};
}

LevelSet clustered_reconstruction(const HierarchicalMesh& mesh, int l) {
  LevelSet out;
  for (const auto& k : mesh.omega(l)) {
    out.merge(neighborhood_in_domain(CellId{l, k}, mesh.degree(), mesh.domain()));
  }
  return out;
}

bool is_clustered(const HierarchicalMesh& mesh) {
  for (int l = 1; l < mesh.depth(); ++l) {
    if (!(clustered_reconstruction(mesh, l) == mesh.hierarchy().subdomain(l))) return false;
  }
  return true;
}

bool is_clustered(const SubdomainHierarchy& h) { return is_clustered(HierarchicalMesh(h)); }

AdmissibilityReport characterization_first(const HierarchicalMesh& mesh) {
  const auto& h = mesh.hierarchy();
  // For l = 1 the condition reads N ∩ Omega_0 ⊂ Omega_0 and always holds.
  for (int l = 2; l < mesh.depth(); ++l) {
    for (const auto& k : mesh.omega(l)) {
      const CellId q{l, k};
      const CellId pq = parent(q);
      for (const auto& c : neighborhood_in_domain(pq, h.degree(), h.domain())) {
        if (!h.subdomain(l - 1).contains(c)) return {false, l, q};
      }
    }
  }
  return {};
}

AdmissibilityReport characterization_second(const HierarchicalMesh& mesh) {
  if (!is_clustered(mesh)) {
    throw Error(ErrorCode::NotClustered, "second characterization needs a clustered hierarchy");
  }
  const auto& h = mesh.hierarchy();
  for (int l = 2; l < mesh.depth(); ++l) {
    for (const auto& k : h.subdomain_cells(l)) {
      const CellId q{l, k};
      for (const auto& c : neighborhood_in_domain(q, h.degree(), h.domain())) {
        if (!h.subdomain(l - 1).contains(parent(CellId{l - 1, c}).index)) return {false, l, q};
      }
    }
  }
  return {};
}

bool neighborhood_inside_subdomain(const HierarchicalMesh& mesh, const CellId& cell) {
  const auto& h = mesh.hierarchy();
  const LevelSet& stored = h.subdomain(cell.level);
  for (const auto& c : neighborhood_in_domain(cell, h.degree(), h.domain())) {
    if (!stored.contains(c)) return false;
  }
  return true;
}

bool characterization_omega(const HierarchicalMesh& mesh, const CellId& cell) {
  if (cell.level == 0) return mesh.omega(0).contains(cell.index) == mesh.domain().contains(cell);
  const bool by_definition = mesh.omega(cell.level).contains(cell.index);
  return by_definition == neighborhood_inside_subdomain(mesh, cell);
}

int approximation_power(const HierarchicalMesh& mesh, const CellId& cell) {
  if (!mesh.hierarchy().contains(cell.level, cell)) {
    throw Error(ErrorCode::CellNotInSubdomain, to_string(cell, mesh.dim()));
  }
  for (int k = mesh.depth() - 1; k > 0; --k) {
    if (mesh.in_omega(k, cell)) return k;
  }
  return 0;
}

}  // namespace wahm
