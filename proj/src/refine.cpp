#include "wahm/refine.hpp"

#include <cmath>
#include <functional>
#include <sstream>

#include "wahm/error.hpp"
#include "wahm/mesh.hpp"

namespace wahm {

namespace {

CellId ancestor_or_self(const CellId& cell, int level) {
  return cell.level == level ? cell : parent(cell, level);
}

void require_active(const HierarchicalMesh& mesh, const MarkSet& marks) {
  for (const auto& c : marks.cells()) {
    if (!mesh.is_active(c)) throw Error(ErrorCode::MarkedCellNotActive, to_string(c, mesh.dim()));
  }
}

void require_clustered_wahm(const HierarchicalMesh& mesh) {
  const auto weak = is_weakly_admissible(mesh);
  if (!weak) {
    throw Error(ErrorCode::NotWeaklyAdmissible,
                "omega_l not inside omega_{l-1} at " + to_string(*weak.witness, mesh.dim()));
  }
  if (!is_clustered(mesh)) throw Error(ErrorCode::NotClustered, "refinement needs a clustered hierarchy");
}

}  // namespace

SplitMarks update_marked_elements(const HierarchicalMesh& mesh, const MarkSet& marks) {
  require_active(mesh, marks);
  std::vector<LevelSet> work(mesh.depth());
  for (int l = 0; l < marks.levels(); ++l) work[l] = marks.level(l);
  SplitMarks out;
  for (int l = mesh.depth() - 1; l >= 1; --l) {
    for (const auto& k : work[l]) {
      const CellId q{l, k};
      if (mesh.omega(l).contains(k)) {
        out.optimal.insert(q);
      } else if (mesh.omega(l - 1).contains(parent(q).index)) {
        out.suboptimal.insert(q);
      } else {
        work[l - 1].insert(parent(q).index);
      }
    }
  }
  for (const auto& k : work[0]) out.optimal.insert({0, k});
  return out;
}

MarkSet adaptive_refinement_marks(const HierarchicalMesh& mesh, const MarkSet& marks) {
  require_clustered_wahm(mesh);
  const SplitMarks split = update_marked_elements(mesh, marks);
  const int n = mesh.depth();
  const int p = mesh.degree();
  const Domain& domain = mesh.domain();
  const auto& h = mesh.hierarchy();

  MarkSet out;
  LevelSet omega_star_above;  // omega*_{l+1}, level-(l+1) cells
  for (int l = n; l >= 1; --l) {
    LevelSet w;
    for (const auto& k : split.optimal.level(l - 1)) w.merge(children({l - 1, k}, mesh.dim()));
    if (l < n) {
      w.merge(split.suboptimal.level(l));
      for (const auto& k : omega_star_above) {
        const Index pk = parent({l + 1, k}).index;
        if (!mesh.omega(l).contains(pk)) w.insert(pk);
      }
    }
    LevelSet added;
    for (const auto& k : w) added.merge(neighborhood_in_domain({l, k}, p, domain));
    for (const auto& k : added) {
      if (mesh.active(l - 1).contains(k)) out.insert({l - 1, k});
    }
    const LevelSet omega_star_l = set_union(h.subdomain(l), added);
    omega_star_above = omega_of_set(refine_to_level(omega_star_l, l - 1, l, mesh.dim()), l, p, domain);
  }
  return out;
}

void mark_recursive(const HierarchicalMesh& mesh, const CellId& cell, MarkSet& out, CellSet& visited) {
  if (cell.level == 0) throw Error(ErrorCode::LevelZeroCell, "mark_recursive needs a cell of level >= 1");
  if (!visited.insert(cell)) return;
  const int l = cell.level;
  const int p = mesh.degree();
  const LevelSet n = neighborhood_in_domain(cell, p, mesh.domain());
  const LevelSet fine = refine_to_level(n, l - 1, l, mesh.dim());
  for (const auto& k : omega_of_set(fine, l, p, mesh.domain())) {
    const CellId up = parent({l, k});
    if (!mesh.omega(l - 1).contains(up.index)) mark_recursive(mesh, up, out, visited);
  }
  for (const auto& k : n) {
    if (mesh.active(l - 1).contains(k)) out.insert({l - 1, k});
  }
}

MarkSet mark_recursive(const HierarchicalMesh& mesh, const CellId& cell) {
  MarkSet out;
  CellSet visited;
  mark_recursive(mesh, cell, out, visited);
  return out;
}

MarkSet weakly_admissible_marking_recursive(const HierarchicalMesh& mesh, const MarkSet& marks) {
  require_clustered_wahm(mesh);
  const SplitMarks split = update_marked_elements(mesh, marks);
  MarkSet out;
  CellSet visited;
  for (int l = mesh.depth(); l >= 1; --l) {
    for (const auto& k : split.optimal.level(l - 1)) {
      for (const auto& c : children({l - 1, k}, mesh.dim())) mark_recursive(mesh, {l, c}, out, visited);
    }
    if (l < mesh.depth()) {
      for (const auto& k : split.suboptimal.level(l)) mark_recursive(mesh, {l, k}, out, visited);
    }
  }
  return out;
}

HierarchicalMesh refine_hierarchical_mesh(const HierarchicalMesh& mesh, const MarkSet& marks) {
  require_active(mesh, marks);
  std::vector<LevelSet> added(marks.levels());
  for (int l = 0; l < marks.levels(); ++l) added[l] = marks.level(l);
  return HierarchicalMesh(mesh.hierarchy().with_additions(added));
}

MarkSet sa_marking(const HierarchicalMesh& mesh, const MarkSet& marks, int m) {
  const auto strict = is_strictly_admissible(mesh, m);
  if (!strict) {
    throw Error(ErrorCode::NotStrictlyAdmissible,
                "Omega_l not inside omega_{l-m+1} at " + to_string(*strict.witness, mesh.dim()));
  }
  require_active(mesh, marks);
  const int p = mesh.degree();
  MarkSet out;
  std::function<void(const CellId&)> refine = [&](const CellId& q) {
    if (!out.insert(q)) return;
    const int j = q.level + 2 - m;
    if (j <= 0) return;
    const CellId anchor = ancestor_or_self(q, j);
    for (const auto& k : neighborhood_in_domain(anchor, p, mesh.domain())) {
      if (mesh.active(j - 1).contains(k)) refine({j - 1, k});
    }
  };
  for (const auto& c : marks.cells()) refine(c);
  return out;
}

ComplexityConstants complexity_constants(int d, int p) {
  ComplexityConstants c;
  c.c_tilde = 1.5 * std::sqrt(static_cast<double>(d)) * (2 * p + 1);
  c.c_bound = 4.0 * std::pow(4.0 * c.c_tilde + 1.0, d);
  return c;
}

ComplexityLedger::ComplexityLedger(int d, int p) : constants_(complexity_constants(d, p)) {}

void ComplexityLedger::record(std::size_t marked, std::size_t cells_before, std::size_t cells_after) {
  rows_.push_back({static_cast<int>(rows_.size()), marked, cells_before, cells_after});
}

std::string ComplexityLedger::to_csv() const {
  std::ostringstream os;
  os << "iteration,marked,cells_before,cells_after,bound_ratio\n";
  std::size_t marked = 0;
  for (const auto& r : rows_) {
    marked += r.marked;
    const double growth = static_cast<double>(r.cells_after) - static_cast<double>(rows_.front().cells_before);
    const double ratio = marked ? growth / static_cast<double>(marked) / constants_.c_bound : 0.0;
    os << r.iteration << ',' << r.marked << ',' << r.cells_before << ',' << r.cells_after << ',' << ratio << '\n';
  }
  return os.str();
}

ComplexityReport complexity_report(const ComplexityLedger& ledger) {
  ComplexityReport r;
  r.bound = ledger.constants().c_bound;
  if (ledger.rows().empty()) return r;
  const auto& first = ledger.rows().front();
  const auto& last = ledger.rows().back();
  r.growth = last.cells_after >= first.cells_before ? last.cells_after - first.cells_before : 0;
  for (const auto& row : ledger.rows()) r.total_marked += row.marked;
  if (r.total_marked > 0) r.ratio = static_cast<double>(r.growth) / static_cast<double>(r.total_marked);
  r.holds = static_cast<double>(r.growth) <= r.bound * static_cast<double>(r.total_marked);
  return r;
}

DistanceTrace trace_distance_bound(const HierarchicalMesh& mesh, const MarkSet& marks) {
  const SplitMarks split = update_marked_elements(mesh, marks);
  const double c_tilde = complexity_constants(mesh.dim(), mesh.degree()).c_tilde;
  DistanceTrace trace;
  auto check = [&](const CellId& trigger, const CellId& origin) {
    for (const auto& q0 : mark_recursive(mesh, trigger).cells()) {
      for (const auto& k : children(q0, mesh.dim())) {
        const CellId fresh{q0.level + 1, k};
        const double bound = c_tilde * mesh.domain().cell_size(fresh.level);
        const double ratio = midpoint_distance(mesh.domain(), fresh, origin) / bound;
        ++trace.checked;
        trace.max_ratio = std::max(trace.max_ratio, ratio);
        if (ratio > 1.0) ++trace.violations;
      }
    }
  };
  for (int l = 1; l <= mesh.depth(); ++l) {
    for (const auto& k : split.optimal.level(l - 1)) {
      const CellId q{l - 1, k};
      for (const auto& c : children(q, mesh.dim())) check({l, c}, q);
    }
    if (l < mesh.depth()) {
      for (const auto& k : split.suboptimal.level(l)) check({l, k}, {l, k});
    }
  }
  return trace;
}

}  // namespace wahm
