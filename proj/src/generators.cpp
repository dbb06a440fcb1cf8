#include "wahm/generators.hpp"

#include <algorithm>
#include <cmath>

#include "wahm/mesh.hpp"

namespace wahm {

namespace {

// Neighborhood of a level-l cell (l >= 1) fits inside Omega_{l-1}.
bool neighborhood_fits(const SubdomainHierarchy& h, const std::vector<LevelSet>& refined, const CellId& q, int p) {
  const int l = q.level;
  for (const auto& c : neighborhood_in_domain(q, p, h.domain())) {
    if (l - 1 == 0) continue;
    if (!refined[l - 2].contains(parent({l - 1, c}).index)) return false;
  }
  return true;
}

}  // namespace

SubdomainHierarchy random_clustered_hierarchy(const Domain& domain, int p, int max_depth, double density,
                                              Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const SubdomainHierarchy base = SubdomainHierarchy::uniform(domain, p);
  std::vector<LevelSet> refined;
  for (int l = 1; l < max_depth; ++l) {
    // Candidate seeds: level-l cells inside Omega_{l-1} with a fitting neighborhood.
    const LevelSet inside = l == 1 ? full_grid(domain, 1) : refine_to_level(refined[l - 2], l - 2, l, domain.dim);
    std::vector<Index> seeds;
    for (const auto& k : inside) {
      if (neighborhood_fits(base, refined, {l, k}, p)) seeds.push_back(k);
    }
    if (seeds.empty()) break;
    LevelSet omega;
    const double rate = density * (0.3 + 0.7 * u(rng));
    for (const auto& k : seeds) {
      if (u(rng) < rate) omega.merge(neighborhood_in_domain({l, k}, p, domain));
    }
    if (omega.empty()) {
      std::uniform_int_distribution<std::size_t> pick(0, seeds.size() - 1);
      omega = neighborhood_in_domain({l, seeds[pick(rng)]}, p, domain);
    }
    refined.push_back(std::move(omega));
  }
  return SubdomainHierarchy(domain, p, std::move(refined));
}

SubdomainHierarchy random_hierarchy(const Domain& domain, int p, int max_depth, double density, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<LevelSet> refined;
  for (int l = 1; l < max_depth; ++l) {
    const LevelSet parent_cells = l == 1 ? full_grid(domain, 0) : refine_to_level(refined[l - 2], l - 2, l - 1, domain.dim);
    std::vector<Index> cells(parent_cells.begin(), parent_cells.end());
    LevelSet omega;
    const double rate = density * (0.2 + 0.8 * u(rng));
    for (const auto& k : cells) {
      if (u(rng) < rate) omega.insert(k);
    }
    // Grow a few seeds into small blobs so that some omega_l is nonempty.
    std::uniform_int_distribution<std::size_t> pick(0, cells.size() - 1);
    const int blobs = 1 + static_cast<int>(u(rng) * 2);
    for (int b = 0; b < blobs; ++b) {
      const Index c = cells[pick(rng)];
      const int r = static_cast<int>(u(rng) * 3);
      Index lo{}, hi{};
      for (int i = 0; i < domain.dim; ++i) {
        lo[i] = c[i] - r;
        hi[i] = c[i] + r;
      }
      for_each_in_box(domain.dim, lo, hi, [&](const Index& k) {
        if (parent_cells.contains(k)) omega.insert(k);
      });
    }
    refined.push_back(std::move(omega));
  }
  return SubdomainHierarchy(domain, p, std::move(refined));
}

MarkSet random_marks(const HierarchicalMesh& mesh, std::size_t count, Rng& rng) {
  std::vector<CellId> cells = mesh.active_cells();
  std::shuffle(cells.begin(), cells.end(), rng);
  MarkSet out;
  count = std::clamp<std::size_t>(count, 1, cells.size());
  for (std::size_t i = 0; i < count; ++i) out.insert(cells[i]);
  return out;
}

HierarchicalMesh random_wahm(const Domain& domain, int p, int steps, std::size_t marks_per_step, Rng& rng) {
  HierarchicalMesh mesh(SubdomainHierarchy::uniform(domain, p));
  for (int s = 0; s < steps; ++s) {
    const MarkSet marks = random_marks(mesh, marks_per_step, rng);
    mesh = refine_hierarchical_mesh(mesh, adaptive_refinement_marks(mesh, marks));
  }
  return mesh;
}

SubdomainHierarchy graded_diagonal_hierarchy(const Domain& domain, int p, int depth, double band) {
  if (depth <= 1) return SubdomainHierarchy::uniform(domain, p);
  const int top = depth - 1;
  const double h = domain.cell_size(top);
  std::vector<LevelSet> refined(top);
  for (const auto& k : full_grid(domain, top)) {
    const Point x = midpoint(domain, {top, k});
    if (std::abs(x[0] - x[1]) / std::sqrt(2.0) <= band * h) {
      refined[top - 1].merge(neighborhood_in_domain({top, k}, p, domain));
    }
  }
  for (int l = top - 1; l >= 1; --l) {
    for (const auto& k : refined[l]) refined[l - 1].merge(neighborhood_in_domain({l, k}, p, domain));
  }
  return SubdomainHierarchy(domain, p, std::move(refined));
}

}  // namespace wahm
