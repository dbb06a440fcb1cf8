#include "doctest.h"

#include "wahm/error.hpp"
#include "wahm/hierarchy.hpp"
#include "wahm/mesh.hpp"

using namespace wahm;

namespace {

LevelSet box(int dim, Index lo, Index hi) {
  LevelSet s;
  for_each_in_box(dim, lo, hi, [&](const Index& k) { s.insert(k); });
  return s;
}

// 4x4 coarse grid, Omega_1 = lower-left 3x3 block of level-0 cells.
SubdomainHierarchy three_by_three(int p) {
  return SubdomainHierarchy(Domain(2, 4), p, {box(2, {0, 0, 0}, {2, 2, 0})});
}

// d = 1, 8 coarse cells, Omega_1 = level-0 cells {0, 1, 2}.
HierarchicalMesh line_case() {
  return HierarchicalMesh(SubdomainHierarchy(Domain(1, 8), 1, {LevelSet{{0, 0, 0}, {1, 0, 0}, {2, 0, 0}}}));
}

}  // namespace

TEST_CASE("construction validates nesting") {
  const Domain d(2, 4);
  CHECK_NOTHROW(SubdomainHierarchy(d, 2, {LevelSet{{0, 0, 0}}, LevelSet{{1, 1, 0}}}));
  CHECK_THROWS_AS(SubdomainHierarchy(d, 2, {LevelSet{{0, 0, 0}}, LevelSet{{2, 2, 0}}}), Error);
  CHECK_THROWS_AS(SubdomainHierarchy(d, 2, {LevelSet{}, LevelSet{{0, 0, 0}}}), Error);
  CHECK_THROWS_AS(SubdomainHierarchy(d, 2, {LevelSet{{4, 0, 0}}}), Error);
}

TEST_CASE("active cells") {
  const HierarchicalMesh uniform(SubdomainHierarchy::uniform(Domain(2, 8), 3));
  CHECK(uniform.num_active() == 64);
  const HierarchicalMesh m(three_by_three(2));
  CHECK(m.active(0).size() == 7);
  CHECK(m.active(1).size() == 36);
  CHECK(m.locate({0.1, 0.1, 0}) == CellId{1, {0, 0, 0}});
  CHECK(m.locate({0.9, 0.1, 0}) == CellId{0, {3, 0, 0}});
  CHECK(m.locate({1.0, 1.0, 0}) == CellId{0, {3, 3, 0}});
}

TEST_CASE("omega") {
  const auto m = line_case();
  CHECK(m.omega(0).size() == 8);
  CHECK(m.omega(1) == LevelSet{{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {3, 0, 0}, {4, 0, 0}});
  CHECK(characterization_omega(m, {1, {5, 0, 0}}));
  CHECK_FALSE(neighborhood_inside_subdomain(m, {1, {5, 0, 0}}));
  for (int k = 0; k < 6; ++k) CHECK(characterization_omega(m, {1, {k, 0, 0}}));
}

TEST_CASE("omega of a set") {
  const Domain d(2, 8);
  CHECK(omega_of_set(full_grid(d, 1), 1, 3, d) == full_grid(d, 1));
  CHECK(omega_of_set(LevelSet{{3, 3, 0}}, 1, 1, d).empty());
  const CellId q{2, {12, 13, 0}};
  const LevelSet n = refine_to_level(neighborhood_in_domain(q, 3, d), 1, 2, 2);
  CHECK(omega_of_set(n, 2, 3, d).size() == 4);
  CHECK(omega_of_set(n, 2, 3, d).contains(q.index));
}

TEST_CASE("approximation power") {
  const auto m = line_case();
  CHECK(approximation_power(m, {1, {5, 0, 0}}) == 0);
  CHECK(approximation_power(m, {1, {2, 0, 0}}) == 1);
  CHECK(approximation_power(m, {0, {6, 0, 0}}) == 0);
  CHECK_THROWS_AS(approximation_power(m, {1, {7, 0, 0}}), Error);
  const HierarchicalMesh u(SubdomainHierarchy::uniform(Domain(2, 8), 3));
  CHECK(approximation_power(u, {0, {3, 4, 0}}) == 0);
}

TEST_CASE("clustered hierarchies") {
  CHECK(is_clustered(three_by_three(2)));
  CHECK(is_clustered(SubdomainHierarchy::uniform(Domain(2, 4), 2)));
  // A lone level-0 cell carries no cell of omega_1: not a union of neighborhoods.
  CHECK_FALSE(is_clustered(SubdomainHierarchy(Domain(2, 4), 2, {LevelSet{{1, 1, 0}}})));
}

TEST_CASE("admissibility") {
  const HierarchicalMesh uniform(SubdomainHierarchy::uniform(Domain(2, 4), 2));
  CHECK(is_weakly_admissible(uniform));
  CHECK(is_strictly_admissible(uniform, 2));
  CHECK(is_strictly_admissible(uniform, 3));
  CHECK_THROWS_AS(is_strictly_admissible(uniform, 1), Error);

  // Omega_2 reaches the corner of Omega_1 whose cells are outside omega_1.
  const Domain d(2, 8);
  const SubdomainHierarchy h(d, 1, {box(2, {0, 0, 0}, {3, 3, 0}), box(2, {6, 6, 0}, {7, 7, 0})});
  const HierarchicalMesh m(h);
  const auto strict = is_strictly_admissible(m, 2);
  CHECK_FALSE(strict.ok);
  CHECK(strict.level == 2);
  const auto weak = is_weakly_admissible(m);
  const auto first = characterization_first(m);
  CHECK(weak.ok == first.ok);
}
