#include "doctest.h"

#include <random>

#include "wahm/error.hpp"
#include "wahm/mesh.hpp"

using namespace wahm;

namespace {

LevelSet box(int dim, Index lo, Index hi) {
  LevelSet s;
  for_each_in_box(dim, lo, hi, [&](const Index& k) { s.insert(k); });
  return s;
}

}  // namespace

TEST_CASE("parent by repeated halving") {
  CHECK(parent({2, {3, 5, 0}}, 1) == CellId{1, {1, 2, 0}});
  CHECK(parent({3, {0, 0, 0}}, 0) == CellId{0, {0, 0, 0}});
  CHECK(parent({4, {13, 6, 0}}, 2) == CellId{2, {3, 1, 0}});
  CHECK(parent({3, {-1, -5, 0}}, 2) == CellId{2, {-1, -3, 0}});
  CHECK_THROWS_AS(parent({1, {0, 0, 0}}, 1), Error);
}

TEST_CASE("children") {
  CHECK(children({1, {1, 2, 0}}, 2) == LevelSet{{2, 4, 0}, {3, 4, 0}, {2, 5, 0}, {3, 5, 0}});
  CHECK(children({0, {0, 0, 0}}, 2, 1) == LevelSet{{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {3, 0, 0}});
  CHECK(children({5, {7, 9, 0}}, 2).size() == 4);
}

TEST_CASE("support extension") {
  CHECK(support_extension_inf({3, {4, 0, 0}}, 1, 1) == LevelSet{{3, 0, 0}, {4, 0, 0}, {5, 0, 0}});
  CHECK(support_extension_inf({2, {1, 1, 0}}, 1, 2) == box(2, {0, 0, 0}, {2, 2, 0}));
  const Domain d2(2, 8);
  CHECK(support_extension({3, {30, 30, 0}}, 3, d2).size() == 49);
  CHECK(support_extension({3, {0, 0, 0}}, 1, d2) == box(2, {0, 0, 0}, {1, 1, 0}));
  CHECK(support_extension({3, {0, 4, 0}}, 1, d2).size() == 6);
  CHECK_THROWS_AS(support_extension({0, {8, 0, 0}}, 1, d2), Error);
}

TEST_CASE("neighborhood") {
  CHECK(neighborhood({3, {4, 0, 0}}, 1, 1) == LevelSet{{1, 0, 0}, {2, 0, 0}});
  CHECK(neighborhood({3, {20, 21, 0}}, 3, 2).size() == 16);
  CHECK_THROWS_AS(neighborhood({0, {0, 0, 0}}, 1, 2), Error);
}

TEST_CASE("core of a support") {
  const LevelSet c{{1, 0, 0}, {2, 0, 0}};
  CHECK(core(c, 1, 1) == LevelSet{{3, 0, 0}, {4, 0, 0}});
  // Brute force: the level-3 cells whose neighborhood equals c.
  LevelSet brute;
  for (int k = -4; k < 16; ++k) {
    if (neighborhood({3, {k, 0, 0}}, 1, 1) == c) brute.insert({k, 0, 0});
  }
  CHECK(brute == core(c, 1, 1));
  CHECK_THROWS_AS(core(LevelSet{{0, 0, 0}, {2, 0, 0}}, 1, 1), Error);
}

TEST_CASE("parent extension identity") {
  CHECK(parent_extension_identity({3, {4, 0, 0}}, 1, 1));
  CHECK(parent_extension_identity({4, {0, 1, 0}}, 2, 2));
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> k(0, 63);
  for (int i = 0; i < 50; ++i) CHECK(parent_extension_identity({6, {k(rng), k(rng), 0}}, 3, 2));
}

TEST_CASE("p-forms") {
  const Domain d(2, 8);
  // Bicubic level-0 support poking out of the lower-left corner: its core lies outside.
  CHECK_FALSE(is_p_form(box(2, {-3, -3, 0}, {0, 0, 0}), 0, 3, d));
  // Shifted by two cells the core (level-1 cells 1..2) is inside the domain.
  CHECK(is_p_form(box(2, {-1, -1, 0}, {2, 2, 0}), 0, 3, d));
  CHECK(is_p_form(box(2, {2, 3, 0}, {5, 6, 0}), 0, 3, d));
}

TEST_CASE("level conversion") {
  const LevelSet s{{1, 1, 0}};
  CHECK(refine_to_level(s, 0, 2, 2).size() == 16);
  CHECK(coarsen_to_level(refine_to_level(s, 0, 2, 2), 2, 0, 2) == s);
}
