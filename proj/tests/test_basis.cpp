#include "doctest.h"

#include <cmath>
#include <random>

#include "wahm/basis.hpp"
#include "wahm/error.hpp"
#include "wahm/quadrature.hpp"

using namespace wahm;

namespace {

// Cox-de Boor on the knots 0..p+1, straight from the recurrence.
double oracle_bspline(int p, int s, double x) {
  if (p == 0) return (x >= s && x < s + 1) ? 1.0 : 0.0;
  return ((x - s) * oracle_bspline(p - 1, s, x) + (s + p + 1 - x) * oracle_bspline(p - 1, s + 1, x)) / p;
}

LevelSet box(int dim, Index lo, Index hi) {
  LevelSet s;
  for_each_in_box(dim, lo, hi, [&](const Index& k) { s.insert(k); });
  return s;
}

}  // namespace

TEST_CASE("cardinal B-spline values") {
  CHECK(cardinal_bspline(1, 1.0) == doctest::Approx(1.0));
  CHECK(cardinal_bspline(3, 2.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(cardinal_bspline(2, -0.1) == 0.0);
  CHECK(cardinal_bspline(2, 3.0) == 0.0);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-0.5, 5.5);
  for (int p = 1; p <= 4; ++p) {
    for (int i = 0; i < 200; ++i) {
      const double x = u(rng);
      CHECK(cardinal_bspline(p, x) == doctest::Approx(oracle_bspline(p, 0, x)).epsilon(1e-13));
    }
  }
  CHECK_THROWS_AS(cardinal_bspline(2, 1.0, 3), Error);
}

TEST_CASE("cardinal B-spline integrates to one") {
  for (int p = 1; p <= 4; ++p) {
    const auto rule = gauss_legendre(p + 1);
    double s = 0.0;
    for (int j = 0; j <= p; ++j) {
      for (std::size_t q = 0; q < rule.nodes.size(); ++q) s += rule.weights[q] * cardinal_bspline(p, j + rule.nodes[q]);
    }
    CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("derivatives match finite differences") {
  const double h = 1e-5;
  for (int p = 2; p <= 4; ++p) {
    for (double x : {0.3, 1.7, 2.25, 3.9}) {
      if (x > p + 1) continue;
      for (int r = 1; r <= 2; ++r) {
        const double fd = (cardinal_bspline(p, x + h, r - 1) - cardinal_bspline(p, x - h, r - 1)) / (2 * h);
        CHECK(cardinal_bspline(p, x, r) == doctest::Approx(fd).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("two-scale relation") {
  for (int p = 1; p <= 4; ++p) {
    const auto c = two_scale_coefficients(p);
    for (double x = -0.25; x < p + 1.5; x += 0.1) {
      double s = 0.0;
      for (int j = 0; j <= p + 1; ++j) s += c[j] * cardinal_bspline(p, 2 * x - j);
      CHECK(s == doctest::Approx(cardinal_bspline(p, x)).epsilon(1e-13));
    }
  }
}

TEST_CASE("Gauss-Legendre exactness") {
  for (int n = 1; n <= 6; ++n) {
    const auto r = gauss_legendre(n);
    for (int k = 0; k <= 2 * n - 1; ++k) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += r.weights[i] * std::pow(r.nodes[i], k);
      CHECK(s == doctest::Approx(1.0 / (k + 1)).epsilon(1e-14));
    }
  }
}

TEST_CASE("tensor B-splines") {
  const Domain d(2, 8);
  const int p = 3;
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    const Point x{u(rng), u(rng), 0};
    double s = 0.0;
    for (int a = -p; a < 16; ++a) {
      for (int b = -p; b < 16; ++b) s += eval_tensor_bspline({1, {a, b, 0}}, p, d, x);
    }
    CHECK(s == doctest::Approx(1.0).epsilon(1e-13));
    // Level-1 function at x equals the level-0 formula at 2x with derivatives scaled by 2^|alpha|.
    const Point half{x[0] / 2, x[1] / 2, 0};
    const double v1 = eval_tensor_bspline({1, {3, 4, 0}}, p, d, half, {1, 0, 0});
    const double v0 = eval_tensor_bspline({0, {3, 4, 0}}, p, d, x, {1, 0, 0});
    CHECK(v1 == doctest::Approx(2.0 * v0).epsilon(1e-12));
  }
  CHECK(eval_tensor_bspline({0, {5, 5, 0}}, p, d, {0.1, 0.1, 0}) == 0.0);
}

TEST_CASE("hierarchical basis sizes") {
  const HierarchicalMesh u(SubdomainHierarchy::uniform(Domain(2, 8), 3));
  CHECK(build_hb_basis(u)->size() == 121);
  const HierarchicalMesh m(SubdomainHierarchy(Domain(2, 4), 2, {box(2, {0, 0, 0}, {2, 2, 0})}));
  const auto b = build_hb_basis(m);
  CHECK(b->active(1).size() > 0);
  CHECK(b->active(0).size() + b->active(1).size() == b->size());
  for (std::size_t f = 1; f < b->size(); ++f) CHECK(b->anchor(static_cast<int>(f - 1)) < b->anchor(static_cast<int>(f)));
}

TEST_CASE("fields: partition of unity and finite differences") {
  const HierarchicalMesh u(SubdomainHierarchy::uniform(Domain(2, 4), 3));
  const auto b = build_hb_basis(u);
  SplineField one(b, std::vector<double>(b->size(), 1.0));
  SplineField zero(b, std::vector<double>(b->size(), 0.0));
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    const Point x{unit(rng), unit(rng), 0};
    CHECK(one.eval(x) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(zero.eval(x) == 0.0);
  }

  const HierarchicalMesh m(SubdomainHierarchy(Domain(2, 4), 3, {box(2, {0, 0, 0}, {2, 2, 0})}));
  const auto hb = build_hb_basis(m);
  std::vector<double> c(hb->size());
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  for (auto& v : c) v = coef(rng);
  const SplineField s(hb, c);
  const double h = 1e-5;
  for (int i = 0; i < 20; ++i) {
    const Point x{0.05 + 0.9 * unit(rng), 0.05 + 0.9 * unit(rng), 0};
    Point xp = x, xm = x;
    xp[0] += h;
    xm[0] -= h;
    const double fd = (s.eval(xp) - s.eval(xm)) / (2 * h);
    CHECK(s.eval(x, {1, 0, 0}) == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
  }
}

TEST_CASE("level coefficients convert to the hierarchical basis") {
  const Domain d(2, 4);
  const HierarchicalMesh coarse(SubdomainHierarchy::uniform(d, 2));
  const HierarchicalMesh fine(SubdomainHierarchy(d, 2, {box(2, {0, 0, 0}, {2, 2, 0})}));
  const auto bc = build_hb_basis(coarse);
  const auto bf = build_hb_basis(fine);
  std::vector<double> c(bc->size());
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  for (auto& v : c) v = coef(rng);
  const SplineField s(bc, c);
  const SplineField t(bf, to_hb_coefficients(*bf, level_coefficients(s)));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    const Point x{unit(rng), unit(rng), 0};
    CHECK(t.eval(x) == doctest::Approx(s.eval(x)).epsilon(1e-12));
  }
  LevelCoefficients outside(2);
  outside[1][{6, 6, 0}] = 1.0;
  CHECK_THROWS_AS(to_hb_coefficients(*bf, outside), Error);
}

TEST_CASE("basis on a cell") {
  const HierarchicalMesh m(SubdomainHierarchy(Domain(2, 4), 3, {box(2, {0, 0, 0}, {2, 2, 0})}));
  const auto b = build_hb_basis(m);
  const CellId cell{1, {2, 3, 0}};
  const std::vector<Point> pts{{0.3, 0.4, 0}, {0.26, 0.49, 0}};
  const auto v = eval_basis_on_cell(*b, cell, pts, 2);
  const std::size_t nf = v.num_functions();
  for (std::size_t q = 0; q < pts.size(); ++q) {
    double sum = 0.0;
    for (std::size_t f = 0; f < nf; ++f) {
      const auto& a = b->anchor(v.dofs[f]);
      CHECK(v.value[q * nf + f] == doctest::Approx(eval_on_cell(a, 3, b->domain(), cell, pts[q])));
      const double lap = eval_on_cell(a, 3, b->domain(), cell, pts[q], {2, 0, 0}) +
                         eval_on_cell(a, 3, b->domain(), cell, pts[q], {0, 2, 0});
      CHECK(v.laplacian[q * nf + f] == doctest::Approx(lap));
      sum += v.value[q * nf + f];
    }
    CHECK(sum > 0.0);
  }
}
