#include "wahm/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "wahm/error.hpp"

namespace wahm {

GaussRule gauss_legendre(int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "quadrature order must be >= 1");
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  // Newton iteration on P_n from the Chebyshev-like initial guess, then map [-1,1] -> [0,1].
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = 0.5 * (1.0 - x);
    rule.nodes[n - 1 - i] = 0.5 * (1.0 + x);
    rule.weights[i] = 0.5 * w;
    rule.weights[n - 1 - i] = 0.5 * w;
  }
  return rule;
}

CellQuadrature cell_quadrature(const Domain& domain, const CellId& cell, const GaussRule& rule) {
  const int d = domain.dim;
  const int n = static_cast<int>(rule.nodes.size());
  const double h = domain.cell_size(cell.level);
  double volume = 1.0;
  for (int i = 0; i < d; ++i) volume *= h;

  CellQuadrature q;
  Index lo{}, hi{};
  for (int i = 0; i < d; ++i) hi[i] = n - 1;
  for_each_in_box(d, lo, hi, [&](const Index& m) {
    std::array<double, kMaxDim> x{}, t{};
    double w = volume;
    for (int i = 0; i < d; ++i) {
      t[i] = rule.nodes[m[i]];
      x[i] = (cell.index[i] + t[i]) * h;
      w *= rule.weights[m[i]];
    }
    q.points.push_back(x);
    q.local.push_back(t);
    q.weights.push_back(w);
  });
  return q;
}

}  // namespace wahm
