#pragma once

#include <array>
#include <vector>

namespace wahm {

inline constexpr int kMaxDegree = 6;

/// r-th derivative of the cardinal B-spline M_p (knots 0, 1, ..., p+1) at x.
/// Half-open support [0, p+1); zero outside.
double cardinal_bspline(int p, double x, int r = 0);

/// Derivative table of the p+1 cardinal pieces meeting on one unit cell.
///
/// value(r, i) is the r-th derivative of M_p at t + i, i = 0..p, using the polynomial piece of
/// [i, i+1] so that t may sit on either end of [0, 1]. An anchor k seen from cell c uses i = c - k.
class CellPieces {
 public:
  CellPieces(int p, double t, int max_derivative);

  double value(int r, int i) const { return table_[r][i]; }
  int degree() const { return p_; }

 private:
  int p_;
  std::array<std::array<double, kMaxDegree + 1>, kMaxDegree + 1> table_{};
};

/// Two-scale coefficients: M_p(x) = sum_j c_j M_p(2x - j), j = 0..p+1, c_j = 2^-p binom(p+1, j).
std::vector<double> two_scale_coefficients(int p);

}  // namespace wahm
