#include "wahm/bspline.hpp"

#include <cmath>

#include "wahm/error.hpp"

namespace wahm {

namespace {

double binomial(int n, int k) {
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

}  // namespace

CellPieces::CellPieces(int p, double t, int max_derivative) : p_(p) {
  if (p < 0 || p > kMaxDegree) throw Error(ErrorCode::InvalidArgument, "unsupported degree");
  if (max_derivative > p) max_derivative = p;
  // levels[q][i] = M_q(t + i): the degree-q pieces on the cell, built by Cox-de Boor.
  std::array<std::array<double, kMaxDegree + 1>, kMaxDegree + 1> levels{};
  levels[0][0] = 1.0;
  for (int q = 1; q <= p; ++q) {
    for (int i = 0; i <= q; ++i) {
      const double left = i < q ? (t + i) * levels[q - 1][i] : 0.0;
      const double right = i > 0 ? (q + 1 - i - t) * levels[q - 1][i - 1] : 0.0;
      levels[q][i] = (left + right) / q;
    }
  }
  // D^r M_p(. + i) = sum_m (-1)^m binom(r, m) M_{p-r}(. + i - m).
  for (int r = 0; r <= max_derivative; ++r) {
    const int q = p - r;
    for (int i = 0; i <= p; ++i) {
      double s = 0.0;
      for (int m = 0; m <= r; ++m) {
        const int j = i - m;
        if (j < 0 || j > q) continue;
        s += ((m % 2) ? -1.0 : 1.0) * binomial(r, m) * levels[q][j];
      }
      table_[r][i] = s;
    }
  }
}

double cardinal_bspline(int p, double x, int r) {
  if (r < 0 || r > p) throw Error(ErrorCode::DerivativeOrderExceedsDegree, "0 <= r <= p required");
  const double j = std::floor(x);
  if (j < 0.0 || j > p) return 0.0;
  const int i = static_cast<int>(j);
  return CellPieces(p, x - j, r).value(r, i);
}

std::vector<double> two_scale_coefficients(int p) {
  std::vector<double> c(p + 2);
  const double scale = std::ldexp(1.0, -p);
  for (int j = 0; j <= p + 1; ++j) c[j] = scale * binomial(p + 1, j);
  return c;
}

}  // namespace wahm
