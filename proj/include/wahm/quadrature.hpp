#pragma once

#include <array>
#include <vector>

#include "wahm/cell.hpp"

namespace wahm {

/// Gauss-Legendre rule on [0, 1]; exact for polynomials of degree <= 2n - 1.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussRule gauss_legendre(int n);

/// Tensor Gauss-Legendre points of one cell, in physical coordinates.
struct CellQuadrature {
  std::vector<std::array<double, kMaxDim>> points;  ///< physical coordinates
  std::vector<std::array<double, kMaxDim>> local;   ///< reference coordinates in [0,1]^d
  std::vector<double> weights;                      ///< physical weights (include cell volume)
};

CellQuadrature cell_quadrature(const Domain& domain, const CellId& cell, const GaussRule& rule);

}  // namespace wahm
