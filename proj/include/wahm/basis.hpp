#pragma once

#include <map>
#include <memory>
#include <vector>

#include "json.hpp"

#include "wahm/bspline.hpp"
#include "wahm/cell.hpp"
#include "wahm/hierarchy.hpp"

namespace wahm {

/// Tensor cardinal B-spline of level `level` anchored at `index`:
/// x -> prod_i M_p(N_level x_i - index_i), support [index, index + p + 1] in level cells.
struct SplineAnchor {
  int level = 0;
  Index index{};
  auto operator<=>(const SplineAnchor&) const = default;
  bool operator==(const SplineAnchor&) const = default;
};

/// Level cells in the support of the anchor, clipped to the domain.
LevelSet support_cells(const SplineAnchor& a, int p, const Domain& domain);

/// Whether the support meets the domain: index_i in [-p, N_level - 1].
bool is_relevant(const SplineAnchor& a, int p, const Domain& domain);

/// D^alpha of the anchor's function at x (chain rule included).
double eval_tensor_bspline(const SplineAnchor& a, int p, const Domain& domain, const Point& x,
                           const Index& alpha = {});

/// Same, using the polynomial piece of `cell` (level >= a.level) for x on the cell boundary.
double eval_on_cell(const SplineAnchor& a, int p, const Domain& domain, const CellId& cell,
                    const Point& x, const Index& alpha = {});

/// Hierarchical B-spline basis of a mesh.
///
/// Anchor (l, k) is active iff its clipped support lies in Omega_l but not in Omega_{l+1}.
/// Dofs are numbered level-major, lexicographic in k inside a level.
class HBBasis {
 public:
  explicit HBBasis(HierarchicalMesh mesh);

  const HierarchicalMesh& mesh() const { return mesh_; }
  const Domain& domain() const { return mesh_.domain(); }
  int dim() const { return mesh_.dim(); }
  int degree() const { return mesh_.degree(); }
  int depth() const { return mesh_.depth(); }

  std::size_t size() const { return anchors_.size(); }
  const SplineAnchor& anchor(int dof) const { return anchors_[dof]; }
  const std::vector<SplineAnchor>& anchors() const { return anchors_; }
  /// Dof of an active anchor, -1 otherwise.
  int dof(const SplineAnchor& a) const;
  /// Active anchors of level l, as indices.
  LevelSet active(int l) const;
  /// B_{l, omega_l}: level-l anchors whose support contains a level-l cell of omega_l.
  const LevelSet& restricted(int l) const;

  /// Dofs of active functions not identically zero on `cell` (any level), ascending.
  std::vector<int> functions_on_cell(const CellId& cell) const;

 private:
  HierarchicalMesh mesh_;
  std::vector<SplineAnchor> anchors_;
  std::vector<std::map<Index, int>> dof_;
  std::vector<LevelSet> restricted_;
};

std::shared_ptr<const HBBasis> build_hb_basis(const HierarchicalMesh& mesh);

/// Values of every active function living on one cell at a batch of points.
struct CellBasisValues {
  std::vector<int> dofs;
  int order = 0;  ///< 0: values; 1: + gradients; 2: + Laplacians
  std::vector<double> value;      ///< [point * nf + f]
  std::vector<Point> gradient;    ///< [point * nf + f], order >= 1
  std::vector<double> laplacian;  ///< [point * nf + f], order >= 2

  std::size_t num_functions() const { return dofs.size(); }
};

CellBasisValues eval_basis_on_cell(const HBBasis& basis, const CellId& cell,
                                   const std::vector<Point>& points, int order);

/// D^alpha of every active function living on `cell`, [point * nf + f], with `dofs` filled.
std::vector<double> eval_basis_derivative_on_cell(const HBBasis& basis, const CellId& cell,
                                                  const std::vector<Point>& points, const Index& alpha,
                                                  std::vector<int>& dofs);

/// A hierarchical spline: coefficients over an HBBasis in dof order.
class SplineField {
 public:
  SplineField(std::shared_ptr<const HBBasis> basis, std::vector<double> coefficients);

  const HBBasis& basis() const { return *basis_; }
  std::shared_ptr<const HBBasis> basis_ptr() const { return basis_; }
  const std::vector<double>& coefficients() const { return coefficients_; }

  double eval(const Point& x, const Index& alpha = {}) const;
  /// Evaluation with the pieces of a known active cell containing x.
  double eval_on_cell(const CellId& cell, const Point& x, const Index& alpha = {}) const;

 private:
  std::shared_ptr<const HBBasis> basis_;
  std::vector<double> coefficients_;
};

/// Per-level coefficients of level B-splines (possibly non-active).
using LevelCoefficients = std::vector<std::map<Index, double>>;

/// Rewrites a combination of level B-splines in the hierarchical basis by two-scale
/// refinement of the non-active ones. Throws InvalidArgument if some function is not in Span H.
std::vector<double> to_hb_coefficients(const HBBasis& basis, LevelCoefficients levels);

/// The field's functions as level coefficients (each active function kept at its own level).
LevelCoefficients level_coefficients(const SplineField& s);

/// Dump: {dim, degree, coarse_grid, dofs: [[level, [k...], coefficient], ...]} in dof order.
nlohmann::json to_json(const SplineField& s);

}  // namespace wahm
