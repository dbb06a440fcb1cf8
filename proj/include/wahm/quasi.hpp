#pragma once

#include <functional>
#include <map>
#include <memory>
#include <vector>

#include "wahm/basis.hpp"
#include "wahm/expr.hpp"
#include "wahm/hierarchy.hpp"
#include "wahm/quadrature.hpp"

namespace wahm {

using Function = std::function<double(const Point&)>;
/// f with partial derivatives: f(x, alpha) = D^alpha f(x).
using SmoothFunction = std::function<double(const Point&, const Index&)>;

/// Precomputes every D^alpha e with alpha_i <= max_order and dispatches on alpha.
SmoothFunction smooth_function(const Expr& e, int dim, int max_order);
Function value_of(const SmoothFunction& f);

/// lambda_beta: the beta-coefficient of the L2(probe cell) projection onto the (p+1)^d level
/// B-splines that live on the probe cell.
struct DualFunctional {
  SplineAnchor anchor;
  CellId probe_cell;
  int slot = 0;  ///< lexicographic position of probe_cell - anchor in [0, p]^d
};

/// A level spline sum_k c_k B_{l,k}.
struct LevelSpline {
  int level = 0;
  std::map<Index, double> coefficients;
};

/// Local projectors P_l and the multilevel quasi-interpolant Pi over a fixed hierarchical basis.
class QuasiInterpolant {
 public:
  /// `quad_points` Gauss points per axis on the probe cell; 0 means p + 1.
  explicit QuasiInterpolant(std::shared_ptr<const HBBasis> basis, int quad_points = 0);

  const HBBasis& basis() const { return *basis_; }
  const HierarchicalMesh& mesh() const { return basis_->mesh(); }

  /// 2-norm condition number of the reference (p+1)^d Gram matrix.
  double gram_condition() const { return gram_condition_; }

  /// Lexicographically smallest level-l cell of supp(beta) ∩ omega_l. Throws ProbeCellUnavailable.
  DualFunctional dual_functional(int l, const Index& anchor) const;
  double apply(const DualFunctional& lambda, const Function& f) const;

  /// P_l f over B_{l, omega_l}.
  LevelSpline project_level(int l, const Function& f) const;

  /// The terms of Pi f = sum_l P_l(f - Pi_{l-1} f), one level spline per level.
  std::vector<LevelSpline> multilevel_terms(const Function& f) const;

  /// Pi f in hierarchical coefficients. Throws NotWeaklyAdmissible.
  SplineField multilevel(const Function& f) const;

 private:
  /// f at the probe-cell quadrature points, applied to the dual matrix: all (p+1)^d coefficients.
  std::vector<double> local_projection(const CellId& cell, const Function& f) const;

  std::shared_ptr<const HBBasis> basis_;
  GaussRule rule_;
  int nloc_ = 0;               ///< (p+1)^d
  int nquad_ = 0;              ///< g^d
  std::vector<double> dual_;   ///< [slot * nquad + q], reference weights folded in
  double gram_condition_ = 0.0;
};

/// P_l f with a fresh projector for the mesh.
LevelSpline project_level(int l, const Function& f, const HierarchicalMesh& mesh);
/// Pi f with a fresh basis for the mesh. Throws NotWeaklyAdmissible.
SplineField multilevel_qi(const Function& f, const HierarchicalMesh& mesh);

/// Value of a sum of level splines (degree p) at x; levels are evaluated with the pieces of `cell`
/// where cell.level allows it.
double eval_level_splines(const std::vector<LevelSpline>& terms, int p, const Domain& domain,
                          const CellId& cell, const Point& x, const Index& alpha = {});
/// Same, locating the piece of every level by flooring x.
double eval_level_splines(const std::vector<LevelSpline>& terms, int p, const Domain& domain, const Point& x,
                          const Index& alpha = {});

/// Norm of D^alpha(f - s) over the cells of `region` (mixed levels). q = 2 uses (p+3)^d Gauss points
/// per polynomial piece, q = infinity a 5^d interior sampling grid. Throws DerivativeOrderExceedsDegree.
double qi_error(const SmoothFunction& f, const SplineField& s, const CellSet& region, const Index& alpha,
                double q);

/// (sum_{|alpha| = k} ||D^alpha(f - s)||_2^2)^(1/2) over the region.
double seminorm_error(const SmoothFunction& f, const SplineField& s, const CellSet& region, int k);

/// |g|_{k,2} over the region with (p+3)^d Gauss points per cell; needs no spline.
double sobolev_seminorm(const SmoothFunction& g, const Domain& domain, const CellSet& region, int k,
                        int quad_points);

/// Estimate neighborhood of an active cell with its local size h_Q.
struct EstimateNeighborhood {
  CellSet cells;
  int power = 0;  ///< approximation power k; h_Q = h_k
  double h = 0.0;
};

/// Q~ for optimal cells (power = level); the support extension of parent_{k-1}(Q) for power k < level.
/// For k = 0 the extension of the level-0 ancestor's extension is used.
EstimateNeighborhood neighborhood_N(const CellId& cell, const HierarchicalMesh& mesh);

struct LocalRatio {
  CellId cell;
  double error = 0.0;  ///< ||f - s||_{2,Q}
  double bound = 0.0;  ///< h_Q^{p+1} |f|_{p+1,2,N(Q)}
  double ratio = 0.0;
};
/// The local estimate ratio on every active cell; f must provide derivatives of order p + 1.
/// Seminorms are computed once per neighborhood cell.
std::vector<LocalRatio> local_estimate_ratios(const SmoothFunction& f, const SplineField& s);

/// Union of the support extensions of the level-l cells in `cells`.
LevelSet extension_of_set(const LevelSet& cells, int level, int p, const Domain& domain);

}  // namespace wahm
