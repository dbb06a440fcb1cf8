#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wahm/basis.hpp"
#include "wahm/expr.hpp"
#include "wahm/quasi.hpp"
#include "wahm/refine.hpp"

namespace wahm {

/// Nonnegative indicator per active cell.
using EstimatorMap = std::map<CellId, double>;

/// Galerkin L2 projection onto Span H: mass matrix with (p+1)^d Gauss points per active cell,
/// load vector with (p+3)^d. Throws SingularMatrix.
SplineField l2_projection(const Function& f, std::shared_ptr<const HBBasis> basis);

/// |∫(s - f) beta| for the listed dofs, with the load-vector quadrature.
std::vector<double> orthogonality_residuals(const Function& f, const SplineField& s, const std::vector<int>& dofs);

/// ||f - s||_{L2(Q)} on every active cell.
EstimatorMap estimate_l2(const Function& f, const SplineField& s);

struct NitscheOptions {
  double gamma = 0.0;  ///< penalty factor; 0 means 10 (p+1)^2. Face penalty is gamma / h_face.
};

/// -Δu = f in the unit box, u = g on the boundary imposed weakly (symmetric Nitsche).
/// Throws PenaltyTooSmall when the system is not positive definite, SingularMatrix on failure.
SplineField solve_poisson(const Function& f, const Function& g, std::shared_ptr<const HBBasis> basis,
                          const NitscheOptions& options = {});

/// h_Q ||f + Δu_h||_{L2(Q)} per active cell, h_Q the side of Q.
EstimatorMap estimate_residual(const Function& f, const SplineField& u_h);

/// Active cells with E_Q >= theta max E. Throws EmptyEstimatorMap.
MarkSet mark_maximum(const EstimatorMap& estimators, double theta);

/// Function-wise variant: E_beta = (sum of E_Q^2 over active Q in supp beta)^(1/2); every active
/// cell in the support of a beta with E_beta >= theta max is marked.
MarkSet mark_support_aggregated(const EstimatorMap& estimators, const HBBasis& basis, double theta);

struct ErrorIndices {
  double i_err = 0.0;
  double i_eff = 0.0;
};
/// I_err = log10(e0/e1), I_eff = I_err / log10(dofs1/dofs0). Throws NonpositiveError.
ErrorIndices error_indices(double e0, double e1, std::size_t dofs0, std::size_t dofs1);

enum class Method { WA, SA2 };
enum class EstimatorKind { Element, SupportAggregated };
std::string to_string(Method m);
std::string to_string(EstimatorKind k);
Method method_from_string(const std::string& s);
EstimatorKind estimator_from_string(const std::string& s);

/// An experiment: L2 projection of u, or Poisson with exact solution u (f = -Δu, g = u).
struct Problem {
  enum class Kind { L2, Poisson };
  Kind kind = Kind::L2;
  std::string name;
  Expr u;
  SmoothFunction exact;  ///< u with derivatives up to order 2
  Function rhs;          ///< f = -Δu for Poisson
};
Problem l2_problem(std::string name, const Expr& u, int dim);
Problem poisson_problem(std::string name, const Expr& u, int dim);
/// l2-arctan, l2-gauss, poisson-arctan. Throws InvalidArgument.
Problem named_problem(const std::string& id, int dim);

struct LoopRecord {
  int iteration = 0;
  Method method = Method::WA;
  std::size_t dofs = 0;
  std::size_t n_active = 0;
  double global_error = 0.0;   ///< L2 error or H1-seminorm (energy) error
  double marked_error = 0.0;   ///< e1: error on the previous marked region, NaN at iteration 0
  double previous_error = 0.0; ///< e0: same region before refinement, NaN at iteration 0
  double i_err = 0.0;          ///< NaN at iteration 0
  double i_eff = 0.0;          ///< NaN at iteration 0
  double sum_estimators = 0.0; ///< sum of E_Q^2
  std::size_t marked = 0;      ///< cells marked at this iteration (0 at the last one)
  bool admissible = true;      ///< mesh passes the method's admissibility predicate
};

struct LoopOptions {
  Method method = Method::WA;
  double theta = 0.5;
  int max_iter = 8;
  EstimatorKind estimator = EstimatorKind::Element;
};

struct LoopResult {
  std::vector<LoopRecord> records;
  std::vector<HierarchicalMesh> meshes;  ///< one per record
  std::vector<MarkSet> marks;            ///< marks of every record but the last
};

/// SOLVE, ESTIMATE, MARK, UPDATE MARK (WA: explicit weakly admissible marking; SA2: class-2
/// closure), REFINE. The initial mesh must satisfy the method's predicate.
LoopResult run_adaptive_loop(const Problem& problem, const HierarchicalMesh& initial, const LoopOptions& options,
                             const std::function<void(const LoopRecord&)>& on_record = {});

/// Whether the mesh satisfies the method's structural predicate.
bool method_admissible(const HierarchicalMesh& mesh, Method method);

/// CSV with header iter,method,dofs,n_active,global_error,marked_error,I_err,I_eff,sum_estimators.
std::string records_to_csv(const std::vector<LoopRecord>& records);

}  // namespace wahm
