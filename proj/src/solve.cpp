#include "wahm/solve.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "wahm/error.hpp"
#include "wahm/parallel.hpp"
#include "wahm/quadrature.hpp"

namespace wahm {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct LocalSystem {
  std::vector<int> dofs;
  std::vector<double> matrix;  // row-major nf x nf
  std::vector<double> load;
};

struct BoundaryFace {
  std::vector<Point> points;
  std::vector<double> weights;
  Point normal{};
};

// Faces of an active cell lying on the boundary of the unit box.
std::vector<BoundaryFace> boundary_faces(const Domain& domain, const CellId& cell, const GaussRule& rule) {
  std::vector<BoundaryFace> out;
  const int d = domain.dim;
  const int n = domain.cells_per_axis(cell.level);
  const double h = domain.cell_size(cell.level);
  const int g = static_cast<int>(rule.nodes.size());
  for (int axis = 0; axis < d; ++axis) {
    for (int side = 0; side < 2; ++side) {
      if (cell.index[axis] != (side == 0 ? 0 : n - 1)) continue;
      BoundaryFace face;
      face.normal[axis] = side == 0 ? -1.0 : 1.0;
      Index hi{};
      for (int i = 0; i < d; ++i) hi[i] = i == axis ? 0 : g - 1;
      for_each_in_box(d, Index{}, hi, [&](const Index& q) {
        Point x{};
        double w = 1.0;
        for (int i = 0; i < d; ++i) {
          if (i == axis) {
            x[i] = side == 0 ? 0.0 : 1.0;
          } else {
            x[i] = (cell.index[i] + rule.nodes[q[i]]) * h;
            w *= rule.weights[q[i]] * h;
          }
        }
        face.points.push_back(x);
        face.weights.push_back(w);
      });
      out.push_back(std::move(face));
    }
  }
  return out;
}

using SparseMatrix = Eigen::SparseMatrix<double>;

SparseMatrix merge(std::size_t n, const std::vector<LocalSystem>& locals, Eigen::VectorXd& rhs) {
  std::vector<Eigen::Triplet<double>> triplets;
  rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  for (const auto& loc : locals) {
    const std::size_t nf = loc.dofs.size();
    for (std::size_t i = 0; i < nf; ++i) {
      rhs[loc.dofs[i]] += loc.load[i];
      for (std::size_t j = 0; j < nf; ++j) triplets.emplace_back(loc.dofs[i], loc.dofs[j], loc.matrix[i * nf + j]);
    }
  }
  SparseMatrix a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  a.setFromTriplets(triplets.begin(), triplets.end());
  return a;
}

// Solves the SPD system; returns false when the factorization has a nonpositive pivot.
bool solve_spd(const SparseMatrix& a, const Eigen::VectorXd& rhs, Eigen::VectorXd& x) {
  Eigen::SimplicialLDLT<SparseMatrix> ldlt(a);
  if (ldlt.info() != Eigen::Success) throw Error(ErrorCode::SingularMatrix, "sparse factorization failed");
  const Eigen::VectorXd diag = ldlt.vectorD();
  const double scale = diag.cwiseAbs().maxCoeff();
  if ((diag.array() <= 1e-14 * scale).any()) return false;
  x = ldlt.solve(rhs);
  if (ldlt.info() != Eigen::Success) throw Error(ErrorCode::SingularMatrix, "sparse solve failed");
  return true;
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

double region_error(const Problem& problem, const SplineField& s, const CellSet& region) {
  if (region.empty()) return 0.0;
  return problem.kind == Problem::Kind::L2 ? qi_error(problem.exact, s, region, {}, 2.0)
                                           : seminorm_error(problem.exact, s, region, 1);
}

CellSet all_active(const HierarchicalMesh& mesh) {
  CellSet out;
  for (const auto& c : mesh.active_cells()) out.insert(c);
  return out;
}

}  // namespace

SplineField l2_projection(const Function& f, std::shared_ptr<const HBBasis> basis) {
  const int p = basis->degree();
  const Domain& domain = basis->domain();
  const GaussRule mass_rule = gauss_legendre(p + 1);
  const GaussRule load_rule = gauss_legendre(p + 3);
  const auto cells = basis->mesh().active_cells();
  std::vector<LocalSystem> locals(cells.size());
  parallel_for(cells.size(), [&](std::size_t c) {
    LocalSystem& loc = locals[c];
    const CellQuadrature mq = cell_quadrature(domain, cells[c], mass_rule);
    const CellBasisValues mv = eval_basis_on_cell(*basis, cells[c], mq.points, 0);
    const std::size_t nf = mv.num_functions();
    loc.dofs = mv.dofs;
    loc.matrix.assign(nf * nf, 0.0);
    loc.load.assign(nf, 0.0);
    for (std::size_t q = 0; q < mq.points.size(); ++q) {
      for (std::size_t i = 0; i < nf; ++i) {
        const double wi = mq.weights[q] * mv.value[q * nf + i];
        for (std::size_t j = 0; j < nf; ++j) loc.matrix[i * nf + j] += wi * mv.value[q * nf + j];
      }
    }
    const CellQuadrature lq = cell_quadrature(domain, cells[c], load_rule);
    const CellBasisValues lv = eval_basis_on_cell(*basis, cells[c], lq.points, 0);
    for (std::size_t q = 0; q < lq.points.size(); ++q) {
      const double wf = lq.weights[q] * f(lq.points[q]);
      for (std::size_t i = 0; i < nf; ++i) loc.load[i] += wf * lv.value[q * nf + i];
    }
  });
  Eigen::VectorXd rhs, x;
  const SparseMatrix mass = merge(basis->size(), locals, rhs);
  if (!solve_spd(mass, rhs, x)) throw Error(ErrorCode::SingularMatrix, "mass matrix is not positive definite");
  return SplineField(std::move(basis), to_std(x));
}

std::vector<double> orthogonality_residuals(const Function& f, const SplineField& s, const std::vector<int>& dofs) {
  const HBBasis& basis = s.basis();
  const GaussRule rule = gauss_legendre(basis.degree() + 3);
  std::map<int, double> acc;
  for (int dof : dofs) acc[dof] = 0.0;
  for (const auto& cell : basis.mesh().active_cells()) {
    const CellQuadrature cq = cell_quadrature(basis.domain(), cell, rule);
    const CellBasisValues v = eval_basis_on_cell(basis, cell, cq.points, 0);
    const std::size_t nf = v.num_functions();
    for (std::size_t i = 0; i < nf; ++i) {
      auto it = acc.find(v.dofs[i]);
      if (it == acc.end()) continue;
      for (std::size_t q = 0; q < cq.points.size(); ++q) {
        double sv = 0.0;
        for (std::size_t j = 0; j < nf; ++j) sv += s.coefficients()[v.dofs[j]] * v.value[q * nf + j];
        it->second += cq.weights[q] * (sv - f(cq.points[q])) * v.value[q * nf + i];
      }
    }
  }
  std::vector<double> out;
  for (int dof : dofs) out.push_back(std::abs(acc[dof]));
  return out;
}

EstimatorMap estimate_l2(const Function& f, const SplineField& s) {
  const HBBasis& basis = s.basis();
  const GaussRule rule = gauss_legendre(basis.degree() + 3);
  const auto cells = basis.mesh().active_cells();
  std::vector<double> values(cells.size());
  parallel_for(cells.size(), [&](std::size_t c) {
    const CellQuadrature cq = cell_quadrature(basis.domain(), cells[c], rule);
    const CellBasisValues v = eval_basis_on_cell(basis, cells[c], cq.points, 0);
    const std::size_t nf = v.num_functions();
    double acc = 0.0;
    for (std::size_t q = 0; q < cq.points.size(); ++q) {
      double sv = 0.0;
      for (std::size_t j = 0; j < nf; ++j) sv += s.coefficients()[v.dofs[j]] * v.value[q * nf + j];
      const double e = f(cq.points[q]) - sv;
      acc += cq.weights[q] * e * e;
    }
    values[c] = std::sqrt(acc);
  });
  EstimatorMap out;
  for (std::size_t c = 0; c < cells.size(); ++c) out.emplace(cells[c], values[c]);
  return out;
}

SplineField solve_poisson(const Function& f, const Function& g, std::shared_ptr<const HBBasis> basis,
                          const NitscheOptions& options) {
  const int p = basis->degree();
  const int d = basis->dim();
  const Domain& domain = basis->domain();
  const double gamma = options.gamma > 0.0 ? options.gamma : 10.0 * (p + 1) * (p + 1);
  const GaussRule matrix_rule = gauss_legendre(p + 1);
  const GaussRule load_rule = gauss_legendre(p + 3);
  const auto cells = basis->mesh().active_cells();
  std::vector<LocalSystem> locals(cells.size());
  parallel_for(cells.size(), [&](std::size_t c) {
    LocalSystem& loc = locals[c];
    const CellId& cell = cells[c];
    const CellQuadrature kq = cell_quadrature(domain, cell, matrix_rule);
    const CellBasisValues kv = eval_basis_on_cell(*basis, cell, kq.points, 1);
    const std::size_t nf = kv.num_functions();
    loc.dofs = kv.dofs;
    loc.matrix.assign(nf * nf, 0.0);
    loc.load.assign(nf, 0.0);
    for (std::size_t q = 0; q < kq.points.size(); ++q) {
      for (std::size_t i = 0; i < nf; ++i) {
        const Point& gi = kv.gradient[q * nf + i];
        for (std::size_t j = 0; j < nf; ++j) {
          const Point& gj = kv.gradient[q * nf + j];
          double dot = 0.0;
          for (int a = 0; a < d; ++a) dot += gi[a] * gj[a];
          loc.matrix[i * nf + j] += kq.weights[q] * dot;
        }
      }
    }
    const CellQuadrature lq = cell_quadrature(domain, cell, load_rule);
    const CellBasisValues lv = eval_basis_on_cell(*basis, cell, lq.points, 0);
    for (std::size_t q = 0; q < lq.points.size(); ++q) {
      const double wf = lq.weights[q] * f(lq.points[q]);
      for (std::size_t i = 0; i < nf; ++i) loc.load[i] += wf * lv.value[q * nf + i];
    }
    // Symmetric Nitsche terms on boundary faces.
    const double penalty = gamma / domain.cell_size(cell.level);
    for (const auto& face : boundary_faces(domain, cell, load_rule)) {
      const CellBasisValues fv = eval_basis_on_cell(*basis, cell, face.points, 1);
      for (std::size_t q = 0; q < face.points.size(); ++q) {
        const double w = face.weights[q];
        const double gq = g(face.points[q]);
        for (std::size_t i = 0; i < nf; ++i) {
          double dni = 0.0;
          for (int a = 0; a < d; ++a) dni += fv.gradient[q * nf + i][a] * face.normal[a];
          const double vi = fv.value[q * nf + i];
          loc.load[i] += w * (-gq * dni + penalty * gq * vi);
          for (std::size_t j = 0; j < nf; ++j) {
            double dnj = 0.0;
            for (int a = 0; a < d; ++a) dnj += fv.gradient[q * nf + j][a] * face.normal[a];
            const double vj = fv.value[q * nf + j];
            loc.matrix[i * nf + j] += w * (-dnj * vi - dni * vj + penalty * vi * vj);
          }
        }
      }
    }
  });
  Eigen::VectorXd rhs, x;
  const SparseMatrix a = merge(basis->size(), locals, rhs);
  if (!solve_spd(a, rhs, x)) {
    throw Error(ErrorCode::PenaltyTooSmall,
                "Nitsche system is not positive definite for gamma = " + std::to_string(gamma));
  }
  return SplineField(std::move(basis), to_std(x));
}

EstimatorMap estimate_residual(const Function& f, const SplineField& u_h) {
  const HBBasis& basis = u_h.basis();
  const GaussRule rule = gauss_legendre(basis.degree() + 3);
  const auto cells = basis.mesh().active_cells();
  std::vector<double> values(cells.size());
  parallel_for(cells.size(), [&](std::size_t c) {
    const CellQuadrature cq = cell_quadrature(basis.domain(), cells[c], rule);
    const CellBasisValues v = eval_basis_on_cell(basis, cells[c], cq.points, 2);
    const std::size_t nf = v.num_functions();
    double acc = 0.0;
    for (std::size_t q = 0; q < cq.points.size(); ++q) {
      double lap = 0.0;
      for (std::size_t j = 0; j < nf; ++j) lap += u_h.coefficients()[v.dofs[j]] * v.laplacian[q * nf + j];
      const double r = f(cq.points[q]) + lap;
      acc += cq.weights[q] * r * r;
    }
    values[c] = basis.domain().cell_size(cells[c].level) * std::sqrt(acc);
  });
  EstimatorMap out;
  for (std::size_t c = 0; c < cells.size(); ++c) out.emplace(cells[c], values[c]);
  return out;
}

MarkSet mark_maximum(const EstimatorMap& estimators, double theta) {
  if (estimators.empty()) throw Error(ErrorCode::EmptyEstimatorMap, "no estimators to mark from");
  if (!(theta > 0.0 && theta <= 1.0)) throw Error(ErrorCode::InvalidArgument, "theta must lie in (0, 1]");
  double top = 0.0;
  for (const auto& [c, e] : estimators) top = std::max(top, e);
  MarkSet out;
  for (const auto& [c, e] : estimators) {
    if (e >= theta * top && e > 0.0) out.insert(c);
  }
  return out;
}

MarkSet mark_support_aggregated(const EstimatorMap& estimators, const HBBasis& basis, double theta) {
  if (estimators.empty()) throw Error(ErrorCode::EmptyEstimatorMap, "no estimators to mark from");
  if (!(theta > 0.0 && theta <= 1.0)) throw Error(ErrorCode::InvalidArgument, "theta must lie in (0, 1]");
  std::vector<double> eta(basis.size(), 0.0);
  std::vector<std::vector<CellId>> cells_of(basis.size());
  for (const auto& [cell, e] : estimators) {
    for (int f : basis.functions_on_cell(cell)) {
      eta[f] += e * e;
      cells_of[f].push_back(cell);
    }
  }
  const double top = *std::max_element(eta.begin(), eta.end());
  MarkSet out;
  for (std::size_t f = 0; f < eta.size(); ++f) {
    if (eta[f] > 0.0 && eta[f] >= theta * theta * top) {
      for (const auto& c : cells_of[f]) out.insert(c);
    }
  }
  return out;
}

ErrorIndices error_indices(double e0, double e1, std::size_t dofs0, std::size_t dofs1) {
  if (!(e0 > 0.0) || !(e1 > 0.0)) throw Error(ErrorCode::NonpositiveError, "errors must be positive");
  if (dofs1 <= dofs0) throw Error(ErrorCode::InvalidArgument, "refinement must add degrees of freedom");
  const double i_err = std::log10(e0 / e1);
  return {i_err, i_err / std::log10(static_cast<double>(dofs1) / static_cast<double>(dofs0))};
}

std::string to_string(Method m) { return m == Method::WA ? "WA" : "SA2"; }
std::string to_string(EstimatorKind k) { return k == EstimatorKind::Element ? "element" : "support-aggregated"; }

Method method_from_string(const std::string& s) {
  if (s == "wa" || s == "WA") return Method::WA;
  if (s == "sa2" || s == "SA2") return Method::SA2;
  throw Error(ErrorCode::InvalidArgument, "unknown method '" + s + "' (wa | sa2)");
}

EstimatorKind estimator_from_string(const std::string& s) {
  if (s == "element") return EstimatorKind::Element;
  if (s == "support-aggregated") return EstimatorKind::SupportAggregated;
  throw Error(ErrorCode::InvalidArgument, "unknown estimator '" + s + "' (element | support-aggregated)");
}

Problem l2_problem(std::string name, const Expr& u, int dim) {
  Problem pb;
  pb.kind = Problem::Kind::L2;
  pb.name = std::move(name);
  pb.u = u;
  pb.exact = smooth_function(u, dim, 2);
  pb.rhs = value_of(pb.exact);
  return pb;
}

Problem poisson_problem(std::string name, const Expr& u, int dim) {
  Problem pb;
  pb.kind = Problem::Kind::Poisson;
  pb.name = std::move(name);
  pb.u = u;
  pb.exact = smooth_function(u, dim, 2);
  Expr lap;
  for (int i = 0; i < dim; ++i) lap = lap + u.diff(i).diff(i);
  const Expr f = -lap;
  pb.rhs = [f](const Point& x) { return f(x); };
  return pb;
}

Problem named_problem(const std::string& id, int dim) {
  if (dim != 2) throw Error(ErrorCode::UnsupportedDimension, "named problems are two-dimensional");
  const Expr arctan = Expr::parse("atan(25*(x-y))");
  if (id == "l2-arctan") return l2_problem(id, arctan, dim);
  if (id == "l2-gauss") return l2_problem(id, Expr::parse("exp(-((x-0.5)^2+(y-0.5)^2)/(2*0.1^2))"), dim);
  if (id == "poisson-arctan") return poisson_problem(id, arctan, dim);
  throw Error(ErrorCode::InvalidArgument, "unknown problem '" + id + "'");
}

bool method_admissible(const HierarchicalMesh& mesh, Method method) {
  if (method == Method::WA) return is_weakly_admissible(mesh).ok && is_clustered(mesh);
  return is_strictly_admissible(mesh, 2).ok;
}

LoopResult run_adaptive_loop(const Problem& problem, const HierarchicalMesh& initial, const LoopOptions& options,
                             const std::function<void(const LoopRecord&)>& on_record) {
  if (!method_admissible(initial, options.method)) {
    throw Error(options.method == Method::WA ? ErrorCode::NotWeaklyAdmissible : ErrorCode::NotStrictlyAdmissible,
                "initial mesh does not satisfy the " + to_string(options.method) + " predicate");
  }
  LoopResult out;
  HierarchicalMesh mesh = initial;
  std::optional<CellSet> previous_marks;
  double e0 = kNaN;
  std::size_t previous_dofs = 0;
  for (int it = 0;; ++it) {
    const auto basis = build_hb_basis(mesh);
    const SplineField s = problem.kind == Problem::Kind::L2
                              ? l2_projection(problem.rhs, basis)
                              : solve_poisson(problem.rhs, value_of(problem.exact), basis);
    const EstimatorMap est = problem.kind == Problem::Kind::L2 ? estimate_l2(problem.rhs, s)
                                                               : estimate_residual(problem.rhs, s);
    LoopRecord rec;
    rec.iteration = it;
    rec.method = options.method;
    rec.dofs = basis->size();
    rec.n_active = mesh.num_active();
    rec.global_error = region_error(problem, s, all_active(mesh));
    rec.admissible = method_admissible(mesh, options.method);
    for (const auto& [c, e] : est) rec.sum_estimators += e * e;
    rec.marked_error = rec.previous_error = rec.i_err = rec.i_eff = kNaN;
    if (previous_marks) {
      rec.previous_error = e0;
      rec.marked_error = region_error(problem, s, *previous_marks);
      if (e0 > 0.0 && rec.marked_error > 0.0 && rec.dofs > previous_dofs) {
        const auto idx = error_indices(e0, rec.marked_error, previous_dofs, rec.dofs);
        rec.i_err = idx.i_err;
        rec.i_eff = idx.i_eff;
      }
    }
    out.meshes.push_back(mesh);
    if (it == options.max_iter) {
      out.records.push_back(rec);
      if (on_record) on_record(rec);
      break;
    }
    const MarkSet marks = options.estimator == EstimatorKind::Element
                              ? mark_maximum(est, options.theta)
                              : mark_support_aggregated(est, *basis, options.theta);
    rec.marked = marks.size();
    out.records.push_back(rec);
    out.marks.push_back(marks);
    if (on_record) on_record(rec);
    e0 = region_error(problem, s, marks);
    previous_dofs = rec.dofs;
    previous_marks = marks;
    const MarkSet refine = options.method == Method::WA ? adaptive_refinement_marks(mesh, marks)
                                                        : sa_marking(mesh, marks, 2);
    mesh = refine_hierarchical_mesh(mesh, refine);
  }
  return out;
}

std::string records_to_csv(const std::vector<LoopRecord>& records) {
  std::ostringstream os;
  os << "iter,method,dofs,n_active,global_error,marked_error,I_err,I_eff,sum_estimators\n";
  os << std::setprecision(10);
  auto num = [&](double v) -> std::ostringstream& {
    if (std::isnan(v)) os << "";
    else os << v;
    return os;
  };
  for (const auto& r : records) {
    os << r.iteration << ',' << to_string(r.method) << ',' << r.dofs << ',' << r.n_active << ',';
    num(r.global_error) << ',';
    num(r.marked_error) << ',';
    num(r.i_err) << ',';
    num(r.i_eff) << ',';
    num(r.sum_estimators) << '\n';
  }
  return os.str();
}

}  // namespace wahm
