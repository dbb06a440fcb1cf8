#include "wahm/quasi.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <optional>

#include "wahm/error.hpp"
#include "wahm/mesh.hpp"
#include "wahm/parallel.hpp"

namespace wahm {

namespace {

int ipow(int b, int e) {
  int r = 1;
  while (e-- > 0) r *= b;
  return r;
}

void check_alpha(const Index& alpha, int p, int dim) {
  for (int i = 0; i < dim; ++i) {
    if (alpha[i] < 0 || alpha[i] > p) {
      throw Error(ErrorCode::DerivativeOrderExceedsDegree, "derivative order must lie in [0, p]");
    }
  }
}

// Level-l cell containing x (floor, clamped to the grid).
CellId cell_at(const Domain& domain, int level, const Point& x) {
  const int n = domain.cells_per_axis(level);
  CellId c{level, {}};
  for (int i = 0; i < domain.dim; ++i) c.index[i] = std::clamp(static_cast<int>(std::floor(x[i] * n)), 0, n - 1);
  return c;
}

// All alpha with |alpha| = k and alpha_i <= cap.
std::vector<Index> multi_indices(int dim, int k, int cap) {
  std::vector<Index> out;
  Index hi{};
  for (int i = 0; i < dim; ++i) hi[i] = std::min(k, cap);
  for_each_in_box(dim, Index{}, hi, [&](const Index& a) {
    int s = 0;
    for (int i = 0; i < dim; ++i) s += a[i];
    if (s == k) out.push_back(a);
  });
  return out;
}

std::vector<Point> sample_grid(const Domain& domain, const CellId& cell, int n) {
  const double h = domain.cell_size(cell.level);
  Index hi{};
  for (int i = 0; i < domain.dim; ++i) hi[i] = n - 1;
  std::vector<Point> out;
  for_each_in_box(domain.dim, Index{}, hi, [&](const Index& j) {
    Point x{};
    for (int i = 0; i < domain.dim; ++i) x[i] = (cell.index[i] + (j[i] + 0.5) / n) * h;
    out.push_back(x);
  });
  return out;
}

}  // namespace

SmoothFunction smooth_function(const Expr& e, int dim, int max_order) {
  const int side = max_order + 1;
  auto table = std::make_shared<std::vector<Expr>>(ipow(side, dim));
  Index hi{};
  for (int i = 0; i < dim; ++i) hi[i] = max_order;
  for_each_in_box(dim, Index{}, hi, [&](const Index& a) {
    int slot = 0;
    for (int i = 0; i < dim; ++i) slot = slot * side + a[i];
    (*table)[slot] = e.derivative(a);
  });
  return [table, dim, side](const Point& x, const Index& alpha) {
    int slot = 0;
    for (int i = 0; i < dim; ++i) {
      if (alpha[i] < 0 || alpha[i] >= side) {
        throw Error(ErrorCode::DerivativeOrderExceedsDegree, "derivative not precomputed");
      }
      slot = slot * side + alpha[i];
    }
    return (*table)[slot](x);
  };
}

Function value_of(const SmoothFunction& f) {
  return [f](const Point& x) { return f(x, Index{}); };
}

QuasiInterpolant::QuasiInterpolant(std::shared_ptr<const HBBasis> basis, int quad_points)
    : basis_(std::move(basis)) {
  const int p = basis_->degree();
  const int d = basis_->dim();
  rule_ = gauss_legendre(quad_points > 0 ? quad_points : p + 1);
  nloc_ = ipow(p + 1, d);
  nquad_ = ipow(static_cast<int>(rule_.nodes.size()), d);

  // The reference Gram matrix is a Kronecker product, so the dual weights are tensor products
  // of 1D weights G1^{-1} B W. The 1D solve runs in long double: cond(G1) grows like 10^p.
  const int g = static_cast<int>(rule_.nodes.size());
  const int m = p + 1;
  std::vector<long double> b(m * g), gram(m * m, 0.0L), dual1(m * g);
  for (int q = 0; q < g; ++q) {
    const CellPieces pieces(p, rule_.nodes[q], 0);
    for (int i = 0; i < m; ++i) b[i * g + q] = pieces.value(0, i);
  }
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      for (int q = 0; q < g; ++q) gram[i * m + j] += b[i * g + q] * rule_.weights[q] * b[j * g + q];
    }
  }
  // Gauss-Jordan on [G1 | B W] with partial pivoting.
  std::vector<long double> a = gram;
  for (int i = 0; i < m; ++i) {
    for (int q = 0; q < g; ++q) dual1[i * g + q] = b[i * g + q] * rule_.weights[q];
  }
  for (int c = 0; c < m; ++c) {
    int piv = c;
    for (int r = c + 1; r < m; ++r) {
      if (std::abs(a[r * m + c]) > std::abs(a[piv * m + c])) piv = r;
    }
    if (a[piv * m + c] == 0.0L) throw Error(ErrorCode::SingularMatrix, "reference Gram matrix is singular");
    for (int k = 0; k < m; ++k) std::swap(a[c * m + k], a[piv * m + k]);
    for (int k = 0; k < g; ++k) std::swap(dual1[c * g + k], dual1[piv * g + k]);
    for (int r = 0; r < m; ++r) {
      if (r == c) continue;
      const long double f = a[r * m + c] / a[c * m + c];
      for (int k = 0; k < m; ++k) a[r * m + k] -= f * a[c * m + k];
      for (int k = 0; k < g; ++k) dual1[r * g + k] -= f * dual1[c * g + k];
    }
  }
  for (int r = 0; r < m; ++r) {
    for (int k = 0; k < g; ++k) dual1[r * g + k] /= a[r * m + r];
  }

  Eigen::MatrixXd g1(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) g1(i, j) = static_cast<double>(gram[i * m + j]);
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g1);
  gram_condition_ = std::pow(eig.eigenvalues().maxCoeff() / eig.eigenvalues().minCoeff(), d);

  // Slots and quadrature points are both lexicographic, last axis fastest.
  dual_.assign(static_cast<std::size_t>(nloc_) * nquad_, 0.0);
  Index shi{}, qhi{};
  for (int i = 0; i < d; ++i) {
    shi[i] = p;
    qhi[i] = g - 1;
  }
  std::size_t slot = 0;
  for_each_in_box(d, Index{}, shi, [&](const Index& off) {
    std::size_t q = 0;
    for_each_in_box(d, Index{}, qhi, [&](const Index& qi) {
      long double v = 1.0L;
      for (int i = 0; i < d; ++i) v *= dual1[off[i] * g + qi[i]];
      dual_[slot * nquad_ + q++] = static_cast<double>(v);
    });
    ++slot;
  });
}

DualFunctional QuasiInterpolant::dual_functional(int l, const Index& anchor) const {
  const int p = basis_->degree();
  const int d = basis_->dim();
  const Domain& domain = basis_->domain();
  const LevelSet& omega = mesh().omega(l);
  const int n = domain.cells_per_axis(l);
  Index lo{}, hi{};
  for (int i = 0; i < d; ++i) {
    lo[i] = std::max(anchor[i], 0);
    hi[i] = std::min(anchor[i] + p, n - 1);
  }
  std::optional<Index> probe;
  for_each_in_box(d, lo, hi, [&](const Index& c) {
    if (!probe && omega.contains(c)) probe = c;
  });
  if (!probe) {
    throw Error(ErrorCode::ProbeCellUnavailable,
                "no level-" + std::to_string(l) + " cell of omega in the support of " +
                    to_string(CellId{l, anchor}, d));
  }
  int slot = 0;
  for (int i = 0; i < d; ++i) slot = slot * (p + 1) + ((*probe)[i] - anchor[i]);
  return {{l, anchor}, {l, *probe}, slot};
}

std::vector<double> QuasiInterpolant::local_projection(const CellId& cell, const Function& f) const {
  const CellQuadrature cq = cell_quadrature(basis_->domain(), cell, rule_);
  std::vector<double> fv(nquad_);
  for (int q = 0; q < nquad_; ++q) fv[q] = f(cq.points[q]);
  std::vector<double> out(nloc_, 0.0);
  for (int i = 0; i < nloc_; ++i) {
    const double* row = &dual_[static_cast<std::size_t>(i) * nquad_];
    double s = 0.0;
    for (int q = 0; q < nquad_; ++q) s += row[q] * fv[q];
    out[i] = s;
  }
  return out;
}

double QuasiInterpolant::apply(const DualFunctional& lambda, const Function& f) const {
  return local_projection(lambda.probe_cell, f)[lambda.slot];
}

LevelSpline QuasiInterpolant::project_level(int l, const Function& f) const {
  LevelSpline out{l, {}};
  const LevelSet& anchors = basis_->restricted(l);
  std::vector<DualFunctional> duals;
  duals.reserve(anchors.size());
  std::map<Index, std::size_t> probe_slot;
  std::vector<CellId> probes;
  for (const auto& k : anchors) {
    duals.push_back(dual_functional(l, k));
    if (probe_slot.emplace(duals.back().probe_cell.index, probes.size()).second) {
      probes.push_back(duals.back().probe_cell);
    }
  }
  std::vector<std::vector<double>> local(probes.size());
  parallel_for(probes.size(), [&](std::size_t i) { local[i] = local_projection(probes[i], f); });
  for (const auto& dl : duals) {
    out.coefficients[dl.anchor.index] = local[probe_slot.at(dl.probe_cell.index)][dl.slot];
  }
  return out;
}

std::vector<LevelSpline> QuasiInterpolant::multilevel_terms(const Function& f) const {
  const int p = basis_->degree();
  const Domain& domain = basis_->domain();
  std::vector<LevelSpline> terms;
  for (int l = 0; l < basis_->depth(); ++l) {
    if (mesh().omega(l).empty()) {
      terms.push_back({l, {}});
      continue;
    }
    if (l == 0) {
      terms.push_back(project_level(0, f));
      continue;
    }
    const Function residual = [&, l](const Point& x) {
      return f(x) - eval_level_splines(terms, p, domain, cell_at(domain, l - 1, x), x);
    };
    terms.push_back(project_level(l, residual));
  }
  return terms;
}

SplineField QuasiInterpolant::multilevel(const Function& f) const {
  const auto report = is_weakly_admissible(mesh());
  if (!report) {
    throw Error(ErrorCode::NotWeaklyAdmissible,
                "omega inclusion fails at level " + std::to_string(report.level) +
                    (report.witness ? " for " + to_string(*report.witness, basis_->dim()) : ""));
  }
  LevelCoefficients levels(basis_->depth());
  for (auto& t : multilevel_terms(f)) levels[t.level] = std::move(t.coefficients);
  return SplineField(basis_, to_hb_coefficients(*basis_, std::move(levels)));
}

LevelSpline project_level(int l, const Function& f, const HierarchicalMesh& mesh) {
  return QuasiInterpolant(build_hb_basis(mesh)).project_level(l, f);
}

SplineField multilevel_qi(const Function& f, const HierarchicalMesh& mesh) {
  return QuasiInterpolant(build_hb_basis(mesh)).multilevel(f);
}

double eval_level_splines(const std::vector<LevelSpline>& terms, int p, const Domain& domain,
                          const CellId& cell, const Point& x, const Index& alpha) {
  check_alpha(alpha, p, domain.dim);
  const int d = domain.dim;
  double sum = 0.0;
  for (const auto& t : terms) {
    if (t.coefficients.empty()) continue;
    const CellId host = cell.level < 0         ? cell_at(domain, t.level, x)
                        : t.level == cell.level ? cell
                        : t.level < cell.level  ? parent(cell, t.level)
                                                : cell_at(domain, t.level, x);
    const double n = domain.cells_per_axis(t.level);
    std::array<CellPieces, kMaxDim> tab{CellPieces(p, d > 0 ? n * x[0] - host.index[0] : 0.0, alpha[0]),
                                        CellPieces(p, d > 1 ? n * x[1] - host.index[1] : 0.0, alpha[1]),
                                        CellPieces(p, d > 2 ? n * x[2] - host.index[2] : 0.0, alpha[2])};
    double scale = 1.0;
    for (int i = 0; i < d; ++i) scale *= std::pow(n, alpha[i]);
    Index lo{};
    for (int i = 0; i < d; ++i) lo[i] = host.index[i] - p;
    for_each_in_box(d, lo, host.index, [&](const Index& k) {
      const auto it = t.coefficients.find(k);
      if (it == t.coefficients.end()) return;
      double v = it->second * scale;
      for (int i = 0; i < d; ++i) v *= tab[i].value(alpha[i], host.index[i] - k[i]);
      sum += v;
    });
  }
  return sum;
}

double eval_level_splines(const std::vector<LevelSpline>& terms, int p, const Domain& domain, const Point& x,
                          const Index& alpha) {
  return eval_level_splines(terms, p, domain, CellId{-1, {}}, x, alpha);
}

double qi_error(const SmoothFunction& f, const SplineField& s, const CellSet& region, const Index& alpha,
                double q) {
  const HBBasis& basis = s.basis();
  const int p = basis.degree();
  check_alpha(alpha, p, basis.dim());
  const bool sup = std::isinf(q);
  if (!sup && q != 2.0) throw Error(ErrorCode::InvalidArgument, "only q = 2 and q = infinity are supported");
  std::vector<CellId> pieces;
  for (const auto& c : region.cells()) {
    const auto cover = basis.mesh().active_cover(c);
    pieces.insert(pieces.end(), cover.begin(), cover.end());
  }
  const GaussRule rule = gauss_legendre(p + 3);
  std::vector<double> local(pieces.size(), 0.0);
  parallel_for(pieces.size(), [&](std::size_t i) {
    std::vector<Point> points;
    std::vector<double> weights;
    if (sup) {
      points = sample_grid(basis.domain(), pieces[i], 5);
    } else {
      const CellQuadrature cq = cell_quadrature(basis.domain(), pieces[i], rule);
      points = cq.points;
      weights = cq.weights;
    }
    std::vector<int> dofs;
    const auto v = eval_basis_derivative_on_cell(basis, pieces[i], points, alpha, dofs);
    const std::size_t nf = dofs.size();
    double acc = 0.0;
    for (std::size_t j = 0; j < points.size(); ++j) {
      double sv = 0.0;
      for (std::size_t k = 0; k < nf; ++k) sv += s.coefficients()[dofs[k]] * v[j * nf + k];
      const double e = f(points[j], alpha) - sv;
      acc = sup ? std::max(acc, std::abs(e)) : acc + weights[j] * e * e;
    }
    local[i] = acc;
  });
  double total = 0.0;
  for (double v : local) total = sup ? std::max(total, v) : total + v;
  return sup ? total : std::sqrt(total);
}

double seminorm_error(const SmoothFunction& f, const SplineField& s, const CellSet& region, int k) {
  double sum = 0.0;
  for (const auto& alpha : multi_indices(s.basis().dim(), k, s.basis().degree())) {
    const double e = qi_error(f, s, region, alpha, 2.0);
    sum += e * e;
  }
  return std::sqrt(sum);
}

double sobolev_seminorm(const SmoothFunction& g, const Domain& domain, const CellSet& region, int k,
                        int quad_points) {
  const GaussRule rule = gauss_legendre(quad_points);
  const auto alphas = multi_indices(domain.dim, k, k);
  const auto cells = region.cells();
  std::vector<double> local(cells.size(), 0.0);
  parallel_for(cells.size(), [&](std::size_t i) {
    const CellQuadrature cq = cell_quadrature(domain, cells[i], rule);
    double acc = 0.0;
    for (std::size_t j = 0; j < cq.points.size(); ++j) {
      for (const auto& a : alphas) {
        const double v = g(cq.points[j], a);
        acc += cq.weights[j] * v * v;
      }
    }
    local[i] = acc;
  });
  double total = 0.0;
  for (double v : local) total += v;
  return std::sqrt(total);
}

LevelSet extension_of_set(const LevelSet& cells, int level, int p, const Domain& domain) {
  LevelSet out;
  for (const auto& k : cells) out.merge(support_extension({level, k}, p, domain));
  return out;
}

EstimateNeighborhood neighborhood_N(const CellId& cell, const HierarchicalMesh& mesh) {
  if (!mesh.is_active(cell)) {
    throw Error(ErrorCode::InvalidArgument, to_string(cell, mesh.dim()) + " is not active");
  }
  const int p = mesh.degree();
  const Domain& domain = mesh.domain();
  EstimateNeighborhood out;
  out.power = approximation_power(mesh, cell);
  out.h = domain.cell_size(out.power);
  auto fill = [&](const LevelSet& cells, int level) {
    for (const auto& k : cells) out.cells.insert({level, k});
  };
  if (out.power == cell.level) {
    fill(support_extension(cell, p, domain), cell.level);
  } else if (out.power >= 1) {
    const CellId anc = parent(cell, out.power - 1);
    fill(support_extension(anc, p, domain), anc.level);
  } else {
    const CellId anc = parent(cell, 0);
    fill(extension_of_set(support_extension(anc, p, domain), 0, p, domain), 0);
  }
  return out;
}

std::vector<LocalRatio> local_estimate_ratios(const SmoothFunction& f, const SplineField& s) {
  const HBBasis& basis = s.basis();
  const HierarchicalMesh& mesh = basis.mesh();
  const int p = basis.degree();
  const auto cells = mesh.active_cells();
  std::vector<EstimateNeighborhood> hoods;
  hoods.reserve(cells.size());
  std::map<CellId, std::size_t> slot;
  std::vector<CellId> needed;
  for (const auto& c : cells) {
    hoods.push_back(neighborhood_N(c, mesh));
    for (const auto& n : hoods.back().cells.cells()) {
      if (slot.emplace(n, needed.size()).second) needed.push_back(n);
    }
  }
  std::vector<double> semi(needed.size());
  parallel_for(needed.size(), [&](std::size_t i) {
    CellSet one;
    one.insert(needed[i]);
    const double v = sobolev_seminorm(f, basis.domain(), one, p + 1, p + 3);
    semi[i] = v * v;
  });
  std::vector<LocalRatio> out(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    CellSet one;
    one.insert(cells[i]);
    double sq = 0.0;
    for (const auto& n : hoods[i].cells.cells()) sq += semi[slot.at(n)];
    LocalRatio& r = out[i];
    r.cell = cells[i];
    r.error = qi_error(f, s, one, {}, 2.0);
    r.bound = std::pow(hoods[i].h, p + 1) * std::sqrt(sq);
    r.ratio = r.bound > 0.0 ? r.error / r.bound : 0.0;
  }
  return out;
}

}  // namespace wahm
