#include "wahm/basis.hpp"

#include <algorithm>
#include <cmath>

#include "wahm/error.hpp"
#include "wahm/mesh.hpp"

namespace wahm {

namespace {

CellId ancestor_or_self(const CellId& cell, int level) {
  return cell.level == level ? cell : parent(cell, level);
}

void check_alpha(const Index& alpha, int p, int dim) {
  for (int i = 0; i < dim; ++i) {
    if (alpha[i] < 0 || alpha[i] > p) {
      throw Error(ErrorCode::DerivativeOrderExceedsDegree, "derivative order must lie in [0, p]");
    }
  }
}

}  // namespace

LevelSet support_cells(const SplineAnchor& a, int p, const Domain& domain) {
  const int n = domain.cells_per_axis(a.level);
  Index lo{}, hi{};
  for (int i = 0; i < domain.dim; ++i) {
    lo[i] = std::max(a.index[i], 0);
    hi[i] = std::min(a.index[i] + p, n - 1);
  }
  LevelSet out;
  for_each_in_box(domain.dim, lo, hi, [&](const Index& k) { out.insert(k); });
  return out;
}

bool is_relevant(const SplineAnchor& a, int p, const Domain& domain) {
  const int n = domain.cells_per_axis(a.level);
  for (int i = 0; i < domain.dim; ++i) {
    if (a.index[i] < -p || a.index[i] > n - 1) return false;
  }
  return true;
}

double eval_on_cell(const SplineAnchor& a, int p, const Domain& domain, const CellId& cell,
                    const Point& x, const Index& alpha) {
  check_alpha(alpha, p, domain.dim);
  if (cell.level < a.level) throw Error(ErrorCode::InvalidArgument, "cell coarser than the function");
  const CellId host = ancestor_or_self(cell, a.level);
  const double n = domain.cells_per_axis(a.level);
  double v = 1.0;
  for (int i = 0; i < domain.dim; ++i) {
    const int piece = host.index[i] - a.index[i];
    if (piece < 0 || piece > p) return 0.0;
    const double t = n * x[i] - host.index[i];
    v *= CellPieces(p, t, alpha[i]).value(alpha[i], piece) * std::pow(n, alpha[i]);
  }
  return v;
}

double eval_tensor_bspline(const SplineAnchor& a, int p, const Domain& domain, const Point& x,
                           const Index& alpha) {
  const int n = domain.cells_per_axis(a.level);
  CellId cell{a.level, {}};
  for (int i = 0; i < domain.dim; ++i) {
    if (x[i] < 0.0 || x[i] > 1.0) return 0.0;
    cell.index[i] = std::clamp(static_cast<int>(std::floor(x[i] * n)), 0, n - 1);
  }
  return eval_on_cell(a, p, domain, cell, x, alpha);
}

HBBasis::HBBasis(HierarchicalMesh mesh) : mesh_(std::move(mesh)) {
  const int p = degree();
  const int d = dim();
  const auto& h = mesh_.hierarchy();
  dof_.resize(depth());
  restricted_.resize(depth());
  for (int l = 0; l < depth(); ++l) {
    const LevelSet inside = h.subdomain_cells(l);
    const LevelSet& finer = h.subdomain(l + 1);  // Omega_{l+1} as level-l cells
    LevelSet candidates;
    for (const auto& k : inside) {
      Index lo{}, hi = k;
      for (int i = 0; i < d; ++i) lo[i] = k[i] - p;
      for_each_in_box(d, lo, hi, [&](const Index& a) { candidates.insert(a); });
    }
    for (const auto& a : candidates) {
      const LevelSet supp = support_cells({l, a}, p, domain());
      if (!supp.is_subset_of(inside)) continue;
      if (!finer.empty() && supp.is_subset_of(finer)) continue;
      dof_[l].emplace(a, static_cast<int>(anchors_.size()));
      anchors_.push_back({l, a});
    }
    for (const auto& q : mesh_.omega(l)) {
      Index lo{}, hi = q;
      for (int i = 0; i < d; ++i) lo[i] = q[i] - p;
      for_each_in_box(d, lo, hi, [&](const Index& a) { restricted_[l].insert(a); });
    }
  }
}

int HBBasis::dof(const SplineAnchor& a) const {
  if (a.level < 0 || a.level >= depth()) return -1;
  const auto it = dof_[a.level].find(a.index);
  return it == dof_[a.level].end() ? -1 : it->second;
}

LevelSet HBBasis::active(int l) const {
  LevelSet out;
  if (l < 0 || l >= depth()) return out;
  for (const auto& [k, _] : dof_[l]) out.insert(k);
  return out;
}

const LevelSet& HBBasis::restricted(int l) const {
  static const LevelSet empty;
  if (l < 0 || l >= depth()) return empty;
  return restricted_[l];
}

std::vector<int> HBBasis::functions_on_cell(const CellId& cell) const {
  std::vector<int> out;
  const int p = degree();
  const int top = std::min(cell.level, depth() - 1);
  for (int j = 0; j <= top; ++j) {
    const Index host = ancestor_or_self(cell, j).index;
    Index lo{}, hi = host;
    for (int i = 0; i < dim(); ++i) lo[i] = host[i] - p;
    for_each_in_box(dim(), lo, hi, [&](const Index& a) {
      const auto it = dof_[j].find(a);
      if (it != dof_[j].end()) out.push_back(it->second);
    });
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::shared_ptr<const HBBasis> build_hb_basis(const HierarchicalMesh& mesh) {
  return std::make_shared<const HBBasis>(mesh);
}

CellBasisValues eval_basis_on_cell(const HBBasis& basis, const CellId& cell,
                                   const std::vector<Point>& points, int order) {
  const int p = basis.degree();
  const int d = basis.dim();
  const Domain& domain = basis.domain();
  CellBasisValues out;
  out.order = order;
  out.dofs = basis.functions_on_cell(cell);
  const std::size_t nf = out.dofs.size();
  out.value.resize(points.size() * nf);
  if (order >= 1) out.gradient.resize(points.size() * nf);
  if (order >= 2) out.laplacian.resize(points.size() * nf);

  // Piece index per function and axis, and the host cell of every level.
  const int levels = std::min(cell.level, basis.depth() - 1) + 1;
  std::vector<Index> hosts(levels);
  for (int j = 0; j < levels; ++j) hosts[j] = ancestor_or_self(cell, j).index;
  std::vector<Index> piece(nf);
  for (std::size_t f = 0; f < nf; ++f) {
    const auto& a = basis.anchor(out.dofs[f]);
    for (int i = 0; i < d; ++i) piece[f][i] = hosts[a.level][i] - a.index[i];
  }

  std::vector<std::array<CellPieces, kMaxDim>> tables;
  tables.reserve(levels);
  for (std::size_t q = 0; q < points.size(); ++q) {
    tables.clear();
    for (int j = 0; j < levels; ++j) {
      const double n = domain.cells_per_axis(j);
      auto make = [&](int i) {
        return CellPieces(p, i < d ? n * points[q][i] - hosts[j][i] : 0.0, std::min(order, p));
      };
      tables.push_back({make(0), make(1), make(2)});
    }
    for (std::size_t f = 0; f < nf; ++f) {
      const int l = basis.anchor(out.dofs[f]).level;
      const double n = domain.cells_per_axis(l);
      const auto& tab = tables[l];
      std::array<std::array<double, 3>, kMaxDim> v{};
      for (int i = 0; i < d; ++i) {
        for (int r = 0; r <= std::min(order, 2); ++r) {
          v[i][r] = r <= p ? tab[i].value(r, piece[f][i]) * std::pow(n, r) : 0.0;
        }
      }
      double value = 1.0;
      for (int i = 0; i < d; ++i) value *= v[i][0];
      out.value[q * nf + f] = value;
      if (order >= 1) {
        Point g{};
        double lap = 0.0;
        for (int i = 0; i < d; ++i) {
          double gi = v[i][1], li = order >= 2 ? v[i][2] : 0.0;
          for (int k = 0; k < d; ++k) {
            if (k == i) continue;
            gi *= v[k][0];
            li *= v[k][0];
          }
          g[i] = gi;
          lap += li;
        }
        out.gradient[q * nf + f] = g;
        if (order >= 2) out.laplacian[q * nf + f] = lap;
      }
    }
  }
  return out;
}

std::vector<double> eval_basis_derivative_on_cell(const HBBasis& basis, const CellId& cell,
                                                  const std::vector<Point>& points, const Index& alpha,
                                                  std::vector<int>& dofs) {
  const int p = basis.degree();
  const int d = basis.dim();
  check_alpha(alpha, p, d);
  const Domain& domain = basis.domain();
  dofs = basis.functions_on_cell(cell);
  const std::size_t nf = dofs.size();
  std::vector<double> out(points.size() * nf);
  const int levels = std::min(cell.level, basis.depth() - 1) + 1;
  std::vector<Index> hosts(levels);
  for (int j = 0; j < levels; ++j) hosts[j] = ancestor_or_self(cell, j).index;
  std::vector<double> scale(levels, 1.0);
  for (int j = 0; j < levels; ++j) {
    for (int i = 0; i < d; ++i) scale[j] *= std::pow(domain.cells_per_axis(j), alpha[i]);
  }
  for (std::size_t q = 0; q < points.size(); ++q) {
    std::vector<std::array<CellPieces, kMaxDim>> tables;
    tables.reserve(levels);
    for (int j = 0; j < levels; ++j) {
      const double n = domain.cells_per_axis(j);
      auto make = [&](int i) { return CellPieces(p, i < d ? n * points[q][i] - hosts[j][i] : 0.0, alpha[i]); };
      tables.push_back({make(0), make(1), make(2)});
    }
    for (std::size_t f = 0; f < nf; ++f) {
      const auto& a = basis.anchor(dofs[f]);
      double v = scale[a.level];
      for (int i = 0; i < d; ++i) v *= tables[a.level][i].value(alpha[i], hosts[a.level][i] - a.index[i]);
      out[q * nf + f] = v;
    }
  }
  return out;
}

SplineField::SplineField(std::shared_ptr<const HBBasis> basis, std::vector<double> coefficients)
    : basis_(std::move(basis)), coefficients_(std::move(coefficients)) {
  if (coefficients_.size() != basis_->size()) {
    throw Error(ErrorCode::InvalidArgument, "coefficient count differs from basis size");
  }
}

double SplineField::eval(const Point& x, const Index& alpha) const {
  return eval_on_cell(basis_->mesh().locate(x), x, alpha);
}

double SplineField::eval_on_cell(const CellId& cell, const Point& x, const Index& alpha) const {
  const auto& b = *basis_;
  double s = 0.0;
  for (int f : b.functions_on_cell(cell)) {
    if (coefficients_[f] == 0.0) continue;
    s += coefficients_[f] * wahm::eval_on_cell(b.anchor(f), b.degree(), b.domain(), cell, x, alpha);
  }
  return s;
}

std::vector<double> to_hb_coefficients(const HBBasis& basis, LevelCoefficients levels) {
  const int p = basis.degree();
  const int d = basis.dim();
  const Domain& domain = basis.domain();
  const auto& h = basis.mesh().hierarchy();
  const auto two_scale = two_scale_coefficients(p);
  std::vector<double> out(basis.size(), 0.0);
  if (levels.size() < static_cast<std::size_t>(basis.depth())) levels.resize(basis.depth());
  for (std::size_t l = 0; l < levels.size(); ++l) {
    const int level = static_cast<int>(l);
    for (const auto& [k, c] : levels[l]) {
      if (c == 0.0) continue;
      const SplineAnchor a{level, k};
      const int dof = basis.dof(a);
      if (dof >= 0) {
        out[dof] += c;
        continue;
      }
      if (!is_relevant(a, p, domain)) continue;
      if (level + 1 >= basis.depth()) {
        throw Error(ErrorCode::InvalidArgument, "function not in the span of the hierarchical basis");
      }
      for (const auto& s : support_cells(a, p, domain)) {
        if (!h.contains(level, CellId{level, s})) {
          throw Error(ErrorCode::InvalidArgument, "function not in the span of the hierarchical basis");
        }
      }
      Index lo{}, hi{};
      for (int i = 0; i < d; ++i) hi[i] = p + 1;
      const SplineAnchor probe{level + 1, {}};
      for_each_in_box(d, lo, hi, [&](const Index& j) {
        SplineAnchor child = probe;
        double w = c;
        for (int i = 0; i < d; ++i) {
          child.index[i] = 2 * k[i] + j[i];
          w *= two_scale[j[i]];
        }
        if (is_relevant(child, p, domain)) levels[l + 1][child.index] += w;
      });
    }
  }
  return out;
}

LevelCoefficients level_coefficients(const SplineField& s) {
  const auto& b = s.basis();
  LevelCoefficients out(b.depth());
  for (std::size_t f = 0; f < b.size(); ++f) {
    out[b.anchor(static_cast<int>(f)).level][b.anchor(static_cast<int>(f)).index] += s.coefficients()[f];
  }
  return out;
}

nlohmann::json to_json(const SplineField& s) {
  const auto& b = s.basis();
  nlohmann::json dofs = nlohmann::json::array();
  for (std::size_t f = 0; f < b.size(); ++f) {
    const auto& a = b.anchor(static_cast<int>(f));
    std::vector<int> k(a.index.begin(), a.index.begin() + b.dim());
    dofs.push_back({a.level, k, s.coefficients()[f]});
  }
  return {{"dim", b.dim()},
          {"degree", b.degree()},
          {"coarse_grid", b.domain().coarse},
          {"dofs", std::move(dofs)}};
}

}  // namespace wahm
