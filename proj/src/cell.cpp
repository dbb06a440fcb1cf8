#include "wahm/cell.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "wahm/error.hpp"

namespace wahm {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::LevelOutOfRange: return "level-out-of-range";
    case ErrorCode::CellOutsideDomain: return "cell-outside-domain";
    case ErrorCode::LevelZeroCell: return "level-zero-cell";
    case ErrorCode::NotABsplineSupport: return "input-not-a-bspline-support";
    case ErrorCode::InvalidHierarchy: return "invalid-hierarchy";
    case ErrorCode::NotClustered: return "hierarchy-not-clustered";
    case ErrorCode::NotWeaklyAdmissible: return "mesh-not-weakly-admissible";
    case ErrorCode::NotStrictlyAdmissible: return "input-not-strictly-admissible";
    case ErrorCode::CellNotInSubdomain: return "cell-not-in-its-subdomain";
    case ErrorCode::MarkedCellNotActive: return "marked-cell-not-active";
    case ErrorCode::ProbeCellUnavailable: return "probe-cell-unavailable";
    case ErrorCode::DerivativeOrderExceedsDegree: return "derivative-order-exceeds-p";
    case ErrorCode::SingularMatrix: return "singular-matrix";
    case ErrorCode::PenaltyTooSmall: return "penalty-too-small";
    case ErrorCode::NonpositiveError: return "nonpositive-error";
    case ErrorCode::EmptyEstimatorMap: return "empty-estimator-map";
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::UnsupportedDimension: return "unsupported-dimension";
    case ErrorCode::ParseError: return "parse-error";
  }
  return "unknown";
}

std::string to_string(const CellId& cell, int dim) {
  std::ostringstream os;
  os << "(" << cell.level << ",(";
  for (int i = 0; i < dim; ++i) {
    if (i) os << ",";
    os << cell.index[i];
  }
  os << "))";
  return os.str();
}

Domain::Domain(int dim_, int coarse_) : dim(dim_), coarse(coarse_) {
  if (dim < 1 || dim > kMaxDim) {
    throw Error(ErrorCode::UnsupportedDimension, "dimension must be 1, 2 or 3");
  }
  if (coarse < 1 || (coarse & (coarse - 1)) != 0) {
    throw Error(ErrorCode::InvalidArgument, "coarse grid size must be a power of two");
  }
}

bool Domain::contains(const CellId& cell) const {
  if (cell.level < 0) return false;
  const int n = cells_per_axis(cell.level);
  for (int i = 0; i < dim; ++i) {
    if (cell.index[i] < 0 || cell.index[i] >= n) return false;
  }
  for (int i = dim; i < kMaxDim; ++i) {
    if (cell.index[i] != 0) return false;
  }
  return true;
}

void LevelSet::merge(const LevelSet& other) { cells_.insert(other.cells_.begin(), other.cells_.end()); }

bool LevelSet::is_subset_of(const LevelSet& other) const {
  if (size() > other.size()) return false;
  if (size() * 16 < other.size()) {
    return std::all_of(cells_.begin(), cells_.end(), [&](const Index& k) { return other.contains(k); });
  }
  return std::includes(other.cells_.begin(), other.cells_.end(), cells_.begin(), cells_.end());
}

LevelSet LevelSet::intersection(const LevelSet& other) const {
  LevelSet out;
  if (size() * 16 < other.size() || other.size() * 16 < size()) {
    const LevelSet& small = size() < other.size() ? *this : other;
    const LevelSet& large = size() < other.size() ? other : *this;
    for (const auto& k : small) {
      if (large.contains(k)) out.cells_.insert(out.cells_.end(), k);
    }
    return out;
  }
  std::set_intersection(cells_.begin(), cells_.end(), other.cells_.begin(), other.cells_.end(),
                        std::inserter(out.cells_, out.cells_.end()));
  return out;
}

LevelSet LevelSet::difference(const LevelSet& other) const {
  LevelSet out;
  std::set_difference(cells_.begin(), cells_.end(), other.cells_.begin(), other.cells_.end(),
                      std::inserter(out.cells_, out.cells_.end()));
  return out;
}

LevelSet set_union(const LevelSet& a, const LevelSet& b) {
  LevelSet out = a;
  out.merge(b);
  return out;
}

bool CellSet::insert(const CellId& cell) {
  if (cell.level < 0) throw Error(ErrorCode::LevelOutOfRange, "negative level");
  if (cell.level >= levels()) levels_.resize(cell.level + 1);
  return levels_[cell.level].insert(cell.index);
}

bool CellSet::contains(const CellId& cell) const {
  if (cell.level < 0 || cell.level >= levels()) return false;
  return levels_[cell.level].contains(cell.index);
}

std::size_t CellSet::size() const {
  std::size_t n = 0;
  for (const auto& l : levels_) n += l.size();
  return n;
}

const LevelSet& CellSet::level(int l) const {
  static const LevelSet empty;
  if (l < 0 || l >= levels()) return empty;
  return levels_[l];
}

LevelSet& CellSet::level_mut(int l) {
  if (l < 0) throw Error(ErrorCode::LevelOutOfRange, "negative level");
  if (l >= levels()) levels_.resize(l + 1);
  return levels_[l];
}

std::vector<CellId> CellSet::cells() const {
  std::vector<CellId> out;
  out.reserve(size());
  for (int l = 0; l < levels(); ++l) {
    for (const auto& k : levels_[l]) out.push_back({l, k});
  }
  return out;
}

void CellSet::merge(const CellSet& other) {
  for (int l = 0; l < other.levels(); ++l) {
    if (!other.level(l).empty()) level_mut(l).merge(other.level(l));
  }
}

bool CellSet::operator==(const CellSet& other) const {
  const int n = std::max(levels(), other.levels());
  for (int l = 0; l < n; ++l) {
    if (!(level(l) == other.level(l))) return false;
  }
  return true;
}

LevelSet full_grid(const Domain& domain, int level) {
  LevelSet out;
  const int n = domain.cells_per_axis(level);
  Index lo{}, hi{};
  for (int i = 0; i < domain.dim; ++i) hi[i] = n - 1;
  for_each_in_box(domain.dim, lo, hi, [&](const Index& k) { out.insert(k); });
  return out;
}

Point midpoint(const Domain& domain, const CellId& cell) {
  std::array<double, kMaxDim> x{};
  const double h = domain.cell_size(cell.level);
  for (int i = 0; i < domain.dim; ++i) x[i] = (cell.index[i] + 0.5) * h;
  return x;
}

double midpoint_distance(const Domain& domain, const CellId& a, const CellId& b) {
  const auto xa = midpoint(domain, a);
  const auto xb = midpoint(domain, b);
  double s = 0.0;
  for (int i = 0; i < domain.dim; ++i) s += (xa[i] - xb[i]) * (xa[i] - xb[i]);
  return std::sqrt(s);
}

}  // namespace wahm
