#include "wahm/mesh.hpp"

#include <limits>

#include "wahm/error.hpp"

namespace wahm {

CellId parent(const CellId& cell, int target) {
  if (target < 0 || target >= cell.level) {
    throw Error(ErrorCode::LevelOutOfRange, "parent level must satisfy 0 <= k < level");
  }
  const int shift = cell.level - target;
  CellId out{target, {}};
  for (int i = 0; i < kMaxDim; ++i) out.index[i] = floor_shift(cell.index[i], shift);
  return out;
}

LevelSet children(const CellId& cell, int target, int dim) {
  if (target <= cell.level) {
    throw Error(ErrorCode::LevelOutOfRange, "children level must exceed the cell level");
  }
  const int shift = target - cell.level;
  Index lo{}, hi{};
  for (int i = 0; i < dim; ++i) {
    lo[i] = cell.index[i] << shift;
    hi[i] = lo[i] + (1 << shift) - 1;
  }
  LevelSet out;
  for_each_in_box(dim, lo, hi, [&](const Index& k) { out.insert(k); });
  return out;
}

LevelSet support_extension_inf(const CellId& cell, int p, int dim) {
  Index lo{}, hi{};
  for (int i = 0; i < dim; ++i) {
    lo[i] = cell.index[i] - p;
    hi[i] = cell.index[i] + p;
  }
  LevelSet out;
  for_each_in_box(dim, lo, hi, [&](const Index& k) { out.insert(k); });
  return out;
}

LevelSet support_extension(const CellId& cell, int p, const Domain& domain) {
  if (!domain.contains(cell)) throw Error(ErrorCode::CellOutsideDomain, to_string(cell, domain.dim));
  const int n = domain.cells_per_axis(cell.level);
  Index lo{}, hi{};
  for (int i = 0; i < domain.dim; ++i) {
    lo[i] = std::max(cell.index[i] - p, 0);
    hi[i] = std::min(cell.index[i] + p, n - 1);
  }
  LevelSet out;
  for_each_in_box(domain.dim, lo, hi, [&](const Index& k) { out.insert(k); });
  return out;
}

namespace {

// Inclusive corners of the neighborhood block (level cell.level - 1).
std::pair<Index, Index> neighborhood_box(const CellId& cell, int p, int dim) {
  if (cell.level < 1) throw Error(ErrorCode::LevelZeroCell, "neighborhood needs level >= 1");
  Index lo{}, hi{};
  for (int i = 0; i < dim; ++i) {
    lo[i] = floor_shift(cell.index[i] - p, 1);
    hi[i] = floor_shift(cell.index[i] + p, 1);
  }
  return {lo, hi};
}

}  // namespace

LevelSet neighborhood(const CellId& cell, int p, int dim) {
  const auto [lo, hi] = neighborhood_box(cell, p, dim);
  LevelSet out;
  for_each_in_box(dim, lo, hi, [&](const Index& k) { out.insert(k); });
  return out;
}

LevelSet neighborhood_in_domain(const CellId& cell, int p, const Domain& domain) {
  auto [lo, hi] = neighborhood_box(cell, p, domain.dim);
  const int n = domain.cells_per_axis(cell.level - 1);
  for (int i = 0; i < domain.dim; ++i) {
    lo[i] = std::max(lo[i], 0);
    hi[i] = std::min(hi[i], n - 1);
  }
  LevelSet out;
  for_each_in_box(domain.dim, lo, hi, [&](const Index& k) { out.insert(k); });
  return out;
}

std::pair<Index, Index> bspline_support_box(const LevelSet& block, int p, int dim) {
  std::size_t expected = 1;
  for (int i = 0; i < dim; ++i) expected *= static_cast<std::size_t>(p + 1);
  if (block.size() != expected) {
    throw Error(ErrorCode::NotABsplineSupport, "block does not hold (p+1)^d cells");
  }
  Index lo{}, hi{};
  for (int i = 0; i < dim; ++i) {
    lo[i] = std::numeric_limits<int>::max();
    hi[i] = std::numeric_limits<int>::min();
  }
  for (const auto& k : block) {
    for (int i = 0; i < dim; ++i) {
      lo[i] = std::min(lo[i], k[i]);
      hi[i] = std::max(hi[i], k[i]);
    }
  }
  for (int i = 0; i < dim; ++i) {
    if (hi[i] - lo[i] != p) throw Error(ErrorCode::NotABsplineSupport, "block is not a (p+1)^d box");
  }
  return {lo, hi};
}

LevelSet core(const LevelSet& block, int p, int dim) {
  const auto [lo, hi] = bspline_support_box(block, p, dim);
  (void)hi;
  Index clo{}, chi{};
  for (int i = 0; i < dim; ++i) {
    clo[i] = 2 * lo[i] + p;
    chi[i] = clo[i] + 1;
  }
  LevelSet out;
  for_each_in_box(dim, clo, chi, [&](const Index& k) { out.insert(k); });
  return out;
}

bool parent_extension_identity(const CellId& cell, int p, int dim) {
  const LevelSet lhs = support_extension_inf(parent(cell), p, dim);
  LevelSet rhs;
  for (const auto& k : support_extension_inf(cell, p, dim)) {
    rhs.merge(neighborhood(CellId{cell.level, k}, p, dim));
  }
  return lhs == rhs;
}

bool is_p_form(const LevelSet& block, int block_level, const LevelSet& omega0, int omega0_level,
               int p, int dim) {
  if (omega0_level > block_level + 1) {
    throw Error(ErrorCode::LevelOutOfRange, "omega0 must be given at level <= block level + 1");
  }
  // Cells whose infinite support extension fits in the block are exactly its core.
  for (const auto& k : core(block, p, dim)) {
    const CellId q{block_level + 1, k};
    const CellId anc = omega0_level == q.level ? q : parent(q, omega0_level);
    if (omega0.contains(anc.index)) return true;
  }
  return false;
}

bool is_p_form(const LevelSet& block, int block_level, int p, const Domain& domain) {
  for (const auto& k : core(block, p, domain.dim)) {
    if (domain.contains(CellId{block_level + 1, k})) return true;
  }
  return false;
}

LevelSet refine_to_level(const LevelSet& cells, int from, int to, int dim) {
  if (to == from) return cells;
  LevelSet out;
  for (const auto& k : cells) out.merge(children(CellId{from, k}, to, dim));
  return out;
}

LevelSet coarsen_to_level(const LevelSet& cells, int from, int to, int dim) {
  (void)dim;
  if (to == from) return cells;
  LevelSet out;
  for (const auto& k : cells) out.insert(parent(CellId{from, k}, to).index);
  return out;
}

}  // namespace wahm
