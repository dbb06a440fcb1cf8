#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <set>
#include <string>
#include <vector>

namespace wahm {

inline constexpr int kMaxDim = 3;

/// Integer multi-index; components past the active dimension stay zero.
using Index = std::array<int, kMaxDim>;
/// Point of the unit domain; components past the active dimension are ignored.
using Point = std::array<double, kMaxDim>;

/// Dyadic cell of level `level`: the box prod_i [k_i, k_i + 1] * h_level.
struct CellId {
  int level = 0;
  Index index{};

  auto operator<=>(const CellId&) const = default;
  bool operator==(const CellId&) const = default;
};

std::string to_string(const CellId& cell, int dim);

/// The unit hypercube [0,1]^d with an N0 x ... x N0 coarse grid (N0 a power of two).
/// Level-l cells have side 1 / (N0 * 2^l); every index predicate is integer-only.
struct Domain {
  int dim = 2;
  int coarse = 1;

  Domain() = default;
  Domain(int dim_, int coarse_);

  int cells_per_axis(int level) const { return coarse << level; }
  double cell_size(int level) const { return 1.0 / static_cast<double>(cells_per_axis(level)); }
  bool contains(const CellId& cell) const;
  bool operator==(const Domain&) const = default;
};

/// Sorted, deduplicated set of indices of one level.
class LevelSet {
 public:
  using const_iterator = std::set<Index>::const_iterator;

  LevelSet() = default;
  LevelSet(std::initializer_list<Index> cells) : cells_(cells) {}

  bool insert(const Index& k) { return cells_.insert(k).second; }
  bool erase(const Index& k) { return cells_.erase(k) > 0; }
  bool contains(const Index& k) const { return cells_.count(k) != 0; }
  std::size_t size() const { return cells_.size(); }
  bool empty() const { return cells_.empty(); }
  void clear() { cells_.clear(); }

  const_iterator begin() const { return cells_.begin(); }
  const_iterator end() const { return cells_.end(); }

  void merge(const LevelSet& other);
  bool is_subset_of(const LevelSet& other) const;
  LevelSet intersection(const LevelSet& other) const;
  LevelSet difference(const LevelSet& other) const;

  bool operator==(const LevelSet&) const = default;

 private:
  std::set<Index> cells_;
};

LevelSet set_union(const LevelSet& a, const LevelSet& b);

/// Mixed-level cell collection bucketed per level.
class CellSet {
 public:
  CellSet() = default;

  bool insert(const CellId& cell);
  bool contains(const CellId& cell) const;
  std::size_t size() const;
  bool empty() const { return size() == 0; }

  /// Number of level buckets (highest level + 1); buckets may be empty.
  int levels() const { return static_cast<int>(levels_.size()); }
  const LevelSet& level(int l) const;
  LevelSet& level_mut(int l);

  std::vector<CellId> cells() const;
  void merge(const CellSet& other);

  bool operator==(const CellSet& other) const;

 private:
  std::vector<LevelSet> levels_;
};

/// floor(a / 2^shift) for any sign of a.
constexpr int floor_shift(int a, int shift) { return a >> shift; }

/// Calls fn(Index) for every index in the inclusive box [lo, hi] over the first `dim` axes,
/// last axis fastest (lexicographic order).
template <class Fn>
void for_each_in_box(int dim, const Index& lo, const Index& hi, Fn&& fn) {
  for (int i = 0; i < dim; ++i) {
    if (lo[i] > hi[i]) return;
  }
  Index k{};
  for (int i = 0; i < dim; ++i) k[i] = lo[i];
  while (true) {
    fn(static_cast<const Index&>(k));
    int axis = dim - 1;
    while (axis >= 0) {
      if (++k[axis] <= hi[axis]) break;
      k[axis] = lo[axis];
      --axis;
    }
    if (axis < 0) return;
  }
}

/// Lexicographic list of all level-l cells of the domain.
LevelSet full_grid(const Domain& domain, int level);

/// Midpoint of a cell in physical coordinates.
Point midpoint(const Domain& domain, const CellId& cell);

/// Euclidean distance between cell midpoints.
double midpoint_distance(const Domain& domain, const CellId& a, const CellId& b);

}  // namespace wahm
