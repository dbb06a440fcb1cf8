#pragma once

#include <string>
#include <vector>

#include "wahm/cell.hpp"
#include "wahm/hierarchy.hpp"

namespace wahm {

/// Marked cells bucketed per level.
using MarkSet = CellSet;

struct SplitMarks {
  MarkSet optimal;     ///< M1: cells of power equal to their level
  MarkSet suboptimal;  ///< M2: cells of power level - 1 (active or deactivated)
};

/// Moves every marked cell whose power is below level - 1 to its parent,
/// level by level from the finest one. Throws MarkedCellNotActive.
SplitMarks update_marked_elements(const HierarchicalMesh& mesh, const MarkSet& marks);

/// Cells that must be refined to bring every marked cell one power up while keeping the
/// mesh weakly admissible, computed level by level from the top with the full omega*
/// (the explicit procedure). Requires a clustered WAHM.
MarkSet adaptive_refinement_marks(const HierarchicalMesh& mesh, const MarkSet& marks);

/// The same selection through recursion on neighborhoods (no omega* construction).
MarkSet weakly_admissible_marking_recursive(const HierarchicalMesh& mesh, const MarkSet& marks);

/// Adds to `out` the level-(l-1) active cells needed to place the level-l cell in omega*_l,
/// recursing on parents whenever weak admissibility would break. `visited` memoizes cells
/// already processed. Throws LevelZeroCell.
void mark_recursive(const HierarchicalMesh& mesh, const CellId& cell, MarkSet& out, CellSet& visited);
MarkSet mark_recursive(const HierarchicalMesh& mesh, const CellId& cell);

/// Omega*_l = Omega_l ∪ marks_{l-1}. Throws MarkedCellNotActive.
HierarchicalMesh refine_hierarchical_mesh(const HierarchicalMesh& mesh, const MarkSet& marks);

/// Refinement closure keeping strict admissibility of class m: every cell to refine first
/// forces the active level-(l-m+1) cells around it to be refined. Throws NotStrictlyAdmissible.
MarkSet sa_marking(const HierarchicalMesh& mesh, const MarkSet& marks, int m = 2);

/// Constants of the refinement complexity bound.
struct ComplexityConstants {
  double c_tilde = 0.0;  ///< 1.5 sqrt(d) (2p + 1)
  double c_bound = 0.0;  ///< 4 (4 c_tilde + 1)^d
};
ComplexityConstants complexity_constants(int d, int p);

struct LedgerRow {
  int iteration = 0;
  std::size_t marked = 0;
  std::size_t cells_before = 0;
  std::size_t cells_after = 0;
};

class ComplexityLedger {
 public:
  ComplexityLedger(int d, int p);
  void record(std::size_t marked, std::size_t cells_before, std::size_t cells_after);

  const std::vector<LedgerRow>& rows() const { return rows_; }
  const ComplexityConstants& constants() const { return constants_; }
  std::string to_csv() const;

 private:
  ComplexityConstants constants_;
  std::vector<LedgerRow> rows_;
};

struct ComplexityReport {
  std::size_t growth = 0;      ///< #Q_J - #Q_0
  std::size_t total_marked = 0;
  double ratio = 0.0;          ///< growth / total_marked (0 without marks)
  double bound = 0.0;
  bool holds = true;
};
ComplexityReport complexity_report(const ComplexityLedger& ledger);

/// Distance check for one refinement step: every child of a cell selected by mark_recursive
/// from a trigger (child of an M1 cell or an M2 cell) must lie within h_{lev} * c_tilde of the
/// M1/M2 cell, h_lev being the side of the new cell.
struct DistanceTrace {
  std::size_t checked = 0;
  std::size_t violations = 0;
  double max_ratio = 0.0;  ///< max dist / bound
};
DistanceTrace trace_distance_bound(const HierarchicalMesh& mesh, const MarkSet& marks);

}  // namespace wahm
