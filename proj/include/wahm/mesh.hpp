#pragma once

#include "wahm/cell.hpp"

namespace wahm {

// Integer geometry of dyadic cells on the infinite tensor mesh and on the unit domain.
// All results are single-level sets; the level is stated per function.

/// Ancestor of `cell` at level `target` (0 <= target < cell.level).
CellId parent(const CellId& cell, int target);
inline CellId parent(const CellId& cell) { return parent(cell, cell.level - 1); }

/// Descendants of `cell` at level `target` (> cell.level).
LevelSet children(const CellId& cell, int target, int dim);
inline LevelSet children(const CellId& cell, int dim) { return children(cell, cell.level + 1, dim); }

/// Union of supports of all degree-p B-splines of the cell's level whose support contains it,
/// on the infinite mesh: the (2p+1)^d block centred at the cell (same level).
LevelSet support_extension_inf(const CellId& cell, int p, int dim);

/// support_extension_inf clipped to the domain. Throws CellOutsideDomain.
LevelSet support_extension(const CellId& cell, int p, const Domain& domain);

/// Parents of the cells of the infinite support extension: a (p+1)^d block of
/// level (cell.level - 1). Throws LevelZeroCell.
LevelSet neighborhood(const CellId& cell, int p, int dim);

/// neighborhood() restricted to the domain.
LevelSet neighborhood_in_domain(const CellId& cell, int p, const Domain& domain);

/// Inclusive lower/upper corners of a block that is a B-spline support, or throws NotABsplineSupport.
std::pair<Index, Index> bspline_support_box(const LevelSet& block, int p, int dim);

/// The 2^d cells of level block_level + 1 whose neighborhood equals `block`.
LevelSet core(const LevelSet& block, int p, int dim);

/// Checks parent(Q)^ == union of N_{Q*} over Q* in Q^ (infinite mesh).
bool parent_extension_identity(const CellId& cell, int p, int dim);

/// Whether `block` (a level-`block_level` B-spline support) contains the infinite support
/// extension of a level-(block_level+1) cell lying in omega0. omega0 is given as cells of
/// level omega0_level <= block_level + 1.
bool is_p_form(const LevelSet& block, int block_level, const LevelSet& omega0, int omega0_level,
               int p, int dim);

/// is_p_form with omega0 the whole unit domain.
bool is_p_form(const LevelSet& block, int block_level, int p, const Domain& domain);

/// Re-expresses level-`from` cells as their level-`to` descendants (to >= from).
LevelSet refine_to_level(const LevelSet& cells, int from, int to, int dim);

/// Level-`to` ancestors of level-`from` cells (to <= from).
LevelSet coarsen_to_level(const LevelSet& cells, int from, int to, int dim);

}  // namespace wahm
