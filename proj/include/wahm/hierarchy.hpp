#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wahm/cell.hpp"

namespace wahm {

/// Nested subdomains Omega_0 ⊇ Omega_1 ⊇ ... ⊇ Omega_{n-1} ⊇ Omega_n = ∅.
///
/// Omega_0 is the whole domain (level-0 cells); Omega_l for l >= 1 is stored as a set of
/// level-(l-1) cells. Construction validates nesting and rejects empty intermediate levels.
class SubdomainHierarchy {
 public:
  /// `refined[i]` holds Omega_{i+1} as level-i cells; depth becomes refined.size() + 1.
  SubdomainHierarchy(Domain domain, int degree, std::vector<LevelSet> refined);

  static SubdomainHierarchy uniform(Domain domain, int degree);

  const Domain& domain() const { return domain_; }
  int dim() const { return domain_.dim; }
  int degree() const { return degree_; }
  int depth() const { return static_cast<int>(refined_.size()) + 1; }

  /// Granularity at which Omega_l is stored: max(l - 1, 0).
  static int storage_level(int l) { return l > 0 ? l - 1 : 0; }

  /// Omega_l as cells of storage_level(l); empty for l >= depth().
  const LevelSet& subdomain(int l) const;

  /// Omega_l as level-l cells.
  LevelSet subdomain_cells(int l) const;

  /// Whether `cell` (any level) lies inside Omega_l.
  bool contains(int l, const CellId& cell) const;

  /// Same hierarchy with Omega_l replaced by (Omega_l ∪ added[l-1]) for every l; grows depth
  /// when the last entries are non-empty and drops trailing empty levels.
  SubdomainHierarchy with_additions(const std::vector<LevelSet>& added) const;

  bool operator==(const SubdomainHierarchy&) const = default;

 private:
  Domain domain_;
  int degree_;
  LevelSet level0_;
  std::vector<LevelSet> refined_;
};

/// A hierarchy plus its derived data: active cells and omega_l per level.
class HierarchicalMesh {
 public:
  explicit HierarchicalMesh(SubdomainHierarchy hierarchy);

  const SubdomainHierarchy& hierarchy() const { return hierarchy_; }
  const Domain& domain() const { return hierarchy_.domain(); }
  int dim() const { return hierarchy_.dim(); }
  int degree() const { return hierarchy_.degree(); }
  int depth() const { return hierarchy_.depth(); }

  const LevelSet& active(int l) const;
  const LevelSet& omega(int l) const;

  bool is_active(const CellId& cell) const;
  std::size_t num_active() const;
  std::vector<CellId> active_cells() const;

  /// Whether `cell` (any level) is covered by omega_l.
  bool in_omega(int l, const CellId& cell) const;

  /// Cells tiling `cell` on each of which the hierarchical space is polynomial: the cell itself
  /// when it lies inside an active cell, otherwise its active descendants.
  std::vector<CellId> active_cover(const CellId& cell) const;

  /// Active cell containing the point.
  CellId locate(const std::array<double, kMaxDim>& x) const;

 private:
  SubdomainHierarchy hierarchy_;
  std::vector<LevelSet> active_;
  std::vector<LevelSet> omega_;
};

/// Active cells per level: {Q level l | Q ⊂ Omega_l, Q ⊄ Omega_{l+1}}.
std::vector<LevelSet> compute_active(const SubdomainHierarchy& h);

/// omega_l: level-l cells whose clipped support extension lies in Omega_l.
LevelSet compute_omega(const SubdomainHierarchy& h, int l);

/// Cells of the level-l set B whose clipped support extension lies inside B.
LevelSet omega_of_set(const LevelSet& cells, int level, int p, const Domain& domain);

struct AdmissibilityReport {
  bool ok = true;
  int level = -1;                  ///< first violating level
  std::optional<CellId> witness;   ///< a cell proving the violation
  explicit operator bool() const { return ok; }
};

/// omega_l ⊆ omega_{l-1} for l = 1..n-1.
AdmissibilityReport is_weakly_admissible(const HierarchicalMesh& mesh);

/// Omega_l ⊆ omega_{l-m+1} for l = m..n-1.
AdmissibilityReport is_strictly_admissible(const HierarchicalMesh& mesh, int m);

/// Omega_l equals the union of N_Q ∩ Omega_0 over level-l cells Q ⊂ omega_l, for every l.
bool is_clustered(const SubdomainHierarchy& h);
bool is_clustered(const HierarchicalMesh& mesh);

/// Union of N_Q ∩ Omega_0 over Q ⊂ omega_l (level l-1 cells), the clustered reconstruction.
LevelSet clustered_reconstruction(const HierarchicalMesh& mesh, int l);

/// For every level-l Q ⊂ omega_l: N_{parent(Q)} ∩ Omega_0 ⊂ Omega_{l-1}.
AdmissibilityReport characterization_first(const HierarchicalMesh& mesh);

/// For every level-l Q ⊂ Omega_l: N_Q ∩ Omega_0 ⊂ Omega_{l-1}. Throws NotClustered.
AdmissibilityReport characterization_second(const HierarchicalMesh& mesh);

/// Q ⊂ omega_l evaluated from the definition and via N_Q ∩ Omega_0 ⊂ Omega_l; true iff both agree.
bool characterization_omega(const HierarchicalMesh& mesh, const CellId& cell);

/// N_Q ∩ Omega_0 ⊂ Omega_l for a level-l cell (l >= 1).
bool neighborhood_inside_subdomain(const HierarchicalMesh& mesh, const CellId& cell);

/// Largest k with Q ⊂ omega_k. Requires Q ⊂ Omega_{lev(Q)}; throws CellNotInSubdomain.
int approximation_power(const HierarchicalMesh& mesh, const CellId& cell);

}  // namespace wahm
