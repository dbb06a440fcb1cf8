#pragma once

#include <random>

#include "wahm/hierarchy.hpp"
#include "wahm/refine.hpp"

namespace wahm {

using Rng = std::mt19937_64;

/// Clustered hierarchy: every Omega_l is a union of N_Q ∩ Omega_0 over random level-l seeds Q
/// whose neighborhood fits in Omega_{l-1}. Depth at most max_depth.
SubdomainHierarchy random_clustered_hierarchy(const Domain& domain, int p, int max_depth, double density,
                                              Rng& rng);

/// Arbitrary nested hierarchy: Omega_l is a random union of level-(l-1) cells inside Omega_{l-1}
/// grown from random seeds. Usually neither clustered nor weakly admissible.
SubdomainHierarchy random_hierarchy(const Domain& domain, int p, int max_depth, double density, Rng& rng);

/// Random subset of active cells with about `count` members (at least one).
MarkSet random_marks(const HierarchicalMesh& mesh, std::size_t count, Rng& rng);

/// Clustered WAHM reached from the uniform mesh by `steps` random markings refined with the
/// explicit adaptive procedure.
HierarchicalMesh random_wahm(const Domain& domain, int p, int steps, std::size_t marks_per_step, Rng& rng);

/// Graded refinement towards the diagonal x = y: Omega_{depth-1} gathers the neighborhoods of
/// the finest cells within `band` cells of the diagonal, and every coarser Omega_l the
/// neighborhoods of the level-l cells of Omega_{l+1}. Clustered and strictly admissible (m = 2).
SubdomainHierarchy graded_diagonal_hierarchy(const Domain& domain, int p, int depth, double band);

}  // namespace wahm
