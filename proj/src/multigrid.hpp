#pragma once
/// @file multigrid.hpp
/// @brief Geometric multigrid for the explicit mode: pairwise/2x2 agglomeration,
/// volume-weighted state restriction, conservative residual restriction,
/// injection prolongation, FAS forcing and the V-cycle driver.
///
/// Coarse levels smooth with the first-order operator (the caller wires the
/// per-level evaluators); one pre-smoothing RK step per level on the way down,
/// corrections injected on the way up, no post-smoothing.

#include <functional>

#include "mesh.hpp"
#include "rk.hpp"

namespace fnlh {

/// Pairwise (1D) / 2x2 (2D) agglomeration; coarse volumes are exact child sums,
/// face areas are inherited from the surviving fine faces. Throws ConfigError on
/// odd cell counts.
Mesh coarsen(const Mesh& mesh);

/// fine node -> coarse parent under the same agglomeration.
std::vector<int> coarsen_parent_map(const Mesh& fine);

struct GridHierarchy {
    std::vector<Mesh> level;                  // [0] = finest
    std::vector<std::vector<int>> parent;     // parent[l]: level l node -> level l+1 node
    std::vector<int> spatial_order;           // 2 on the finest level, 1 below

    int levels() const { return static_cast<int>(level.size()); }
};

GridHierarchy build_hierarchy(const Mesh& finest, int levels);

/// Volume-weighted average over the children of each coarse node.
template <class S>
BlockVec<S> restrict_state(const Mesh& fine, const std::vector<int>& parent, int n_coarse,
                           const BlockVec<S>& wf);

/// Sum over children (conservative).
template <class S>
BlockVec<S> restrict_residual(const std::vector<int>& parent, int n_coarse, const BlockVec<S>& rf);

/// Injection: every fine child receives its parent's value, added in place.
template <class S>
void prolong_add(const std::vector<int>& parent, const BlockVec<S>& coarse_correction,
                 BlockVec<S>& fine);

/// FAS forcing R* = R_coarse(restricted state) - restricted fine residual.
/// On the finest level R* = 0 by definition (no call needed).
template <class S>
BlockVec<S> fas_forcing(const std::function<void(const BlockVec<S>&, BlockVec<S>&)>& coarse_residual,
                        const BlockVec<S>& restricted_state,
                        const BlockVec<S>& restricted_fine_residual);

/// Per-level wiring supplied by the solver driver.
template <class S>
struct LevelOps {
    StageEvalFn<S> eval;  // split-parts evaluator for the RK smoother
    std::function<void(const BlockVec<S>&, BlockVec<S>&)> full_residual;  // inv + vis
    ApplyUpdateFn<S> apply;
    const BlockDiagLU<S>* pdiag = nullptr;
};

/// One FAS V-cycle on the finest state. A 1-level hierarchy degenerates to a
/// single explicit RK step (bitwise: the same call). Returns the finest-level
/// step result (stage-1 residual norm is the convergence monitor sample).
/// Throws ConfigError when invoked in implicit mode with more than one level.
template <class S>
RkStepResult v_cycle(const GridHierarchy& hier, const std::vector<LevelOps<S>>& ops,
                     BlockVec<S>& finest_state, const RKConfig& config,
                     const std::string& field_name = "field");

extern template RkStepResult v_cycle<real>(const GridHierarchy&, const std::vector<LevelOps<real>>&,
                                           BlockVec<real>&, const RKConfig&, const std::string&);
extern template RkStepResult v_cycle<cplx>(const GridHierarchy&, const std::vector<LevelOps<cplx>>&,
                                           BlockVec<cplx>&, const RKConfig&, const std::string&);

}  // namespace fnlh
