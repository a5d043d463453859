#pragma once
/// @file rk.hpp
/// @brief The generalized five-stage RK(5,3) pseudo-time step in explicit and
/// implicit modes, with hybrid inviscid/viscous residual blending.
///
/// Per stage k the update solves A_k x = B with A_k = K / (Gamma alpha_k),
/// B = -(R^(k) - R*). Since A_k = A_5 / alpha_k exactly, one operator built at
/// alpha = 1 serves all five stages with the right-hand side scaled by alpha_k;
/// the implicit factorization therefore happens once per outer iteration.
/// Explicit mode: K = P (block diagonal), x = Gamma alpha_k P^{-1} B.
/// Implicit mode: K = P/(eps sigma) + J, x from the ILU-preconditioned
/// Richardson smoother. Updates are in conservative variables.

#include <array>
#include <functional>

#include "core.hpp"
#include "dense.hpp"
#include "sparse.hpp"

namespace fnlh {

enum class RkMode { Explicit, Implicit };

struct RKConfig {
    RkMode mode = RkMode::Explicit;
    std::array<real, 5> alpha{1.0 / 4.0, 1.0 / 6.0, 3.0 / 8.0, 1.0 / 2.0, 1.0};
    std::array<real, 5> beta{1.0, 0.0, 14.0 / 25.0, 0.0, 11.0 / 25.0};
    real sigma_cfl = 2.0;  // explicit default; 50 is the implicit recommendation
    real eps_relax = 0.6;
    real linear_tol = 1e-2;
    int linear_max_iter = 10;

    real gamma_factor() const { return mode == RkMode::Explicit ? sigma_cfl : 1.0 / eps_relax; }
};

/// LHS of the stage linear system, A = K / (Gamma alpha_k):
/// explicit  A = P / (Gamma alpha_k)            (off-diagonal blocks zero),
/// implicit  A = (P/(eps sigma) + J) / (Gamma alpha_k).
/// P is taken from J's diagonal. The result shares J's pattern object.
Bsr<real> build_lhs_mean(const Bsr<real>& J, const RKConfig& config, int stage_k);

/// Harmonic LHS: lhs_mean with the per-node complex shift
/// s_i = i omega V_i / (Gamma alpha_k) on the diagonal, written into the shared
/// complex workspace (allocated on first use, overwritten afterwards).
void build_lhs_harmonic(const Bsr<real>& lhs_mean, const Mesh& mesh, real omega,
                        const RKConfig& config, int stage_k, Bsr<cplx>& workspace);

/// Stage residual evaluator: fills the inviscid part always and the viscous
/// part only when need_viscous is true (stages where beta_k != 0).
template <class S>
using StageEvalFn =
    std::function<void(const BlockVec<S>& state, bool need_viscous, BlockVec<S>& inv, BlockVec<S>& vis)>;

/// state_out = state_base advanced by the conservative update x.
template <class S>
using ApplyUpdateFn =
    std::function<void(const BlockVec<S>& base, const BlockVec<S>& x, BlockVec<S>& out)>;

/// Operators backing the stage solves for one field (built once per outer iteration).
template <class S>
struct StageSolver {
    const BlockDiagLU<S>* pdiag = nullptr;  // explicit: factored P (or P + i omega V I)
    const Bsr<S>* lhs = nullptr;            // implicit: A at alpha = 1
    const Ilu<S>* ilu = nullptr;            // implicit: its factorization
};

struct RkStepResult {
    double stage1_residual_norm = 0.0;  // ||R^(1)||_2, the convergence monitor sample
    int viscous_evaluations = 0;
    std::vector<LinearSolveReport> linear_reports;  // implicit stages, in order
};

/// One five-stage step. `mg_forcing` is R* (null when multigrid is inactive).
/// Throws DivergenceError carrying the stage index when a stage state goes
/// non-finite or inadmissible.
template <class S>
RkStepResult rk_step(BlockVec<S>& state, const StageEvalFn<S>& eval, const ApplyUpdateFn<S>& apply,
                     const RKConfig& config, const StageSolver<S>& solver,
                     const BlockVec<S>* mg_forcing, const std::string& field_name = "field");

extern template RkStepResult rk_step<real>(BlockVec<real>&, const StageEvalFn<real>&,
                                           const ApplyUpdateFn<real>&, const RKConfig&,
                                           const StageSolver<real>&, const BlockVec<real>*,
                                           const std::string&);
extern template RkStepResult rk_step<cplx>(BlockVec<cplx>&, const StageEvalFn<cplx>&,
                                           const ApplyUpdateFn<cplx>&, const RKConfig&,
                                           const StageSolver<cplx>&, const BlockVec<cplx>*,
                                           const std::string&);

}  // namespace fnlh
