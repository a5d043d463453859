#include "rk.hpp"

namespace fnlh {

Bsr<real> build_lhs_mean(const Bsr<real>& J, const RKConfig& config, int stage_k) {
    if (stage_k < 1 || stage_k > 5) throw ConfigError("stage index must be in 1..5");
    const real ga = config.gamma_factor() * config.alpha[stage_k - 1];
    Bsr<real> A(J.pattern);
    const int b = J.b();
    const std::size_t bb = static_cast<std::size_t>(b) * b;

    if (config.mode == RkMode::Explicit) {
        A.set_zero();
        for (int i = 0; i < J.rows(); ++i) {
            const real* p = J.block(J.pattern->diag_idx[i]);
            real* d = A.block(A.pattern->diag_idx[i]);
            for (std::size_t k = 0; k < bb; ++k) d[k] = p[k] / ga;
        }
        return A;
    }

    const real inv_es = 1.0 / (config.eps_relax * config.sigma_cfl);
    for (std::size_t k = 0; k < A.vals.size(); ++k) A.vals[k] = J.vals[k] / ga;
    for (int i = 0; i < J.rows(); ++i) {
        const real* p = J.block(J.pattern->diag_idx[i]);
        real* d = A.block(A.pattern->diag_idx[i]);
        for (std::size_t k = 0; k < bb; ++k) d[k] += p[k] * inv_es / ga;
    }
    return A;
}

void build_lhs_harmonic(const Bsr<real>& lhs_mean, const Mesh& mesh, real omega,
                        const RKConfig& config, int stage_k, Bsr<cplx>& workspace) {
    if (stage_k < 1 || stage_k > 5) throw ConfigError("stage index must be in 1..5");
    const real ga = config.gamma_factor() * config.alpha[stage_k - 1];
    std::vector<cplx> shift(mesh.num_nodes());
    for (int i = 0; i < mesh.num_nodes(); ++i) shift[i] = cplx(0.0, omega * mesh.volume[i] / ga);
    shift_diagonal(lhs_mean, shift, workspace);
}

template <class S>
RkStepResult rk_step(BlockVec<S>& state, const StageEvalFn<S>& eval, const ApplyUpdateFn<S>& apply,
                     const RKConfig& config, const StageSolver<S>& solver,
                     const BlockVec<S>* mg_forcing, const std::string& field_name) {
    const int b = state.b, n = state.nodes();
    RkStepResult res;

    const BlockVec<S> state0 = state;
    BlockVec<S> inv(b, n), vis_fresh(b, n), vis_blend(b, n), rhs(b, n), x(b, n);
    BlockVec<S> stage_state = state0;

    for (int k = 1; k <= 5; ++k) {
        const real beta = config.beta[k - 1];
        const bool fresh_viscous = beta != 0.0;

        try {
            eval(stage_state, fresh_viscous, inv, vis_fresh);
        } catch (const StateError& e) {
            throw DivergenceError(std::string("residual evaluation failed: ") + e.what(), k, field_name);
        }
        if (fresh_viscous) {
            ++res.viscous_evaluations;
            for (std::size_t m = 0; m < vis_blend.v.size(); ++m)
                vis_blend.v[m] = beta * vis_fresh.v[m] + (1.0 - beta) * vis_blend.v[m];
        }
        // stages with beta_k = 0 reuse the previous blended viscous residual as-is

        for (std::size_t m = 0; m < rhs.v.size(); ++m) {
            S r = inv.v[m] + vis_blend.v[m];
            if (mg_forcing) r -= mg_forcing->v[m];
            rhs.v[m] = -r;
        }
        if (k == 1) res.stage1_residual_norm = norm2(rhs);

        if (config.mode == RkMode::Explicit) {
            if (!solver.pdiag) throw ConfigError("explicit rk_step needs factored diagonal blocks");
            solver.pdiag->solve(rhs, x);
            const real ga = config.gamma_factor() * config.alpha[k - 1];
            for (S& e : x.v) e *= ga;
        } else {
            if (!solver.lhs || !solver.ilu) throw ConfigError("implicit rk_step needs LHS and ILU");
            // A_k = A_5 / alpha_k: solve A_5 x = alpha_k B instead of refactoring
            for (S& e : rhs.v) e *= config.alpha[k - 1];
            res.linear_reports.push_back(smoothed_solve(*solver.lhs, rhs, *solver.ilu,
                                                        config.linear_tol, config.linear_max_iter, x));
        }

        try {
            apply(state0, x, stage_state);
        } catch (const StateError& e) {
            throw DivergenceError(std::string("update left the admissible set: ") + e.what(), k,
                                  field_name);
        }
        if (!all_finite(stage_state)) throw DivergenceError("non-finite stage state", k, field_name);
    }

    state = stage_state;
    return res;
}

template RkStepResult rk_step<real>(BlockVec<real>&, const StageEvalFn<real>&,
                                    const ApplyUpdateFn<real>&, const RKConfig&,
                                    const StageSolver<real>&, const BlockVec<real>*,
                                    const std::string&);
template RkStepResult rk_step<cplx>(BlockVec<cplx>&, const StageEvalFn<cplx>&,
                                    const ApplyUpdateFn<cplx>&, const RKConfig&,
                                    const StageSolver<cplx>&, const BlockVec<cplx>*,
                                    const std::string&);

}  // namespace fnlh
