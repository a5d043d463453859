#include "driver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <thread>

namespace fnlh {

real residual_rms(double norm, int nodes, int b) {
    return norm / std::sqrt(static_cast<double>(nodes) * b);
}

real aggregate_rz(std::span<const real> harmonic_rms) {
    if (harmonic_rms.empty()) throw ConfigError("R_z is undefined without harmonics");
    double s = 0.0;
    for (real r : harmonic_rms) s += r * r;
    return std::sqrt(s / harmonic_rms.size());
}

std::string to_string(Termination t) {
    switch (t) {
        case Termination::TargetDrop: return "target-drop";
        case Termination::IterationCap: return "iteration-cap";
        default: return "divergence";
    }
}

namespace {

/// y += M^{-1} x with a real factored transform and a complex vector.
void add_transform_solve(const BlockDiagLU<real>& mlu, const BlockVec<cplx>& x, BlockVec<cplx>& out) {
    const int b = x.b, n = x.nodes();
    std::vector<real> re(b), im(b), yre(b), yim(b);
    for (int i = 0; i < n; ++i) {
        const cplx* xi = x.node(i);
        for (int m = 0; m < b; ++m) {
            re[m] = xi[m].real();
            im[m] = xi[m].imag();
        }
        mlu.solve_node(i, re.data(), yre.data());
        mlu.solve_node(i, im.data(), yim.data());
        cplx* oi = out.node(i);
        for (int m = 0; m < b; ++m) oi[m] += cplx(yre[m], yim[m]);
    }
}

BlockDiag<cplx> shifted_blocks(const BlockDiag<real>& P, const Mesh& mesh, real omega) {
    const int b = P.b, n = P.nodes();
    BlockDiag<cplx> out(b, n);
    for (int i = 0; i < n; ++i) {
        const real* src = P.block(i);
        cplx* dst = out.block(i);
        for (int k = 0; k < b * b; ++k) dst[k] = cplx(src[k], 0.0);
        const cplx s(0.0, omega * mesh.volume[i]);
        for (int m = 0; m < b; ++m) dst[static_cast<std::size_t>(m) * b + m] += s;
    }
    return out;
}

}  // namespace

struct FnlhSolver::Impl {
    GridHierarchy hier;
    std::vector<std::unique_ptr<Discretization>> disc;

    PatternPtr pattern;  // finest level; shared by J, A5 and every harmonic workspace
    Bsr<real> J, A5;
    Ilu<real> ilu_mean;
    struct Ws {
        Bsr<cplx> mat;
        Ilu<cplx> ilu;
    };
    std::vector<Ws> ws;  // one complex workspace per worker

    // per-level operator data rebuilt each outer iteration
    std::vector<PrimitiveState> mean_level;
    std::vector<BlockDiag<real>> P_level;
    std::vector<BlockDiagLU<real>> PLU_level;
    std::vector<BlockDiag<real>> M_level;
    std::vector<BlockDiagLU<real>> MLU_level;

    std::vector<std::vector<std::vector<cplx>>> forcing;  // [harmonic][level]

    RKConfig rk;
    double t_ref = 0.0;
    double cum_seconds = 0.0;
};

const Mesh& FnlhSolver::mesh() const { return impl_->hier.level[0]; }

void FnlhSolver::fire(OuterEvent::Kind kind, int harmonic) {
    if (event_hook) event_hook({kind, iter_, harmonic});
}

FnlhSolver::~FnlhSolver() = default;

FnlhSolver::FnlhSolver(const CaseConfig& case_config, const SchemeConfig& scheme)
    : impl_(std::make_unique<Impl>()), case_(case_config), scheme_(scheme) {
    case_.validate();
    if (scheme_.mode == RkMode::Implicit && scheme_.mg_levels > 1)
        throw ConfigError("multigrid is available for the explicit scheme only");
    if (scheme_.workers < 1) throw ConfigError("workers must be >= 1");

    impl_->rk = scheme_.rk_config();
    const int levels = scheme_.mode == RkMode::Explicit ? std::max(1, scheme_.mg_levels) : 1;
    impl_->hier = build_hierarchy(build_mesh(case_), levels);
    for (int l = 0; l < levels; ++l)
        impl_->disc.push_back(make_discretization(case_, impl_->hier.level[l]));

    const int b = case_.block_size();
    const int nh = case_.harmonics.count();

    if (scheme_.mode == RkMode::Implicit) {
        impl_->pattern = build_pattern(impl_->hier.level[0], b);
        impl_->J = Bsr<real>(impl_->pattern);
        const int nws = std::max(1, std::min(scheme_.workers, std::max(nh, 1)));
        impl_->ws.resize(nws);
    }

    impl_->mean_level.resize(levels);
    impl_->P_level.resize(levels);
    impl_->PLU_level.resize(levels);
    impl_->M_level.resize(levels);
    impl_->MLU_level.resize(levels);

    impl_->forcing.resize(nh);
    for (int h = 0; h < nh; ++h) {
        impl_->forcing[h].resize(levels);
        for (int l = 0; l < levels; ++l)
            impl_->forcing[h][l] = impl_->disc[l]->harmonic_forcing(case_.harmonics.harmonics[h]);
    }

    mean_ = case_.kind == CaseKind::NozzleEuler
                ? nozzle_steady_reference(case_)
                : scalar_steady_reference(case_, impl_->hier.level[0].num_nodes());
    for (int h = 0; h < nh; ++h) {
        HarmonicField f;
        f.index = case_.harmonics.harmonics[h].index;
        f.omega = case_.harmonics.harmonics[h].omega;
        f.amp = BlockVec<cplx>(b, impl_->hier.level[0].num_nodes());
        harmonics_.push_back(std::move(f));
    }
    df_ = BlockVec<real>(b, impl_->hier.level[0].num_nodes());

    impl_->t_ref = normalization_kernel_seconds();
}

void FnlhSolver::set_state(PrimitiveState mean, std::vector<HarmonicField> harmonics) {
    if (mean.b != case_.block_size() || mean.nodes() != impl_->hier.level[0].num_nodes())
        throw ShapeError("set_state: mean shape mismatch");
    if (harmonics.size() != harmonics_.size()) throw ShapeError("set_state: harmonic count mismatch");
    mean_ = std::move(mean);
    harmonics_ = std::move(harmonics);
}

ConvergenceEntry FnlhSolver::outer_iteration() {
    const auto t0 = std::chrono::steady_clock::now();
    ++iter_;

    Impl& im = *impl_;
    const GasModel& gas = case_.gas;
    const int levels = im.hier.levels();
    const int nh = static_cast<int>(harmonics_.size());
    const bool implicit = scheme_.mode == RkMode::Implicit;

    // ---- operators from the frozen mean (one assembly per outer iteration) ----
    im.mean_level[0] = mean_;
    for (int l = 1; l < levels; ++l)
        im.mean_level[l] = restrict_state(im.hier.level[l - 1], im.hier.parent[l - 1],
                                          im.hier.level[l].num_nodes(), im.mean_level[l - 1]);
    for (int l = 0; l < levels; ++l) {
        im.disc[l]->set_perturbation_reference(im.mean_level[l]);
        im.M_level[l] = transform_jacobian(im.mean_level[l], gas);
        im.MLU_level[l].factor(im.M_level[l]);
    }

    if (implicit) {
        im.disc[0]->assemble_jacobian(mean_, im.J);
        im.A5 = build_lhs_mean(im.J, im.rk, 5);
        im.ilu_mean.factorize(im.A5);
    } else {
        for (int l = 0; l < levels; ++l) {
            im.P_level[l] = im.disc[l]->assemble_diag_blocks(im.mean_level[l]);
            im.PLU_level[l].factor(im.P_level[l]);
        }
    }

    // ---- harmonic updates against the frozen mean ----
    std::vector<real> h_norm(nh, 0.0);
    std::vector<std::vector<LinearSolveReport>> h_reports(nh);

    auto run_harmonic = [&](int hi, int wsid) {
        HarmonicField& field = harmonics_[hi];
        const real omega = field.omega;
        const std::string name = "harmonic-" + std::to_string(field.index);

        auto level_eval = [&](int l) {
            return [&, l](const BlockVec<cplx>& state, bool need_vis, BlockVec<cplx>& inv,
                          BlockVec<cplx>& vis) {
                linearized_residual(*im.disc[l], im.mean_level[l], im.M_level[l], state, omega,
                                    im.forcing[hi][l], l == 0 ? 2 : 1, need_vis, inv, vis);
            };
        };
        auto level_apply = [&](int l) {
            return [&, l](const BlockVec<cplx>& base, const BlockVec<cplx>& x, BlockVec<cplx>& out) {
                out = base;
                add_transform_solve(im.MLU_level[l], x, out);
            };
        };

        RkStepResult step;
        if (implicit) {
            Impl::Ws& w = im.ws[wsid];
            build_lhs_harmonic(im.A5, im.hier.level[0], omega, im.rk, 5, w.mat);
            w.ilu.factorize(w.mat);
            StageSolver<cplx> solver;
            solver.lhs = &w.mat;
            solver.ilu = &w.ilu;
            BlockVec<cplx> inv, vis;
            auto eval = level_eval(0);
            step = rk_step<cplx>(field.amp, eval, level_apply(0), im.rk, solver, nullptr, name);
        } else {
            std::vector<BlockDiag<cplx>> pc(levels);
            std::vector<BlockDiagLU<cplx>> pclu(levels);
            std::vector<LevelOps<cplx>> ops(levels);
            for (int l = 0; l < levels; ++l) {
                pc[l] = shifted_blocks(im.P_level[l], im.hier.level[l], omega);
                pclu[l].factor(pc[l]);
                ops[l].eval = level_eval(l);
                ops[l].apply = level_apply(l);
                ops[l].pdiag = &pclu[l];
                ops[l].full_residual = [&, l](const BlockVec<cplx>& state, BlockVec<cplx>& out) {
                    BlockVec<cplx> vis;
                    linearized_residual(*im.disc[l], im.mean_level[l], im.M_level[l], state, omega,
                                        im.forcing[hi][l], l == 0 ? 2 : 1, true, out, vis);
                    out += vis;
                };
            }
            step = v_cycle<cplx>(im.hier, ops, field.amp, im.rk, name);
        }
        h_norm[hi] = step.stage1_residual_norm;
        h_reports[hi] = std::move(step.linear_reports);
    };

    const int nthreads = std::min(scheme_.workers, std::max(nh, 1));
    if (nthreads > 1 && nh > 1) {
        std::vector<std::exception_ptr> errs(nh);
        std::vector<std::thread> pool;
        for (int t = 0; t < nthreads; ++t)
            pool.emplace_back([&, t]() {
                for (int hi = t; hi < nh; hi += nthreads) {
                    try {
                        run_harmonic(hi, t);
                    } catch (...) {
                        errs[hi] = std::current_exception();
                    }
                }
            });
        for (auto& th : pool) th.join();
        for (int hi = 0; hi < nh; ++hi)
            if (errs[hi]) std::rethrow_exception(errs[hi]);
    } else {
        for (int hi = 0; hi < nh; ++hi) run_harmonic(hi, 0);
    }
    for (int hi = 0; hi < nh; ++hi) fire(OuterEvent::Kind::HarmonicUpdated, hi);

    // ---- deterministic flux from the fresh harmonic fields ----
    df_ = deterministic_flux(*im.disc[0], mean_, harmonics_);
    df_stamp_ = iter_;
    fire(OuterEvent::Kind::DfComputed);

    // ---- mean update including DF ----
    auto mean_apply = [&](int l) {
        return [&, l](const BlockVec<real>& base, const BlockVec<real>& x, BlockVec<real>& out) {
            ConservativeState q = primitive_to_conservative(base, gas);
            for (std::size_t k = 0; k < q.v.size(); ++k) q.v[k] += x.v[k];
            out = conservative_to_primitive(q, gas);
        };
    };
    auto mean_eval = [&](int l) {
        return [&, l](const BlockVec<real>& state, bool need_vis, BlockVec<real>& inv,
                      BlockVec<real>& vis) {
            im.disc[l]->residual(state, l == 0 ? 2 : 1, BcMode::Steady, {}, need_vis, inv, vis);
            if (l == 0)
                for (std::size_t k = 0; k < inv.v.size(); ++k) inv.v[k] += df_.v[k];
        };
    };

    RkStepResult mean_step;
    if (implicit) {
        StageSolver<real> solver;
        solver.lhs = &im.A5;
        solver.ilu = &im.ilu_mean;
        auto eval = mean_eval(0);
        mean_step = rk_step<real>(mean_, eval, mean_apply(0), im.rk, solver, nullptr, "mean");
    } else {
        std::vector<LevelOps<real>> ops(levels);
        for (int l = 0; l < levels; ++l) {
            ops[l].eval = mean_eval(l);
            ops[l].apply = mean_apply(l);
            ops[l].pdiag = &im.PLU_level[l];
            ops[l].full_residual = [&, l](const BlockVec<real>& state, BlockVec<real>& out) {
                BlockVec<real> vis;
                im.disc[l]->residual(state, l == 0 ? 2 : 1, BcMode::Steady, {}, true, out, vis);
                out += vis;
                if (l == 0)
                    for (std::size_t k = 0; k < out.v.size(); ++k) out.v[k] += df_.v[k];
            };
        }
        mean_step = v_cycle<real>(im.hier, ops, mean_, im.rk, "mean");
    }
    fire(OuterEvent::Kind::MeanUpdated);

    // ---- monitor entry ----
    for (auto& reps : h_reports)
        for (auto& r : reps) linear_reports_.push_back(r);
    for (auto& r : mean_step.linear_reports) linear_reports_.push_back(r);

    const int n0 = im.hier.level[0].num_nodes();
    const int b = case_.block_size();
    ConvergenceEntry e;
    e.iter = iter_;
    e.resid_mean = residual_rms(mean_step.stage1_residual_norm, n0, b);
    e.resid_h.resize(nh);
    for (int hi = 0; hi < nh; ++hi) e.resid_h[hi] = residual_rms(h_norm[hi], n0, b);
    e.has_rz = nh > 0;
    e.rz = nh > 0 ? aggregate_rz(e.resid_h) : 0.0;
    im.cum_seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    e.seconds = im.cum_seconds;
    e.work_units = work_units(scheme_.workers, im.cum_seconds, im.t_ref);
    return e;
}

SolveOutcome FnlhSolver::run_to_convergence() {
    SolveOutcome out;
    out.t_ref_seconds = impl_->t_ref;
    const real drop = std::pow(10.0, -scheme_.target_drop_orders);

    real r1_mean = -1.0, r1_rz = -1.0, floor = 0.0;
    out.reason = Termination::IterationCap;

    for (int it = 0; it < scheme_.max_outer_iters; ++it) {
        ConvergenceEntry e;
        try {
            e = outer_iteration();
        } catch (const DivergenceError& err) {
            out.reason = Termination::Divergence;
            out.divergence_message = err.what();
            break;
        }
        out.history.push_back(e);
        if (it == 0) {
            r1_mean = e.resid_mean;
            r1_rz = e.has_rz ? e.rz : 0.0;
            floor = 1e-16 * std::max(r1_mean, r1_rz);
        }
        const bool mean_ok = e.resid_mean <= std::max(r1_mean * drop, floor);
        const bool rz_ok = !e.has_rz || e.rz <= std::max(r1_rz * drop, floor);
        if (mean_ok && rz_ok) {
            out.reason = Termination::TargetDrop;
            break;
        }
    }

    out.mean = mean_;
    out.harmonics = harmonics_;
    out.linear_reports = linear_reports_;
    out.peak_lhs_bytes = lhs_alloc_stats().peak_bytes;
    for (const HarmonicField& h : out.harmonics)
        if (h.omega == 0.0) {
            double s = 0.0;
            for (const cplx& z : h.amp.v) s += z.imag() * z.imag();
            out.max_zero_freq_imag_rms = std::max(
                out.max_zero_freq_imag_rms,
                static_cast<real>(std::sqrt(s / std::max<std::size_t>(h.amp.v.size(), 1))));
        }
    return out;
}

}  // namespace fnlh
