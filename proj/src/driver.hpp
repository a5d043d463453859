#pragma once
/// @file driver.hpp
/// @brief Outer nonlinear iteration of the coupled mean/harmonic solve: per
/// iteration the harmonics advance one pseudo-time step against the frozen mean,
/// the deterministic flux is rebuilt from the fresh harmonic fields, and the mean
/// advances with it. Residual monitoring, convergence control and work-unit
/// accounting live here.

#include <functional>
#include <memory>
#include <string>

#include "disc.hpp"
#include "multigrid.hpp"
#include "residual_ops.hpp"
#include "rk.hpp"
#include "state.hpp"
#include "workunit.hpp"

namespace fnlh {

struct SchemeConfig {
    RkMode mode = RkMode::Implicit;
    int mg_levels = 1;         // explicit only; 1 = single grid
    real sigma_cfl = -1.0;     // <= 0: per-mode default (2 explicit, 50 implicit)
    real eps_relax = 0.6;
    real linear_tol = 1e-2;
    int linear_max_iter = 10;
    int workers = 1;
    real target_drop_orders = 8.0;
    int max_outer_iters = 2000;

    RKConfig rk_config() const {
        RKConfig rk;
        rk.mode = mode;
        rk.sigma_cfl = sigma_cfl > 0.0 ? sigma_cfl : (mode == RkMode::Explicit ? 2.0 : 50.0);
        rk.eps_relax = eps_relax;
        rk.linear_tol = linear_tol;
        rk.linear_max_iter = linear_max_iter;
        return rk;
    }
};

/// RMS of a residual with 2-norm `norm` over nodes*b degrees of freedom.
real residual_rms(double norm, int nodes, int b);

/// R_z = sqrt((1/N_h) sum R_{z,l}^2); requires at least one harmonic.
real aggregate_rz(std::span<const real> harmonic_rms);

struct ConvergenceEntry {
    int iter = 0;
    real resid_mean = 0.0;
    std::vector<real> resid_h;
    real rz = 0.0;       // meaningful only when harmonics are present
    bool has_rz = false;
    double seconds = 0.0;     // cumulative wall clock
    double work_units = 0.0;  // workers * seconds / t_ref
};

enum class Termination { TargetDrop, IterationCap, Divergence };

std::string to_string(Termination t);

struct SolveOutcome {
    PrimitiveState mean;
    std::vector<HarmonicField> harmonics;
    std::vector<ConvergenceEntry> history;
    Termination reason = Termination::IterationCap;
    std::string divergence_message;
    std::vector<LinearSolveReport> linear_reports;  // every stage solve, in order
    std::size_t peak_lhs_bytes = 0;                 // global counter peak at completion
    double t_ref_seconds = 0.0;
    real max_zero_freq_imag_rms = 0.0;  // stationary harmonics must stay real
};

struct OuterEvent {
    enum class Kind { HarmonicUpdated, DfComputed, MeanUpdated };
    Kind kind;
    int iteration = 0;
    int harmonic = -1;  // harmonic list position for HarmonicUpdated
};

class FnlhSolver {
public:
    FnlhSolver(const CaseConfig& case_config, const SchemeConfig& scheme);
    ~FnlhSolver();

    /// One outer iteration (harmonics, then DF, then mean). Returns the monitor
    /// sample. Throws DivergenceError on a diverged field.
    ConvergenceEntry outer_iteration();

    /// Iterates until both the mean residual and R_z have dropped by the
    /// configured number of orders relative to iteration 1, the iteration cap is
    /// reached, or a field diverges (reported, not thrown).
    SolveOutcome run_to_convergence();

    const PrimitiveState& mean() const { return mean_; }
    const std::vector<HarmonicField>& harmonics() const { return harmonics_; }
    const BlockVec<real>& deterministic_flux_vector() const { return df_; }
    int df_iteration_stamp() const { return df_stamp_; }
    const CaseConfig& case_config() const { return case_; }
    const SchemeConfig& scheme() const { return scheme_; }
    const Mesh& mesh() const;

    /// Replace the current fields (testing / restart-free experiments).
    void set_state(PrimitiveState mean, std::vector<HarmonicField> harmonics);

    /// Observation hook for the per-iteration event sequence.
    std::function<void(const OuterEvent&)> event_hook;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;

    CaseConfig case_;
    SchemeConfig scheme_;
    PrimitiveState mean_;
    std::vector<HarmonicField> harmonics_;
    BlockVec<real> df_;
    int df_stamp_ = -1;
    int iter_ = 0;

    std::vector<LinearSolveReport> linear_reports_;

    void fire(OuterEvent::Kind kind, int harmonic = -1);
};

}  // namespace fnlh
