#pragma once
/// @file oracle.hpp
/// @brief Time-accurate reference solver and DFT extraction of harmonic
/// amplitudes. Shares the FNLH spatial discretization bit for bit, so amplitude
/// comparisons isolate the harmonic-method error.

#include <vector>

#include "disc.hpp"
#include "state.hpp"

namespace fnlh {

struct TimeSeries {
    real period = 0.0;  // base period T of the forcing
    std::vector<PrimitiveState> samples;  // uniform over one period, t_k = k T / N

    int sample_count() const { return static_cast<int>(samples.size()); }
};

struct OracleOptions {
    int samples_per_period = 32;  // raised to 4 l_max + 2 when too small
    real cfl = 0.7;
    real periodic_tol = 1e-9;  // period-to-period relative L2 change
    int max_periods = 200;
    int min_periods = 2;
};

/// Explicit four-stage time-accurate integration from `steady` under the
/// periodic boundary forcing of `spec` (perturbation-mode boundaries referenced
/// to `steady`), marched to the periodic steady state, then one period sampled
/// uniformly. Throws NonConvergenceError when the period cap is hit first.
TimeSeries unsteady_solve(Discretization& disc, const PrimitiveState& steady,
                          const HarmonicSpec& spec, const OracleOptions& opt = {});

/// Discrete Fourier transform of the sampled period under the conjugate-pair
/// convention (signal = mean + sum 2 Re(what exp(i omega t))). Frequencies must
/// sit on the DFT grid of the series. Zero-frequency entries extract as zero
/// (their content is absorbed by the mean).
void extract_harmonics(const TimeSeries& ts, const HarmonicSpec& spec, PrimitiveState& mean,
                       std::vector<HarmonicField>& harmonics);

struct AmplitudeError {
    int index = 0;       // harmonic index
    real rel_l2 = 0.0;   // relative L2 over interior nodes
};

/// Per-harmonic relative L2 error over interior nodes (two cells next to each
/// x-boundary excluded). Specs of both sides must match.
std::vector<AmplitudeError> compare_amplitudes(const std::vector<HarmonicField>& fnlh_fields,
                                               const std::vector<HarmonicField>& oracle_fields,
                                               const Mesh& mesh);

}  // namespace fnlh
