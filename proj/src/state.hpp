#pragma once
/// @file state.hpp
/// @brief Flow-state containers, primitive/conservative conversions, the transform
/// Jacobian M = dQ/dW and time-domain reconstruction from harmonic amplitudes.
///
/// Storage convention for harmonics: only the positive-frequency coefficient is
/// kept; the real signal is w(t) = wbar + sum_l 2*Re(what_l exp(i omega_l t)).

#include <vector>

#include "case.hpp"
#include "core.hpp"
#include "dense.hpp"

namespace fnlh {

/// Per-node primitive unknowns: (rho, u, p) for the nozzle, (phi) for the scalar case.
using PrimitiveState = BlockVec<real>;
/// Per-node conservative unknowns: (rho, rho u, rho E) for the nozzle, (phi) otherwise.
using ConservativeState = BlockVec<real>;

/// One retained harmonic of the perturbation field.
struct HarmonicField {
    int index = 1;
    real omega = 0.0;
    BlockVec<cplx> amp;  // per-node complex amplitude of the primitive perturbation
};

// --- per-node Euler conversions (block size 3) -----------------------------

void euler_prim_to_cons(const real* w, const GasModel& gas, real* q);
void euler_cons_to_prim(const real* q, const GasModel& gas, real* w);
/// Row-major 3x3 M = dQ/dW.
void euler_transform_jacobian(const real* w, const GasModel& gas, real* M);
void euler_validate(const real* w);

// --- whole-field operations (dispatch on block size; b == 1 is the identity) ---

ConservativeState primitive_to_conservative(const PrimitiveState& W, const GasModel& gas);
PrimitiveState conservative_to_primitive(const ConservativeState& Q, const GasModel& gas);

/// Transform Jacobian M per node; identity blocks for the scalar problem.
BlockDiag<real> transform_jacobian(const PrimitiveState& W, const GasModel& gas);

/// Throws StateError when a node violates the admissibility invariants.
void validate_state(const PrimitiveState& W, int block_size);

/// W(t) = mean + sum_l 2*Re(what_l exp(i omega_l t)).
PrimitiveState reconstruct_instantaneous(const PrimitiveState& mean,
                                         const std::vector<HarmonicField>& harmonics, real t);

/// Smooth uniform initial guess for nozzle pseudo-time marching (not the solution).
/// Throws UnsupportedCaseError when the boundary data implies supersonic inflow.
PrimitiveState nozzle_steady_reference(const CaseConfig& config);

/// Uniform initial mean for the scalar case.
PrimitiveState scalar_steady_reference(const CaseConfig& config, int nodes);

}  // namespace fnlh
