#pragma once
/// @file residual_ops.hpp
/// @brief Operations built on top of a discretization: the time-linearized harmonic
/// residual (directional differencing of the full nonlinear residual) and the
/// deterministic flux closing the mean equation.

#include <vector>

#include "disc.hpp"
#include "state.hpp"

namespace fnlh {

/// Relative step for the central directional differences of the nonlinear residual.
inline constexpr real kLinFdRel = 1e-5;

/// Time-linearized harmonic residual
///   Rhat = i omega M V what + dR/d(W, forcing) . (what, fhat)
/// for the field `h` about the frozen `mean` (which must already be the
/// discretization's perturbation reference). The directional derivative of the
/// order-`order` residual is evaluated by central differences applied
/// separately to the real and imaginary parts, with the step scaled to the
/// field magnitude. M is the transform Jacobian at the mean. Parts are split
/// like the nonlinear residual; the spectral term lives in the inviscid part.
void linearized_residual(const Discretization& disc, const PrimitiveState& mean,
                         const BlockDiag<real>& M, const BlockVec<cplx>& what, real omega,
                         std::span<const cplx> forcing, int order, bool need_viscous,
                         BlockVec<cplx>& inv, BlockVec<cplx>& vis);

/// Convenience wrapper returning the combined (inviscid + viscous) residual at
/// order 2, matching the harmonic residual the harmonic equations drive to zero.
BlockVec<cplx> linearized_residual(const Discretization& disc, const PrimitiveState& mean,
                                   const BlockDiag<real>& M, const HarmonicField& h,
                                   std::span<const cplx> forcing);

/// Deterministic flux: period-averaged inviscid residual of the reconstructed
/// signal minus the inviscid residual of the mean,
///   DF_i = (1/T) int_0^T R_inv,i(W(t)) dt - R_inv,i(mean),
/// by uniform quadrature with at least 4*l_max + 2 samples. Zero-frequency
/// harmonics enter as steady offsets. For a linear flux the average commutes
/// with the operator, so the result is exactly zero; set exploit_linearity to
/// false to force the quadrature path.
BlockVec<real> deterministic_flux(const Discretization& disc, const PrimitiveState& mean,
                                  const std::vector<HarmonicField>& harmonics,
                                  bool exploit_linearity = true);

}  // namespace fnlh
