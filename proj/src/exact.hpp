#pragma once
/// @file exact.hpp
/// @brief Closed-form harmonic solution of the 2D advection-diffusion model problem,
/// used as the verification oracle for the linearized path.

#include "core.hpp"

namespace fnlh {

/// Decaying root (Re(lambda) <= 0) of  nu lambda^2 - a lambda - (i omega + nu sigma^2) = 0.
/// For nu = 0 this reduces to lambda = -(i omega)/a.
cplx advdiff_decay_root(real omega, real a, real nu, real sigma);

/// uhat(x, y) = exp(i sigma y) * exp(lambda x) with unit inlet forcing uhat(0, y) = exp(i sigma y).
/// Preconditions: a > 0, nu >= 0.
cplx advdiff_exact_harmonic(real x, real y, real omega, real a, real nu, real sigma);

}  // namespace fnlh
