#include "exact.hpp"

#include <cmath>
#include <stdexcept>

namespace fnlh {

cplx advdiff_decay_root(real omega, real a, real nu, real sigma) {
    if (!(a > 0.0)) throw ConfigError("advdiff exact solution requires a > 0");
    if (nu < 0.0) throw ConfigError("advdiff exact solution requires nu >= 0");
    const cplx rhs(nu * sigma * sigma, omega);  // i omega + nu sigma^2
    if (nu == 0.0) return -rhs / a;
    // Cancellation-free form of (a - sqrt(a^2 + 4 nu rhs)) / (2 nu).
    const cplx root = std::sqrt(cplx(a * a, 0.0) + 4.0 * nu * rhs);
    const cplx lambda = -2.0 * rhs / (a + root);
    if (lambda.real() > 1e-12 * (std::abs(lambda) + 1.0))
        throw std::logic_error("advdiff root selection produced a growing mode");
    return lambda;
}

cplx advdiff_exact_harmonic(real x, real y, real omega, real a, real nu, real sigma) {
    const cplx lambda = advdiff_decay_root(omega, a, nu, sigma);
    return std::exp(cplx(0.0, sigma * y)) * std::exp(lambda * x);
}

}  // namespace fnlh
