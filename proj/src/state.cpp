#include "state.hpp"

#include <cmath>

namespace fnlh {

void euler_validate(const real* w) {
    if (!(w[0] > 0.0) || !(w[2] > 0.0) || !std::isfinite(w[0]) || !std::isfinite(w[1]) ||
        !std::isfinite(w[2]))
        throw StateError("inadmissible Euler state: rho=" + std::to_string(w[0]) +
                         " p=" + std::to_string(w[2]));
}

void euler_prim_to_cons(const real* w, const GasModel& gas, real* q) {
    const real rho = w[0], u = w[1], p = w[2];
    q[0] = rho;
    q[1] = rho * u;
    q[2] = p / (gas.gamma - 1.0) + 0.5 * rho * u * u;
}

void euler_cons_to_prim(const real* q, const GasModel& gas, real* w) {
    const real rho = q[0];
    if (!(rho > 0.0)) throw StateError("conservative state with nonpositive density");
    const real u = q[1] / rho;
    const real p = (gas.gamma - 1.0) * (q[2] - 0.5 * rho * u * u);
    if (!(p > 0.0)) throw StateError("conservative state with nonpositive pressure");
    w[0] = rho;
    w[1] = u;
    w[2] = p;
}

void euler_transform_jacobian(const real* w, const GasModel& gas, real* M) {
    const real rho = w[0], u = w[1];
    // rows: d(rho)/dW, d(rho u)/dW, d(rho E)/dW
    M[0] = 1.0;
    M[1] = 0.0;
    M[2] = 0.0;
    M[3] = u;
    M[4] = rho;
    M[5] = 0.0;
    M[6] = 0.5 * u * u;
    M[7] = rho * u;
    M[8] = 1.0 / (gas.gamma - 1.0);
}

void validate_state(const PrimitiveState& W, int block_size) {
    if (W.b != block_size) throw ShapeError("state block size mismatch");
    const int n = W.nodes();
    if (block_size == 3) {
        for (int i = 0; i < n; ++i) euler_validate(W.node(i));
    } else {
        for (int i = 0; i < n; ++i)
            if (!std::isfinite(W.at(i, 0))) throw StateError("non-finite scalar state");
    }
}

ConservativeState primitive_to_conservative(const PrimitiveState& W, const GasModel& gas) {
    ConservativeState Q(W.b, W.nodes());
    if (W.b == 1) {
        Q.v = W.v;
        return Q;
    }
    if (W.b != 3) throw ShapeError("unsupported block size in conversion");
    for (int i = 0; i < W.nodes(); ++i) {
        euler_validate(W.node(i));
        euler_prim_to_cons(W.node(i), gas, Q.node(i));
    }
    return Q;
}

PrimitiveState conservative_to_primitive(const ConservativeState& Q, const GasModel& gas) {
    PrimitiveState W(Q.b, Q.nodes());
    if (Q.b == 1) {
        W.v = Q.v;
        return W;
    }
    if (Q.b != 3) throw ShapeError("unsupported block size in conversion");
    for (int i = 0; i < Q.nodes(); ++i) euler_cons_to_prim(Q.node(i), gas, W.node(i));
    return W;
}

BlockDiag<real> transform_jacobian(const PrimitiveState& W, const GasModel& gas) {
    BlockDiag<real> M(W.b, W.nodes());
    if (W.b == 1) {
        for (int i = 0; i < W.nodes(); ++i) M.block(i)[0] = 1.0;
        return M;
    }
    if (W.b != 3) throw ShapeError("unsupported block size in transform_jacobian");
    for (int i = 0; i < W.nodes(); ++i) {
        euler_validate(W.node(i));
        euler_transform_jacobian(W.node(i), gas, M.block(i));
    }
    return M;
}

PrimitiveState reconstruct_instantaneous(const PrimitiveState& mean,
                                         const std::vector<HarmonicField>& harmonics, real t) {
    PrimitiveState out = mean;
    for (const HarmonicField& h : harmonics) {
        if (h.amp.b != mean.b || h.amp.nodes() != mean.nodes())
            throw ShapeError("harmonic field shape does not match mean");
        const cplx phase = std::exp(cplx(0.0, h.omega * t));
        for (std::size_t k = 0; k < out.v.size(); ++k)
            out.v[k] += 2.0 * (h.amp.v[k] * phase).real();
    }
    return out;
}

PrimitiveState nozzle_steady_reference(const CaseConfig& config) {
    const real g = config.gas.gamma;
    const real p0 = config.inlet_total_pressure;
    const real t0 = config.inlet_total_temperature;
    const real pb = config.outlet_static_pressure;
    // Uniform state at the outlet static pressure, isentropic from stagnation.
    const real pr = pb / p0;
    const real mach2 = 2.0 / (g - 1.0) * (std::pow(pr, -(g - 1.0) / g) - 1.0);
    if (mach2 >= 1.0)
        throw UnsupportedCaseError("pressure ratio implies supersonic inflow (M^2 = " +
                                   std::to_string(mach2) + ")");
    const real tb = t0 / (1.0 + 0.5 * (g - 1.0) * mach2);
    const real c = std::sqrt(g * config.gas.gas_constant * tb);
    const real u = std::sqrt(mach2) * c;
    const real rho = pb / (config.gas.gas_constant * tb);

    PrimitiveState W(3, config.nx);
    for (int i = 0; i < config.nx; ++i) {
        W.at(i, 0) = rho;
        W.at(i, 1) = u;
        W.at(i, 2) = pb;
    }
    validate_state(W, 3);
    return W;
}

PrimitiveState scalar_steady_reference(const CaseConfig& config, int nodes) {
    PrimitiveState W(1, nodes);
    for (int i = 0; i < nodes; ++i) W.at(i, 0) = config.inlet_value;
    return W;
}

}  // namespace fnlh
