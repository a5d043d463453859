/// @file disc_euler.cpp
/// @brief Quasi-1D Euler nozzle: central flux with scalar-spectral-radius JST
/// dissipation, area source term, total-condition inlet / static-pressure outlet,
/// and 1D characteristic perturbation boundaries.

#include <algorithm>
#include <cmath>

#include "disc.hpp"

namespace fnlh {

namespace {

constexpr real kKappa2 = 0.5;
constexpr real kKappa4 = 1.0 / 32.0;

struct EulerBoundaryState {
    real rho, u, p;
};

class EulerNozzleDisc final : public Discretization {
public:
    EulerNozzleDisc(const CaseConfig& cfg, const Mesh& mesh) : Discretization(cfg, mesh) {
        if (mesh.dimension != 1) throw ConfigError("nozzle case requires a 1D mesh");
        const int n = mesh.num_nodes();
        left_area_.assign(n, 0.0);
        right_area_.assign(n, 0.0);
        for (const Face& f : mesh.faces) {
            if (f.boundary == kBoundaryWest)
                left_area_[f.a] = f.area;
            else if (f.boundary == kBoundaryEast)
                right_area_[f.a] = f.area;
            else {
                right_area_[f.a] = f.area;
                left_area_[f.b] = f.area;
            }
        }
    }

    bool linear_flux() const override { return false; }
    int forcing_size() const override { return 3; }  // inlet entropy, inlet acoustic, outlet acoustic

    std::vector<cplx> harmonic_forcing(const Harmonic& h) const override {
        std::vector<cplx> f(3, cplx{});
        f[2] = h.amplitude;  // harmonic back pressure on the outlet
        return f;
    }

    real forcing_scale() const override { return cfg_.outlet_static_pressure; }

    void validate_state(const PrimitiveState& W) const override {
        fnlh::validate_state(W, 3);
    }

    void residual(const PrimitiveState& W, int order, BcMode mode, std::span<const real> forcing,
                  bool need_viscous, BlockVec<real>& inv, BlockVec<real>& vis) const override {
        const int n = mesh_.num_nodes();
        if (W.b != 3 || W.nodes() != n) throw ShapeError("euler residual: state shape mismatch");
        if (inv.b != 3 || inv.nodes() != n) inv = BlockVec<real>(3, n);
        inv.fill(0.0);
        if (need_viscous) {
            if (vis.b != 3 || vis.nodes() != n) vis = BlockVec<real>(3, n);
            vis.fill(0.0);  // inviscid problem: the splitting machinery runs with a zero part
        }

        real flux[3];
        for (const Face& f : mesh_.faces) {
            if (f.is_boundary()) {
                boundary_face_flux(f, W, mode, forcing, flux);
                for (int m = 0; m < 3; ++m) inv.at(f.a, m) += flux[m];
                continue;
            }
            interior_face_flux(f, W, order, flux);
            for (int m = 0; m < 3; ++m) {
                inv.at(f.a, m) += flux[m];
                inv.at(f.b, m) -= flux[m];
            }
        }
        real src[3];
        for (int i = 0; i < n; ++i) {
            node_source(i, W, src);
            for (int m = 0; m < 3; ++m) inv.at(i, m) += src[m];
        }
    }

    void face_flux1(const Face& f, const PrimitiveState& W, BcMode mode,
                    std::span<const real> forcing, real* out) const override {
        if (f.is_boundary())
            boundary_face_flux(f, W, mode, forcing, out);
        else
            interior_face_flux(f, W, 1, out);
    }

    void node_source(int i, const PrimitiveState& W, real* out) const override {
        // momentum area source: R_i includes -p_i (A_R - A_L)
        out[0] = 0.0;
        out[1] = -W.at(i, 2) * (right_area_[i] - left_area_[i]);
        out[2] = 0.0;
    }

private:
    std::vector<real> left_area_, right_area_;

    static void phys_flux(const real* w, real gamma, real area, real* out) {
        const real rho = w[0], u = w[1], p = w[2];
        const real rhoE = p / (gamma - 1.0) + 0.5 * rho * u * u;
        out[0] = rho * u * area;
        out[1] = (rho * u * u + p) * area;
        out[2] = u * (rhoE + p) * area;
    }

    real pressure_switch(const PrimitiveState& W, int i) const {
        const int n = mesh_.num_nodes();
        const int im = std::max(i - 1, 0);
        const int ip = std::min(i + 1, n - 1);
        const real pm = W.at(im, 2), pc = W.at(i, 2), pp = W.at(ip, 2);
        return std::abs(pp - 2.0 * pc + pm) / (pp + 2.0 * pc + pm);
    }

    void interior_face_flux(const Face& f, const PrimitiveState& W, int order, real* out) const {
        const real g = cfg_.gas.gamma;
        const int a = f.a, b = f.b;
        real fa[3], fb[3];
        phys_flux(W.node(a), g, f.area, fa);
        phys_flux(W.node(b), g, f.area, fb);

        const real rho = 0.5 * (W.at(a, 0) + W.at(b, 0));
        const real u = 0.5 * (W.at(a, 1) + W.at(b, 1));
        const real p = 0.5 * (W.at(a, 2) + W.at(b, 2));
        const real c = std::sqrt(g * p / rho);
        const real lam = (std::abs(u) + c) * f.area;

        real qa[3], qb[3];
        euler_prim_to_cons(W.node(a), cfg_.gas, qa);
        euler_prim_to_cons(W.node(b), cfg_.gas, qb);

        for (int m = 0; m < 3; ++m) out[m] = 0.5 * (fa[m] + fb[m]);

        if (order == 1) {
            for (int m = 0; m < 3; ++m) out[m] -= 0.5 * lam * (qb[m] - qa[m]);
            return;
        }

        const real s2 = kKappa2 * std::max(pressure_switch(W, a), pressure_switch(W, b));
        real s4 = std::max(0.0, kKappa4 - s2);
        const int im1 = a - 1, ip2 = b + 1;
        if (im1 < 0 || ip2 >= mesh_.num_nodes()) s4 = 0.0;  // stencil truncated at boundaries
        for (int m = 0; m < 3; ++m) {
            real d = s2 * lam * (qb[m] - qa[m]);
            if (s4 > 0.0) {
                real qm1[3], qp2[3];
                euler_prim_to_cons(W.node(im1), cfg_.gas, qm1);
                euler_prim_to_cons(W.node(ip2), cfg_.gas, qp2);
                d -= s4 * lam * (qp2[m] - 3.0 * qb[m] + 3.0 * qa[m] - qm1[m]);
            }
            out[m] -= d;
        }
    }

    EulerBoundaryState steady_inlet_state(const real* wint) const {
        const real g = cfg_.gas.gamma;
        const real R = cfg_.gas.gas_constant;
        const real gp = 0.5 * (g - 1.0);
        const real c_int = std::sqrt(g * wint[2] / wint[0]);
        const real jm = wint[1] - c_int / gp;  // u - 2c/(gamma-1), outgoing invariant
        const real c0sq = g * R * cfg_.inlet_total_temperature;
        // gp^2 (u - jm)^2 + gp u^2 = c0^2
        const real qa = gp * gp + gp;
        const real qb = -2.0 * gp * gp * jm;
        const real qc = gp * gp * jm * jm - c0sq;
        const real disc = qb * qb - 4.0 * qa * qc;
        if (disc < 0.0) throw StateError("inlet characteristic reconstruction failed");
        const real ub = (-qb + std::sqrt(disc)) / (2.0 * qa);
        const real cb = gp * (ub - jm);
        if (!(cb > 0.0)) throw StateError("inlet boundary state has nonpositive sound speed");
        if (std::abs(ub) >= cb) throw UnsupportedCaseError("supersonic inlet boundary state");
        const real tb = cb * cb / (g * R);
        const real pb = cfg_.inlet_total_pressure *
                        std::pow(tb / cfg_.inlet_total_temperature, g / (g - 1.0));
        return {pb / (R * tb), ub, pb};
    }

    EulerBoundaryState steady_outlet_state(const real* wint) const {
        const real g = cfg_.gas.gamma;
        const real pb = cfg_.outlet_static_pressure;
        const real rhob = wint[0] * std::pow(pb / wint[2], 1.0 / g);
        const real cb = std::sqrt(g * pb / rhob);
        const real c_int = std::sqrt(g * wint[2] / wint[0]);
        const real ub = wint[1] + 2.0 / (g - 1.0) * (c_int - cb);
        if (std::abs(ub) >= cb) throw UnsupportedCaseError("supersonic outlet boundary state");
        return {rhob, ub, pb};
    }

    EulerBoundaryState boundary_state(const Face& f, const PrimitiveState& W, BcMode mode,
                                      std::span<const real> forcing) const {
        const real* wint = W.node(f.a);
        if (mode == BcMode::Steady)
            return f.boundary == kBoundaryWest ? steady_inlet_state(wint) : steady_outlet_state(wint);

        const PrimitiveState& ref = perturbation_reference();
        const real* wref = ref.node(f.a);
        const EulerBoundaryState bref =
            f.boundary == kBoundaryWest ? steady_inlet_state(wref) : steady_outlet_state(wref);
        const real cbar = std::sqrt(cfg_.gas.gamma * bref.p / bref.rho);
        const real rc = bref.rho * cbar;

        const real drho = wint[0] - wref[0];
        const real du = wint[1] - wref[1];
        const real dp = wint[2] - wref[2];

        auto fval = [&](int k) { return k < static_cast<int>(forcing.size()) ? forcing[k] : 0.0; };

        real c_entropy, c_plus, c_minus;
        if (f.boundary == kBoundaryWest) {
            // outgoing: C-; incoming entropy and downstream acoustic are forced
            c_minus = dp - rc * du;
            c_entropy = fval(0);
            c_plus = 2.0 * fval(1);
        } else {
            // outgoing: entropy and C+; incoming upstream acoustic is forced
            c_entropy = drho - dp / (cbar * cbar);
            c_plus = dp + rc * du;
            c_minus = 2.0 * fval(2);
        }
        const real dpb = 0.5 * (c_plus + c_minus);
        const real dub = (c_plus - c_minus) / (2.0 * rc);
        const real drhob = c_entropy + dpb / (cbar * cbar);
        return {bref.rho + drhob, bref.u + dub, bref.p + dpb};
    }

    void boundary_face_flux(const Face& f, const PrimitiveState& W, BcMode mode,
                            std::span<const real> forcing, real* out) const {
        const EulerBoundaryState bs = boundary_state(f, W, mode, forcing);
        const real wb[3] = {bs.rho, bs.u, bs.p};
        phys_flux(wb, cfg_.gas.gamma, f.area, out);
        if (f.boundary == kBoundaryWest)
            for (int m = 0; m < 3; ++m) out[m] = -out[m];  // outward normal is -x
    }
};

}  // namespace

std::unique_ptr<Discretization> make_euler_discretization(const CaseConfig& cfg, const Mesh& mesh) {
    return std::make_unique<EulerNozzleDisc>(cfg, mesh);
}

}  // namespace fnlh
