#include "residual_ops.hpp"

#include <algorithm>
#include <cmath>

namespace fnlh {

namespace {

/// Step size for a central difference along (dir, fdir): the largest per-variable
/// relative excursion is held at kLinFdRel. Returns 0 when the direction vanishes.
real directional_step(const Discretization& disc, const PrimitiveState& mean,
                      const BlockVec<real>& dir, std::span<const real> fdir) {
    const int b = mean.b;
    std::vector<real> wscale(b, 0.0), dscale(b, 0.0);
    for (int i = 0; i < mean.nodes(); ++i)
        for (int m = 0; m < b; ++m) {
            wscale[m] = std::max(wscale[m], std::abs(mean.at(i, m)));
            dscale[m] = std::max(dscale[m], std::abs(dir.at(i, m)));
        }
    real ratio = 0.0;
    for (int m = 0; m < b; ++m)
        if (dscale[m] > 0.0) ratio = std::max(ratio, dscale[m] / std::max(wscale[m], 1e-300));
    real fmax = 0.0;
    for (real f : fdir) fmax = std::max(fmax, std::abs(f));
    if (fmax > 0.0) ratio = std::max(ratio, fmax / disc.forcing_scale());
    if (ratio == 0.0) return 0.0;
    return kLinFdRel / ratio;
}

/// Central difference of the nonlinear residual along a real direction with
/// matching boundary-forcing direction, in perturbation mode.
void directional_difference(const Discretization& disc, const PrimitiveState& mean,
                            const BlockVec<real>& dir, std::span<const real> fdir, int order,
                            bool need_viscous, BlockVec<real>& dinv, BlockVec<real>& dvis) {
    const int b = mean.b, n = mean.nodes();
    dinv = BlockVec<real>(b, n);
    if (need_viscous) dvis = BlockVec<real>(b, n);

    const real delta = directional_step(disc, mean, dir, fdir);
    if (delta == 0.0) return;

    PrimitiveState wp = mean;
    std::vector<real> fp(fdir.size());
    BlockVec<real> inv_p(b, n), vis_p(b, n), inv_m(b, n), vis_m(b, n);

    for (std::size_t k = 0; k < wp.v.size(); ++k) wp.v[k] = mean.v[k] + delta * dir.v[k];
    for (std::size_t k = 0; k < fdir.size(); ++k) fp[k] = delta * fdir[k];
    disc.residual(wp, order, BcMode::Perturbation, fp, need_viscous, inv_p, vis_p);

    for (std::size_t k = 0; k < wp.v.size(); ++k) wp.v[k] = mean.v[k] - delta * dir.v[k];
    for (std::size_t k = 0; k < fdir.size(); ++k) fp[k] = -delta * fdir[k];
    disc.residual(wp, order, BcMode::Perturbation, fp, need_viscous, inv_m, vis_m);

    const real inv2d = 1.0 / (2.0 * delta);
    for (std::size_t k = 0; k < dinv.v.size(); ++k) dinv.v[k] = (inv_p.v[k] - inv_m.v[k]) * inv2d;
    if (need_viscous)
        for (std::size_t k = 0; k < dvis.v.size(); ++k) dvis.v[k] = (vis_p.v[k] - vis_m.v[k]) * inv2d;
}

}  // namespace

void linearized_residual(const Discretization& disc, const PrimitiveState& mean,
                         const BlockDiag<real>& M, const BlockVec<cplx>& what, real omega,
                         std::span<const cplx> forcing, int order, bool need_viscous,
                         BlockVec<cplx>& inv, BlockVec<cplx>& vis) {
    const int b = mean.b, n = mean.nodes();
    if (what.b != b || what.nodes() != n) throw ShapeError("linearized_residual: field shape mismatch");
    if (omega < 0.0) throw ConfigError("linearized_residual: negative frequency");
    inv = BlockVec<cplx>(b, n);
    if (need_viscous) vis = BlockVec<cplx>(b, n);

    BlockVec<real> dir(b, n), dinv, dvis;
    std::vector<real> fdir(forcing.size());

    for (int part = 0; part < 2; ++part) {
        for (std::size_t k = 0; k < dir.v.size(); ++k)
            dir.v[k] = part == 0 ? what.v[k].real() : what.v[k].imag();
        for (std::size_t k = 0; k < forcing.size(); ++k)
            fdir[k] = part == 0 ? forcing[k].real() : forcing[k].imag();
        directional_difference(disc, mean, dir, fdir, order, need_viscous, dinv, dvis);
        const cplx unit = part == 0 ? cplx(1.0, 0.0) : cplx(0.0, 1.0);
        for (std::size_t k = 0; k < inv.v.size(); ++k) inv.v[k] += unit * dinv.v[k];
        if (need_viscous)
            for (std::size_t k = 0; k < vis.v.size(); ++k) vis.v[k] += unit * dvis.v[k];
    }

    // spectral source i omega M V what, accumulated into the inviscid part
    const Mesh& mesh = disc.mesh();
    std::vector<cplx> mw(b);
    for (int i = 0; i < n; ++i) {
        const real* Mi = M.block(i);
        const cplx* wi = what.node(i);
        for (int r = 0; r < b; ++r) {
            cplx acc{};
            for (int c = 0; c < b; ++c) acc += Mi[static_cast<std::size_t>(r) * b + c] * wi[c];
            mw[r] = acc;
        }
        const cplx iwv(0.0, omega * mesh.volume[i]);
        for (int r = 0; r < b; ++r) inv.at(i, r) += iwv * mw[r];
    }
}

BlockVec<cplx> linearized_residual(const Discretization& disc, const PrimitiveState& mean,
                                   const BlockDiag<real>& M, const HarmonicField& h,
                                   std::span<const cplx> forcing) {
    BlockVec<cplx> inv, vis;
    linearized_residual(disc, mean, M, h.amp, h.omega, forcing, 2, true, inv, vis);
    for (std::size_t k = 0; k < inv.v.size(); ++k) inv.v[k] += vis.v[k];
    return inv;
}

BlockVec<real> deterministic_flux(const Discretization& disc, const PrimitiveState& mean,
                                  const std::vector<HarmonicField>& harmonics,
                                  bool exploit_linearity) {
    const int b = mean.b, n = mean.nodes();
    BlockVec<real> df(b, n);

    // commensurability check happens before any shortcut so errors are uniform
    HarmonicSpec spec;
    for (const HarmonicField& h : harmonics) {
        Harmonic e;
        e.index = h.index;
        e.omega = h.omega;
        spec.harmonics.push_back(e);
    }
    const real base = spec.base_frequency();
    const int lmax = spec.max_multiple(base);

    bool any_amp = false;
    for (const HarmonicField& h : harmonics)
        for (const cplx& z : h.amp.v)
            if (z != cplx{}) {
                any_amp = true;
                break;
            }
    if (!any_amp) return df;
    if (exploit_linearity && disc.linear_flux()) return df;

    BlockVec<real> inv(b, n), vis, acc(b, n);
    if (lmax == 0) {
        // only stationary disturbances: the "period average" is a single offset state
        const PrimitiveState w = reconstruct_instantaneous(mean, harmonics, 0.0);
        disc.residual(w, 2, BcMode::Steady, {}, false, inv, vis);
        acc = inv;
    } else {
        const real period = 2.0 * std::acos(-1.0) / base;
        const int nq = 4 * lmax + 2;
        for (int k = 0; k < nq; ++k) {
            const real t = period * k / nq;
            const PrimitiveState w = reconstruct_instantaneous(mean, harmonics, t);
            disc.residual(w, 2, BcMode::Steady, {}, false, inv, vis);
            for (std::size_t m = 0; m < acc.v.size(); ++m) acc.v[m] += inv.v[m];
        }
        for (real& x : acc.v) x /= nq;
    }

    disc.residual(mean, 2, BcMode::Steady, {}, false, inv, vis);
    for (std::size_t m = 0; m < df.v.size(); ++m) df.v[m] = acc.v[m] - inv.v[m];
    return df;
}

}  // namespace fnlh
