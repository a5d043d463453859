#include "disc.hpp"

#include <algorithm>
#include <cmath>

namespace fnlh {

void Discretization::set_perturbation_reference(const PrimitiveState& Wref) {
    if (Wref.b != block_size() || Wref.nodes() != mesh_.num_nodes())
        throw ShapeError("perturbation reference shape mismatch");
    pert_ref_ = Wref;
}

const PrimitiveState& Discretization::perturbation_reference() const {
    if (pert_ref_.nodes() == 0) throw StateError("perturbation reference not set");
    return pert_ref_;
}

void Discretization::boundary_flux(const Face& f, const PrimitiveState& W, BcMode mode,
                                   std::span<const real> forcing, real* out) const {
    if (!f.is_boundary()) throw ShapeError("boundary_flux called on an interior face");
    face_flux1(f, W, mode, forcing, out);
}

void Discretization::assemble_jacobian(const PrimitiveState& W, Bsr<real>& J) const {
    if (!J.pattern || J.pattern->rows != mesh_.num_nodes() || J.pattern->b != block_size())
        throw ShapeError("assemble_jacobian: matrix pattern mismatch");
    fd_jacobian(W, &J, nullptr);
}

BlockDiag<real> Discretization::assemble_diag_blocks(const PrimitiveState& W) const {
    BlockDiag<real> P(block_size(), mesh_.num_nodes());
    fd_jacobian(W, nullptr, &P);
    return P;
}

void Discretization::fd_jacobian(const PrimitiveState& W, Bsr<real>* J, BlockDiag<real>* P) const {
    const int b = block_size();
    const int n = mesh_.num_nodes();
    validate_state(W);
    if (J) J->set_zero();

    // per-variable conservative scale for the FD step
    ConservativeState Q = primitive_to_conservative(W, cfg_.gas);
    std::vector<real> qscale(b, 0.0);
    for (int i = 0; i < n; ++i)
        for (int m = 0; m < b; ++m) qscale[m] = std::max(qscale[m], std::abs(Q.at(i, m)));
    for (int m = 0; m < b; ++m)
        if (qscale[m] == 0.0) qscale[m] = 1.0;
    constexpr real kFdRel = 1e-6;

    PrimitiveState Ws = W;  // scratch, node j mutated and restored
    std::vector<real> qj(b), wj(b);
    std::vector<real> fplus, fminus, splus(b), sminus(b);

    for (int j = 0; j < n; ++j) {
        const int f_begin = mesh_.node_face_ptr[j];
        const int f_end = mesh_.node_face_ptr[j + 1];
        const int nf = f_end - f_begin;
        fplus.assign(static_cast<std::size_t>(nf) * b, 0.0);
        fminus.assign(static_cast<std::size_t>(nf) * b, 0.0);

        for (int m = 0; m < b; ++m) {
            if (b == 3)
                euler_prim_to_cons(W.node(j), cfg_.gas, qj.data());
            else
                qj[0] = W.at(j, 0);
            const real delta = kFdRel * std::max(std::abs(qj[m]), qscale[m]);

            for (int sgn = 0; sgn < 2; ++sgn) {
                const real d = sgn == 0 ? delta : -delta;
                qj[m] += d;
                if (b == 3)
                    euler_cons_to_prim(qj.data(), cfg_.gas, wj.data());
                else
                    wj[0] = qj[0];
                qj[m] -= d;
                std::copy(wj.begin(), wj.end(), Ws.node(j));

                real* fbuf = (sgn == 0 ? fplus : fminus).data();
                for (int k = 0; k < nf; ++k)
                    face_flux1(mesh_.faces[mesh_.node_face_idx[f_begin + k]], Ws, BcMode::Steady, {},
                               fbuf + static_cast<std::size_t>(k) * b);
                node_source(j, Ws, sgn == 0 ? splus.data() : sminus.data());
            }
            std::copy(W.node(j), W.node(j) + b, Ws.node(j));

            const real inv2d = 1.0 / (2.0 * delta);
            for (int k = 0; k < nf; ++k) {
                const Face& f = mesh_.faces[mesh_.node_face_idx[f_begin + k]];
                for (int r = 0; r < b; ++r) {
                    const real dflux =
                        (fplus[static_cast<std::size_t>(k) * b + r] - fminus[static_cast<std::size_t>(k) * b + r]) *
                        inv2d;
                    if (dflux == 0.0) continue;
                    // scatter under the residual convention: +flux to f.a, -flux to f.b
                    if (J) {
                        const int ea = J->pattern->find(f.a, j);
                        J->block(ea)[static_cast<std::size_t>(r) * b + m] += dflux;
                        if (!f.is_boundary()) {
                            const int eb = J->pattern->find(f.b, j);
                            J->block(eb)[static_cast<std::size_t>(r) * b + m] -= dflux;
                        }
                    }
                    if (P) {
                        if (f.a == j) P->block(j)[static_cast<std::size_t>(r) * b + m] += dflux;
                        if (!f.is_boundary() && f.b == j) P->block(j)[static_cast<std::size_t>(r) * b + m] -= dflux;
                    }
                }
            }
            for (int r = 0; r < b; ++r) {
                const real dsrc = (splus[r] - sminus[r]) * inv2d;
                if (dsrc == 0.0) continue;
                if (J) J->block(J->pattern->diag_idx[j])[static_cast<std::size_t>(r) * b + m] += dsrc;
                if (P) P->block(j)[static_cast<std::size_t>(r) * b + m] += dsrc;
            }
        }
    }

    // nonsingular diagonal blocks are part of the contract; report the node otherwise
    if (J) {
        std::vector<real> blk(static_cast<std::size_t>(b) * b);
        std::vector<int> piv(b);
        for (int i = 0; i < n; ++i) {
            const real* src = J->block(J->pattern->diag_idx[i]);
            std::copy(src, src + b * b, blk.begin());
            block_lu_factor(b, blk.data(), piv.data(), i);  // throws FactorizationError when singular
        }
    }
}

}  // namespace fnlh
