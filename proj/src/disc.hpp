#pragma once
/// @file disc.hpp
/// @brief Finite-volume spatial discretization of the model problems.
///
/// One interface serves the mean-flow residual, the Jacobian assembly, the
/// time-linearized path and the time-accurate oracle, so all of them share the
/// same spatial operator bit for bit.
///
/// Residual convention: R_i accumulates outward face fluxes of node i plus the
/// node source; a face from a to b contributes +flux to a and -flux to b, a
/// boundary face contributes its outward flux to its interior node. The
/// inviscid part carries the central flux and the scalar-spectral-radius
/// artificial dissipation (2nd/4th-difference blend at order 2, plain
/// first-order dissipation at order 1); the viscous part carries diffusive
/// fluxes and is identically zero for the inviscid nozzle.
///
/// Boundary modes:
///  - Steady: nonlinear boundary states (total p/T inlet and static-p outlet for
///    the nozzle; prescribed inlet value and extrapolated outflow for the scalar
///    case).
///  - Perturbation: boundary state = reference boundary state + a linear
///    characteristic reconstruction of (W - Wref) with prescribed incoming
///    characteristics. Used by the linearized solver (differenced) and by the
///    unsteady oracle (finite forcing). The incoming acoustic convention is
///    C_in = 2*f so that the boundary pressure perturbation equals f when no
///    outgoing wave is present.

#include <memory>
#include <span>

#include "case.hpp"
#include "core.hpp"
#include "dense.hpp"
#include "mesh.hpp"
#include "sparse.hpp"
#include "state.hpp"

namespace fnlh {

enum class BcMode { Steady, Perturbation };

class Discretization {
public:
    Discretization(const CaseConfig& cfg, const Mesh& mesh) : cfg_(cfg), mesh_(mesh) {}
    virtual ~Discretization() = default;

    const CaseConfig& config() const { return cfg_; }
    const Mesh& mesh() const { return mesh_; }
    int block_size() const { return cfg_.block_size(); }

    /// True when the flux is linear in the state (scalar case): deterministic
    /// fluxes vanish identically.
    virtual bool linear_flux() const = 0;

    /// Number of boundary forcing degrees of freedom.
    virtual int forcing_size() const = 0;

    /// Complex forcing vector of one harmonic (amplitude times boundary shape).
    virtual std::vector<cplx> harmonic_forcing(const Harmonic& h) const = 0;

    /// Characteristic magnitude of a forcing dof, used to scale FD steps.
    virtual real forcing_scale() const = 0;

    /// Nonlinear residual split into inviscid and viscous parts. order is 1
    /// (immediate-neighbor, first-order dissipation) or 2 (full). `forcing` is
    /// only read in Perturbation mode and may be empty (zeros). When
    /// need_viscous is false the viscous part is not evaluated and `vis` is
    /// left untouched.
    virtual void residual(const PrimitiveState& W, int order, BcMode mode,
                          std::span<const real> forcing, bool need_viscous, BlockVec<real>& inv,
                          BlockVec<real>& vis) const = 0;

    /// Frozen linearization state for Perturbation-mode boundaries.
    void set_perturbation_reference(const PrimitiveState& Wref);
    const PrimitiveState& perturbation_reference() const;

    virtual void validate_state(const PrimitiveState& W) const = 0;

    /// First-order total (inviscid + viscous) flux through one face under the
    /// residual convention above. Exposed for the FD Jacobian and diagnostics.
    virtual void face_flux1(const Face& f, const PrimitiveState& W, BcMode mode,
                            std::span<const real> forcing, real* out) const = 0;

    /// Source contribution added to R_i (area source for the nozzle, zero otherwise).
    virtual void node_source(int i, const PrimitiveState& W, real* out) const = 0;

    /// Outward boundary flux of one boundary face (diagnostics/conservation checks).
    void boundary_flux(const Face& f, const PrimitiveState& W, BcMode mode,
                       std::span<const real> forcing, real* out) const;

    /// J = dR1/dQ of the first-order residual (steady boundaries), assembled by
    /// central finite differences in the conservative variables, immediate
    /// neighbors only. The matrix must already reference the mesh pattern.
    void assemble_jacobian(const PrimitiveState& W, Bsr<real>& J) const;

    /// Diagonal blocks of J only (explicit preconditioner P).
    BlockDiag<real> assemble_diag_blocks(const PrimitiveState& W) const;

protected:
    const CaseConfig cfg_;
    const Mesh& mesh_;
    PrimitiveState pert_ref_;

    /// Shared FD column loop; scatter_full=false restricts to diagonal blocks.
    void fd_jacobian(const PrimitiveState& W, Bsr<real>* J, BlockDiag<real>* P) const;
};

std::unique_ptr<Discretization> make_discretization(const CaseConfig& cfg, const Mesh& mesh);
std::unique_ptr<Discretization> make_euler_discretization(const CaseConfig& cfg, const Mesh& mesh);
std::unique_ptr<Discretization> make_scalar_discretization(const CaseConfig& cfg, const Mesh& mesh);

}  // namespace fnlh
