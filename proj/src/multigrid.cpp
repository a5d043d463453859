#include "multigrid.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace fnlh {

std::vector<int> coarsen_parent_map(const Mesh& fine) {
    std::vector<int> parent(fine.num_nodes(), -1);
    if (fine.dimension == 1) {
        if (fine.nx % 2 != 0) throw ConfigError("coarsen: odd cell count " + std::to_string(fine.nx));
        for (int i = 0; i < fine.nx; ++i) parent[i] = i / 2;
        return parent;
    }
    if (fine.nx % 2 != 0 || fine.ny % 2 != 0)
        throw ConfigError("coarsen: odd cell count " + std::to_string(fine.nx) + "x" +
                          std::to_string(fine.ny));
    const int cnx = fine.nx / 2;
    for (int iy = 0; iy < fine.ny; ++iy)
        for (int ix = 0; ix < fine.nx; ++ix)
            parent[fine.node_index(ix, iy)] = (iy / 2) * cnx + ix / 2;
    return parent;
}

namespace {

void renormalize_partitions(std::vector<int>& part) {
    std::map<int, int> remap;
    for (int id : part)
        if (!remap.count(id)) {
            const int next = static_cast<int>(remap.size());
            remap[id] = next;
        }
    for (int& id : part) id = remap[id];
}

}  // namespace

Mesh coarsen(const Mesh& fine) {
    const std::vector<int> parent = coarsen_parent_map(fine);
    Mesh c;
    c.dimension = fine.dimension;
    c.nx = fine.nx / 2;
    c.ny = fine.dimension == 2 ? fine.ny / 2 : 1;
    c.dx = 2.0 * fine.dx;
    c.dy = fine.dimension == 2 ? 2.0 * fine.dy : fine.dy;
    const int nc = c.nx * c.ny;
    c.x.assign(nc, 0.0);
    c.y.assign(nc, 0.0);
    c.volume.assign(nc, 0.0);
    c.partition.assign(nc, -1);

    for (int i = 0; i < fine.num_nodes(); ++i) {
        const int p = parent[i];
        c.volume[p] += fine.volume[i];
        c.x[p] += fine.volume[i] * fine.x[i];
        c.y[p] += fine.volume[i] * fine.y[i];
        if (c.partition[p] < 0) c.partition[p] = fine.partition[i];
    }
    for (int p = 0; p < nc; ++p) {
        c.x[p] /= c.volume[p];
        c.y[p] /= c.volume[p];
    }
    renormalize_partitions(c.partition);

    // faces: keep the fine faces that separate different coarse cells (their
    // areas transfer unchanged); merge y-duplicates is unnecessary, duplicates
    // only arise on a two-cell periodic ring, which is a valid cylinder.
    if (fine.dimension == 1) {
        for (const Face& f : fine.faces) {
            if (f.is_boundary()) {
                Face g = f;
                g.a = parent[f.a];
                c.faces.push_back(g);
            } else if (parent[f.a] != parent[f.b]) {
                Face g = f;
                g.a = parent[f.a];
                g.b = parent[f.b];
                c.faces.push_back(g);
            }
        }
    } else {
        // rebuild structured faces; x-boundary ordinals follow coarse rows
        for (int iy = 0; iy < c.ny; ++iy) {
            {
                Face f;
                f.a = c.node_index(0, iy);
                f.dir = 0;
                f.area = c.dy;
                f.boundary = kBoundaryWest;
                f.boundary_ordinal = iy;
                c.faces.push_back(f);
            }
            for (int ix = 0; ix + 1 < c.nx; ++ix) {
                Face f;
                f.a = c.node_index(ix, iy);
                f.b = c.node_index(ix + 1, iy);
                f.dir = 0;
                f.area = c.dy;
                c.faces.push_back(f);
            }
            {
                Face f;
                f.a = c.node_index(c.nx - 1, iy);
                f.dir = 0;
                f.area = c.dy;
                f.boundary = kBoundaryEast;
                f.boundary_ordinal = iy;
                c.faces.push_back(f);
            }
        }
        if (c.ny > 1) {
            for (int ix = 0; ix < c.nx; ++ix)
                for (int iy = 0; iy < c.ny; ++iy) {
                    Face f;
                    f.a = c.node_index(ix, iy);
                    f.b = c.node_index(ix, (iy + 1) % c.ny);
                    f.dir = 1;
                    f.area = c.dx;
                    c.faces.push_back(f);
                }
        }
    }
    c.build_adjacency();
    c.validate();
    return c;
}

GridHierarchy build_hierarchy(const Mesh& finest, int levels) {
    if (levels < 1) throw ConfigError("hierarchy needs at least one level");
    GridHierarchy h;
    h.level.push_back(finest);
    h.spatial_order.push_back(2);
    for (int l = 1; l < levels; ++l) {
        h.parent.push_back(coarsen_parent_map(h.level.back()));
        h.level.push_back(coarsen(h.level.back()));
        h.spatial_order.push_back(1);
    }
    return h;
}

template <class S>
BlockVec<S> restrict_state(const Mesh& fine, const std::vector<int>& parent, int n_coarse,
                           const BlockVec<S>& wf) {
    BlockVec<S> wc(wf.b, n_coarse);
    std::vector<real> vol(n_coarse, 0.0);
    for (int i = 0; i < fine.num_nodes(); ++i) {
        const int p = parent[i];
        vol[p] += fine.volume[i];
        for (int m = 0; m < wf.b; ++m) wc.at(p, m) += fine.volume[i] * wf.at(i, m);
    }
    for (int p = 0; p < n_coarse; ++p)
        for (int m = 0; m < wf.b; ++m) wc.at(p, m) /= vol[p];
    return wc;
}

template <class S>
BlockVec<S> restrict_residual(const std::vector<int>& parent, int n_coarse, const BlockVec<S>& rf) {
    BlockVec<S> rc(rf.b, n_coarse);
    for (int i = 0; i < rf.nodes(); ++i) {
        const int p = parent[i];
        for (int m = 0; m < rf.b; ++m) rc.at(p, m) += rf.at(i, m);
    }
    return rc;
}

template <class S>
void prolong_add(const std::vector<int>& parent, const BlockVec<S>& coarse_correction,
                 BlockVec<S>& fine) {
    for (int i = 0; i < fine.nodes(); ++i)
        for (int m = 0; m < fine.b; ++m) fine.at(i, m) += coarse_correction.at(parent[i], m);
}

template <class S>
BlockVec<S> fas_forcing(const std::function<void(const BlockVec<S>&, BlockVec<S>&)>& coarse_residual,
                        const BlockVec<S>& restricted_state,
                        const BlockVec<S>& restricted_fine_residual) {
    BlockVec<S> rc;
    coarse_residual(restricted_state, rc);
    if (rc.v.size() != restricted_fine_residual.v.size())
        throw ShapeError("fas_forcing: residual shape mismatch");
    for (std::size_t k = 0; k < rc.v.size(); ++k) rc.v[k] -= restricted_fine_residual.v[k];
    return rc;
}

namespace {

template <class S>
RkStepResult vcycle_level(const GridHierarchy& hier, const std::vector<LevelOps<S>>& ops, int l,
                          BlockVec<S>& w, const BlockVec<S>* forcing, const RKConfig& config,
                          const std::string& field_name) {
    StageSolver<S> solver;
    solver.pdiag = ops[l].pdiag;
    RkStepResult step = rk_step(w, ops[l].eval, ops[l].apply, config, solver, forcing, field_name);

    if (l + 1 < hier.levels()) {
        const Mesh& fine = hier.level[l];
        const std::vector<int>& parent = hier.parent[l];
        const int nc = hier.level[l + 1].num_nodes();

        BlockVec<S> wc0 = restrict_state(fine, parent, nc, w);
        BlockVec<S> rf;
        ops[l].full_residual(w, rf);
        if (forcing)
            for (std::size_t k = 0; k < rf.v.size(); ++k) rf.v[k] -= forcing->v[k];
        const BlockVec<S> rstar =
            fas_forcing<S>(ops[l + 1].full_residual, wc0, restrict_residual(parent, nc, rf));

        BlockVec<S> wc = wc0;
        vcycle_level(hier, ops, l + 1, wc, &rstar, config, field_name);

        wc -= wc0;
        prolong_add(parent, wc, w);
        if (!all_finite(w))
            throw DivergenceError("non-finite state after coarse-grid correction", 0, field_name);
    }
    return step;
}

}  // namespace

template <class S>
RkStepResult v_cycle(const GridHierarchy& hier, const std::vector<LevelOps<S>>& ops,
                     BlockVec<S>& finest_state, const RKConfig& config,
                     const std::string& field_name) {
    if (hier.levels() > 1 && config.mode != RkMode::Explicit)
        throw ConfigError("multigrid runs with the explicit scheme only");
    if (static_cast<int>(ops.size()) != hier.levels())
        throw ShapeError("v_cycle: one LevelOps per level required");
    return vcycle_level(hier, ops, 0, finest_state, nullptr, config, field_name);
}

template BlockVec<real> restrict_state<real>(const Mesh&, const std::vector<int>&, int,
                                             const BlockVec<real>&);
template BlockVec<cplx> restrict_state<cplx>(const Mesh&, const std::vector<int>&, int,
                                             const BlockVec<cplx>&);
template BlockVec<real> restrict_residual<real>(const std::vector<int>&, int, const BlockVec<real>&);
template BlockVec<cplx> restrict_residual<cplx>(const std::vector<int>&, int, const BlockVec<cplx>&);
template void prolong_add<real>(const std::vector<int>&, const BlockVec<real>&, BlockVec<real>&);
template void prolong_add<cplx>(const std::vector<int>&, const BlockVec<cplx>&, BlockVec<cplx>&);
template BlockVec<real> fas_forcing<real>(const std::function<void(const BlockVec<real>&, BlockVec<real>&)>&,
                                          const BlockVec<real>&, const BlockVec<real>&);
template BlockVec<cplx> fas_forcing<cplx>(const std::function<void(const BlockVec<cplx>&, BlockVec<cplx>&)>&,
                                          const BlockVec<cplx>&, const BlockVec<cplx>&);
template RkStepResult v_cycle<real>(const GridHierarchy&, const std::vector<LevelOps<real>>&,
                                    BlockVec<real>&, const RKConfig&, const std::string&);
template RkStepResult v_cycle<cplx>(const GridHierarchy&, const std::vector<LevelOps<cplx>>&,
                                    BlockVec<cplx>&, const RKConfig&, const std::string&);

}  // namespace fnlh
