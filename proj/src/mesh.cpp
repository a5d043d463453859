#include "mesh.hpp"

#include <algorithm>
#include <cmath>

namespace fnlh {

int Mesh::num_partitions() const {
    int p = 0;
    for (int id : partition) p = std::max(p, id + 1);
    return p;
}

real Mesh::total_volume() const {
    real s = 0.0;
    for (real v : volume) s += v;
    return s;
}

void Mesh::validate() const {
    const int n = num_nodes();
    if (n == 0) throw ConfigError("mesh has no nodes");
    for (int i = 0; i < n; ++i)
        if (!(volume[i] > 0.0)) throw ConfigError("mesh: nonpositive volume at node " + std::to_string(i));
    for (const Face& f : faces) {
        if (!(f.area > 0.0)) throw ConfigError("mesh: nonpositive face area");
        if (f.a < 0 || f.a >= n) throw ConfigError("mesh: face endpoint out of range");
        if (f.is_boundary()) {
            if (f.b != -1) throw ConfigError("mesh: boundary face must have one node");
        } else {
            if (f.b < 0 || f.b >= n || f.b == f.a) throw ConfigError("mesh: bad interior face endpoints");
        }
    }
    const int p = num_partitions();
    std::vector<char> seen(p, 0);
    for (int id : partition) {
        if (id < 0) throw ConfigError("mesh: negative partition id");
        seen[id] = 1;
    }
    for (int k = 0; k < p; ++k)
        if (!seen[k]) throw ConfigError("mesh: partition ids are not a contiguous range");
}

void Mesh::build_adjacency() {
    const int n = num_nodes();
    node_face_ptr.assign(n + 1, 0);
    for (const Face& f : faces) {
        ++node_face_ptr[f.a + 1];
        if (!f.is_boundary()) ++node_face_ptr[f.b + 1];
    }
    for (int i = 0; i < n; ++i) node_face_ptr[i + 1] += node_face_ptr[i];
    node_face_idx.assign(node_face_ptr[n], -1);
    std::vector<int> fill(node_face_ptr.begin(), node_face_ptr.end() - 1);
    for (int fi = 0; fi < static_cast<int>(faces.size()); ++fi) {
        const Face& f = faces[fi];
        node_face_idx[fill[f.a]++] = fi;
        if (!f.is_boundary()) node_face_idx[fill[f.b]++] = fi;
    }
}

std::vector<int> contiguous_partitions(int n, int p) {
    if (p < 1 || p > n) throw ConfigError("partition count must be in [1, node count]");
    std::vector<int> map(n);
    for (int i = 0; i < n; ++i)
        map[i] = static_cast<int>((static_cast<long long>(i) * p) / n);
    return map;
}

real nozzle_area(const CaseConfig& config, real x) {
    if (!config.area_table.empty()) {
        static thread_local std::string cached_path;
        static thread_local AreaTable cached;
        if (cached_path != config.area_table) {
            cached = load_area_table(config.area_table);
            cached_path = config.area_table;
        }
        return cached(x);
    }
    const real xm = x - 0.5 * config.length_x;
    return 1.0 + config.area_coeff * xm * xm;
}

namespace {

Mesh build_mesh_1d(const CaseConfig& c) {
    Mesh m;
    m.dimension = 1;
    m.nx = c.nx;
    m.ny = 1;
    m.dx = c.length_x / c.nx;
    m.dy = 1.0;
    m.x.resize(c.nx);
    m.y.assign(c.nx, 0.0);
    m.volume.resize(c.nx);
    for (int i = 0; i < c.nx; ++i) {
        m.x[i] = (i + 0.5) * m.dx;
        m.volume[i] = nozzle_area(c, m.x[i]) * m.dx;
    }
    // west boundary face, interior faces, east boundary face
    {
        Face f;
        f.a = 0;
        f.dir = 0;
        f.area = nozzle_area(c, 0.0);
        f.boundary = kBoundaryWest;
        f.boundary_ordinal = 0;
        m.faces.push_back(f);
    }
    for (int i = 0; i + 1 < c.nx; ++i) {
        Face f;
        f.a = i;
        f.b = i + 1;
        f.dir = 0;
        f.area = nozzle_area(c, (i + 1) * m.dx);
        m.faces.push_back(f);
    }
    {
        Face f;
        f.a = c.nx - 1;
        f.dir = 0;
        f.area = nozzle_area(c, c.length_x);
        f.boundary = kBoundaryEast;
        f.boundary_ordinal = 0;
        m.faces.push_back(f);
    }
    return m;
}

Mesh build_mesh_2d(const CaseConfig& c) {
    Mesh m;
    m.dimension = 2;
    m.nx = c.nx;
    m.ny = c.ny;
    m.dx = c.length_x / c.nx;
    m.dy = c.length_y / c.ny;
    const int n = c.nx * c.ny;
    m.x.resize(n);
    m.y.resize(n);
    m.volume.assign(n, m.dx * m.dy);
    for (int iy = 0; iy < c.ny; ++iy)
        for (int ix = 0; ix < c.nx; ++ix) {
            const int i = m.node_index(ix, iy);
            m.x[i] = (ix + 0.5) * m.dx;
            m.y[i] = (iy + 0.5) * m.dy;
        }
    // x-direction faces (west boundary, interior, east boundary) per row
    for (int iy = 0; iy < c.ny; ++iy) {
        {
            Face f;
            f.a = m.node_index(0, iy);
            f.dir = 0;
            f.area = m.dy;
            f.boundary = kBoundaryWest;
            f.boundary_ordinal = iy;
            m.faces.push_back(f);
        }
        for (int ix = 0; ix + 1 < c.nx; ++ix) {
            Face f;
            f.a = m.node_index(ix, iy);
            f.b = m.node_index(ix + 1, iy);
            f.dir = 0;
            f.area = m.dy;
            m.faces.push_back(f);
        }
        {
            Face f;
            f.a = m.node_index(c.nx - 1, iy);
            f.dir = 0;
            f.area = m.dy;
            f.boundary = kBoundaryEast;
            f.boundary_ordinal = iy;
            m.faces.push_back(f);
        }
    }
    // y-direction faces, periodic wrap (skip when the row is degenerate)
    if (c.ny > 1) {
        for (int ix = 0; ix < c.nx; ++ix)
            for (int iy = 0; iy < c.ny; ++iy) {
                Face f;
                f.a = m.node_index(ix, iy);
                f.b = m.node_index(ix, (iy + 1) % c.ny);
                f.dir = 1;
                f.area = m.dx;
                m.faces.push_back(f);
            }
    }
    return m;
}

}  // namespace

Mesh build_mesh(const CaseConfig& config) {
    config.validate();
    Mesh m = config.kind == CaseKind::NozzleEuler ? build_mesh_1d(config) : build_mesh_2d(config);
    m.partition = contiguous_partitions(m.num_nodes(), config.partitions);
    m.build_adjacency();
    m.validate();
    return m;
}

}  // namespace fnlh
