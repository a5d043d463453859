#pragma once
/// @file mesh.hpp
/// @brief Node-centered finite-volume meshes for the 1D nozzle and the 2D channel.
///
/// Nodes are cell centers. Faces carry the area (1D: duct cross-section at the
/// face, 2D: edge length) and a coordinate direction; boundary faces reference
/// one node plus a boundary marker. The 2D channel is periodic in y.

#include <array>
#include <string>
#include <vector>

#include "case.hpp"
#include "core.hpp"

namespace fnlh {

enum BoundaryId : int {
    kInterior = -1,
    kBoundaryWest = 0,  // x = 0 (inlet)
    kBoundaryEast = 1,  // x = Lx (outlet)
};

struct Face {
    int a = -1;          // first node; for boundary faces: the interior node
    int b = -1;          // second node, or -1 on a boundary
    int dir = 0;         // 0: normal +x, 1: normal +y
    real area = 0.0;     // face area (> 0)
    int boundary = kInterior;
    int boundary_ordinal = 0;  // running index among faces of the same boundary

    bool is_boundary() const { return boundary != kInterior; }
};

struct Mesh {
    int dimension = 1;
    int nx = 0, ny = 1;
    real dx = 0.0, dy = 0.0;

    std::vector<real> x, y;       // node (cell-center) coordinates
    std::vector<real> volume;     // control volume per node
    std::vector<Face> faces;
    std::vector<int> partition;   // partition id per node, contiguous 0..P-1

    // CSR adjacency node -> incident faces
    std::vector<int> node_face_ptr;
    std::vector<int> node_face_idx;

    int num_nodes() const { return static_cast<int>(volume.size()); }
    int num_partitions() const;

    int node_index(int ix, int iy) const { return iy * nx + ix; }
    int ix_of(int node) const { return node % nx; }
    int iy_of(int node) const { return node / nx; }

    real total_volume() const;

    /// Checks volumes, areas, face endpoints and partition contiguity.
    void validate() const;

    void build_adjacency();
};

/// Build the mesh for a case: 1D block-tridiagonal connectivity for the nozzle,
/// 5-point stencil (periodic in y) for the 2D scalar case. Partition ids are
/// assigned as contiguous index ranges.
Mesh build_mesh(const CaseConfig& config);

/// Contiguous partition of n nodes into p ranges of near-equal size.
std::vector<int> contiguous_partitions(int n, int p);

/// Duct cross-section area at coordinate x for a nozzle case.
real nozzle_area(const CaseConfig& config, real x);

}  // namespace fnlh
