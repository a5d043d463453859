#pragma once
/// @file dense.hpp
/// @brief Dense b-by-b block kernels: LU with partial pivoting, matvec, and a
/// factored block-diagonal container. Shared by the block-Jacobi and ILU(0) paths
/// so that "diagonal solve" means the same arithmetic everywhere.

#include <algorithm>
#include <cstring>

#include "core.hpp"

namespace fnlh {

template <class S>
inline double abs_mag(const S& x) {
    return std::abs(x);
}

/// y += A*x for a row-major b x b block.
template <class S>
inline void block_matvec_add(int b, const S* A, const S* x, S* y) {
    for (int r = 0; r < b; ++r) {
        S acc{};
        const S* row = A + static_cast<std::size_t>(r) * b;
        for (int c = 0; c < b; ++c) acc += row[c] * x[c];
        y[r] += acc;
    }
}

/// y -= A*x.
template <class S>
inline void block_matvec_sub(int b, const S* A, const S* x, S* y) {
    for (int r = 0; r < b; ++r) {
        S acc{};
        const S* row = A + static_cast<std::size_t>(r) * b;
        for (int c = 0; c < b; ++c) acc += row[c] * x[c];
        y[r] -= acc;
    }
}

/// C -= A*B for row-major b x b blocks.
template <class S>
inline void block_matmul_sub(int b, const S* A, const S* B, S* C) {
    for (int r = 0; r < b; ++r)
        for (int k = 0; k < b; ++k) {
            const S a = A[static_cast<std::size_t>(r) * b + k];
            if (a == S{}) continue;
            const S* brow = B + static_cast<std::size_t>(k) * b;
            S* crow = C + static_cast<std::size_t>(r) * b;
            for (int c = 0; c < b; ++c) crow[c] -= a * brow[c];
        }
}

/// In-place LU factorization with partial pivoting of a row-major b x b block.
/// Returns the ratio max|pivot|/min|pivot| as a cheap condition estimate.
/// Throws FactorizationError (tagged with `node`) on a numerically singular pivot.
template <class S>
inline double block_lu_factor(int b, S* A, int* piv, int node) {
    double pmax = 0.0, pmin = 0.0;
    for (int k = 0; k < b; ++k) {
        int p = k;
        double best = abs_mag(A[static_cast<std::size_t>(k) * b + k]);
        for (int r = k + 1; r < b; ++r) {
            const double m = abs_mag(A[static_cast<std::size_t>(r) * b + k]);
            if (m > best) {
                best = m;
                p = r;
            }
        }
        piv[k] = p;
        if (p != k)
            for (int c = 0; c < b; ++c)
                std::swap(A[static_cast<std::size_t>(k) * b + c], A[static_cast<std::size_t>(p) * b + c]);
        const S pivot = A[static_cast<std::size_t>(k) * b + k];
        const double pm = abs_mag(pivot);
        if (pm == 0.0) throw FactorizationError("singular pivot block", node);
        pmax = (k == 0) ? pm : std::max(pmax, pm);
        pmin = (k == 0) ? pm : std::min(pmin, pm);
        for (int r = k + 1; r < b; ++r) {
            S& l = A[static_cast<std::size_t>(r) * b + k];
            l = l / pivot;
            const S lf = l;
            for (int c = k + 1; c < b; ++c)
                A[static_cast<std::size_t>(r) * b + c] -= lf * A[static_cast<std::size_t>(k) * b + c];
        }
    }
    return pmin > 0.0 ? pmax / pmin : std::numeric_limits<double>::infinity();
}

/// Solve with a factorization produced by block_lu_factor; x may alias rhs.
template <class S>
inline void block_lu_solve(int b, const S* LU, const int* piv, const S* rhs, S* x) {
    if (x != rhs)
        for (int r = 0; r < b; ++r) x[r] = rhs[r];
    for (int k = 0; k < b; ++k)
        if (piv[k] != k) std::swap(x[k], x[piv[k]]);
    for (int r = 1; r < b; ++r) {
        S acc = x[r];
        const S* row = LU + static_cast<std::size_t>(r) * b;
        for (int c = 0; c < r; ++c) acc -= row[c] * x[c];
        x[r] = acc;
    }
    for (int r = b - 1; r >= 0; --r) {
        S acc = x[r];
        const S* row = LU + static_cast<std::size_t>(r) * b;
        for (int c = r + 1; c < b; ++c) acc -= row[c] * x[c];
        x[r] = acc / row[r];
    }
}

/// X = LU^{-1} * B for a b x b right-hand side block (column by column).
template <class S>
inline void block_lu_solve_block(int b, const S* LU, const int* piv, const S* B, S* X) {
    std::vector<S> col(b), sol(b);
    for (int c = 0; c < b; ++c) {
        for (int r = 0; r < b; ++r) col[r] = B[static_cast<std::size_t>(r) * b + c];
        block_lu_solve(b, LU, piv, col.data(), sol.data());
        for (int r = 0; r < b; ++r) X[static_cast<std::size_t>(r) * b + c] = sol[r];
    }
}

// ---------------------------------------------------------------------------
// Block-diagonal matrix of b x b blocks, optionally LU-factored per node.
// Stands in for the transform Jacobian M and the explicit preconditioner P.
// ---------------------------------------------------------------------------

template <class S>
struct BlockDiag {
    int b = 0;
    std::vector<S> blocks;  // nodes * b * b, row-major per node

    BlockDiag() = default;
    BlockDiag(int block, int nodes) : b(block), blocks(static_cast<std::size_t>(block) * block * nodes, S{}) {}

    int nodes() const { return b > 0 ? static_cast<int>(blocks.size() / (static_cast<std::size_t>(b) * b)) : 0; }
    S* block(int i) { return blocks.data() + static_cast<std::size_t>(i) * b * b; }
    const S* block(int i) const { return blocks.data() + static_cast<std::size_t>(i) * b * b; }
};

template <class S>
struct BlockDiagLU {
    int b = 0;
    std::vector<S> lu;
    std::vector<int> piv;

    BlockDiagLU() = default;

    /// Factor every block of D; throws FactorizationError naming the node on a
    /// singular block.
    explicit BlockDiagLU(const BlockDiag<S>& D) { factor(D); }

    void factor(const BlockDiag<S>& D) {
        b = D.b;
        lu = D.blocks;
        piv.assign(static_cast<std::size_t>(b) * D.nodes(), 0);
        const int n = D.nodes();
        for (int i = 0; i < n; ++i)
            block_lu_factor(b, lu.data() + static_cast<std::size_t>(i) * b * b,
                            piv.data() + static_cast<std::size_t>(i) * b, i);
    }

    int nodes() const { return b > 0 ? static_cast<int>(lu.size() / (static_cast<std::size_t>(b) * b)) : 0; }

    void solve_node(int i, const S* rhs, S* x) const {
        block_lu_solve(b, lu.data() + static_cast<std::size_t>(i) * b * b,
                       piv.data() + static_cast<std::size_t>(i) * b, rhs, x);
    }

    /// x = D^{-1} rhs applied node by node.
    void solve(const BlockVec<S>& rhs, BlockVec<S>& x) const {
        if (rhs.b != b || rhs.nodes() != nodes()) throw ShapeError("BlockDiagLU::solve shape mismatch");
        if (x.b != b || x.nodes() != nodes()) x = BlockVec<S>(b, nodes());
        const int n = nodes();
        for (int i = 0; i < n; ++i) solve_node(i, rhs.node(i), x.node(i));
    }
};

}  // namespace fnlh
