#pragma once
/// @file sparse.hpp
/// @brief Block-sparse matrices over a shared sparsity pattern, block ILU(0) with
/// partitioned (dropped cross-coupling) factorization, block Jacobi, the Richardson
/// smoother and the complex-to-real embedding.
///
/// The mean-flow matrix and the shifted matrices of every harmonic reference one
/// pattern object; value buffers are tracked by an allocation counter so the
/// harmonic-count independence of LHS memory is testable.

#include <atomic>
#include <iosfwd>
#include <memory>
#include <span>

#include "core.hpp"
#include "dense.hpp"
#include "mesh.hpp"

namespace fnlh {

// ---------------------------------------------------------------------------
// LHS value-buffer allocation accounting
// ---------------------------------------------------------------------------

struct LhsAllocStats {
    std::size_t live_bytes = 0;
    std::size_t peak_bytes = 0;
    std::size_t allocations = 0;
};

void lhs_alloc_reset();
LhsAllocStats lhs_alloc_stats();
namespace detail {
void lhs_alloc_register(std::size_t bytes);
void lhs_alloc_release(std::size_t bytes);
}  // namespace detail

/// Value buffer with allocation accounting and canary padding on both ends.
template <class S>
class CountedBuffer {
public:
    CountedBuffer() = default;
    explicit CountedBuffer(std::size_t n) { allocate(n); }
    CountedBuffer(const CountedBuffer& o) : buf_(o.buf_), n_(o.n_) {
        if (n_) detail::lhs_alloc_register(bytes());
    }
    CountedBuffer(CountedBuffer&& o) noexcept : buf_(std::move(o.buf_)), n_(o.n_) { o.n_ = 0; }
    CountedBuffer& operator=(const CountedBuffer& o) {
        if (this == &o) return *this;
        release();
        buf_ = o.buf_;
        n_ = o.n_;
        if (n_) detail::lhs_alloc_register(bytes());
        return *this;
    }
    CountedBuffer& operator=(CountedBuffer&& o) noexcept {
        if (this == &o) return *this;
        release();
        buf_ = std::move(o.buf_);
        n_ = o.n_;
        o.n_ = 0;
        return *this;
    }
    ~CountedBuffer() { release(); }

    void allocate(std::size_t n) {
        release();
        n_ = n;
        buf_.assign(n + 2 * kPad, canary());
        std::fill(buf_.begin() + kPad, buf_.end() - kPad, S{});
        detail::lhs_alloc_register(bytes());
    }
    void release() {
        if (n_) detail::lhs_alloc_release(bytes());
        buf_.clear();
        n_ = 0;
    }

    std::size_t size() const { return n_; }
    std::size_t bytes() const { return n_ * sizeof(S); }
    bool empty() const { return n_ == 0; }
    S* data() { return buf_.data() + kPad; }
    const S* data() const { return buf_.data() + kPad; }
    S& operator[](std::size_t i) { return data()[i]; }
    const S& operator[](std::size_t i) const { return data()[i]; }

    /// Padding untouched => no write strayed outside the buffer.
    bool canaries_intact() const {
        for (int k = 0; k < kPad; ++k)
            if (buf_[k] != canary() || buf_[buf_.size() - 1 - k] != canary()) return false;
        return true;
    }

private:
    static constexpr int kPad = 4;
    static S canary();
    std::vector<S> buf_;
    std::size_t n_ = 0;
};

// ---------------------------------------------------------------------------
// Pattern and matrix
// ---------------------------------------------------------------------------

struct BlockSparsityPattern {
    int b = 0;
    int rows = 0;
    std::vector<int> row_ptr;    // rows + 1
    std::vector<int> col_idx;    // ascending per row, diagonal included
    std::vector<int> diag_idx;   // entry index of (i, i) per row
    std::vector<int> partition;  // partition id per node

    int nnzb() const { return static_cast<int>(col_idx.size()); }

    /// Entry index of (i, j), or -1 when the position is not in the pattern.
    int find(int i, int j) const;

    /// Diagonal presence and structural symmetry.
    void validate() const;
};

using PatternPtr = std::shared_ptr<const BlockSparsityPattern>;

/// Mesh adjacency plus diagonal: block tridiagonal in 1D, 5-point in 2D.
PatternPtr build_pattern(const Mesh& mesh, int block_size);

/// Pattern from an explicit edge list (diagonal added, edges symmetrized).
/// Empty partition means a single partition.
PatternPtr make_pattern(int b, int rows, const std::vector<std::pair<int, int>>& edges,
                        std::vector<int> partition = {});

/// Pattern with identical structure but block size 2b (for the real embedding).
PatternPtr doubled_pattern(const BlockSparsityPattern& p);

template <class S>
struct Bsr {
    PatternPtr pattern;
    CountedBuffer<S> vals;  // nnzb * b * b, row-major blocks

    Bsr() = default;
    explicit Bsr(PatternPtr p) : pattern(std::move(p)) {
        vals.allocate(static_cast<std::size_t>(pattern->nnzb()) * pattern->b * pattern->b);
    }

    int b() const { return pattern ? pattern->b : 0; }
    int rows() const { return pattern ? pattern->rows : 0; }
    S* block(int e) { return vals.data() + static_cast<std::size_t>(e) * b() * b(); }
    const S* block(int e) const { return vals.data() + static_cast<std::size_t>(e) * b() * b(); }

    void set_zero() { std::fill(vals.data(), vals.data() + vals.size(), S{}); }

    void matvec(const BlockVec<S>& x, BlockVec<S>& y) const;

    /// Coordinate text dump: `row col v00 v01 ...` per block entry.
    void dump(std::ostream& os) const;
};

/// Copy of the diagonal blocks.
template <class S>
BlockDiag<S> diag_blocks(const Bsr<S>& A);

// ---------------------------------------------------------------------------
// Complex diagonal shift (shared-workspace harmonic LHS)
// ---------------------------------------------------------------------------

/// out = complexified A with s_i * I added to the diagonal block of node i.
/// `out` is a reusable workspace: when it already references A's pattern object
/// the value buffer is overwritten in place (no allocation); an empty `out` is
/// bound to the pattern and allocated once.
void shift_diagonal(const Bsr<real>& A, std::span<const cplx> s, Bsr<cplx>& out);

/// Allocating convenience overload.
Bsr<cplx> shift_diagonal(const Bsr<real>& A, std::span<const cplx> s);

// ---------------------------------------------------------------------------
// Block ILU(0) with partition dropping
// ---------------------------------------------------------------------------

template <class S>
struct Ilu {
    PatternPtr pattern;
    CountedBuffer<S> vals;       // L (strictly lower, unit block diagonal) and U (upper incl. diagonal)
    std::vector<S> diag_lu;      // rows*b*b pivoted LU of each U_ii (solve path)
    std::vector<int> diag_piv;   // rows*b
    std::vector<S> diag_inv;     // rows*b*b explicit inverse of each U_ii (elimination path)
    bool factored = false;

    int b() const { return pattern ? pattern->b : 0; }
    int rows() const { return pattern ? pattern->rows : 0; }
    S* block_at(int e) { return vals.data() + static_cast<std::size_t>(e) * b() * b(); }
    const S* block_at(int e) const { return vals.data() + static_cast<std::size_t>(e) * b() * b(); }

    /// Zero-fill factorization restricted to intra-partition couplings; entries
    /// joining different partitions are exactly zero in both factors.
    /// Throws FactorizationError (with node id) when a pivot block is singular or
    /// its condition estimate exceeds 1e14.
    void factorize(const Bsr<S>& A);

    /// x = (LU)^{-1} rhs by forward/backward block substitution. With P
    /// partitions this applies each partition's factorization independently.
    void apply(const BlockVec<S>& rhs, BlockVec<S>& x) const;

    bool canaries_intact() const { return vals.canaries_intact(); }
};

template <class S>
Ilu<S> ilu0_factorize(const Bsr<S>& A) {
    Ilu<S> f;
    f.factorize(A);
    return f;
}

// ---------------------------------------------------------------------------
// Block Jacobi
// ---------------------------------------------------------------------------

/// Per-node dense solve D_i x_i = rhs_i. Throws FactorizationError naming the
/// node on a singular block.
template <class S>
BlockVec<S> block_jacobi_apply(const BlockDiag<S>& D, const BlockVec<S>& rhs);

/// Pre-factored fast path (same arithmetic as the one-shot overload).
template <class S>
void block_jacobi_apply(const BlockDiagLU<S>& P, const BlockVec<S>& rhs, BlockVec<S>& x);

// ---------------------------------------------------------------------------
// Richardson smoother
// ---------------------------------------------------------------------------

struct LinearSolveReport {
    int iterations = 0;
    double initial_residual = 0.0;
    double final_residual = 0.0;
    bool converged = false;
};

/// Preconditioned Richardson iteration x <- x + M^{-1}(b - A x) from x0 = 0,
/// stopping at ||b - A x||_2 <= tol_rel ||b||_2 or max_iter. `prec` needs an
/// apply(rhs, x) method (Ilu or BlockDiagLU). Optional trace collects the
/// iterate after every iteration.
template <class S, class Prec>
LinearSolveReport smoothed_solve(const Bsr<S>& A, const BlockVec<S>& rhs, const Prec& prec,
                                 real tol_rel, int max_iter, BlockVec<S>& x,
                                 std::vector<BlockVec<S>>* iterate_trace = nullptr);

// ---------------------------------------------------------------------------
// Real-equivalent embedding (cross-validation only; production stays complex)
// ---------------------------------------------------------------------------

/// Each complex block Z maps to [[Re Z, -Im Z], [Im Z, Re Z]] (block size 2b).
Bsr<real> real_embedding(const Bsr<cplx>& A);

/// Node layout [Re x_i (b entries), Im x_i (b entries)].
BlockVec<real> embed_vector(const BlockVec<cplx>& v);
BlockVec<cplx> unembed_vector(const BlockVec<real>& v);

// template implementations that need Bsr internals
template <class S>
void Bsr<S>::matvec(const BlockVec<S>& x, BlockVec<S>& y) const {
    const int n = rows(), bs = b();
    if (x.b != bs || x.nodes() != n) throw ShapeError("matvec: vector shape mismatch");
    if (y.b != bs || y.nodes() != n) y = BlockVec<S>(bs, n);
    y.fill(S{});
    for (int i = 0; i < n; ++i) {
        S* yi = y.node(i);
        for (int e = pattern->row_ptr[i]; e < pattern->row_ptr[i + 1]; ++e)
            block_matvec_add(bs, block(e), x.node(pattern->col_idx[e]), yi);
    }
}

template <>
inline real CountedBuffer<real>::canary() {
    return -6.02214076e23;
}
template <>
inline cplx CountedBuffer<cplx>::canary() {
    return {-6.02214076e23, -6.02214076e23};
}

template <class S>
BlockVec<S> block_jacobi_apply(const BlockDiag<S>& D, const BlockVec<S>& rhs) {
    if (rhs.b != D.b || rhs.nodes() != D.nodes()) throw ShapeError("block_jacobi_apply shape mismatch");
    BlockDiagLU<S> lu(D);  // throws FactorizationError with the node id on a singular block
    BlockVec<S> x(rhs.b, rhs.nodes());
    lu.solve(rhs, x);
    return x;
}

template <class S>
void block_jacobi_apply(const BlockDiagLU<S>& P, const BlockVec<S>& rhs, BlockVec<S>& x) {
    P.solve(rhs, x);
}

template <class S, class Prec>
LinearSolveReport smoothed_solve(const Bsr<S>& A, const BlockVec<S>& rhs, const Prec& prec,
                                 real tol_rel, int max_iter, BlockVec<S>& x,
                                 std::vector<BlockVec<S>>* iterate_trace) {
    if (!(tol_rel > 0.0 && tol_rel < 1.0)) throw ConfigError("smoothed_solve: tol_rel must be in (0,1)");
    if (max_iter < 1) throw ConfigError("smoothed_solve: max_iter must be >= 1");
    const int n = A.rows(), bs = A.b();
    x = BlockVec<S>(bs, n);

    LinearSolveReport rep;
    rep.initial_residual = norm2(rhs);
    rep.final_residual = rep.initial_residual;
    if (rep.initial_residual == 0.0) {
        rep.converged = true;
        return rep;
    }
    const double target = tol_rel * rep.initial_residual;

    BlockVec<S> r = rhs;  // residual at x0 = 0
    BlockVec<S> z(bs, n), ax(bs, n);
    for (int it = 1; it <= max_iter; ++it) {
        prec.apply(r, z);
        x += z;
        A.matvec(x, ax);
        for (std::size_t k = 0; k < r.v.size(); ++k) r.v[k] = rhs.v[k] - ax.v[k];
        rep.iterations = it;
        rep.final_residual = norm2(r);
        if (iterate_trace) iterate_trace->push_back(x);
        if (!std::isfinite(rep.final_residual))
            throw DivergenceError("non-finite iterate in smoothed_solve", it, "linear");
        if (rep.final_residual <= target) {
            rep.converged = true;
            break;
        }
    }
    return rep;
}

}  // namespace fnlh
