#include "sparse.hpp"

#include <algorithm>
#include <mutex>
#include <ostream>

namespace fnlh {

// ---------------------------------------------------------------------------
// Allocation accounting
// ---------------------------------------------------------------------------

namespace {
std::atomic<std::size_t> g_live{0};
std::atomic<std::size_t> g_peak{0};
std::atomic<std::size_t> g_allocs{0};
}  // namespace

void lhs_alloc_reset() {
    g_live = 0;
    g_peak = 0;
    g_allocs = 0;
}

LhsAllocStats lhs_alloc_stats() { return {g_live.load(), g_peak.load(), g_allocs.load()}; }

namespace detail {
void lhs_alloc_register(std::size_t bytes) {
    const std::size_t live = g_live.fetch_add(bytes) + bytes;
    std::size_t peak = g_peak.load();
    while (live > peak && !g_peak.compare_exchange_weak(peak, live)) {
    }
    g_allocs.fetch_add(1);
}
void lhs_alloc_release(std::size_t bytes) { g_live.fetch_sub(bytes); }
}  // namespace detail

// ---------------------------------------------------------------------------
// Pattern
// ---------------------------------------------------------------------------

int BlockSparsityPattern::find(int i, int j) const {
    const auto beg = col_idx.begin() + row_ptr[i];
    const auto end = col_idx.begin() + row_ptr[i + 1];
    const auto it = std::lower_bound(beg, end, j);
    if (it == end || *it != j) return -1;
    return static_cast<int>(it - col_idx.begin());
}

void BlockSparsityPattern::validate() const {
    for (int i = 0; i < rows; ++i) {
        if (diag_idx[i] < 0 || col_idx[diag_idx[i]] != i)
            throw ShapeError("pattern: missing diagonal entry in row " + std::to_string(i));
        for (int e = row_ptr[i]; e < row_ptr[i + 1]; ++e)
            if (find(col_idx[e], i) < 0)
                throw ShapeError("pattern: structurally unsymmetric at (" + std::to_string(i) + "," +
                                 std::to_string(col_idx[e]) + ")");
    }
}

PatternPtr build_pattern(const Mesh& mesh, int block_size) {
    const int n = mesh.num_nodes();
    std::vector<std::vector<int>> cols(n);
    for (int i = 0; i < n; ++i) cols[i].push_back(i);
    for (const Face& f : mesh.faces) {
        if (f.is_boundary()) continue;
        cols[f.a].push_back(f.b);
        cols[f.b].push_back(f.a);
    }
    auto p = std::make_shared<BlockSparsityPattern>();
    p->b = block_size;
    p->rows = n;
    p->partition = mesh.partition;
    p->row_ptr.assign(n + 1, 0);
    for (int i = 0; i < n; ++i) {
        std::sort(cols[i].begin(), cols[i].end());
        cols[i].erase(std::unique(cols[i].begin(), cols[i].end()), cols[i].end());
        p->row_ptr[i + 1] = p->row_ptr[i] + static_cast<int>(cols[i].size());
    }
    p->col_idx.reserve(p->row_ptr[n]);
    p->diag_idx.assign(n, -1);
    for (int i = 0; i < n; ++i)
        for (int j : cols[i]) {
            if (j == i) p->diag_idx[i] = static_cast<int>(p->col_idx.size());
            p->col_idx.push_back(j);
        }
    p->validate();
    return p;
}

PatternPtr make_pattern(int b, int rows, const std::vector<std::pair<int, int>>& edges,
                        std::vector<int> partition) {
    std::vector<std::vector<int>> cols(rows);
    for (int i = 0; i < rows; ++i) cols[i].push_back(i);
    for (const auto& [a, c] : edges) {
        cols[a].push_back(c);
        cols[c].push_back(a);
    }
    auto p = std::make_shared<BlockSparsityPattern>();
    p->b = b;
    p->rows = rows;
    p->partition = partition.empty() ? std::vector<int>(rows, 0) : std::move(partition);
    p->row_ptr.assign(rows + 1, 0);
    for (int i = 0; i < rows; ++i) {
        std::sort(cols[i].begin(), cols[i].end());
        cols[i].erase(std::unique(cols[i].begin(), cols[i].end()), cols[i].end());
        p->row_ptr[i + 1] = p->row_ptr[i] + static_cast<int>(cols[i].size());
    }
    p->diag_idx.assign(rows, -1);
    for (int i = 0; i < rows; ++i)
        for (int j : cols[i]) {
            if (j == i) p->diag_idx[i] = static_cast<int>(p->col_idx.size());
            p->col_idx.push_back(j);
        }
    p->validate();
    return p;
}

PatternPtr doubled_pattern(const BlockSparsityPattern& src) {
    auto p = std::make_shared<BlockSparsityPattern>(src);
    p->b = 2 * src.b;
    return p;
}

// ---------------------------------------------------------------------------
// Bsr
// ---------------------------------------------------------------------------

template <class S>
void Bsr<S>::dump(std::ostream& os) const {
    const int bs = b();
    os.precision(17);
    for (int i = 0; i < rows(); ++i)
        for (int e = pattern->row_ptr[i]; e < pattern->row_ptr[i + 1]; ++e) {
            os << i << " " << pattern->col_idx[e];
            const S* blk = block(e);
            for (int k = 0; k < bs * bs; ++k) os << " " << blk[k];
            os << "\n";
        }
}

template <class S>
BlockDiag<S> diag_blocks(const Bsr<S>& A) {
    const int n = A.rows(), bs = A.b();
    BlockDiag<S> D(bs, n);
    for (int i = 0; i < n; ++i) {
        const S* src = A.block(A.pattern->diag_idx[i]);
        std::copy(src, src + bs * bs, D.block(i));
    }
    return D;
}

// ---------------------------------------------------------------------------
// Diagonal shift into the shared complex workspace
// ---------------------------------------------------------------------------

void shift_diagonal(const Bsr<real>& A, std::span<const cplx> s, Bsr<cplx>& out) {
    const int n = A.rows(), bs = A.b();
    if (static_cast<int>(s.size()) != n) throw ShapeError("shift_diagonal: shift vector length mismatch");
    if (!out.pattern) {
        out = Bsr<cplx>(A.pattern);
    } else if (out.pattern.get() != A.pattern.get()) {
        throw ShapeError("shift_diagonal: workspace bound to a different pattern object");
    }
    const std::size_t total = static_cast<std::size_t>(A.pattern->nnzb()) * bs * bs;
    for (std::size_t k = 0; k < total; ++k) out.vals[k] = cplx(A.vals[k], 0.0);
    for (int i = 0; i < n; ++i) {
        cplx* d = out.block(A.pattern->diag_idx[i]);
        for (int m = 0; m < bs; ++m) d[static_cast<std::size_t>(m) * bs + m] += s[i];
    }
}

Bsr<cplx> shift_diagonal(const Bsr<real>& A, std::span<const cplx> s) {
    Bsr<cplx> out;
    shift_diagonal(A, s, out);
    return out;
}

// ---------------------------------------------------------------------------
// Block ILU(0)
// ---------------------------------------------------------------------------

namespace {
constexpr double kPivotConditionLimit = 1e14;
}

template <class S>
void Ilu<S>::factorize(const Bsr<S>& A) {
    pattern = A.pattern;
    const int n = rows(), bs = b();
    const std::vector<int>& part = pattern->partition;
    if (static_cast<int>(part.size()) != n) throw ShapeError("ilu0: pattern has no partition map");

    if (vals.size() != A.vals.size()) vals.allocate(A.vals.size());
    diag_lu.assign(static_cast<std::size_t>(n) * bs * bs, S{});
    diag_piv.assign(static_cast<std::size_t>(n) * bs, 0);
    diag_inv.assign(static_cast<std::size_t>(n) * bs * bs, S{});

    // Copy values; couplings across partitions are dropped (exact zeros).
    for (int i = 0; i < n; ++i)
        for (int e = pattern->row_ptr[i]; e < pattern->row_ptr[i + 1]; ++e) {
            const int j = pattern->col_idx[e];
            S* dst = block_at(e);
            const S* src = A.block(e);
            if (part[i] == part[j])
                std::copy(src, src + bs * bs, dst);
            else
                std::fill(dst, dst + bs * bs, S{});
        }

    std::vector<S> ident(static_cast<std::size_t>(bs) * bs, S{});
    for (int m = 0; m < bs; ++m) ident[static_cast<std::size_t>(m) * bs + m] = S{1};

    for (int i = 0; i < n; ++i) {
        // eliminate with previously factored rows k < i present in row i
        for (int ek = pattern->row_ptr[i]; ek < pattern->row_ptr[i + 1]; ++ek) {
            const int k = pattern->col_idx[ek];
            if (k >= i) break;
            if (part[i] != part[k]) continue;
            S* lik = block_at(ek);
            // L_ik = A_ik * U_kk^{-1}
            std::vector<S> tmp(static_cast<std::size_t>(bs) * bs, S{});
            const S* ukk_inv = diag_inv.data() + static_cast<std::size_t>(k) * bs * bs;
            for (int r = 0; r < bs; ++r)
                for (int c = 0; c < bs; ++c) {
                    S acc{};
                    for (int m = 0; m < bs; ++m)
                        acc += lik[static_cast<std::size_t>(r) * bs + m] *
                               ukk_inv[static_cast<std::size_t>(m) * bs + c];
                    tmp[static_cast<std::size_t>(r) * bs + c] = acc;
                }
            std::copy(tmp.begin(), tmp.end(), lik);
            // row update: A_ij -= L_ik * U_kj for j > k present in both rows
            for (int ej = pattern->row_ptr[i]; ej < pattern->row_ptr[i + 1]; ++ej) {
                const int j = pattern->col_idx[ej];
                if (j <= k) continue;
                if (part[i] != part[j]) continue;
                const int ekj = pattern->find(k, j);
                if (ekj < 0) continue;  // zero fill: position outside the pattern is dropped
                if (part[k] != part[j]) continue;
                block_matmul_sub(bs, lik, block_at(ekj), block_at(ej));
            }
        }
        // factor the pivot block U_ii
        const S* uii = block_at(pattern->diag_idx[i]);
        S* lu = diag_lu.data() + static_cast<std::size_t>(i) * bs * bs;
        std::copy(uii, uii + bs * bs, lu);
        int* piv = diag_piv.data() + static_cast<std::size_t>(i) * bs;
        const double cond = block_lu_factor(bs, lu, piv, i);
        if (!(cond < kPivotConditionLimit))
            throw FactorizationError("near-singular ILU pivot block (condition estimate " +
                                         std::to_string(cond) + ")",
                                     i);
        block_lu_solve_block(bs, lu, piv, ident.data(), diag_inv.data() + static_cast<std::size_t>(i) * bs * bs);
    }
    factored = true;
}

template <class S>
void Ilu<S>::apply(const BlockVec<S>& rhs, BlockVec<S>& x) const {
    if (!factored) throw ShapeError("ilu0: apply before factorize");
    const int n = rows(), bs = b();
    if (rhs.b != bs || rhs.nodes() != n) throw ShapeError("ilu0: rhs shape mismatch");
    if (x.b != bs || x.nodes() != n) x = BlockVec<S>(bs, n);
    const std::vector<int>& part = pattern->partition;

    // forward: L y = rhs (unit block diagonal), y stored in x
    for (int i = 0; i < n; ++i) {
        S* xi = x.node(i);
        const S* ri = rhs.node(i);
        for (int m = 0; m < bs; ++m) xi[m] = ri[m];
        for (int e = pattern->row_ptr[i]; e < pattern->row_ptr[i + 1]; ++e) {
            const int k = pattern->col_idx[e];
            if (k >= i) break;
            if (part[i] != part[k]) continue;
            block_matvec_sub(bs, block_at(e), x.node(k), xi);
        }
    }
    // backward: U x = y
    for (int i = n - 1; i >= 0; --i) {
        S* xi = x.node(i);
        for (int e = pattern->row_ptr[i + 1] - 1; e >= pattern->row_ptr[i]; --e) {
            const int j = pattern->col_idx[e];
            if (j <= i) break;
            if (part[i] != part[j]) continue;
            block_matvec_sub(bs, block_at(e), x.node(j), xi);
        }
        block_lu_solve(bs, diag_lu.data() + static_cast<std::size_t>(i) * bs * bs,
                       diag_piv.data() + static_cast<std::size_t>(i) * bs, xi, xi);
    }
}

// ---------------------------------------------------------------------------
// Real embedding
// ---------------------------------------------------------------------------

Bsr<real> real_embedding(const Bsr<cplx>& A) {
    const int bs = A.b();
    Bsr<real> out(doubled_pattern(*A.pattern));
    const int b2 = 2 * bs;
    for (int e = 0; e < A.pattern->nnzb(); ++e) {
        const cplx* z = A.block(e);
        real* r = out.block(e);
        for (int i = 0; i < bs; ++i)
            for (int j = 0; j < bs; ++j) {
                const cplx& v = z[static_cast<std::size_t>(i) * bs + j];
                r[static_cast<std::size_t>(i) * b2 + j] = v.real();
                r[static_cast<std::size_t>(i) * b2 + (bs + j)] = -v.imag();
                r[static_cast<std::size_t>(bs + i) * b2 + j] = v.imag();
                r[static_cast<std::size_t>(bs + i) * b2 + (bs + j)] = v.real();
            }
    }
    return out;
}

BlockVec<real> embed_vector(const BlockVec<cplx>& v) {
    BlockVec<real> out(2 * v.b, v.nodes());
    for (int i = 0; i < v.nodes(); ++i)
        for (int m = 0; m < v.b; ++m) {
            out.at(i, m) = v.at(i, m).real();
            out.at(i, v.b + m) = v.at(i, m).imag();
        }
    return out;
}

BlockVec<cplx> unembed_vector(const BlockVec<real>& v) {
    const int bs = v.b / 2;
    BlockVec<cplx> out(bs, v.nodes());
    for (int i = 0; i < v.nodes(); ++i)
        for (int m = 0; m < bs; ++m) out.at(i, m) = cplx(v.at(i, m), v.at(i, bs + m));
    return out;
}

template void Bsr<real>::dump(std::ostream&) const;
template void Bsr<cplx>::dump(std::ostream&) const;
template BlockDiag<real> diag_blocks(const Bsr<real>&);
template BlockDiag<cplx> diag_blocks(const Bsr<cplx>&);
template struct Ilu<real>;
template struct Ilu<cplx>;

}  // namespace fnlh
