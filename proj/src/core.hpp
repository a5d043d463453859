#pragma once
/// @file core.hpp
/// @brief Scalar aliases, error types and the block-vector container shared by all modules.

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fnlh {

using real = double;
using cplx = std::complex<double>;

// ---------------------------------------------------------------------------
// Error types
// ---------------------------------------------------------------------------

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ShapeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnsupportedCaseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FactorizationError : std::runtime_error {
    int node = -1;
    FactorizationError(const std::string& msg, int node_id)
        : std::runtime_error(msg + " (node " + std::to_string(node_id) + ")"), node(node_id) {}
};

struct DivergenceError : std::runtime_error {
    int stage = -1;
    std::string field;
    DivergenceError(const std::string& msg, int stage_idx, std::string field_name = {})
        : std::runtime_error(msg + " (stage " + std::to_string(stage_idx) +
                             (field_name.empty() ? "" : ", field " + field_name) + ")"),
          stage(stage_idx),
          field(std::move(field_name)) {}
};

struct NonConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Block vector: per-node vectors of fixed block size b, contiguous node-major
// ---------------------------------------------------------------------------

template <class S>
struct BlockVec {
    int b = 0;
    std::vector<S> v;

    BlockVec() = default;
    BlockVec(int block, int nodes) : b(block), v(static_cast<std::size_t>(block) * nodes, S{}) {}

    int nodes() const { return b > 0 ? static_cast<int>(v.size() / b) : 0; }
    std::size_t size() const { return v.size(); }

    S* node(int i) { return v.data() + static_cast<std::size_t>(i) * b; }
    const S* node(int i) const { return v.data() + static_cast<std::size_t>(i) * b; }

    S& at(int i, int m) { return v[static_cast<std::size_t>(i) * b + m]; }
    const S& at(int i, int m) const { return v[static_cast<std::size_t>(i) * b + m]; }

    void fill(const S& x) { std::fill(v.begin(), v.end(), x); }

    BlockVec& operator+=(const BlockVec& o) {
        if (o.v.size() != v.size()) throw ShapeError("BlockVec size mismatch in +=");
        for (std::size_t k = 0; k < v.size(); ++k) v[k] += o.v[k];
        return *this;
    }
    BlockVec& operator-=(const BlockVec& o) {
        if (o.v.size() != v.size()) throw ShapeError("BlockVec size mismatch in -=");
        for (std::size_t k = 0; k < v.size(); ++k) v[k] -= o.v[k];
        return *this;
    }
};

template <class S>
inline double norm2(std::span<const S> x) {
    double s = 0.0;
    for (const S& e : x) s += std::norm(e);  // std::norm(double) = square
    return std::sqrt(s);
}

inline double norm2(std::span<const real> x) {
    double s = 0.0;
    for (real e : x) s += e * e;
    return std::sqrt(s);
}

inline double norm2(std::span<const cplx> x) {
    double s = 0.0;
    for (const cplx& e : x) s += std::norm(e);
    return std::sqrt(s);
}

template <class S>
inline double norm2(const BlockVec<S>& x) {
    return norm2(std::span<const S>(x.v.data(), x.v.size()));
}

/// RMS over all degrees of freedom (2-norm divided by sqrt(count)).
template <class S>
inline double rms(const BlockVec<S>& x) {
    if (x.v.empty()) return 0.0;
    return norm2(x) / std::sqrt(static_cast<double>(x.v.size()));
}

inline bool finite(real x) { return std::isfinite(x); }
inline bool finite(const cplx& x) { return std::isfinite(x.real()) && std::isfinite(x.imag()); }

template <class S>
inline bool all_finite(const BlockVec<S>& x) {
    for (const S& e : x.v)
        if (!finite(e)) return false;
    return true;
}

}  // namespace fnlh
