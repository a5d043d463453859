#pragma once
/// @file case.hpp
/// @brief Case definition: gas model, harmonic set and the plain-text configuration format.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "core.hpp"

namespace fnlh {

struct GasModel {
    real gamma = 1.4;          // ratio of specific heats, > 1
    real gas_constant = 287.05;  // J/(kg K)

    void validate() const {
        if (!(gamma > 1.0)) throw ConfigError("gas model: gamma must exceed 1");
        if (!(gas_constant > 0.0)) throw ConfigError("gas model: gas constant must be positive");
    }
};

/// One retained harmonic: index, angular frequency and the complex forcing
/// amplitude applied on the forced boundary (back pressure for the nozzle,
/// inlet value for the scalar case). `sigma` is the transverse wavenumber of
/// the forcing shape exp(i sigma y); it is only meaningful for the 2D case.
struct Harmonic {
    int index = 1;
    real omega = 0.0;  // rad/s, >= 0 (zero allowed: stationary disturbance)
    cplx amplitude{0.0, 0.0};
    real sigma = 0.0;
};

struct HarmonicSpec {
    std::vector<Harmonic> harmonics;

    int count() const { return static_cast<int>(harmonics.size()); }

    const Harmonic& by_index(int l) const {
        for (const Harmonic& h : harmonics)
            if (h.index == l) return h;
        throw ConfigError("harmonic index " + std::to_string(l) + " not in spec");
    }

    void validate() const {
        for (std::size_t i = 0; i < harmonics.size(); ++i) {
            if (harmonics[i].omega < 0.0) throw ConfigError("harmonic frequency must be >= 0");
            for (std::size_t j = i + 1; j < harmonics.size(); ++j)
                if (harmonics[i].index == harmonics[j].index)
                    throw ConfigError("duplicate harmonic index " + std::to_string(harmonics[i].index));
        }
    }

    /// Base angular frequency such that every nonzero omega is an integer
    /// multiple of it (real-valued gcd). Throws ConfigError if the set is
    /// incommensurate. Returns 0 when no nonzero frequencies are present.
    real base_frequency(real rel_tol = 1e-9) const;

    /// max over harmonics of round(omega_l / base); 0 when all frequencies vanish.
    int max_multiple(real base, real rel_tol = 1e-9) const;
};

enum class CaseKind { NozzleEuler, ScalarAdvDiff2D };

std::string to_string(CaseKind k);
CaseKind case_kind_from_string(const std::string& s);

/// Fully materialized problem definition. Every field has a documented key in
/// the plain-text configuration format (see parse_case_file).
struct CaseConfig {
    CaseKind kind = CaseKind::NozzleEuler;

    int nx = 64;
    int ny = 1;  // 2D only
    real length_x = 1.0;
    real length_y = 1.0;

    GasModel gas;

    // nozzle-euler boundary data
    real inlet_total_pressure = 101325.0;
    real inlet_total_temperature = 300.0;
    real outlet_static_pressure = 98000.0;
    real area_coeff = 0.4;            // A(x) = 1 + area_coeff*(x - L/2)^2 when no table is given
    std::string area_table;           // optional path to a two-column (x, A) table

    // scalar-advdiff-2d parameters
    real advection_speed = 1.0;
    real diffusivity = 0.0;
    real inlet_value = 1.0;

    real eps_amp = 1e-3;  // forcing amplitude as a fraction of the mean scale
    HarmonicSpec harmonics;

    int partitions = 1;

    int block_size() const { return kind == CaseKind::NozzleEuler ? 3 : 1; }

    std::string case_id() const;
    void validate() const;
};

/// Parse the key-value case file. Lines are `key = value`; `#` starts a
/// comment. Unknown keys are rejected with the offending line number.
CaseConfig parse_case_file(const std::string& path);

/// Same grammar, from an in-memory string (used by tests).
CaseConfig parse_case_text(const std::string& text, const std::string& origin = "<memory>");

/// Serialize a config back to the key-value format (manifests re-parse cleanly).
std::string case_to_text(const CaseConfig& c);

/// Read a two-column (x, A) table; linear interpolation between samples.
struct AreaTable {
    std::vector<real> x, a;
    real operator()(real xq) const;
};
AreaTable load_area_table(const std::string& path);

}  // namespace fnlh
