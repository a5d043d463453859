#include "case.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace fnlh {

real HarmonicSpec::base_frequency(real rel_tol) const {
    std::vector<real> ws;
    for (const Harmonic& h : harmonics)
        if (h.omega > 0.0) ws.push_back(h.omega);
    if (ws.empty()) return 0.0;
    const real scale = *std::max_element(ws.begin(), ws.end());
    // Euclid on reals with an absolute cutoff tied to the largest frequency.
    real g = ws[0];
    for (std::size_t i = 1; i < ws.size(); ++i) {
        real a = std::max(g, ws[i]);
        real b = std::min(g, ws[i]);
        while (b > rel_tol * scale) {
            const real r = std::fmod(a, b);
            a = b;
            b = r;
        }
        g = a;
    }
    // Reject pathological gcds (frequencies effectively incommensurate).
    if (g < 1e-6 * scale) throw ConfigError("harmonic frequencies are incommensurate");
    for (real w : ws) {
        const real m = w / g;
        if (std::abs(m - std::round(m)) > 1e-6)
            throw ConfigError("harmonic frequencies are incommensurate");
    }
    return g;
}

int HarmonicSpec::max_multiple(real base, real) const {
    if (base <= 0.0) return 0;
    int lmax = 0;
    for (const Harmonic& h : harmonics)
        if (h.omega > 0.0) lmax = std::max(lmax, static_cast<int>(std::llround(h.omega / base)));
    return lmax;
}

std::string to_string(CaseKind k) {
    return k == CaseKind::NozzleEuler ? "nozzle-euler" : "scalar-advdiff-2d";
}

CaseKind case_kind_from_string(const std::string& s) {
    if (s == "nozzle-euler") return CaseKind::NozzleEuler;
    if (s == "scalar-advdiff-2d") return CaseKind::ScalarAdvDiff2D;
    throw ConfigError("unknown case kind '" + s + "'");
}

std::string CaseConfig::case_id() const {
    std::ostringstream os;
    os << to_string(kind) << "-nx" << nx;
    if (kind == CaseKind::ScalarAdvDiff2D) os << "-ny" << ny;
    os << "-nh" << harmonics.count();
    return os.str();
}

void CaseConfig::validate() const {
    gas.validate();
    harmonics.validate();
    if (nx < 4) throw ConfigError("nx: resolution must be at least 4 cells");
    if (kind == CaseKind::ScalarAdvDiff2D && ny < 4)
        throw ConfigError("ny: resolution must be at least 4 cells");
    if (!(length_x > 0.0) || !(length_y > 0.0)) throw ConfigError("domain lengths must be positive");
    if (eps_amp < 0.0) throw ConfigError("eps_amp must be >= 0");
    if (partitions < 1) throw ConfigError("partitions must be >= 1");
    if (kind == CaseKind::NozzleEuler) {
        if (!(inlet_total_pressure > 0.0) || !(inlet_total_temperature > 0.0) ||
            !(outlet_static_pressure > 0.0))
            throw ConfigError("nozzle boundary pressures/temperature must be positive");
        if (outlet_static_pressure > inlet_total_pressure)
            throw ConfigError("outlet static pressure exceeds inlet total pressure");
    } else {
        if (!(advection_speed > 0.0)) throw ConfigError("advection_speed must be positive");
        if (diffusivity < 0.0) throw ConfigError("diffusivity must be >= 0");
    }
}

namespace {

struct KvFile {
    std::map<std::string, std::string> kv;
    std::map<std::string, int> line_of;
    std::string origin;

    bool has(const std::string& k) const { return kv.count(k) > 0; }

    std::string take(const std::string& k, std::vector<std::string>& consumed) {
        consumed.push_back(k);
        return kv.at(k);
    }
};

KvFile parse_kv(std::istream& in, const std::string& origin) {
    KvFile f;
    f.origin = origin;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
        };
        const std::string t = trim(line);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trim(t.substr(0, eq));
        const std::string val = trim(t.substr(eq + 1));
        if (key.empty() || val.empty())
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key or value");
        if (f.kv.count(key))
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
        f.kv[key] = val;
        f.line_of[key] = lineno;
    }
    return f;
}

real to_real(const KvFile& f, const std::string& k) {
    const std::string& s = f.kv.at(k);
    try {
        std::size_t pos = 0;
        const real v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(f.origin + ":" + std::to_string(f.line_of.at(k)) + ": key '" + k +
                          "' is not a number: '" + s + "'");
    }
}

int to_int(const KvFile& f, const std::string& k) {
    const real v = to_real(f, k);
    const int i = static_cast<int>(std::llround(v));
    if (std::abs(v - i) > 0.0)
        throw ConfigError(f.origin + ": key '" + k + "' must be an integer");
    return i;
}

}  // namespace

CaseConfig parse_case_text(const std::string& text, const std::string& origin) {
    std::istringstream in(text);
    KvFile f = parse_kv(in, origin);
    CaseConfig c;
    std::vector<std::string> used;

    auto need = [&](const std::string& k) {
        if (!f.has(k)) throw ConfigError(origin + ": missing required key '" + k + "'");
        used.push_back(k);
    };
    auto opt_real = [&](const std::string& k, real& dst) {
        if (f.has(k)) {
            dst = to_real(f, k);
            used.push_back(k);
        }
    };
    auto opt_int = [&](const std::string& k, int& dst) {
        if (f.has(k)) {
            dst = to_int(f, k);
            used.push_back(k);
        }
    };

    need("kind");
    c.kind = case_kind_from_string(f.kv.at("kind"));
    need("nx");
    c.nx = to_int(f, "nx");
    if (c.kind == CaseKind::ScalarAdvDiff2D) {
        need("ny");
        c.ny = to_int(f, "ny");
    } else {
        c.ny = 1;
        opt_int("ny", c.ny);
    }
    opt_real("length_x", c.length_x);
    opt_real("length_y", c.length_y);
    opt_real("gamma", c.gas.gamma);
    opt_real("gas_constant", c.gas.gas_constant);
    opt_real("inlet_total_pressure", c.inlet_total_pressure);
    opt_real("inlet_total_temperature", c.inlet_total_temperature);
    opt_real("outlet_static_pressure", c.outlet_static_pressure);
    opt_real("area_coeff", c.area_coeff);
    if (f.has("area_table")) {
        c.area_table = f.kv.at("area_table");
        used.push_back("area_table");
    }
    opt_real("advection_speed", c.advection_speed);
    opt_real("diffusivity", c.diffusivity);
    opt_real("inlet_value", c.inlet_value);
    opt_real("eps_amp", c.eps_amp);
    opt_int("partitions", c.partitions);

    int nh = 0;
    opt_int("harmonics", nh);
    real base_omega = 0.0;
    opt_real("base_omega", base_omega);
    if (nh > 0 && base_omega <= 0.0 && !f.has("harmonic0.omega"))
        throw ConfigError(origin + ": harmonics > 0 requires base_omega or per-harmonic keys");

    const real amp_scale =
        c.kind == CaseKind::NozzleEuler ? c.outlet_static_pressure : c.inlet_value;
    for (int l = 0; l < nh; ++l) {
        Harmonic h;
        h.index = l + 1;
        h.omega = base_omega * (l + 1);
        h.amplitude = cplx(c.eps_amp * amp_scale, 0.0);
        const std::string pre = "harmonic" + std::to_string(l) + ".";
        auto opt_h = [&](const std::string& k, real& dst) {
            if (f.has(pre + k)) {
                dst = to_real(f, pre + k);
                used.push_back(pre + k);
            }
        };
        opt_h("omega", h.omega);
        real are = h.amplitude.real(), aim = h.amplitude.imag();
        opt_h("amp_re", are);
        opt_h("amp_im", aim);
        h.amplitude = cplx(are, aim);
        opt_h("sigma", h.sigma);
        c.harmonics.harmonics.push_back(h);
    }

    // Reject unknown keys so typos surface immediately.
    std::sort(used.begin(), used.end());
    for (const auto& [k, v] : f.kv) {
        (void)v;
        if (!std::binary_search(used.begin(), used.end(), k))
            throw ConfigError(origin + ":" + std::to_string(f.line_of.at(k)) + ": unknown key '" + k + "'");
    }

    c.validate();
    return c;
}

CaseConfig parse_case_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open case file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_case_text(ss.str(), path);
}

std::string case_to_text(const CaseConfig& c) {
    std::ostringstream os;
    os.precision(17);
    os << "kind = " << to_string(c.kind) << "\n";
    os << "nx = " << c.nx << "\n";
    os << "ny = " << c.ny << "\n";
    os << "length_x = " << c.length_x << "\n";
    os << "length_y = " << c.length_y << "\n";
    os << "gamma = " << c.gas.gamma << "\n";
    os << "gas_constant = " << c.gas.gas_constant << "\n";
    if (c.kind == CaseKind::NozzleEuler) {
        os << "inlet_total_pressure = " << c.inlet_total_pressure << "\n";
        os << "inlet_total_temperature = " << c.inlet_total_temperature << "\n";
        os << "outlet_static_pressure = " << c.outlet_static_pressure << "\n";
        os << "area_coeff = " << c.area_coeff << "\n";
        if (!c.area_table.empty()) os << "area_table = " << c.area_table << "\n";
    } else {
        os << "advection_speed = " << c.advection_speed << "\n";
        os << "diffusivity = " << c.diffusivity << "\n";
        os << "inlet_value = " << c.inlet_value << "\n";
    }
    os << "eps_amp = " << c.eps_amp << "\n";
    os << "partitions = " << c.partitions << "\n";
    os << "harmonics = " << c.harmonics.count() << "\n";
    for (int l = 0; l < c.harmonics.count(); ++l) {
        const Harmonic& h = c.harmonics.harmonics[l];
        const std::string pre = "harmonic" + std::to_string(l) + ".";
        os << pre << "omega = " << h.omega << "\n";
        os << pre << "amp_re = " << h.amplitude.real() << "\n";
        os << pre << "amp_im = " << h.amplitude.imag() << "\n";
        os << pre << "sigma = " << h.sigma << "\n";
    }
    return os.str();
}

real AreaTable::operator()(real xq) const {
    if (x.empty()) throw ConfigError("empty area table");
    if (xq <= x.front()) return a.front();
    if (xq >= x.back()) return a.back();
    const auto it = std::upper_bound(x.begin(), x.end(), xq);
    const std::size_t i = static_cast<std::size_t>(it - x.begin());
    const real t = (xq - x[i - 1]) / (x[i] - x[i - 1]);
    return a[i - 1] + t * (a[i] - a[i - 1]);
}

AreaTable load_area_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open area table '" + path + "'");
    AreaTable t;
    real xv, av;
    while (in >> xv >> av) {
        if (!t.x.empty() && xv <= t.x.back())
            throw ConfigError("area table x-coordinates must be strictly increasing");
        if (!(av > 0.0)) throw ConfigError("area table areas must be positive");
        t.x.push_back(xv);
        t.a.push_back(av);
    }
    if (t.x.size() < 2) throw ConfigError("area table needs at least two rows");
    return t;
}

}  // namespace fnlh
