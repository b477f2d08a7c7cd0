#pragma once

// SystemFile: JSON persistence for systems on a sign cube, schema version 1.
//
//   {"schema_version": 1,
//    "space": {"kind": "cube", "coords": N},
//    "functions": [{"label": "...", "values": [2^N doubles]}, ...],
//    "metadata": {"kind", "eps", "c", "thresholds", "mask_probs",
//                 "normalized", "measurable_bits", "half"}}
//
// Every metadata field is optional. Non-finite numbers are written as null.

#include "json.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sidonlab/constructions.hpp"
#include "sidonlab/cube.hpp"

namespace sidonlab {

using json = nlohmann::json;

inline constexpr int kSystemFileVersion = 1;

class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SystemMetadata {
    std::optional<std::string> kind;
    std::optional<double> eps;
    std::optional<double> c;
    std::vector<double> thresholds;
    std::vector<double> mask_probs;
    std::optional<bool> normalized;
    std::vector<int> measurable_bits;  // function k depends on the first measurable_bits[k] coordinates
    std::optional<std::string> half;   // union_system part: plus, minus or interleaved
};

struct SystemFile {
    OrthoSystem system;
    SystemMetadata metadata;
};

/// Construction trace as a SystemFile, normalized (phi_k) or raw (f_k).
inline SystemFile system_file_from_trace(const ConstructionTrace& t, bool normalized = true) {
    SystemFile f;
    f.system = normalized ? t.normalized_system() : t.raw_system();
    auto& m = f.metadata;
    m.kind = to_string(t.kind);
    m.eps = t.eps;
    m.c = t.c;
    m.thresholds = t.thresholds;
    m.mask_probs = t.mask_probs;
    m.normalized = normalized;
    for (int k = 1; k <= t.steps; ++k) m.measurable_bits.push_back(t.measurable_bits(k));
    return f;
}

/// One part of a union pair. The halves are orthonormal; interleaved
/// alternates phi+_k, phi-_k.
inline SystemFile system_file_from_union(const UnionPair& u, const std::string& half) {
    SystemFile f;
    if (half == "plus") {
        f.system = u.plus;
    } else if (half == "minus") {
        f.system = u.minus;
    } else if (half == "interleaved") {
        f.system = u.interleaved;
    } else {
        throw std::invalid_argument("union half must be plus, minus or interleaved, got '" + half + "'");
    }
    auto& m = f.metadata;
    m.kind = to_string(u.trace.kind);
    m.eps = u.trace.eps;
    m.c = u.trace.c;
    m.thresholds = u.trace.thresholds;
    m.mask_probs = u.trace.mask_probs;
    m.normalized = true;
    m.half = half;
    for (int k = 1; k <= u.trace.steps; ++k) {
        m.measurable_bits.push_back(u.trace.measurable_bits(k));
        if (half == "interleaved") m.measurable_bits.push_back(u.trace.measurable_bits(k));
    }
    return f;
}

namespace detail {

inline json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline double number_from(const json& j, const std::string& where) {
    if (j.is_null()) return std::numeric_limits<double>::infinity();
    if (!j.is_number()) throw SchemaError(where + ": expected a number");
    return j.get<double>();
}

inline std::vector<double> numbers_from(const json& j, const std::string& where) {
    if (!j.is_array()) throw SchemaError(where + ": expected an array");
    std::vector<double> out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number_from(j[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

inline const json& member(const json& j, const char* key, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) throw SchemaError(where + ": missing field '" + key + "'");
    return j.at(key);
}

}  // namespace detail

inline json to_json(const SystemFile& f) {
    json functions = json::array();
    for (std::size_t k = 0; k < f.system.size(); ++k) {
        const auto v = f.system[k].values();
        functions.push_back({{"label", f.system.labels()[k]}, {"values", std::vector<double>(v.begin(), v.end())}});
    }
    json meta = json::object();
    const auto& m = f.metadata;
    if (m.kind) meta["kind"] = *m.kind;
    if (m.eps) meta["eps"] = detail::number_or_null(*m.eps);
    if (m.c) meta["c"] = detail::number_or_null(*m.c);
    if (!m.thresholds.empty()) {
        json a = json::array();
        for (double v : m.thresholds) a.push_back(detail::number_or_null(v));
        meta["thresholds"] = a;
    }
    if (!m.mask_probs.empty()) meta["mask_probs"] = m.mask_probs;
    if (m.normalized) meta["normalized"] = *m.normalized;
    if (!m.measurable_bits.empty()) meta["measurable_bits"] = m.measurable_bits;
    if (m.half) meta["half"] = *m.half;
    return {{"schema_version", kSystemFileVersion},
            {"space", {{"kind", "cube"}, {"coords", f.system.space().coord_count()}}},
            {"functions", functions},
            {"metadata", meta}};
}

inline SystemFile system_file_from_json(const json& j) {
    if (!j.is_object()) throw SchemaError("SystemFile: top level must be an object");
    const json& version = detail::member(j, "schema_version", "SystemFile");
    if (!version.is_number_integer() || version.get<int>() != kSystemFileVersion) {
        throw SchemaError("SystemFile: unsupported schema_version " + version.dump() + " (this reader understands version " +
                          std::to_string(kSystemFileVersion) + ")");
    }
    const json& space = detail::member(j, "space", "SystemFile");
    if (detail::member(space, "kind", "space") != "cube") throw SchemaError("space.kind: only \"cube\" is supported");
    const json& coords = detail::member(space, "coords", "space");
    if (!coords.is_number_integer() || coords.get<int>() < 0 || coords.get<int>() > 30) {
        throw SchemaError("space.coords: expected an integer in [0, 30]");
    }
    const CubeSpace s(coords.get<int>());
    const json& fns = detail::member(j, "functions", "SystemFile");
    if (!fns.is_array() || fns.empty()) throw SchemaError("functions: expected a non-empty array");
    std::vector<CubeFunction> functions;
    std::vector<std::string> labels;
    for (std::size_t k = 0; k < fns.size(); ++k) {
        const std::string where = "functions[" + std::to_string(k) + "]";
        const json& label = detail::member(fns[k], "label", where);
        if (!label.is_string()) throw SchemaError(where + ".label: expected a string");
        auto values = detail::numbers_from(detail::member(fns[k], "values", where), where + ".values");
        if (values.size() != s.atom_count()) {
            throw SchemaError(where + ".values: expected " + std::to_string(s.atom_count()) + " values for " +
                              std::to_string(s.coord_count()) + " coords, got " + std::to_string(values.size()));
        }
        for (double v : values) {
            if (!std::isfinite(v)) throw SchemaError(where + ".values: non-finite entry");
        }
        functions.emplace_back(s, std::move(values));
        labels.push_back(label.get<std::string>());
    }
    SystemFile f;
    f.system = OrthoSystem(s, std::move(functions), std::move(labels));
    if (!j.contains("metadata")) return f;
    const json& meta = j.at("metadata");
    if (!meta.is_object()) throw SchemaError("metadata: expected an object");
    auto& m = f.metadata;
    if (meta.contains("kind")) {
        if (!meta["kind"].is_string()) throw SchemaError("metadata.kind: expected a string");
        m.kind = meta["kind"].get<std::string>();
    }
    if (meta.contains("eps")) m.eps = detail::number_from(meta["eps"], "metadata.eps");
    if (meta.contains("c")) m.c = detail::number_from(meta["c"], "metadata.c");
    if (meta.contains("thresholds")) m.thresholds = detail::numbers_from(meta["thresholds"], "metadata.thresholds");
    if (meta.contains("mask_probs")) m.mask_probs = detail::numbers_from(meta["mask_probs"], "metadata.mask_probs");
    if (meta.contains("normalized")) {
        if (!meta["normalized"].is_boolean()) throw SchemaError("metadata.normalized: expected a boolean");
        m.normalized = meta["normalized"].get<bool>();
    }
    if (meta.contains("measurable_bits")) {
        const json& b = meta["measurable_bits"];
        if (!b.is_array() || b.size() != f.system.size()) {
            throw SchemaError("metadata.measurable_bits: expected one integer per function");
        }
        for (const auto& e : b) {
            if (!e.is_number_integer() || e.get<int>() < 0 || e.get<int>() > s.coord_count()) {
                throw SchemaError("metadata.measurable_bits: entries must be integers in [0, coords]");
            }
            m.measurable_bits.push_back(e.get<int>());
        }
    }
    if (meta.contains("half")) {
        if (!meta["half"].is_string()) throw SchemaError("metadata.half: expected a string");
        m.half = meta["half"].get<std::string>();
    }
    return f;
}

inline std::string write_system_file_string(const SystemFile& f) { return to_json(f).dump(1) + "\n"; }

inline SystemFile read_system_file_string(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("SystemFile: invalid JSON: ") + e.what());
    }
    return system_file_from_json(j);
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot write '" + path + "'");
    out << text;
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

inline SystemFile read_system_file(const std::string& path) { return read_system_file_string(read_text_file(path)); }

inline void write_system_file(const std::string& path, const SystemFile& f) {
    write_text_file(path, write_system_file_string(f));
}

struct InvariantCheck {
    std::string name;
    bool pass = false;
    std::string message;
};

struct ValidationReport {
    std::vector<InvariantCheck> checks;
    bool pass() const {
        for (const auto& c : checks) {
            if (!c.pass) return false;
        }
        return true;
    }
};

/// Re-verifies a loaded file: Gram matrix against its expected form,
/// measurability, martingale differences and metadata consistency.
inline ValidationReport validate_system_file(const SystemFile& f, double tol = 1e-12) {
    ValidationReport r;
    const auto& sys = f.system;
    const auto& m = f.metadata;
    const std::size_t n = sys.size();

    {
        InvariantCheck c{"metadata", true, "consistent"};
        if (!m.mask_probs.empty() && !m.half && m.mask_probs.size() != n) {
            c = {"metadata", false, "mask_probs has " + std::to_string(m.mask_probs.size()) + " entries for " + std::to_string(n) + " functions"};
        }
        for (double p : m.mask_probs) {
            if (!(p > 0.0 && p <= 1.0)) c = {"metadata", false, "mask_probs entries must lie in (0, 1]"};
        }
        r.checks.push_back(c);
    }

    {
        // Expected Gram matrix: identity when normalized, diag(mask_probs)
        // for raw traces, otherwise only orthogonality is asserted.
        const Eigen::MatrixXd g = gram_matrix(sys);
        const bool raw_trace = m.normalized && !*m.normalized && m.mask_probs.size() == n;
        const bool orthonormal = !m.normalized || *m.normalized;
        double worst = -1.0;
        std::size_t wi = 0, wj = 0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j <= i; ++j) {
                double target = 0.0;
                if (i == j) {
                    if (raw_trace) {
                        target = m.mask_probs[i];
                    } else if (orthonormal) {
                        target = 1.0;
                    } else {
                        target = g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
                    }
                }
                const double dev = std::abs(g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) - target);
                if (dev > worst) {
                    worst = dev;
                    wi = i;
                    wj = j;
                }
            }
        }
        InvariantCheck c{"gram", worst <= tol, ""};
        std::ostringstream msg;
        msg.precision(17);
        msg << "max deviation " << worst << " at (" << sys.labels()[wi] << ", " << sys.labels()[wj] << ")";
        c.message = msg.str();
        r.checks.push_back(c);
    }

    if (!m.measurable_bits.empty()) {
        InvariantCheck meas{"measurability", true, "every function depends only on its declared coordinates"};
        InvariantCheck mds{"martingale_difference", true, "E[f_k | earlier coordinates] = 0 for every k"};
        for (std::size_t k = 0; k < n; ++k) {
            const int bits = m.measurable_bits[k];
            if (!is_measurable(sys[k], bits) && meas.pass) {
                meas = {"measurability", false, sys.labels()[k] + " is not measurable on its first " + std::to_string(bits) + " coordinates"};
            }
            if (bits == 0) continue;
            const double dev = sup_norm(conditional_expectation(sys[k], bits - 1));
            if (dev > tol && mds.pass) {
                mds = {"martingale_difference", false, sys.labels()[k] + " has conditional mean up to " + std::to_string(dev)};
            }
        }
        r.checks.push_back(meas);
        r.checks.push_back(mds);
    }
    return r;
}

}  // namespace sidonlab
