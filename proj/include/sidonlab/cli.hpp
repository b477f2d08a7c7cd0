#pragma once

// Command-line front end. run() parses arguments, writes reports to `out` (or
// --out) and diagnostics to `err`, and returns 0 when every checked
// inequality holds, 1 on a violation and 2 on a usage or input error.

#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sidonlab/concentration.hpp"
#include "sidonlab/config.hpp"
#include "sidonlab/constructions.hpp"
#include "sidonlab/cube.hpp"
#include "sidonlab/domination.hpp"
#include "sidonlab/matrix_example.hpp"
#include "sidonlab/parallel.hpp"
#include "sidonlab/riesz.hpp"
#include "sidonlab/sidon.hpp"
#include "sidonlab/system_file.hpp"

namespace sidonlab::cli {

/// Git blob id: SHA-1 of "blob <size>\0" followed by the content.
inline std::string git_blob_hash(const std::string& content) {
    const std::string blob = "blob " + std::to_string(content.size()) + std::string(1, '\0') + content;
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(blob.data(), blob.size(), md, &len, EVP_sha1(), nullptr) != 1) {
        throw std::runtime_error("SHA-1 digest failed");
    }
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    return hex.str();
}

/// Where a system comes from: a SystemFile or construction flags.
struct SourceOptions {
    std::string file;
    std::string kind = "pisier";
    int n = 6;
    std::optional<double> c;
    std::optional<double> eps;
    std::string half = "interleaved";
    bool raw = false;

    json describe() const {
        json j{{"kind", kind}, {"n", n}, {"half", half}, {"raw", raw}};
        j["c"] = c ? json(*c) : json(nullptr);
        j["eps"] = eps ? json(*eps) : json(nullptr);
        return j;
    }
};

inline ConstructionTrace build_trace(const SourceOptions& o) {
    switch (construction_kind_from_string(o.kind)) {
        case ConstructionKind::pisier: return pisier_system(o.n, o.eps, o.c);
        case ConstructionKind::maurey:
            if (!o.c) throw std::invalid_argument("maurey needs --c");
            return maurey_system(o.n, *o.c);
        case ConstructionKind::rademacher: return rademacher_system(o.n);
        case ConstructionKind::union_pair: return union_system(o.n).trace;
    }
    throw std::invalid_argument("unknown construction kind");
}

inline SystemFile build_system(const SourceOptions& o) {
    // Dense storage holds one value per (function, atom); budget the total.
    if (o.n >= 1 && o.n <= kMaxConstructionSteps) {
        const int coords = o.kind == "union" ? o.n + 1 : o.n;
        const auto functions = static_cast<std::uint64_t>(o.kind == "union" && o.half == "interleaved" ? 2 * o.n : o.n);
        require_atoms_within_budget(functions << coords, "system of " + std::to_string(functions) + " functions on " +
                                                             std::to_string(coords) + " coordinates (values stored)");
    }
    if (o.kind == "union") {
        if (o.raw) throw std::invalid_argument("--raw does not apply to union systems");
        return system_file_from_union(union_system(o.n), o.half);
    }
    return system_file_from_trace(build_trace(o), !o.raw);
}

/// Loads the system and records what identifies the input for hashing.
inline SystemFile load_system(const SourceOptions& o, json& input) {
    if (o.file.empty()) {
        input["construction"] = o.describe();
        return build_system(o);
    }
    const std::string text = read_text_file(o.file);
    input["file_blob"] = git_blob_hash(text);
    return read_system_file_string(text);
}

/// sum_k sqrt(P(A_{k-1})) phi_k = S_n: the witness of the normalized
/// construction, when the file carries the mask probabilities.
inline std::optional<std::vector<double>> construction_witness(const SystemFile& f) {
    const auto& m = f.metadata;
    if (m.half || !m.normalized || !*m.normalized || m.mask_probs.size() != f.system.size()) return std::nullopt;
    std::vector<double> x;
    for (double p : m.mask_probs) x.push_back(std::sqrt(p));
    return x;
}

inline json sidon_json(const SidonReport& r) {
    json j{{"constant", r.constant},
           {"witness", r.witness},
           {"orthant_values", r.orthant_values},
           {"distinct_rows", r.distinct_rows},
           {"max_duality_gap", r.max_duality_gap},
           {"total_pivots", r.total_pivots},
           {"lp_tolerance", r.tolerance}};
    j["upper_trivial"] = r.upper_trivial ? json(*r.upper_trivial) : json(nullptr);
    j["lower_witness"] = r.lower_witness ? json(*r.lower_witness) : json(nullptr);
    return j;
}

inline bool sidon_consistent(const SidonReport& r) {
    bool ok = true;
    if (r.upper_trivial) ok = ok && r.constant <= *r.upper_trivial + 1e-9;
    if (r.lower_witness) ok = ok && *r.lower_witness <= r.constant + 1e-9;
    return ok;
}

/// Deterministic structural report of a system; identical for a system held
/// in memory and the same system read back from its file.
inline json analyze_system(const SystemFile& f) {
    const auto& sys = f.system;
    json j;
    j["functions"] = sys.size();
    j["coords"] = sys.space().coord_count();
    j["labels"] = sys.labels();
    j["l2_norms"] = sys.l2_norms();
    std::vector<double> sups;
    for (const auto& fn : sys.functions()) sups.push_back(sup_norm(fn));
    j["sup_norms"] = sups;
    const Eigen::MatrixXd g = gram_matrix(sys);
    double off = 0.0;
    for (Eigen::Index i = 0; i < g.rows(); ++i)
        for (Eigen::Index k = 0; k < i; ++k) off = std::max(off, std::abs(g(i, k)));
    j["gram_max_offdiagonal"] = off;

    const auto validation = validate_system_file(f);
    json checks = json::array();
    for (const auto& c : validation.checks) checks.push_back({{"name", c.name}, {"pass", c.pass}, {"message", c.message}});
    j["validation"] = checks;

    bool pass = validation.pass();
    if (sys.size() <= SidonOptions{}.max_functions) {
        SidonOptions opt;
        opt.witness = construction_witness(f);
        const auto r = sidon_constant_exact(sys, opt);
        j["sidon"] = sidon_json(r);
        pass = pass && sidon_consistent(r);
    } else {
        j["sidon"] = nullptr;
    }
    j["pass"] = pass;
    return j;
}

namespace detail {

inline std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    return std::mt19937_64(seq);
}

inline json report_json(const ConcentrationReport& r) {
    json j{{"id", r.id}, {"t", r.t}, {"n", r.n}, {"p", r.p}, {"lhs", r.lhs}, {"rhs", r.rhs}, {"slack", r.slack},
           {"pass", r.pass}, {"log_domain", r.log_domain}, {"x", r.x}};
    if (r.chain_rhs) j["chain_rhs"] = *r.chain_rhs;
    return j;
}

inline json check_json(const DominationCheck& c) {
    return {{"id", c.id}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"slack", c.slack}, {"pass", c.pass}, {"detail", c.detail}};
}

// Tally of a family of reports: counts, worst slack and the first failures.
struct Tally {
    std::size_t total = 0;
    std::size_t failed = 0;
    double min_slack = std::numeric_limits<double>::infinity();
    json failures = json::array();

    template <class R, class ToJson>
    void add(const R& r, ToJson to_json) {
        ++total;
        min_slack = std::min(min_slack, r.slack);
        if (!r.pass) {
            ++failed;
            if (failures.size() < 10) failures.push_back(to_json(r));
        }
    }

    json summary() const {
        json j{{"checks", total}, {"failed", failed}, {"failures", failures}};
        j["min_slack"] = total == 0 ? json(nullptr) : json(min_slack);
        return j;
    }
};

inline std::string format_double(double v) {
    std::ostringstream s;
    s << std::setprecision(17) << v;
    return s.str();
}

}  // namespace detail

struct ScanRow {
    int n = 0;
    double c = 0.0;
    std::optional<double> sidon_exact;
    double witness_lower = 0.0;
    double sqrt_n_upper = 0.0;
    double ratio_to_sqrt_n = 0.0;
    double runtime_ms = 0.0;

    bool consistent() const {
        if (!sidon_exact) return witness_lower <= sqrt_n_upper + 1e-9;
        return witness_lower <= *sidon_exact + 1e-9 && *sidon_exact <= sqrt_n_upper + 1e-9;
    }
};

/// Sidon growth of a construction over n = n_min..n_max. The witness is
/// S_n = sum_k ||f_k||_2 phi_k; the exact constant is solved up to exact_max.
inline std::vector<ScanRow> sidon_scan(const SourceOptions& base, int n_min, int n_max, int exact_max) {
    if (n_min < 1 || n_max < n_min) throw std::invalid_argument("scan: need 1 <= n-min <= n-max");
    if (base.kind == "union") throw std::invalid_argument("scan: union systems are not scanned");
    std::vector<ScanRow> rows;
    for (int n = n_min; n <= n_max; ++n) {
        const auto start = std::chrono::steady_clock::now();
        SourceOptions o = base;
        o.n = n;
        o.raw = false;
        const auto f = build_system(o);
        ScanRow row;
        row.n = n;
        row.c = f.metadata.c.value_or(std::numeric_limits<double>::infinity());
        const auto x = *construction_witness(f);
        row.witness_lower = witness_ratio(f.system, x);
        row.sqrt_n_upper = std::sqrt(static_cast<double>(n));
        row.ratio_to_sqrt_n = row.witness_lower / row.sqrt_n_upper;
        if (n <= exact_max) row.sidon_exact = sidon_constant_exact(f.system).constant;
        row.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        rows.push_back(row);
    }
    return rows;
}

inline std::string scan_csv(const std::vector<ScanRow>& rows, bool timing) {
    std::ostringstream s;
    s << "n,c,sidon_exact,witness_lower,sqrt_n_upper,ratio_to_sqrt_n,runtime_ms\n";
    for (const auto& r : rows) {
        s << r.n << ',' << (std::isfinite(r.c) ? detail::format_double(r.c) : "inf") << ','
          << (r.sidon_exact ? detail::format_double(*r.sidon_exact) : "") << ',' << detail::format_double(r.witness_lower)
          << ',' << detail::format_double(r.sqrt_n_upper) << ',' << detail::format_double(r.ratio_to_sqrt_n) << ','
          << (timing ? detail::format_double(r.runtime_ms) : "") << '\n';
    }
    return s.str();
}

namespace detail {

struct Result {
    std::string text;  // report body
    bool pass = true;
};

// Wraps a command result in the common envelope.
inline Result envelope(const std::string& command, const json& input, json result, bool pass) {
    json j{{"command", command},
           {"input_hash", git_blob_hash(input.dump())},
           {"tolerance", kReportTolerance},
           {"pass", pass},
           {"result", std::move(result)}};
    return {j.dump(2) + "\n", pass};
}

inline Result cmd_construct(const SourceOptions& o) {
    return {write_system_file_string(build_system(o)), true};
}

inline Result cmd_analyze(const SourceOptions& o) {
    json input{{"command", "analyze"}};
    const auto f = load_system(o, input);
    auto result = analyze_system(f);
    const bool pass = result["pass"].get<bool>();
    return envelope("analyze", input, std::move(result), pass);
}

inline Result cmd_sidon(const SourceOptions& o, const std::string& mode, int tensor_power) {
    if (mode != "exact") throw std::invalid_argument("sidon: unknown mode '" + mode + "' (expected 'exact')");
    if (tensor_power < 1) throw std::invalid_argument("sidon: --tensor-power must be >= 1");
    json input{{"command", "sidon"}, {"tensor_power", tensor_power}};
    const auto f = load_system(o, input);
    SidonOptions opt;
    if (tensor_power == 1) opt.witness = construction_witness(f);
    const auto sys = tensor_power == 1 ? f.system : tensor_system(f.system, tensor_power);
    const auto r = sidon_constant_exact(sys, opt);
    json result = sidon_json(r);
    result["functions"] = sys.size();
    result["tensor_power"] = tensor_power;
    bool pass = sidon_consistent(r);
    if (tensor_power == 2) {
        // Cross-check against the bound 16 C'^2 with C' the base constant.
        const double base = std::max(1.0, sidon_constant_exact(f.system).constant);
        const double bound = tensor2_sidon_bound(base);
        result["base_constant"] = base;
        result["tensor2_bound"] = bound;
        pass = pass && r.constant <= bound + 1e-9;
    }
    return envelope("sidon", input, std::move(result), pass);
}

inline Result cmd_concentration(const SourceOptions& o, int trials, std::uint64_t seed) {
    if (o.kind == "union") throw std::invalid_argument("concentration: use pisier, maurey or rademacher");
    if (trials < 0) throw std::invalid_argument("concentration: --trials must be >= 0");
    json input{{"command", "concentration"}, {"construction", o.describe()}, {"trials", trials}, {"seed", seed}};
    const auto trace = build_trace(o);
    const int n = trace.steps;

    auto mgf = parallel_map(static_cast<std::size_t>(trials), [&](std::size_t i) {
        auto rng = trial_rng(seed, i);
        std::uniform_real_distribution<double> t(-3.0, 3.0);
        std::normal_distribution<double> g(0.0, 1.0);
        const double tt = t(rng);
        std::vector<double> x(static_cast<std::size_t>(n));
        for (double& v : x) v = g(rng);
        return mgf_azuma_check(trace, tt, x);
    });
    Tally mgf_tally;
    for (const auto& r : mgf) {
        mgf_tally.add(r.raw, report_json);
        mgf_tally.add(r.normalized, report_json);
    }

    Tally walk_tally;
    std::vector<double> cs{std::numeric_limits<double>::infinity()};
    if (std::isfinite(trace.c)) cs.push_back(trace.c);
    for (double c : cs) {
        for (int t = 0; t <= n; ++t) {
            const auto r = tail_and_levy_check(n, t, c);
            walk_tally.add(r.tail, report_json);
            walk_tally.add(r.levy, report_json);
        }
    }

    Tally pnorm_tally;
    for (int p : {2, 4, 8}) {
        for (std::size_t i = 0; i < 10; ++i) {
            auto rng = trial_rng(seed + 1, i);
            std::normal_distribution<double> g(0.0, 1.0);
            std::vector<double> x(static_cast<std::size_t>(n));
            for (double& v : x) v = g(rng);
            pnorm_tally.add(pnorm_growth_check(trace, x, p), report_json);
        }
    }
    json result{{"n", n},
                {"eps", trace.eps},
                {"mgf", mgf_tally.summary()},
                {"tail_and_levy", walk_tally.summary()},
                {"pnorm_growth", pnorm_tally.summary()}};
    result["c"] = std::isfinite(trace.c) ? json(trace.c) : json(nullptr);
    const bool pass = mgf_tally.failed + walk_tally.failed + pnorm_tally.failed == 0;
    return envelope("concentration", input, std::move(result), pass);
}

inline Result cmd_riesz(int n, int m, double eps, std::uint64_t seed, bool lower) {
    json input{{"command", "riesz"}, {"n", n}, {"m", m}, {"eps", eps}, {"seed", seed}, {"lower", lower}};
    const TorusGrid grid(n, m);
    auto rng = trial_rng(seed, 0);
    std::uniform_int_distribution<int> pick(0, m - 1);
    std::vector<int> z0(static_cast<std::size_t>(n));
    for (int& e : z0) e = pick(rng);
    RieszOptions opt;
    opt.search_lower = lower;
    const auto d = decompose(grid, z0, eps, opt);

    const auto values = tensor_values(d.nu);
    double nu_min = std::numeric_limits<double>::infinity(), nu_imag = 0.0;
    for (const auto& v : values) {
        nu_min = std::min(nu_min, v.real());
        nu_imag = std::max(nu_imag, std::abs(v.imag()));
    }
    const auto it = d.nu.coeffs.find({0, 0});
    const double integral = it == d.nu.coeffs.end() ? 0.0 : it->second.real();
    const double reconstruction = d.F.max_difference(d.t + d.r);

    json checks = json::array();
    bool pass = true;
    auto check = [&](const char* name, double lhs, double rhs) {
        const bool ok = lhs <= rhs + kReportTolerance;
        pass = pass && ok;
        checks.push_back({{"name", name}, {"lhs", lhs}, {"rhs", rhs}, {"pass", ok}});
    };
    check("nu_nonnegative", -nu_min, 0.0);
    check("nu_real", nu_imag, 0.0);
    check("nu_unit_integral", std::abs(integral - 1.0), 0.0);
    check("reconstruction", reconstruction, 0.0);
    check("wedge_t", d.wedge_t, 4.0 / eps);
    check("vee_r_certified", d.vee_r_upper, eps);
    check("vee_r_prime_certified", d.vee_r_prime_upper, eps / 2.0);
    json result{{"n", n},         {"m", m},
                {"eps", eps},     {"z0", d.z0},
                {"nu_min", nu_min}, {"nu_integral", integral},
                {"reconstruction_error", reconstruction},
                {"wedge_t", d.wedge_t},
                {"vee_r_upper", d.vee_r_upper},
                {"vee_r_prime_upper", d.vee_r_prime_upper},
                {"checks", checks}};
    result["vee_r_lower"] = d.vee_r_lower ? json(*d.vee_r_lower) : json(nullptr);
    return envelope("riesz", input, std::move(result), pass);
}

inline Result cmd_matrix(int n, double eps, std::optional<double> c, std::uint64_t seed, int draws) {
    json input{{"command", "matrix"}, {"n", n}, {"eps", eps}, {"seed", seed}, {"trials", draws}};
    input["c"] = c ? json(*c) : json(nullptr);
    const auto w = matrix_witness_bounds(n, eps, c, seed);
    json result{{"n", w.n},
                {"eps", w.eps},
                {"c", w.c},
                {"trace_norm_a", w.trace_norm_a},
                {"sup_exact", w.sup_exact},
                {"lower_bound", w.lower_bound},
                {"trivial_upper", w.trivial_upper},
                {"asymptotic_form", w.asymptotic_form},
                {"chain_bound", w.chain_bound}};
    result["matrix_route"] = w.matrix_route ? json(*w.matrix_route) : json(nullptr);
    bool pass = w.lower_bound >= w.chain_bound - 1e-9 && w.lower_bound <= w.trivial_upper + 1e-9;
    if (w.matrix_route) pass = pass && std::abs(*w.matrix_route - w.lower_bound) <= 1e-9;
    if (draws > 0) {
        const auto sample = sample_matrix_system(pisier_system(n, eps, c), static_cast<std::size_t>(draws), seed);
        const auto o = matrix_orthonormality_check(sample);
        double off = 0.0;
        for (double v : sample.offdiag_norms) off = std::max(off, v);
        result["orthonormality"] = {{"samples", o.samples},
                                    {"max_deviation", o.max_deviation},
                                    {"max_z", o.max_z},
                                    {"threshold", o.threshold},
                                    {"diagonal_block_deviation", o.diagonal_block_deviation},
                                    {"max_offdiagonal_norm", off},
                                    {"pass", o.pass}};
        pass = pass && o.pass && off <= 2.0 + 1e-12;
    }
    return envelope("matrix", input, std::move(result), pass);
}

inline Result cmd_dominate(int trials, std::uint64_t seed, int max_steps, int dim, int quad_points) {
    if (trials < 0 || max_steps < 1 || max_steps > 8 || dim < 1 || dim > 8) {
        throw std::invalid_argument("dominate: need --trials >= 0, --n in [1, 8] and --d in [1, 8]");
    }
    json input{{"command", "dominate"}, {"trials", trials}, {"seed", seed}, {"n", max_steps}, {"d", dim}, {"quad_points", quad_points}};
    const auto count = static_cast<std::size_t>(trials);
    auto vec = [&](std::mt19937_64& rng) {
        std::uniform_int_distribution<int> ix(-4, 4);
        Vec v(static_cast<std::size_t>(dim));
        for (double& e : v) e = ix(rng);
        return v;
    };

    Tally two_point;
    for (const auto& r : parallel_map(count, [&](std::size_t i) {
             auto rng = trial_rng(seed, i);
             const auto law = random_centered_law(rng);
             const Vec x0 = vec(rng);
             return check_two_point(law, x0, vec(rng)).check;
         })) {
        two_point.add(r, check_json);
    }

    Tally mds;
    for (const auto& r : parallel_map(count, [&](std::size_t i) {
             auto rng = trial_rng(seed + 1, i);
             const int k = 1 + static_cast<int>(i % static_cast<std::size_t>(max_steps));
             if (i % 2 == 0) return check_mds_domination(predictable_mask_instance(k, dim, rng)).check;
             const int r = std::max(1, std::min(2, 12 / k));
             return check_mds_domination(random_mds_instance(k, dim, r, rng)).check;
         })) {
        mds.add(r, check_json);
    }

    const auto mm3 = mm3_counterexample(quad_points);

    Tally union_tensor;
    const int half_steps = std::min(max_steps, 4);
    const auto u = union_system(half_steps);
    for (const auto& c : check_union_and_tensor_domination(u.plus, u.minus, 1.0, 1.0, trials, seed + 2, dim)) {
        union_tensor.add(c, check_json);
    }
    json result{{"two_point", two_point.summary()},
                {"mds", mds.summary()},
                {"mm3", {{"lhs", mm3.lhs}, {"rhs", mm3.rhs}, {"violated", mm3.violated}, {"points_used", mm3.points_used}}},
                {"union_and_tensor", union_tensor.summary()}};
    // The circle example is a counterexample: a violation is the expected outcome.
    const bool pass = two_point.failed + mds.failed + union_tensor.failed == 0 && mm3.violated;
    return envelope("dominate", input, std::move(result), pass);
}

inline Result cmd_scan(const SourceOptions& o, const std::string& what, int n_min, int n_max, int exact_max,
                       const std::string& format, bool timing) {
    if (what != "sidon") throw std::invalid_argument("scan: unknown target '" + what + "' (expected 'sidon')");
    const auto rows = sidon_scan(o, n_min, n_max, exact_max);
    bool pass = true;
    for (const auto& r : rows) pass = pass && r.consistent();
    if (format == "csv") return {scan_csv(rows, timing), pass};
    json input{{"command", "scan"}, {"construction", o.describe()}, {"n_min", n_min}, {"n_max", n_max}, {"exact_max", exact_max}};
    json arr = json::array();
    for (const auto& r : rows) {
        json j{{"n", r.n},
               {"witness_lower", r.witness_lower},
               {"sqrt_n_upper", r.sqrt_n_upper},
               {"ratio_to_sqrt_n", r.ratio_to_sqrt_n}};
        j["c"] = std::isfinite(r.c) ? json(r.c) : json(nullptr);
        j["sidon_exact"] = r.sidon_exact ? json(*r.sidon_exact) : json(nullptr);
        j["runtime_ms"] = timing ? json(r.runtime_ms) : json(nullptr);
        arr.push_back(j);
    }
    return envelope("scan", input, std::move(arr), pass);
}

inline Result cmd_validate(const std::string& path) {
    std::ostringstream s;
    SystemFile f;
    try {
        f = read_system_file(path);
    } catch (const SchemaError& e) {
        s << "FAIL schema: " << e.what() << '\n';
        return {s.str(), false};
    }
    s << "PASS schema: version " << kSystemFileVersion << ", " << f.system.size() << " functions on "
      << f.system.space().coord_count() << " coords\n";
    const auto r = validate_system_file(f);
    for (const auto& c : r.checks) s << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.message << '\n';
    return {s.str(), r.pass()};
}

}  // namespace detail

/// Entry point. argv[0] is the program name.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Exact Sidon constants, concentration and domination checks on finite cubes", "sidonlab"};
    app.require_subcommand(1);
    app.fallthrough();
    unsigned threads = 0;
    std::string out_path;
    app.add_option("--threads", threads, "Worker threads (0 = hardware concurrency)");
    app.add_option("--out", out_path, "Write the report or system here instead of stdout");

    SourceOptions src;
    auto add_construction = [&](CLI::App* sub) {
        sub->add_option("--kind", src.kind, "pisier | maurey | rademacher | union")
            ->check(CLI::IsMember({"pisier", "maurey", "rademacher", "union"}));
        sub->add_option("--n", src.n, "Number of steps");
        sub->add_option("--c", src.c, "Threshold coefficient c in a_k = c sqrt(k)");
        sub->add_option("--eps", src.eps, "Target eps");
        sub->add_option("--half", src.half, "Union part: plus | minus | interleaved")
            ->check(CLI::IsMember({"plus", "minus", "interleaved"}));
        sub->add_flag("--raw", src.raw, "Store f_k instead of the normalized phi_k");
    };

    auto* construct = app.add_subcommand("construct", "Build a system and write it as a SystemFile");
    add_construction(construct);

    auto* analyze = app.add_subcommand("analyze", "Structural report and exact Sidon constant of a system");
    analyze->add_option("file", src.file, "SystemFile (omit to build from flags)");
    add_construction(analyze);

    std::string mode;
    int tensor_power = 1;
    auto* sidon = app.add_subcommand("sidon", "Exact Sidon constant by orthant LPs");
    sidon->add_option("mode", mode, "exact")->required();
    sidon->add_option("file", src.file, "SystemFile (omit to build from flags)");
    sidon->add_option("--tensor-power", tensor_power, "Use the k-fold tensor power system");
    add_construction(sidon);

    int trials = 100;
    std::uint64_t seed = 1;
    auto* conc = app.add_subcommand("concentration", "Azuma, tail, Levy and p-norm checks on a construction");
    add_construction(conc);
    conc->add_option("--trials", trials, "Random (t, x) MGF checks");
    conc->add_option("--seed", seed, "Seed");

    int riesz_n = 3, riesz_m = 0;
    double riesz_eps = 0.5;
    bool no_lower = false;
    auto* riesz = app.add_subcommand("riesz", "Riesz product decomposition F = t + r with norm certificates");
    riesz->add_option("--n", riesz_n, "Torus coordinates N");
    riesz->add_option("--m", riesz_m, "Grid modulus (default max(4, N + 2))");
    riesz->add_option("--eps", riesz_eps, "eps in (0, 1]");
    riesz->add_option("--seed", seed, "Seed for z0");
    riesz->add_flag("--no-lower", no_lower, "Skip the injective-norm lower search");

    int matrix_n = 8, draws = 0;
    double matrix_eps = 1.0;
    std::optional<double> matrix_c;
    auto* matrix = app.add_subcommand("matrix", "Matrix example: witness bounds and Haar Gram Monte Carlo");
    matrix->add_option("--n", matrix_n, "Matrix size");
    matrix->add_option("--eps", matrix_eps, "eps of the diagonal construction");
    matrix->add_option("--c", matrix_c, "Threshold coefficient (default c_eps)");
    matrix->add_option("--seed", seed, "Seed");
    matrix->add_option("--trials", draws, "Monte Carlo draws for the Gram check (0 skips it, else >= 1000)");

    int dom_n = 6, dom_d = 3, quad_points = 64;
    auto* dominate = app.add_subcommand("dominate", "Domination inequalities on random instances");
    dominate->add_option("--trials", trials, "Instances per family");
    dominate->add_option("--seed", seed, "Seed");
    dominate->add_option("--n", dom_n, "Largest number of martingale steps");
    dominate->add_option("--d", dom_d, "Dimension of l_inf^d");
    dominate->add_option("--quad-points", quad_points, "Initial quadrature panels for the circle integral");

    std::string what, format = "json";
    int n_min = 2, n_max = 10, exact_max = 12;
    bool no_timing = false;
    auto* scan = app.add_subcommand("scan", "Sidon growth table over a range of n");
    scan->add_option("what", what, "sidon")->required();
    add_construction(scan);
    scan->add_option("--n-min", n_min, "First n");
    scan->add_option("--n-max", n_max, "Last n");
    scan->add_option("--exact-max", exact_max, "Solve the exact constant up to this n");
    scan->add_option("--format", format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
    scan->add_flag("--no-timing", no_timing, "Leave runtime_ms empty so output is reproducible");

    std::string validate_path;
    auto* validate = app.add_subcommand("validate", "Schema, Gram and measurability checks of a SystemFile");
    validate->add_option("file", validate_path, "SystemFile")->required();

    std::vector<std::string> args;
    for (int i = argc - 1; i >= 1; --i) args.emplace_back(argv[i]);
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        err << "usage error: " << e.what() << "\n\n" << app.help();
        return 2;
    }

    set_thread_count(threads);
    try {
        detail::Result r;
        if (construct->parsed()) {
            r = detail::cmd_construct(src);
        } else if (analyze->parsed()) {
            r = detail::cmd_analyze(src);
        } else if (sidon->parsed()) {
            r = detail::cmd_sidon(src, mode, tensor_power);
        } else if (conc->parsed()) {
            r = detail::cmd_concentration(src, trials, seed);
        } else if (riesz->parsed()) {
            r = detail::cmd_riesz(riesz_n, riesz_m == 0 ? std::max(4, riesz_n + 2) : riesz_m, riesz_eps, seed, !no_lower);
        } else if (matrix->parsed()) {
            r = detail::cmd_matrix(matrix_n, matrix_eps, matrix_c, seed, draws);
        } else if (dominate->parsed()) {
            r = detail::cmd_dominate(trials, seed, dom_n, dom_d, quad_points);
        } else if (scan->parsed()) {
            r = detail::cmd_scan(src, what, n_min, n_max, exact_max, format, !no_timing);
        } else if (validate->parsed()) {
            r = detail::cmd_validate(validate_path);
        }
        if (out_path.empty()) {
            out << r.text;
        } else {
            write_text_file(out_path, r.text);
        }
        return r.pass ? 0 : 1;
    } catch (const SizeError& e) {
        err << "limit exceeded: " << e.what() << '\n';
        return 2;
    } catch (const SchemaError& e) {
        err << "schema error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "invalid input: " << e.what() << '\n';
        return 2;
    } catch (const CertificationError& e) {
        err << "certification failed: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace sidonlab::cli
