#pragma once

// Adapted systems built from independent signs: the truncated-martingale
// system f_k = eps_k 1_{A_{k-1}}, its stopped-walk variant, the Rademacher
// system, and the union pair (phi+, phi-) whose halves are each distributed
// like independent signs.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sidonlab/cube.hpp"
#include "sidonlab/walk.hpp"

namespace sidonlab {

enum class ConstructionKind { pisier, maurey, union_pair, rademacher };

inline const char* to_string(ConstructionKind kind) {
    switch (kind) {
        case ConstructionKind::pisier: return "pisier";
        case ConstructionKind::maurey: return "maurey";
        case ConstructionKind::union_pair: return "union";
        case ConstructionKind::rademacher: return "rademacher";
    }
    return "?";
}

inline ConstructionKind construction_kind_from_string(const std::string& s) {
    if (s == "pisier") return ConstructionKind::pisier;
    if (s == "maurey") return ConstructionKind::maurey;
    if (s == "union") return ConstructionKind::union_pair;
    if (s == "rademacher") return ConstructionKind::rademacher;
    throw std::invalid_argument("unknown construction kind '" + s + "'");
}

inline constexpr int kMaxConstructionSteps = 24;

/// Record of an adapted construction S_k = S_{k-1} + eps_k 1_{A_{k-1}}.
///
/// eps_k lives at bit k - first_coord, so the algebra A_k is generated by the
/// low measurable_bits(k) coordinates. Masks and partial sums are stored
/// compactly; the function systems are materialized on request.
struct ConstructionTrace {
    ConstructionKind kind = ConstructionKind::pisier;
    CubeSpace space;
    int first_coord = 1;
    int steps = 0;
    double eps = 0.0;
    double c = 0.0;
    std::vector<double> thresholds;                  // a_0..a_{n-1}
    std::vector<std::vector<std::uint8_t>> masks;    // A_0..A_{n-1}, one byte per atom
    std::vector<std::vector<std::int8_t>> sums;      // S_0..S_n
    std::vector<double> mask_probs;                  // P(A_0)..P(A_{n-1})

    int n() const { return steps; }
    int bit_of(int k) const { return k - first_coord; }
    int measurable_bits(int k) const { return std::max(0, k - first_coord + 1); }

    CubeFunction mask(int k) const {
        const auto& m = masks.at(static_cast<std::size_t>(k));
        return CubeFunction(space, std::vector<double>(m.begin(), m.end()));
    }

    CubeFunction partial_sum(int k) const {
        const auto& s = sums.at(static_cast<std::size_t>(k));
        return CubeFunction(space, std::vector<double>(s.begin(), s.end()));
    }

    /// f_k = eps_k 1_{A_{k-1}}, k = 1..n.
    CubeFunction increment(int k) const {
        const auto& m = masks.at(static_cast<std::size_t>(k - 1));
        std::vector<double> v(space.atom_count());
        for (std::uint64_t a = 0; a < v.size(); ++a) v[a] = m[a] != 0 ? CubeSpace::sign(a, bit_of(k)) : 0.0;
        return CubeFunction(space, std::move(v));
    }

    int sup_abs_sum(int k) const {
        int best = 0;
        for (std::int8_t s : sums.at(static_cast<std::size_t>(k))) best = std::max(best, std::abs(static_cast<int>(s)));
        return best;
    }

    /// ||f_k||_2 = P(A_{k-1})^{1/2}.
    std::vector<double> raw_l2_norms() const {
        std::vector<double> out;
        for (double p : mask_probs) out.push_back(std::sqrt(p));
        return out;
    }

    OrthoSystem raw_system() const {
        std::vector<CubeFunction> fs;
        std::vector<std::string> labels;
        for (int k = 1; k <= steps; ++k) {
            fs.push_back(increment(k));
            labels.push_back("f_" + std::to_string(k));
        }
        return OrthoSystem(space, std::move(fs), std::move(labels));
    }

    OrthoSystem normalized_system() const {
        std::vector<CubeFunction> fs;
        std::vector<std::string> labels;
        for (int k = 1; k <= steps; ++k) {
            const double norm = std::sqrt(mask_probs[static_cast<std::size_t>(k - 1)]);
            fs.push_back((1.0 / norm) * increment(k));
            labels.push_back("phi_" + std::to_string(k));
        }
        return OrthoSystem(space, std::move(fs), std::move(labels));
    }

    /// Smallest eps with ||f_k||_2 >= (1+eps)^{-1} for every k.
    double exact_eps() const {
        const double p = *std::min_element(mask_probs.begin(), mask_probs.end());
        return 1.0 / std::sqrt(p) - 1.0;
    }
};

/// c_eps = sqrt(2 ln(2 / (1 - (1+eps)^{-2}))): the Azuma tail 2e^{-c^2/2}
/// then equals 1 - (1+eps)^{-2}.
inline double auto_threshold_coefficient(double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be > 0");
    const double keep = 1.0 / ((1.0 + eps) * (1.0 + eps));
    return std::sqrt(2.0 * std::log(2.0 / (1.0 - keep)));
}

namespace detail {

inline void check_steps(int n, int limit, const char* who) {
    if (n < 1 || n > limit) {
        throw std::invalid_argument(std::string(who) + ": n must lie in [1, " + std::to_string(limit) + "]");
    }
}

// Shared driver: mask_rule(k, trace) returns the mask A_k once S_k is known.
template <class MaskRule>
ConstructionTrace run_truncated(ConstructionTrace t, MaskRule&& mask_rule) {
    const std::uint64_t atoms = t.space.atom_count();
    t.sums.assign(1, std::vector<std::int8_t>(atoms, 0));
    t.masks.clear();
    t.mask_probs.clear();
    for (int k = 0; k < t.steps; ++k) {
        if (k > 0) {
            const auto& prev_mask = t.masks.back();
            const auto& prev_sum = t.sums.back();
            std::vector<std::int8_t> s(atoms);
            const int bit = t.bit_of(k);
            for (std::uint64_t a = 0; a < atoms; ++a) {
                s[a] = static_cast<std::int8_t>(prev_sum[a] + (prev_mask[a] != 0 ? CubeSpace::sign(a, bit) : 0));
            }
            t.sums.push_back(std::move(s));
        }
        auto m = mask_rule(k, t);
        const auto hits = static_cast<std::uint64_t>(std::count(m.begin(), m.end(), std::uint8_t{1}));
        t.mask_probs.push_back(static_cast<double>(hits) / static_cast<double>(atoms));
        t.masks.push_back(std::move(m));
    }
    // Final partial sum S_n.
    {
        const auto& prev_mask = t.masks.back();
        const auto& prev_sum = t.sums.back();
        std::vector<std::int8_t> s(atoms);
        const int bit = t.bit_of(t.steps);
        for (std::uint64_t a = 0; a < atoms; ++a) {
            s[a] = static_cast<std::int8_t>(prev_sum[a] + (prev_mask[a] != 0 ? CubeSpace::sign(a, bit) : 0));
        }
        t.sums.push_back(std::move(s));
    }
    return t;
}

inline std::vector<std::uint8_t> threshold_mask(const std::vector<std::int8_t>& sum, double a) {
    std::vector<std::uint8_t> m(sum.size());
    for (std::size_t i = 0; i < sum.size(); ++i) m[i] = std::abs(static_cast<int>(sum[i])) <= a ? 1 : 0;
    return m;
}

}  // namespace detail

/// Truncated-martingale system with a_k = c sqrt(k). With c absent the
/// coefficient is c_eps; with eps absent, eps is the exact value implied by
/// the trace (smallest eps with P(A_k) >= (1+eps)^{-2}).
inline ConstructionTrace pisier_system(int n, std::optional<double> eps, std::optional<double> c) {
    detail::check_steps(n, kMaxConstructionSteps, "pisier_system");
    if (eps && !(*eps > 0.0)) throw std::invalid_argument("pisier_system: eps must be > 0");
    if (c && !(*c > 0.0)) throw std::invalid_argument("pisier_system: c must be > 0");
    if (!eps && !c) throw std::invalid_argument("pisier_system: need eps, c or both");
    ConstructionTrace t;
    t.kind = ConstructionKind::pisier;
    t.space = CubeSpace(n);
    t.first_coord = 1;
    t.steps = n;
    t.c = c ? *c : auto_threshold_coefficient(*eps);
    for (int k = 0; k < n; ++k) t.thresholds.push_back(t.c * std::sqrt(static_cast<double>(k)));
    t = detail::run_truncated(std::move(t), [](int k, const ConstructionTrace& tr) {
        return detail::threshold_mask(tr.sums.back(), tr.thresholds[static_cast<std::size_t>(k)]);
    });
    t.eps = eps ? *eps : t.exact_eps();
    return t;
}

/// Stopped-walk variant: one threshold a = c sqrt(n) for the whole run, and
/// A'_{k-1} = {sup_{j<k} |M_j| <= a} = {|S'_{k-1}| <= a}.
inline ConstructionTrace maurey_system(int n, double c) {
    detail::check_steps(n, kMaxConstructionSteps, "maurey_system");
    if (!(c > 0.0)) throw std::invalid_argument("maurey_system: c must be > 0");
    ConstructionTrace t;
    t.kind = ConstructionKind::maurey;
    t.space = CubeSpace(n);
    t.first_coord = 1;
    t.steps = n;
    t.c = c;
    t.thresholds.assign(static_cast<std::size_t>(n), c * std::sqrt(static_cast<double>(n)));
    t = detail::run_truncated(std::move(t), [](int k, const ConstructionTrace& tr) {
        return detail::threshold_mask(tr.sums.back(), tr.thresholds[static_cast<std::size_t>(k)]);
    });
    t.eps = t.exact_eps();
    return t;
}

inline ConstructionTrace rademacher_system(int n) {
    detail::check_steps(n, kMaxConstructionSteps, "rademacher_system");
    ConstructionTrace t;
    t.kind = ConstructionKind::rademacher;
    t.space = CubeSpace(n);
    t.first_coord = 1;
    t.steps = n;
    t.c = std::numeric_limits<double>::infinity();
    t.thresholds.assign(static_cast<std::size_t>(n), t.c);
    t = detail::run_truncated(std::move(t), [](int, const ConstructionTrace& tr) {
        return std::vector<std::uint8_t>(tr.space.atom_count(), 1);
    });
    t.eps = t.exact_eps();
    return t;
}

struct UnionPair {
    OrthoSystem plus;         // phi+_k = eps_k
    OrthoSystem minus;        // phi-_k = eps_k (1_{B_{k-1}} - 1_{not B_{k-1}})
    OrthoSystem interleaved;  // psi_{2k-1} = phi+_k, psi_{2k} = phi-_k
    ConstructionTrace trace;  // S'_k and the sets B_k
};

inline constexpr int kMaxUnionSteps = 20;

/// Union pair built on eps_0..eps_n with eps = sqrt(2) - 1. B_0 = {eps_0 = +1};
/// for k >= 1, B_k takes the 2^k atoms of A_k inside {|S'_k| <= a_k} with the
/// smallest |S'_k|, ties broken by atom index.
inline UnionPair union_system(int n) {
    detail::check_steps(n, kMaxUnionSteps, "union_system");
    ConstructionTrace t;
    t.kind = ConstructionKind::union_pair;
    t.space = CubeSpace(n + 1);
    t.first_coord = 0;
    t.steps = n;
    t.eps = std::sqrt(2.0) - 1.0;
    t.c = auto_threshold_coefficient(t.eps);
    for (int k = 0; k < n; ++k) t.thresholds.push_back(t.c * std::sqrt(static_cast<double>(k)));
    t = detail::run_truncated(std::move(t), [](int k, const ConstructionTrace& tr) {
        const std::uint64_t atoms = tr.space.atom_count();
        std::vector<std::uint8_t> m(atoms, 0);
        if (k == 0) {
            for (std::uint64_t a = 0; a < atoms; ++a) m[a] = (a & 1U) != 0 ? 1 : 0;
            return m;
        }
        const int bits = tr.measurable_bits(k);
        const std::uint64_t cells = std::uint64_t{1} << bits;
        const auto& s = tr.sums.back();
        const double a = tr.thresholds[static_cast<std::size_t>(k)];
        std::vector<std::uint64_t> candidates;
        for (std::uint64_t cell = 0; cell < cells; ++cell) {
            if (std::abs(static_cast<int>(s[cell])) <= a) candidates.push_back(cell);
        }
        const std::uint64_t want = cells / 2;
        if (candidates.size() < want) {
            throw CertificationError("union_system: P(|S'_" + std::to_string(k) + "| <= a_" + std::to_string(k) +
                                     ") < 1/2 at n=" + std::to_string(tr.steps));
        }
        std::stable_sort(candidates.begin(), candidates.end(), [&](std::uint64_t x, std::uint64_t y) {
            return std::abs(static_cast<int>(s[x])) < std::abs(static_cast<int>(s[y]));
        });
        std::vector<std::uint8_t> chosen(cells, 0);
        for (std::uint64_t i = 0; i < want; ++i) chosen[candidates[i]] = 1;
        for (std::uint64_t atom = 0; atom < atoms; ++atom) m[atom] = chosen[atom & (cells - 1)];
        return m;
    });

    std::vector<CubeFunction> plus, minus, both;
    std::vector<std::string> plus_labels, minus_labels, both_labels;
    for (int k = 1; k <= n; ++k) {
        const auto& b = t.masks[static_cast<std::size_t>(k - 1)];
        std::vector<double> p(t.space.atom_count()), q(t.space.atom_count());
        for (std::uint64_t a = 0; a < p.size(); ++a) {
            const double e = CubeSpace::sign(a, t.bit_of(k));
            p[a] = e;
            q[a] = b[a] != 0 ? e : -e;
        }
        plus.emplace_back(t.space, std::move(p));
        minus.emplace_back(t.space, std::move(q));
        plus_labels.push_back("phi+_" + std::to_string(k));
        minus_labels.push_back("phi-_" + std::to_string(k));
        both.push_back(plus.back());
        both.push_back(minus.back());
        both_labels.push_back(plus_labels.back());
        both_labels.push_back(minus_labels.back());
    }
    UnionPair out;
    out.plus = OrthoSystem(t.space, std::move(plus), std::move(plus_labels));
    out.minus = OrthoSystem(t.space, std::move(minus), std::move(minus_labels));
    out.interleaved = OrthoSystem(t.space, std::move(both), std::move(both_labels));
    out.trace = std::move(t);
    return out;
}

struct DistributionReport {
    bool uniform = false;
    std::vector<double> pattern_mass;  // index bit k set <=> phi_{k+1} = +1
};

/// Exact pushforward of (phi_1..phi_n) on {-1,1}^n.
inline DistributionReport distribution_check(const OrthoSystem& sys) {
    const std::size_t n = sys.size();
    if (n > 30) throw SizeError("distribution_check: at most 30 functions");
    const std::uint64_t patterns = std::uint64_t{1} << n;
    std::vector<std::uint64_t> counts(patterns, 0);
    const std::uint64_t atoms = sys.space().atom_count();
    for (std::uint64_t a = 0; a < atoms; ++a) {
        std::uint64_t p = 0;
        for (std::size_t k = 0; k < n; ++k) {
            const double v = sys[k][a];
            if (v == 1.0) {
                p |= std::uint64_t{1} << k;
            } else if (v != -1.0) {
                throw std::invalid_argument("distribution_check: " + sys.labels()[k] + " takes a value outside {-1,+1}");
            }
        }
        ++counts[p];
    }
    DistributionReport r;
    r.uniform = atoms % patterns == 0;
    for (std::uint64_t c : counts) {
        r.pattern_mass.push_back(static_cast<double>(c) / static_cast<double>(atoms));
        if (c * patterns != atoms) r.uniform = false;
    }
    return r;
}

/// Verifies the trace invariants: masks and increments adapted, S_k the sum of
/// increments, E[f_k | A_{k-1}] = 0 on every atom of A_{k-1}, and the sup
/// bound |S_k| <= 1 + a_{k-1}. Returns an empty string or a description of the
/// first violation.
inline std::string verify_trace(const ConstructionTrace& t) {
    for (int k = 0; k < t.steps; ++k) {
        if (!is_measurable(t.mask(k), t.measurable_bits(k))) return "mask A_" + std::to_string(k) + " is not adapted";
    }
    for (int k = 1; k <= t.steps; ++k) {
        const auto f = t.increment(k);
        if (!is_measurable(f, t.measurable_bits(k))) return "f_" + std::to_string(k) + " is not adapted";
        const auto cond = conditional_expectation(f, t.measurable_bits(k - 1));
        if (sup_norm(cond) != 0.0) return "E[f_" + std::to_string(k) + " | A_" + std::to_string(k - 1) + "] != 0";
        const auto& prev = t.sums[static_cast<std::size_t>(k - 1)];
        const auto& cur = t.sums[static_cast<std::size_t>(k)];
        for (std::uint64_t a = 0; a < t.space.atom_count(); ++a) {
            if (cur[a] != prev[a] + static_cast<int>(f[a])) return "S_" + std::to_string(k) + " != S_{k-1} + f_k";
        }
        if (t.sup_abs_sum(k) > 1.0 + t.thresholds[static_cast<std::size_t>(k - 1)]) {
            return "sup|S_" + std::to_string(k) + "| exceeds 1 + a_" + std::to_string(k - 1);
        }
    }
    return {};
}

/// Smallest c > 0 (as an infimum over the closed pass region) for which the
/// truncated-martingale masks satisfy P(A_k) >= (1+eps)^{-2} for all k < n,
/// found on the exact walk law. The construction only changes at
/// c = j / sqrt(k), so those breakpoints are the candidates.
inline double smallest_certified_c(int n, double eps) {
    detail::check_steps(n, 52, "smallest_certified_c");
    const double need = 1.0 / ((1.0 + eps) * (1.0 + eps));
    std::vector<double> candidates{0.0};
    for (int k = 1; k < n; ++k) {
        for (int j = 1; j <= k; ++j) candidates.push_back(j / std::sqrt(static_cast<double>(k)));
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    for (double c : candidates) {
        // The construction is constant on [c_i, c_{i+1}); evaluate just above
        // c_i so that j / sqrt(k) * sqrt(k) cannot round below j.
        const double probe = c * (1.0 + 1e-12);
        std::vector<double> a;
        for (int k = 0; k < n; ++k) a.push_back(probe * std::sqrt(static_cast<double>(k)));
        const auto laws = truncated_walk_laws(a);
        bool ok = true;
        for (int k = 1; k < n && ok; ++k) ok = probability_within(laws[static_cast<std::size_t>(k)], k, a[k]) >= need;
        if (ok) return c;
    }
    return std::numeric_limits<double>::infinity();
}

}  // namespace sidonlab
