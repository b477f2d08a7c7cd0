#pragma once

// Exact laws of simple and truncated +-1 walks by integer counting over
// paths. Counts are path multiplicities out of 2^k, so probabilities are
// exact dyadic rationals for k <= 52.

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace sidonlab {

inline constexpr int kMaxWalkSteps = 52;

/// Path counts of a walk indexed by value + offset, offset = step bound.
struct WalkLaw {
    int offset = 0;
    std::vector<std::uint64_t> counts;

    double probability(std::uint64_t count, int steps) const { return std::ldexp(static_cast<double>(count), -steps); }
};

/// Law of S_0..S_n for S_k = S_{k-1} + eps_k 1{|S_{k-1}| <= a_{k-1}}, where
/// thresholds holds a_0..a_{n-1}. Returns one WalkLaw per k = 0..n.
inline std::vector<WalkLaw> truncated_walk_laws(std::span<const double> thresholds) {
    const int n = static_cast<int>(thresholds.size());
    if (n > kMaxWalkSteps) throw std::invalid_argument("truncated_walk_laws: too many steps for exact counting");
    std::vector<WalkLaw> laws;
    laws.reserve(static_cast<std::size_t>(n) + 1);
    WalkLaw cur{n, std::vector<std::uint64_t>(2 * static_cast<std::size_t>(n) + 1, 0)};
    cur.counts[static_cast<std::size_t>(n)] = 1;
    laws.push_back(cur);
    for (int k = 1; k <= n; ++k) {
        WalkLaw next{n, std::vector<std::uint64_t>(cur.counts.size(), 0)};
        const double a = thresholds[static_cast<std::size_t>(k - 1)];
        for (std::size_t i = 0; i < cur.counts.size(); ++i) {
            const std::uint64_t w = cur.counts[i];
            if (w == 0) continue;
            const int s = static_cast<int>(i) - n;
            if (k == 1 || std::abs(s) <= a) {
                next.counts[i - 1] += w;
                next.counts[i + 1] += w;
            } else {
                next.counts[i] += 2 * w;
            }
        }
        laws.push_back(next);
        cur = std::move(next);
    }
    return laws;
}

/// P(|S| <= a) under a law recorded after `steps` steps.
inline double probability_within(const WalkLaw& law, int steps, double a) {
    std::uint64_t c = 0;
    for (std::size_t i = 0; i < law.counts.size(); ++i) {
        if (std::abs(static_cast<int>(i) - law.offset) <= a) c += law.counts[i];
    }
    return law.probability(c, steps);
}

/// P(|M_n| > t) for the untruncated simple walk.
inline double simple_walk_tail(int n, double t) {
    std::vector<double> no_truncation(static_cast<std::size_t>(n), static_cast<double>(n) + 1.0);
    const auto laws = truncated_walk_laws(no_truncation);
    return 1.0 - probability_within(laws.back(), n, t);
}

/// P(sup_{1<=k<=n} |M_k| > t) for the simple walk.
inline double simple_walk_maximal_tail(int n, double t) {
    if (n > kMaxWalkSteps) throw std::invalid_argument("simple_walk_maximal_tail: too many steps");
    const std::size_t width = 2 * static_cast<std::size_t>(n) + 1;
    // Paths that have not yet exceeded t, by current value; exceeded paths are
    // only counted.
    std::vector<std::uint64_t> live(width, 0);
    live[static_cast<std::size_t>(n)] = 1;
    std::uint64_t exceeded = 0;
    for (int k = 1; k <= n; ++k) {
        std::vector<std::uint64_t> next(width, 0);
        exceeded *= 2;
        for (std::size_t i = 0; i < width; ++i) {
            if (live[i] == 0) continue;
            for (const std::size_t idx : {i - 1, i + 1}) {
                if (std::abs(static_cast<int>(idx) - n) > t) {
                    exceeded += live[i];
                } else {
                    next[idx] += live[i];
                }
            }
        }
        live = std::move(next);
    }
    return std::ldexp(static_cast<double>(exceeded), -n);
}

}  // namespace sidonlab
