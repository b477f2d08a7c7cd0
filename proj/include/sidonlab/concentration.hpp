#pragma once

// Exact checks of the concentration inequalities used by the constructions:
// the Azuma moment generating bound, the Gaussian tail of the truncated walk,
// Levy's maximal inequality and sqrt(p) growth of L_p norms.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sidonlab/config.hpp"
#include "sidonlab/constructions.hpp"
#include "sidonlab/cube.hpp"
#include "sidonlab/parallel.hpp"
#include "sidonlab/walk.hpp"

namespace sidonlab {

struct ConcentrationReport {
    std::string id;
    double t = 0.0;
    std::vector<double> x;
    int p = 0;
    int n = 0;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;
    bool pass = false;
    bool log_domain = false;           // lhs and rhs are natural logs
    std::optional<double> chain_rhs;   // second link of a chained inequality

    void settle() {
        slack = rhs - lhs;
        pass = slack >= -kReportTolerance;
        if (chain_rhs) pass = pass && (*chain_rhs - rhs) >= -kReportTolerance;
    }
};

namespace detail {

// Sets lhs/rhs from log values, staying in linear scale when both fit.
inline void set_exponential(ConcentrationReport& r, double log_lhs, double log_rhs, double linear_lhs) {
    if (log_lhs < 700.0 && log_rhs < 700.0) {
        r.lhs = linear_lhs;
        r.rhs = std::exp(log_rhs);
    } else {
        r.log_domain = true;
        r.lhs = log_lhs;
        r.rhs = log_rhs;
    }
    r.settle();
}

// log E exp(g) and E exp(g) (the latter inf on overflow).
inline std::pair<double, double> log_mean_exp(const CubeFunction& g) {
    const auto v = g.values();
    const double top = chunked_max(v.size(), [&](std::size_t a) { return v[a]; });
    const double scaled = chunked_sum(v.size(), [&](std::size_t a) { return std::exp(v[a] - top); }) * g.space().weight();
    const double log_value = top + std::log(scaled);
    const double linear = top < 700.0 ? chunked_sum(v.size(), [&](std::size_t a) { return std::exp(v[a]); }) * g.space().weight()
                                      : std::numeric_limits<double>::infinity();
    return {log_value, linear};
}

inline double squared_norm(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
}

}  // namespace detail

struct MgfReports {
    ConcentrationReport raw;         // E e^{t sum x f} <= e^{t^2 |x|^2 / 2}
    ConcentrationReport normalized;  // E e^{t sum x phi} <= e^{(1+eps)^2 t^2 |x|^2 / 2}
};

inline MgfReports mgf_azuma_check(const ConstructionTrace& trace, double t, std::span<const double> x) {
    if (static_cast<int>(x.size()) != trace.steps) throw std::invalid_argument("mgf_azuma_check: x must have n entries");
    for (double v : x) {
        if (!std::isfinite(v)) throw std::invalid_argument("mgf_azuma_check: x must be finite");
    }
    if (!std::isfinite(t)) throw std::invalid_argument("mgf_azuma_check: t must be finite");
    const double q = detail::squared_norm(x);
    std::vector<double> tx(x.begin(), x.end());
    for (double& v : tx) v *= t;

    MgfReports out;
    for (ConcentrationReport* r : {&out.raw, &out.normalized}) {
        r->t = t;
        r->x.assign(x.begin(), x.end());
        r->n = trace.steps;
    }
    out.raw.id = "azuma_mgf";
    const auto [log_raw, lin_raw] = detail::log_mean_exp(trace.raw_system().combination(tx));
    detail::set_exponential(out.raw, log_raw, t * t * q / 2.0, lin_raw);

    out.normalized.id = "azuma_mgf_normalized";
    const double grow = (1.0 + trace.eps) * (1.0 + trace.eps);
    const auto [log_norm, lin_norm] = detail::log_mean_exp(trace.normalized_system().combination(tx));
    detail::set_exponential(out.normalized, log_norm, grow * t * t * q / 2.0, lin_norm);
    return out;
}

struct TailLevyReports {
    ConcentrationReport tail;  // P(|S_n| > t) <= 2 e^{-t^2/2n}
    ConcentrationReport levy;  // P(sup|M_k| > t) <= 2 P(|M_n| > t) <= 4 e^{-t^2/2n}
};

/// S is the truncated walk with a_k = c sqrt(k) (c = inf gives the simple
/// walk); M is the simple walk.
inline TailLevyReports tail_and_levy_check(int n, double t, double c) {
    if (n < 1 || n > 24) throw std::invalid_argument("tail_and_levy_check: n must lie in [1, 24]");
    if (!(c > 0.0)) throw std::invalid_argument("tail_and_levy_check: c must be > 0");
    std::vector<double> a;
    for (int k = 0; k < n; ++k) a.push_back(std::isinf(c) ? c : c * std::sqrt(static_cast<double>(k)));
    const auto laws = truncated_walk_laws(a);
    const double gauss = 2.0 * std::exp(-t * t / (2.0 * n));

    TailLevyReports out;
    out.tail.id = "truncated_tail";
    out.tail.t = t;
    out.tail.n = n;
    out.tail.lhs = 1.0 - probability_within(laws.back(), n, t);
    out.tail.rhs = gauss;
    out.tail.settle();

    out.levy.id = "levy_maximal";
    out.levy.t = t;
    out.levy.n = n;
    out.levy.lhs = simple_walk_maximal_tail(n, t);
    out.levy.rhs = 2.0 * simple_walk_tail(n, t);
    out.levy.chain_rhs = 2.0 * gauss;
    out.levy.settle();
    return out;
}

/// ||sum x phi||_p / (sqrt(p) ||x||_2) against beta'.
inline ConcentrationReport pnorm_growth_check(const OrthoSystem& sys, std::span<const double> x, int p, double beta_prime) {
    if (p < 2 || p > 32 || p % 2 != 0) throw std::invalid_argument("pnorm_growth_check: p must be an even integer in [2, 32]");
    if (x.size() != sys.size()) throw std::invalid_argument("pnorm_growth_check: x must have one entry per function");
    const double l2 = std::sqrt(detail::squared_norm(x));
    if (l2 == 0.0) throw std::invalid_argument("pnorm_growth_check: x must be non-zero");
    ConcentrationReport r;
    r.id = "pnorm_growth";
    r.x.assign(x.begin(), x.end());
    r.p = p;
    r.n = static_cast<int>(sys.size());
    r.lhs = lp_norm(sys.combination(x), p) / (std::sqrt(static_cast<double>(p)) * l2);
    r.rhs = beta_prime;
    r.settle();
    return r;
}

/// Construction form: normalized system, default beta' = 1 + eps.
inline ConcentrationReport pnorm_growth_check(const ConstructionTrace& trace, std::span<const double> x, int p,
                                              std::optional<double> beta_prime = std::nullopt) {
    return pnorm_growth_check(trace.normalized_system(), x, p, beta_prime.value_or(1.0 + trace.eps));
}

struct SubgaussianEstimate {
    double beta = 0.0;  // max over the batch; a lower estimate of the true constant
    std::vector<double> per_vector;
    bool lower_estimate = true;
};

/// Smallest beta with E exp(|sum x phi|^2 / beta^2) <= e for each unit x of
/// the batch (x is rescaled to unit l2 norm), by bisection.
inline SubgaussianEstimate subgaussian_beta_estimate(const OrthoSystem& sys, const std::vector<std::vector<double>>& batch) {
    auto solve = [&](std::size_t i) {
        std::vector<double> x = batch[i];
        const double l2 = std::sqrt(detail::squared_norm(x));
        if (l2 == 0.0) throw std::invalid_argument("subgaussian_beta_estimate: zero vector in batch");
        for (double& v : x) v /= l2;
        const auto g = sys.combination(x);
        const double sup = sup_norm(g);
        if (sup == 0.0) return 0.0;
        auto log_integral = [&](double beta) {
            CubeFunction sq = g * g;
            return detail::log_mean_exp((1.0 / (beta * beta)) * sq).first;
        };
        // At beta = sup the integrand is <= e everywhere, so it passes.
        double lo = 0.0, hi = sup;
        for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (log_integral(mid) <= 1.0) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        return hi;
    };
    SubgaussianEstimate out;
    out.per_vector = parallel_map(batch.size(), solve);
    for (double b : out.per_vector) out.beta = std::max(out.beta, b);
    return out;
}

}  // namespace sidonlab
