#include "sidonlab/concentration.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"

namespace sidonlab {
namespace {

double binomial_tail(int n, double t) {
    double total = 0.0;
    double coef = 1.0;  // C(n, j)
    for (int j = 0; j <= n; ++j) {
        if (std::abs(2 * j - n) > t) total += coef;
        coef = coef * (n - j) / (j + 1);
    }
    return std::ldexp(total, -n);
}

TEST(Mgf, RademacherSingleStep) {
    const auto t = rademacher_system(1);
    const auto r = mgf_azuma_check(t, 1.0, std::vector<double>{1.0});
    EXPECT_NEAR(r.raw.lhs, std::cosh(1.0), 1e-15);
    EXPECT_NEAR(r.raw.rhs, std::exp(0.5), 1e-15);
    EXPECT_TRUE(r.raw.pass);
    EXPECT_FALSE(r.raw.log_domain);
}

TEST(Mgf, ZeroTIsEquality) {
    const auto t = pisier_system(6, std::nullopt, 2.0);
    const auto r = mgf_azuma_check(t, 0.0, std::vector<double>(6, 0.7));
    EXPECT_EQ(r.raw.lhs, 1.0);
    EXPECT_EQ(r.raw.rhs, 1.0);
    EXPECT_EQ(r.raw.slack, 0.0);
    EXPECT_TRUE(r.raw.pass && r.normalized.pass);
}

TEST(Mgf, PisierRandomParametersMatchPathOracle) {
    const int n = 10;
    const double c = 2.0;
    const auto trace = pisier_system(n, std::nullopt, c);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> ut(-3.0, 3.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> x(n);
        for (double& v : x) v = g(rng);
        const double t = ut(rng);
        const auto r = mgf_azuma_check(trace, t, x);
        EXPECT_TRUE(r.raw.pass) << r.raw.slack;
        EXPECT_TRUE(r.normalized.pass) << r.normalized.slack;
        double oracle_sum = 0.0;
        for (std::uint64_t a = 0; a < (1U << n); ++a) {
            const auto path = oracle::truncated_path(oracle::signs_of(a, n), [&](int k) { return c * std::sqrt(double(k)); });
            double s = 0.0;
            for (int k = 1; k <= n; ++k) s += x[k - 1] * (path[k] - path[k - 1]);
            oracle_sum += std::exp(t * s);
        }
        EXPECT_NEAR(r.raw.lhs, oracle_sum / (1U << n), 1e-12 * r.raw.lhs);
        const auto flipped = mgf_azuma_check(trace, -t, std::vector<double>(x.begin(), x.end()));
        std::vector<double> neg(x);
        for (double& v : neg) v = -v;
        const auto both = mgf_azuma_check(trace, -t, neg);
        EXPECT_NEAR(both.raw.lhs, r.raw.lhs, 1e-12 * r.raw.lhs);
        EXPECT_NEAR(flipped.raw.rhs, r.raw.rhs, 1e-12 * r.raw.rhs);
    }
}

TEST(Mgf, LogDomainForHugeExponents) {
    const auto trace = rademacher_system(4);
    const auto r = mgf_azuma_check(trace, 60.0, std::vector<double>(4, 10.0));
    EXPECT_TRUE(r.raw.log_domain);
    EXPECT_TRUE(r.raw.pass);
    EXPECT_NEAR(r.raw.lhs, 4 * std::log(std::cosh(600.0)), 1e-9);
}

TEST(Tail, Examples) {
    const auto r = tail_and_levy_check(4, 2.0, std::numeric_limits<double>::infinity());
    EXPECT_EQ(r.tail.lhs, 0.125);
    EXPECT_NEAR(r.tail.rhs, 2.0 * std::exp(-0.5), 1e-15);
    EXPECT_TRUE(r.tail.pass);
    const auto l = tail_and_levy_check(2, 1.0, std::numeric_limits<double>::infinity());
    EXPECT_EQ(l.levy.lhs, 0.5);
    EXPECT_EQ(l.levy.rhs, 1.0);
    EXPECT_TRUE(l.levy.pass);
    for (int n = 1; n <= 12; ++n) {
        const auto z = tail_and_levy_check(n, n, 2.0);
        EXPECT_EQ(z.tail.lhs, 0.0);
        EXPECT_EQ(z.levy.lhs, 0.0);
        EXPECT_EQ(z.levy.rhs, 0.0);
        EXPECT_TRUE(z.tail.pass && z.levy.pass);
    }
}

TEST(Tail, MatchesBinomialAndIsMonotone) {
    for (int n = 1; n <= 24; ++n) {
        double prev = 1.0;
        for (int ti = 0; ti <= 2 * n; ++ti) {
            const double t = 0.5 * ti;
            const auto r = tail_and_levy_check(n, t, std::numeric_limits<double>::infinity());
            EXPECT_EQ(r.tail.lhs, binomial_tail(n, t)) << n << " " << t;
            EXPECT_LE(r.tail.lhs, prev);
            prev = r.tail.lhs;
            EXPECT_TRUE(r.tail.pass && r.levy.pass);
        }
    }
}

TEST(Tail, MaximalTailMatchesPathEnumeration) {
    for (int n = 1; n <= 12; ++n) {
        for (int t = 0; t <= n; ++t) {
            std::uint64_t hits = 0;
            for (std::uint64_t a = 0; a < (1U << n); ++a) {
                const auto e = oracle::signs_of(a, n);
                int s = 0, sup = 0;
                for (int k = 1; k <= n; ++k) sup = std::max(sup, std::abs(s += e[k]));
                if (sup > t) ++hits;
            }
            EXPECT_EQ(simple_walk_maximal_tail(n, t), std::ldexp(double(hits), -n));
        }
    }
}

TEST(PNorm, ParsevalAtTwo) {
    const auto sys = pisier_system(6, std::nullopt, 2.0).normalized_system();
    const auto r = pnorm_growth_check(sys, std::vector<double>{1, -2, 3, 0.5, 0, 1}, 2, 1.0);
    EXPECT_NEAR(r.lhs, 1.0 / std::sqrt(2.0), 1e-14);
    EXPECT_TRUE(r.pass);
}

TEST(PNorm, RademacherFourthMoment) {
    const auto sys = rademacher_system(8).raw_system();
    const auto r = pnorm_growth_check(sys, std::vector<double>(8, 1.0), 4, 1.0);
    // E(sum x eps)^4 = 3 (sum x^2)^2 - 2 sum x^4.
    const double moment = 3.0 * 64.0 - 2.0 * 8.0;
    EXPECT_NEAR(r.lhs, std::pow(moment, 0.25) / (2.0 * std::sqrt(8.0)), 1e-14);
    EXPECT_LE(r.lhs, std::pow(3.0, 0.25) / 2.0);
}

TEST(PNorm, PisierRandomVectorsBelowOnePlusEps) {
    const auto trace = pisier_system(10, std::nullopt, 2.0);
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> x(10);
        for (double& v : x) v = g(rng);
        const auto r = pnorm_growth_check(trace, x, 8);
        EXPECT_EQ(r.rhs, 1.0 + trace.eps);
        EXPECT_TRUE(r.pass) << r.lhs;
    }
}

TEST(PNorm, RejectsOddOrLargeP) {
    const auto sys = rademacher_system(2).raw_system();
    const std::vector<double> x{1, 1};
    EXPECT_THROW(pnorm_growth_check(sys, x, 3, 1.0), std::invalid_argument);
    EXPECT_THROW(pnorm_growth_check(sys, x, 34, 1.0), std::invalid_argument);
}

TEST(Subgaussian, SingleSignHasBetaOne) {
    const auto sys = rademacher_system(1).raw_system();
    const auto e = subgaussian_beta_estimate(sys, {{3.0}});
    EXPECT_NEAR(e.beta, 1.0, 1e-10);
    EXPECT_TRUE(e.lower_estimate);
}

TEST(Subgaussian, BisectionSolvesTheEquation) {
    const auto sys = pisier_system(8, std::nullopt, 2.0).normalized_system();
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    std::vector<std::vector<double>> batch(6, std::vector<double>(8));
    for (auto& x : batch)
        for (double& v : x) v = g(rng);
    const auto e = subgaussian_beta_estimate(sys, batch);
    for (std::size_t i = 0; i < batch.size(); ++i) {
        std::vector<double> x = batch[i];
        double l2 = 0.0;
        for (double v : x) l2 += v * v;
        for (double& v : x) v /= std::sqrt(l2);
        const auto f = sys.combination(x);
        double integral = 0.0;
        for (double v : f.values()) integral += std::exp(v * v / (e.per_vector[i] * e.per_vector[i]));
        EXPECT_NEAR(integral / 256.0, std::exp(1.0), 1e-9);
    }
}

}  // namespace
}  // namespace sidonlab
