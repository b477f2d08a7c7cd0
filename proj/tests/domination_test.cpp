#include "sidonlab/domination.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

namespace sidonlab {
namespace {

FiniteLaw random_law(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> pairs(1, 3);
    FiniteLaw law;
    const int p = pairs(rng);
    for (int j = 0; j < p; ++j) {
        const double a = -u(rng), b = u(rng);
        if (b - a < 1e-3) continue;
        const double w = 1.0 / p;
        law.push_back({a, w * b / (b - a)});
        law.push_back({b, w * -a / (b - a)});
    }
    if (law.empty()) law.push_back({0.0, 1.0});
    // Renormalize the weights and recentre the mean on the first atom pair.
    double total = 0.0;
    for (auto& [v, q] : law) total += q;
    for (auto& [v, q] : law) q /= total;
    return law;
}

Vec random_vec(std::mt19937_64& rng, int d) {
    std::uniform_int_distribution<int> ix(-5, 5);
    Vec v(static_cast<std::size_t>(d));
    for (double& e : v) e = ix(rng);
    return v;
}

// Independent brute force of both sides of the martingale inequality.
std::pair<double, double> brute_mds(const VectorSequenceInstance& inst) {
    const int k = inst.steps();
    const std::size_t dim = inst.x[0].size();
    double lhs = 0.0;
    for (std::uint64_t a = 0; a < inst.space.atom_count(); ++a) {
        double m = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            double v = inst.d0 * inst.x[0][i];
            for (int n = 1; n <= k; ++n) v += inst.d[n - 1][a] * inst.x[n][i];
            m = std::max(m, std::abs(v));
        }
        lhs += m;
    }
    double rhs = 0.0;
    for (std::uint64_t e = 0; e < (std::uint64_t{1} << k); ++e) {
        double m = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            double v = inst.d0 * inst.x[0][i];
            for (int n = 1; n <= k; ++n) v += (((e >> (n - 1)) & 1U) != 0 ? 1.0 : -1.0) * inst.x[n][i];
            m = std::max(m, std::abs(v));
        }
        rhs += m;
    }
    return {lhs / inst.space.atom_count(), rhs / (std::uint64_t{1} << k)};
}

TEST(TwoPoint, Examples) {
    const Vec x0{1.0, -2.0}, x1{3.0, 0.5};
    const auto zero = check_two_point({{0.0, 1.0}}, x0, x1);
    EXPECT_DOUBLE_EQ(zero.check.lhs, 2.0);
    EXPECT_TRUE(zero.check.pass);
    const auto signs = check_two_point({{-1.0, 0.5}, {1.0, 0.5}}, x0, x1);
    EXPECT_EQ(signs.check.slack, 0.0);
    EXPECT_TRUE(signs.check.pass);
    const auto skew = check_two_point({{-1.0, 1.0 / 3.0}, {0.5, 2.0 / 3.0}}, {0.0}, {1.0});
    EXPECT_NEAR(skew.check.lhs, 2.0 / 3.0, 1e-15);
    EXPECT_EQ(skew.check.rhs, 1.0);
    EXPECT_TRUE(skew.check.pass && skew.routes_agree);
}

TEST(TwoPoint, Errors) {
    EXPECT_THROW(check_two_point({{0.5, 1.0}}, {1.0}, {1.0}), std::invalid_argument);
    EXPECT_THROW(check_two_point({{-2.0, 0.5}, {2.0, 0.5}}, {1.0}, {1.0}), std::invalid_argument);
    EXPECT_THROW(check_two_point({{-1.0, 0.5}, {1.0, 0.4}}, {1.0}, {1.0}), std::invalid_argument);
}

TEST(TwoPoint, RandomInstances) {
    std::mt19937_64 rng(30);
    std::uniform_int_distribution<int> dims(1, 4);
    for (int trial = 0; trial < 500; ++trial) {
        auto law = random_law(rng);
        double mean = 0.0;
        for (auto& [v, q] : law) mean += v * q;
        if (std::abs(mean) > 1e-14) continue;
        const int d = dims(rng);
        const auto r = check_two_point(law, random_vec(rng, d), random_vec(rng, d));
        EXPECT_TRUE(r.check.pass) << trial;
        EXPECT_TRUE(r.routes_agree);
        EXPECT_TRUE(r.pointwise_jensen);
    }
}

TEST(ConditionalTwoPoint, AtomicAlgebra) {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const CubeSpace s(4);
    for (int trial = 0; trial < 50; ++trial) {
        // phi: centred on each atom of the algebra of the low 2 bits.
        std::vector<double> v(16);
        for (std::uint64_t c = 0; c < 4; ++c) {
            double mean = 0.0;
            for (std::uint64_t f = 0; f < 4; ++f) mean += (v[c + 4 * f] = u(rng));
            for (std::uint64_t f = 0; f < 4; ++f) v[c + 4 * f] = (v[c + 4 * f] - mean / 4.0) / 2.0;
        }
        const CubeFunction phi(s, v);
        std::vector<Vec> cell_vectors;
        for (int c = 0; c < 4; ++c) cell_vectors.push_back(random_vec(rng, 3));
        std::vector<Vec> x0(16);
        for (std::uint64_t a = 0; a < 16; ++a) x0[a] = cell_vectors[a & 3U];
        const auto r = check_conditional_two_point(phi, 2, x0, random_vec(rng, 3));
        EXPECT_TRUE(r.pass) << r.detail;
    }
    // x0 that is not measurable is rejected.
    std::vector<Vec> bad(16, Vec{0.0});
    bad[5] = Vec{1.0};
    EXPECT_THROW(check_conditional_two_point(CubeFunction::coordinate(s, 3), 2, bad, Vec{1.0}), std::invalid_argument);
}

TEST(Mds, SignsGiveEquality) {
    const auto t = rademacher_system(5);
    std::mt19937_64 rng(1);
    std::vector<Vec> x;
    for (int n = 0; n <= 5; ++n) x.push_back(random_vec(rng, 3));
    const auto r = check_mds_domination(instance_from_trace(t, x));
    EXPECT_NEAR(r.check.lhs, r.check.rhs, 1e-12);
    EXPECT_TRUE(r.check.pass);
    for (double h : r.hybrid) EXPECT_NEAR(h, r.check.lhs, 1e-12);
}

TEST(Mds, PisierTraceAgainstBruteForce) {
    const auto t = pisier_system(5, std::nullopt, 2.0);
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Vec> x;
        for (int n = 0; n <= 5; ++n) x.push_back(random_vec(rng, 2));
        const auto inst = instance_from_trace(t, x);
        const auto r = check_mds_domination(inst);
        const auto [lhs, rhs] = brute_mds(inst);
        EXPECT_NEAR(r.check.lhs, lhs, 1e-12);
        EXPECT_NEAR(r.check.rhs, rhs, 1e-12);
        EXPECT_TRUE(r.check.pass);
        EXPECT_TRUE(r.chain_monotone);
    }
}

TEST(Mds, PredictableMasks) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        const auto inst = predictable_mask_instance(1 + trial % 7, 1 + trial % 4, rng);
        const auto r = check_mds_domination(inst);
        EXPECT_TRUE(r.check.pass) << trial << " " << r.check.detail;
    }
}

TEST(Mds, RandomNonSymmetricDifferences) {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 100; ++trial) {
        const int k = 1 + trial % 5;
        const int r = 1 + trial % 3;
        if (k * r > 12) continue;
        const auto inst = random_mds_instance(k, 1 + trial % 4, r, rng);
        const auto rep = check_mds_domination(inst);
        const auto [lhs, rhs] = brute_mds(inst);
        EXPECT_NEAR(rep.check.lhs, lhs, 1e-12);
        EXPECT_NEAR(rep.check.rhs, rhs, 1e-12);
        EXPECT_TRUE(rep.check.pass) << trial << " " << rep.check.detail;
    }
}

TEST(Mds, InvalidInstancesReportTheStep) {
    std::mt19937_64 rng(5);
    auto inst = random_mds_instance(3, 2, 1, rng);
    inst.d[1] = inst.d[1] + CubeFunction::constant(inst.space, 0.0) + 0.0 * inst.d[1];
    inst.d[2] = CubeFunction::constant(inst.space, 0.5);
    try {
        check_mds_domination(inst);
        FAIL();
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("step 3"), std::string::npos) << e.what();
    }
}

TEST(Mm3, ValueAndViolation) {
    const auto r = mm3_counterexample(64);
    EXPECT_NEAR(r.rhs, 4.0 * std::sqrt(2.0) / std::numbers::pi, 1e-6);
    EXPECT_EQ(r.lhs, 2.0);
    EXPECT_TRUE(r.violated);
    EXPECT_GT(r.lhs - r.rhs, 0.19);
    const auto finer = mm3_counterexample(128);
    EXPECT_LT(std::abs(finer.rhs - r.rhs), 1e-8);
    EXPECT_THROW(mm3_counterexample(32), std::invalid_argument);
}

TEST(Union, RademacherPairWithConstantTwo) {
    const auto f = rademacher_system(3).raw_system();
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Vec> x;
        for (int n = 0; n < 6; ++n) x.push_back(random_vec(rng, 3));
        EXPECT_TRUE(check_union_domination(f, f, 1.0, 1.0, x).pass);
    }
}

TEST(Tensor, ConstantOneIsEquality) {
    const CubeSpace s(1);
    const OrthoSystem ones(s, {CubeFunction::constant(s, 1.0), CubeFunction::constant(s, 1.0), CubeFunction::constant(s, 1.0)});
    std::mt19937_64 rng(7);
    for (int m : {2, 4}) {
        std::vector<Vec> x;
        for (int n = 0; n < 3; ++n) x.push_back(random_vec(rng, 2));
        const auto r = check_tensor_domination(ones, x, m);
        EXPECT_NEAR(r.lhs, r.rhs, 1e-12);
        EXPECT_TRUE(r.pass);
    }
}

TEST(Tensor, PisierDiagonal) {
    const auto phi = pisier_system(4, std::nullopt, 2.0).raw_system();
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<Vec> x;
        for (int n = 0; n < 4; ++n) x.push_back(random_vec(rng, 2));
        EXPECT_TRUE(check_tensor_domination(phi, x, 2).pass);
        EXPECT_TRUE(check_tensor_domination(phi, x, 4).pass);
    }
    const CubeSpace s(2);
    const OrthoSystem big(s, {CubeFunction::coordinate(s, 0), 1.5 * CubeFunction::coordinate(s, 1)});
    std::vector<Vec> x(2, Vec{1.0});
    EXPECT_THROW(check_tensor_domination(big, x, 2), std::invalid_argument);
}

TEST(Batch, UnionAndTensor) {
    const auto f = rademacher_system(3).raw_system();
    const auto g = pisier_system(3, std::nullopt, 1.0).raw_system();
    const auto checks = check_union_and_tensor_domination(f, g, 1.0, 1.0, 10, 3);
    EXPECT_EQ(checks.size(), 50U);
    for (const auto& c : checks) EXPECT_TRUE(c.pass) << c.detail;
}

}  // namespace
}  // namespace sidonlab
