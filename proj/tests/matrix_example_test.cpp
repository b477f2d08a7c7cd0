#include "sidonlab/matrix_example.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace sidonlab {
namespace {

TEST(Haar, UnitaryAndUnitDeterminant) {
    std::mt19937_64 rng(1);
    for (int n = 1; n <= 8; ++n) {
        for (int trial = 0; trial < 20; ++trial) {
            const auto u = haar_unitary(n, rng);
            EXPECT_LE(unitarity_residual(u), 1e-12);
            EXPECT_NEAR(std::abs(u.determinant()), 1.0, 1e-10);
        }
    }
}

TEST(Haar, OneByOneIsUniformPhase) {
    std::mt19937_64 rng(2);
    std::complex<double> mean{};
    double second = 0.0;
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) {
        const auto u = haar_unitary(1, rng);
        mean += u(0, 0);
        second += std::real(u(0, 0) * u(0, 0));
    }
    EXPECT_LE(std::abs(mean) / draws, 3e-2);
    EXPECT_LE(std::abs(second) / draws, 3e-2);  // E u^2 = 0 for a uniform phase
}

TEST(Haar, SecondAndFourthMoments) {
    const int n = 3;
    const int draws = 10000;
    std::mt19937_64 rng(3);
    std::vector<double> sq(draws), quad(draws);
    for (int i = 0; i < draws; ++i) {
        const auto u = haar_unitary(n, rng);
        sq[i] = std::norm(u(1, 2));
        quad[i] = sq[i] * sq[i];
    }
    auto check = [&](const std::vector<double>& v, double expected) {
        double m = 0.0, m2 = 0.0;
        for (double x : v) {
            m += x;
            m2 += x * x;
        }
        m /= draws;
        const double se = std::sqrt((m2 / draws - m * m) / draws);
        EXPECT_LE(std::abs(m - expected), 5.0 * se) << expected;
    };
    check(sq, 1.0 / n);
    check(quad, 2.0 / (n * (n + 1.0)));
}

TEST(Witness, EightWithEpsOne) {
    const auto r = matrix_witness_bounds(8, 1.0);
    EXPECT_NEAR(r.c, std::sqrt(2.0 * std::log(8.0 / 3.0)), 1e-15);
    EXPECT_NEAR(r.chain_bound, 4.0 * std::sqrt(8.0) / (1.0 + r.c * std::sqrt(7.0)), 1e-12);
    EXPECT_NEAR(r.chain_bound, 2.40, 0.01);
    EXPECT_GE(r.lower_bound, 0.30 * 8);
    EXPECT_GE(r.lower_bound, r.chain_bound - 1e-12);
    EXPECT_LE(r.lower_bound, r.trivial_upper);
    ASSERT_TRUE(r.matrix_route.has_value());
    EXPECT_NEAR(*r.matrix_route, r.lower_bound, 1e-9);
}

TEST(Witness, SingleDimension) {
    const auto r = matrix_witness_bounds(1, 0.5);
    EXPECT_EQ(r.trace_norm_a, 1.0);
    EXPECT_EQ(r.sup_exact, 1.0);
    EXPECT_EQ(r.lower_bound, 1.0);
    EXPECT_NEAR(*r.matrix_route, 1.0, 1e-12);
}

TEST(Witness, LinearGrowth) {
    for (int n = 8; n <= 14; ++n) {
        const auto r = matrix_witness_bounds(n, 1.0);
        EXPECT_GE(r.lower_bound / n, 0.25) << n;
        EXPECT_GE(r.lower_bound, r.chain_bound - 1e-12);
        EXPECT_NEAR(*r.matrix_route, r.lower_bound, 1e-9);
    }
}

TEST(Sample, TraceDependsOnlyOnTheCube) {
    const auto trace = pisier_system(4, 1.0, std::nullopt);
    const auto s = sample_matrix_system(trace, 200, 7);
    const auto norms = trace.raw_l2_norms();
    const auto sum = trace.partial_sum(4);
    for (std::size_t i = 0; i < s.samples.size(); ++i) {
        std::complex<double> tr{};
        for (int k = 0; k < 4; ++k) tr += norms[k] * s.samples[i](k, k);
        EXPECT_NEAR(std::abs(tr - sum[s.atoms[i]] / 2.0), 0.0, 1e-12);
        EXPECT_LE(s.offdiag_norms[i], 2.0);
    }
}

TEST(Sample, ScheduleIndependent) {
    const auto trace = pisier_system(3, 1.0, std::nullopt);
    set_thread_count(1);
    const auto a = sample_matrix_system(trace, 64, 9);
    set_thread_count(3);
    const auto b = sample_matrix_system(trace, 64, 9);
    set_thread_count(0);
    for (std::size_t i = 0; i < a.samples.size(); ++i) EXPECT_EQ(a.samples[i], b.samples[i]);
    EXPECT_EQ(a.atoms, b.atoms);
}

TEST(Orthonormality, TwoByTwo) {
    const auto trace = pisier_system(2, 1.0, std::nullopt);
    const auto s = sample_matrix_system(trace, 10000, 11);
    const auto r = matrix_orthonormality_check(s);
    EXPECT_TRUE(r.pass) << r.max_z;
    EXPECT_EQ(r.diagonal_block_deviation, 0.0);
    // (0,1) against (1,0): entries 2 and 1.
    EXPECT_LE(std::abs(r.gram(2, 1)), 0.05);
    EXPECT_NEAR(r.gram(1, 1).real(), 1.0, 0.05);
    EXPECT_THROW(matrix_orthonormality_check(sample_matrix_system(trace, 10, 1)), std::invalid_argument);
}

TEST(Orthonormality, ThreeByThreeOnTruncatedDiagonal) {
    const auto trace = pisier_system(3, std::nullopt, 1.0);
    const auto s = sample_matrix_system(trace, 10000, 12);
    const auto r = matrix_orthonormality_check(s);
    EXPECT_TRUE(r.pass) << r.max_z;
    EXPECT_LE(r.diagonal_block_deviation, 1e-15);
}

TEST(Mgf, EmpiricalRatioIsFinite) {
    const auto trace = pisier_system(2, 1.0, std::nullopt);
    const auto s = sample_matrix_system(trace, 2000, 5);
    Eigen::MatrixXcd x = Eigen::MatrixXcd::Constant(2, 2, {0.3, 0.1});
    const double ratio = empirical_mgf_ratio(s, x);
    EXPECT_GT(ratio, 0.0);
    EXPECT_LT(ratio, 2.0);
}

}  // namespace
}  // namespace sidonlab
