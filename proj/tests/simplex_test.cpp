#include "sidonlab/simplex.hpp"

#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"

namespace sidonlab {
namespace {

LpProblem make(std::initializer_list<double> c, std::initializer_list<std::initializer_list<double>> a,
               std::initializer_list<double> b) {
    LpProblem p;
    p.objective = Eigen::Map<const Eigen::VectorXd>(c.begin(), static_cast<Eigen::Index>(c.size()));
    p.constraints.resize(static_cast<Eigen::Index>(a.size()), static_cast<Eigen::Index>(c.size()));
    Eigen::Index i = 0;
    for (const auto& row : a) {
        Eigen::Index j = 0;
        for (double v : row) p.constraints(i, j++) = v;
        ++i;
    }
    p.rhs = Eigen::Map<const Eigen::VectorXd>(b.begin(), static_cast<Eigen::Index>(b.size()));
    return p;
}

TEST(LpSolve, Interval) {
    const auto s = lp_solve(make({1}, {{1}, {-1}}, {1, 1}));
    ASSERT_EQ(s.status, LpStatus::optimal);
    EXPECT_NEAR(s.value, 1.0, 1e-12);
    EXPECT_NEAR(s.x(0), 1.0, 1e-12);
    EXPECT_TRUE(s.certified(1e-9));
}

TEST(LpSolve, RotatedSquare) {
    const auto s = lp_solve(make({1, 1}, {{1, 1}, {1, -1}, {-1, 1}, {-1, -1}}, {1, 1, 1, 1}));
    ASSERT_EQ(s.status, LpStatus::optimal);
    EXPECT_NEAR(s.value, 1.0, 1e-12);
    EXPECT_TRUE(s.certified(1e-9));
}

TEST(LpSolve, Unbounded) {
    const auto s = lp_solve(make({1, 0}, {{0, 1}, {0, -1}}, {1, 1}));
    EXPECT_EQ(s.status, LpStatus::unbounded);
}

TEST(LpSolve, Infeasible) {
    const auto s = lp_solve(make({1}, {{1}, {-1}}, {-1, -1}));
    EXPECT_EQ(s.status, LpStatus::infeasible);
}

TEST(LpSolve, InfeasibleWithUnboundedDirection) {
    // x1 <= -1 and -x1 <= -1 is empty whatever x2 does.
    const auto s = lp_solve(make({0, 1}, {{1, 0}, {-1, 0}}, {-1, -1}));
    EXPECT_EQ(s.status, LpStatus::infeasible);
}

TEST(LpSolve, NegativeRhsFeasible) {
    // max -x s.t. x >= 2 (i.e. -x <= -2), x <= 5.
    const auto s = lp_solve(make({-1}, {{-1}, {1}}, {-2, 5}));
    ASSERT_EQ(s.status, LpStatus::optimal);
    EXPECT_NEAR(s.value, -2.0, 1e-12);
    EXPECT_TRUE(s.certified(1e-9));
}

TEST(LpSolve, RandomPolytopesAgreeWithVertexEnumeration) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int trial = 0; trial < 60; ++trial) {
        const Eigen::Index n = 1 + trial % 3;
        const Eigen::Index m = n + 2 + trial % 5;
        Eigen::MatrixXd rows(m, n);
        for (Eigen::Index i = 0; i < m; ++i)
            for (Eigen::Index j = 0; j < n; ++j) rows(i, j) = u(rng);
        // Box rows keep the region bounded.
        Eigen::MatrixXd all(m + n, n);
        all << rows, Eigen::MatrixXd::Identity(n, n);
        const double oracle_value = oracle::sidon_by_vertex_enumeration(all);
        double best = 0.0;
        for (std::uint64_t o = 0; o < (std::uint64_t{1} << n); ++o) {
            LpProblem p;
            p.objective.resize(n);
            for (Eigen::Index k = 0; k < n; ++k) p.objective(k) = ((o >> k) & 1U) != 0 ? -1.0 : 1.0;
            p.constraints.resize(2 * all.rows(), n);
            p.constraints << all, -all;
            p.rhs = Eigen::VectorXd::Ones(2 * all.rows());
            const auto s = lp_solve(p);
            ASSERT_TRUE(s.certified(1e-9));
            best = std::max(best, s.value);
        }
        EXPECT_NEAR(best, oracle_value, 1e-8) << trial;
    }
}

TEST(LpSolve, DegenerateRedundantRows) {
    // Many copies of the same constraints, plus the trivial one.
    const auto s = lp_solve(make({1, 2}, {{1, 0}, {1, 0}, {0, 1}, {0, 1}, {1, 1}, {-1, 0}, {0, -1}}, {1, 1, 1, 1, 2, 0, 0}));
    ASSERT_EQ(s.status, LpStatus::optimal);
    EXPECT_NEAR(s.value, 3.0, 1e-12);
    EXPECT_TRUE(s.certified(1e-9));
}

}  // namespace
}  // namespace sidonlab
