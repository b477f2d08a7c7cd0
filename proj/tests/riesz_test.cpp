#include "sidonlab/riesz.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "sidonlab/constructions.hpp"
#include "sidonlab/sidon.hpp"

namespace sidonlab {
namespace {

std::vector<int> some_z0(int n, int m) {
    std::vector<int> z(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) z[static_cast<std::size_t>(i)] = (3 * i + 1) % m;
    return z;
}

// Closed form of the certified bound: surviving layers k >= 3 odd, each with
// coefficient magnitude 2 eps^{k-1} / 2^k.
double expected_vee_r(int n, double eps) {
    double s = 0.0;
    for (int k = 3; k <= n; k += 2) s += 2.0 * std::pow(eps, k - 1) / std::ldexp(1.0, k);
    return s;
}

TEST(TorusGrid, Validation) {
    EXPECT_THROW(TorusGrid(3, 4), std::invalid_argument);
    EXPECT_THROW(TorusGrid(1, 3), std::invalid_argument);
    EXPECT_NO_THROW(TorusGrid(3, 5));
    EXPECT_THROW(TorusGrid(6, 16), SizeError);
    const TorusGrid g(3, 8);
    const std::vector<int> e{7, 0, 3};
    EXPECT_EQ(g.decode(g.encode(e)), e);
    EXPECT_EQ(g.centered(7), -1);
}

TEST(Riesz, RejectsBadEps) {
    const TorusGrid g(2, 4);
    EXPECT_THROW(decompose(g, {0, 0}, 0.0), std::invalid_argument);
    EXPECT_THROW(decompose(g, {0, 0}, 1.5), std::invalid_argument);
}

TEST(Riesz, SingleCoordinateHasNoRemainder) {
    for (int m = 4; m <= 7; ++m) {
        for (double eps : {0.25, 1.0}) {
            const TorusGrid g(1, m);
            const auto d = decompose(g, {m - 1}, eps);
            EXPECT_EQ(d.t.coeffs, d.F.coeffs);
            EXPECT_EQ(d.r.size(), 0U);
            EXPECT_EQ(d.vee_r_upper, 0.0);
            ASSERT_TRUE(d.vee_r_lower.has_value());
            EXPECT_EQ(*d.vee_r_lower, 0.0);
        }
    }
}

TEST(Riesz, ThreeCoordinatesModEight) {
    const TorusGrid g(3, 8);
    const auto d = decompose(g, some_z0(3, 8), 0.5);
    EXPECT_NEAR(d.vee_r_upper, 0.0625, 1e-15);
    EXPECT_LE(d.wedge_t, 8.0);
    EXPECT_NEAR(d.vee_r_prime_upper, 0.5 / 4.0 + 0.25 / 8.0, 1e-15);
    EXPECT_LE(d.vee_r_prime_upper, 0.25);
    ASSERT_TRUE(d.vee_r_lower.has_value());
    EXPECT_LE(*d.vee_r_lower, 0.0625 + 1e-12);
    EXPECT_GE(*d.vee_r_lower, 0.0625 - 1e-9);  // single surviving layer
    EXPECT_LE(d.F.max_difference(d.t + d.r), 1e-12);
}

TEST(Riesz, ProductIsPositiveWithUnitMass) {
    for (int n = 1; n <= 4; ++n) {
        for (int m = std::max(4, n + 2); m <= n + 5; ++m) {
            for (double eps : {0.25, 0.5, 1.0}) {
                const TorusGrid g(n, m);
                const auto z0 = some_z0(n, m);
                const auto nu = riesz_product(g, z0, eps);
                const auto v = tensor_values(nu);
                ASSERT_EQ(v.size(), g.points());
                double total = 0.0;
                for (std::uint64_t w = 0; w < g.points(); ++w) {
                    // Oracle: the product formula at z + z' = w.
                    const auto e = g.decode(w);
                    double prod = 1.0;
                    for (int i = 0; i < n; ++i) prod *= 1.0 + eps * std::cos(2.0 * std::numbers::pi * (z0[i] + e[i]) / m);
                    EXPECT_NEAR(v[w].real(), prod, 1e-12);
                    EXPECT_NEAR(v[w].imag(), 0.0, 1e-12);
                    EXPECT_GE(v[w].real(), -1e-12);
                    total += v[w].real();
                }
                EXPECT_NEAR(total / static_cast<double>(g.points()), 1.0, 1e-12);
                EXPECT_NEAR(projective_norm(nu), 1.0, 1e-12);
            }
        }
    }
}

TEST(Riesz, RotationAverageIsDegreeOneProjection) {
    const TorusGrid g(4, 6);
    const auto z0 = some_z0(4, 6);
    const auto tp = riesz_product(g, z0, 0.75);
    const auto rot = rotation_average(tp);
    // Direct filter on signed degrees.
    FourierTensor direct(g);
    for (const auto& [key, c] : tp.coeffs) {
        int deg = 0;
        for (int e : g.decode(key.first)) deg += g.centered(e);
        if (deg == 1) direct.add(key.first, key.second, 2.0 * c);
    }
    EXPECT_EQ(rot.size(), direct.size());
    EXPECT_LE(rot.max_difference(direct), 1e-15);
    // Pointwise: 2/m sum_j omega^{-j} f(omega^j z, z').
    std::mt19937 rng(4);
    std::uniform_int_distribution<int> u(0, 5);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<int> z(4), zp(4);
        for (auto& v : z) v = u(rng);
        for (auto& v : zp) v = u(rng);
        cplx avg{};
        for (int j = 0; j < 6; ++j) {
            std::vector<int> shifted(z);
            for (auto& v : shifted) v += j;
            avg += g.root(-j) * tp.evaluate(shifted, zp);
        }
        avg *= 2.0 / 6.0;
        EXPECT_NEAR(std::abs(avg - rot.evaluate(z, zp)), 0.0, 1e-12);
    }
}

TEST(Riesz, BoundsAcrossParameters) {
    RieszOptions opt;
    opt.injective.restarts = 4;
    opt.injective.max_iterations = 20;
    for (int n = 1; n <= 4; ++n) {
        for (int m = std::max(4, n + 2); m <= 8; ++m) {
            for (double eps : {0.25, 0.5, 1.0}) {
                const TorusGrid g(n, m);
                const auto d = decompose(g, some_z0(n, m), eps, opt);
                EXPECT_LE(d.F.max_difference(d.t + d.r), 1e-12);
                EXPECT_LE(d.wedge_t, 4.0 / eps + 1e-12);
                EXPECT_LE(d.vee_r_upper, eps);
                EXPECT_LE(d.vee_r_prime_upper, eps / 2.0);
                EXPECT_NEAR(d.vee_r_upper, expected_vee_r(n, eps), 1e-15);
                ASSERT_TRUE(d.vee_r_lower.has_value());
                EXPECT_LE(*d.vee_r_lower, d.vee_r_upper + 1e-12);
            }
        }
    }
}

TEST(ProjectiveNorm, SingleCharacterPair) {
    const TorusGrid g(1, 4);
    FourierTensor f(g);
    f.add(g.encode({1}), g.encode({3}), cplx(0.6, -0.8) * 2.5);
    EXPECT_NEAR(projective_norm(f), 2.5, 1e-12);
    const auto b = injective_norm_bounds(f);
    ASSERT_TRUE(b.upper.has_value());
    EXPECT_NEAR(*b.upper, 2.5, 1e-15);
    EXPECT_NEAR(b.lower, 2.5, 1e-9);
}

TEST(InjectiveNorm, RefusesCertificateOnRepeatedCharacters) {
    const TorusGrid g(2, 4);
    FourierTensor f(g);
    f.add(g.encode({1, 0}), g.encode({1, 0}), 1.0);
    f.add(g.encode({1, 0}), g.encode({0, 1}), 1.0);
    const auto b = injective_norm_bounds(f);
    EXPECT_FALSE(b.upper.has_value());
    EXPECT_FALSE(b.warning.empty());
    // The norm is sup_b |E b (z_1 + z_2)| = E|1 + omega^k| over k in Z_4.
    EXPECT_NEAR(b.lower, (1.0 + std::sqrt(2.0)) / 2.0, 1e-9);
}

TEST(InjectiveNorm, SearchNeverBeatsCertificate) {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> gauss;
    const TorusGrid g(2, 5);
    for (int trial = 0; trial < 10; ++trial) {
        FourierTensor f(g);
        for (std::uint64_t c = 0; c < g.points(); ++c) {
            if (gauss(rng) > 0.5) f.add(c, (c * 7 + 3) % g.points(), cplx(gauss(rng), gauss(rng)));
        }
        const auto b = injective_norm_bounds(f);
        if (!b.upper) continue;
        EXPECT_LE(b.lower, *b.upper + 1e-12);
    }
}

TEST(Tensor2, Bound) {
    EXPECT_EQ(tensor2_sidon_bound(1.0), 16.0);
    EXPECT_EQ(tensor2_sidon_bound(2.0), 64.0);
    EXPECT_THROW(tensor2_sidon_bound(0.5), std::invalid_argument);
    const auto sq = tensor_system(rademacher_system(3).raw_system(), 2);
    const auto r = sidon_constant_exact(sq);
    EXPECT_NEAR(r.constant, 1.0, 1e-9);
    EXPECT_LE(r.constant, tensor2_sidon_bound(1.0));
}

}  // namespace
}  // namespace sidonlab
