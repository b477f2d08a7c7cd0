#pragma once

// The n x n matrix system phi(t) = (u - D(u)) + D(phi_1, .., phi_n) / sqrt(n):
// Haar-unitary off-diagonal entries, and a truncated-martingale system on an
// independent cube along the diagonal.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "sidonlab/constructions.hpp"
#include "sidonlab/parallel.hpp"

namespace sidonlab {

/// Haar unitary from a complex Gaussian matrix: Q R = G, then Q diag(R_ii / |R_ii|),
/// which makes the triangular factor's diagonal positive and the law exact.
template <class Rng>
Eigen::MatrixXcd haar_unitary(int n, Rng& rng) {
    if (n < 1) throw std::invalid_argument("haar_unitary: n must be >= 1");
    std::normal_distribution<double> g(0.0, std::sqrt(0.5));
    for (;;) {
        Eigen::MatrixXcd z(n, n);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) z(i, j) = {g(rng), g(rng)};
        Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
        const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
        double smallest = std::abs(r(0, 0));
        for (int i = 1; i < n; ++i) smallest = std::min(smallest, std::abs(r(i, i)));
        if (smallest < 1e-12) continue;
        Eigen::MatrixXcd q = qr.householderQ();
        for (int j = 0; j < n; ++j) q.col(j) *= r(j, j) / std::abs(r(j, j));
        return q;
    }
}

inline Eigen::MatrixXcd haar_unitary(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return haar_unitary(n, rng);
}

inline double unitarity_residual(const Eigen::MatrixXcd& u) {
    const auto n = u.cols();
    return (u.adjoint() * u - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
}

/// Sum of singular values.
inline double trace_norm(const Eigen::MatrixXcd& m) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    return svd.singularValues().sum();
}

struct MatrixSystemSample {
    int n = 0;
    std::uint64_t seed = 0;
    ConstructionTrace diag_source;
    std::vector<Eigen::MatrixXcd> samples;
    std::vector<std::uint64_t> atoms;         // cube point used on the diagonal
    std::vector<double> offdiag_norms;        // ||u - D(u)||, certified <= 2
    std::vector<double> operator_norms;       // ||phi(t)||
};

namespace detail {
inline std::mt19937_64 draw_rng(std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    return std::mt19937_64(seq);
}

inline double operator_norm(const Eigen::MatrixXcd& m) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    return svd.singularValues()(0);
}
}  // namespace detail

/// Draws phi(t) for independent (u, cube point) pairs. Draw i depends only on
/// (seed, i).
inline MatrixSystemSample sample_matrix_system(const ConstructionTrace& trace, std::size_t draws, std::uint64_t seed) {
    const int n = trace.steps;
    const OrthoSystem phi = trace.normalized_system();
    struct Draw {
        Eigen::MatrixXcd m;
        std::uint64_t atom = 0;
        double offdiag = 0.0;
        double full = 0.0;
    };
    auto make = [&](std::size_t i) {
        auto rng = detail::draw_rng(seed, i);
        Draw d;
        d.m = haar_unitary(n, rng);
        d.m.diagonal().setZero();
        d.offdiag = detail::operator_norm(d.m);
        std::uniform_int_distribution<std::uint64_t> pick(0, trace.space.atom_count() - 1);
        d.atom = pick(rng);
        for (int k = 0; k < n; ++k) d.m(k, k) = phi[static_cast<std::size_t>(k)][d.atom] / std::sqrt(static_cast<double>(n));
        d.full = detail::operator_norm(d.m);
        return d;
    };
    auto all = parallel_map(draws, make);
    MatrixSystemSample s;
    s.n = n;
    s.seed = seed;
    s.diag_source = trace;
    for (auto& d : all) {
        s.samples.push_back(std::move(d.m));
        s.atoms.push_back(d.atom);
        s.offdiag_norms.push_back(d.offdiag);
        s.operator_norms.push_back(d.full);
    }
    return s;
}

struct MatrixWitnessReport {
    int n = 0;
    double eps = 0.0;
    double c = 0.0;
    double trace_norm_a = 0.0;    // sum_k ||f_k||_2
    double sup_exact = 0.0;       // sup |tr(a phi(t))| = sup|S_n| / sqrt(n)
    double lower_bound = 0.0;     // trace_norm_a / sup_exact
    double trivial_upper = 0.0;   // n
    double asymptotic_form = 0.0; // n (1+eps)^{-1} / c
    double chain_bound = 0.0;     // n (1+eps)^{-1} sqrt(n) / (1 + c sqrt(n-1))
    std::optional<double> matrix_route;  // tr|a| by SVD over max |tr(a phi)| on the cube (n <= 16)
};

inline constexpr int kMaxMatrixRouteDimension = 16;

/// Witness a = diag(||f_k||_2) against the matrix system built on
/// pisier_system(n, eps, c); c defaults to c_eps.
inline MatrixWitnessReport matrix_witness_bounds(int n, double eps, std::optional<double> c = std::nullopt,
                                                 std::uint64_t seed = 1) {
    const auto trace = pisier_system(n, eps, c);
    MatrixWitnessReport r;
    r.n = n;
    r.eps = eps;
    r.c = trace.c;
    const auto norms = trace.raw_l2_norms();
    for (double v : norms) r.trace_norm_a += v;
    const double rn = std::sqrt(static_cast<double>(n));
    r.sup_exact = trace.sup_abs_sum(n) / rn;
    r.lower_bound = r.trace_norm_a / r.sup_exact;
    r.trivial_upper = n;
    r.asymptotic_form = n / ((1.0 + eps) * trace.c);
    r.chain_bound = n / (1.0 + eps) * rn / (1.0 + trace.c * std::sqrt(static_cast<double>(n - 1)));

    if (n > kMaxMatrixRouteDimension) return r;
    // Matrix route: one off-diagonal draw suffices since tr(a phi) ignores it.
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n, n);
    for (int k = 0; k < n; ++k) a(k, k) = norms[static_cast<std::size_t>(k)];
    Eigen::MatrixXcd off = haar_unitary(n, seed);
    off.diagonal().setZero();
    const OrthoSystem phi = trace.normalized_system();
    const double sup = chunked_max(trace.space.atom_count(), [&](std::size_t atom) {
        Eigen::MatrixXcd m = off;
        for (int k = 0; k < n; ++k) m(k, k) = phi[static_cast<std::size_t>(k)][atom] / rn;
        return std::abs(a.cwiseProduct(m.transpose()).sum());
    });
    r.matrix_route = trace_norm(a) / sup;
    return r;
}

struct OrthonormalityReport {
    std::size_t samples = 0;
    double max_deviation = 0.0;  // largest |G - I| entry, real and imaginary parts separately
    double max_z = 0.0;          // largest deviation in standard errors
    double threshold = 5.0;      // standard errors allowed
    double diagonal_block_deviation = 0.0;  // exact, from the cube
    bool pass = false;
    Eigen::MatrixXcd gram;       // n^2 x n^2, entries (i + n j)
};

/// Monte Carlo Gram matrix of {sqrt(n) phi_ij}. Diagonal-diagonal entries
/// come from the exact cube Gram matrix.
inline OrthonormalityReport matrix_orthonormality_check(const MatrixSystemSample& s, double standard_errors = 5.0) {
    if (s.samples.size() < 1000) throw std::invalid_argument("matrix_orthonormality_check: need at least 1000 samples");
    const int n = s.n;
    const int d = n * n;
    const double rn = std::sqrt(static_cast<double>(n));
    const auto count = static_cast<double>(s.samples.size());
    OrthonormalityReport r;
    r.samples = s.samples.size();
    r.threshold = standard_errors;
    r.gram = Eigen::MatrixXcd::Zero(d, d);
    const Eigen::MatrixXd exact = gram_matrix(s.diag_source.normalized_system());
    for (int p = 0; p < d; ++p) {
        for (int q = 0; q < d; ++q) {
            const int pi = p % n, pj = p / n, qi = q % n, qj = q / n;
            const double target = p == q ? 1.0 : 0.0;
            if (pi == pj && qi == qj) {
                r.gram(p, q) = exact(pi, qi);
                r.diagonal_block_deviation = std::max(r.diagonal_block_deviation, std::abs(exact(pi, qi) - target));
                continue;
            }
            double sr = 0.0, si = 0.0, sr2 = 0.0, si2 = 0.0;
            for (const auto& m : s.samples) {
                const std::complex<double> v = rn * m(pi, pj) * std::conj(rn * m(qi, qj));
                sr += v.real();
                si += v.imag();
                sr2 += v.real() * v.real();
                si2 += v.imag() * v.imag();
            }
            const double mr = sr / count, mi = si / count;
            r.gram(p, q) = {mr, mi};
            const double se_r = std::sqrt(std::max(0.0, sr2 / count - mr * mr) / count);
            const double se_i = std::sqrt(std::max(0.0, si2 / count - mi * mi) / count);
            const double dr = std::abs(mr - target), di = std::abs(mi);
            r.max_deviation = std::max({r.max_deviation, dr, di});
            for (auto [dev, se] : {std::pair{dr, se_r}, std::pair{di, se_i}}) {
                if (se > 0.0) {
                    r.max_z = std::max(r.max_z, dev / se);
                } else if (dev > 1e-12) {
                    r.max_z = std::numeric_limits<double>::infinity();
                }
            }
        }
    }
    r.pass = r.max_z <= standard_errors && r.diagonal_block_deviation <= 1e-12;
    return r;
}

/// Empirical E exp(Re <x, sqrt(n) phi>) / exp(|x|^2 / 2) over the sample, a
/// statistical view of the subgaussian constant (no beta is asserted).
inline double empirical_mgf_ratio(const MatrixSystemSample& s, const Eigen::MatrixXcd& x) {
    const double rn = std::sqrt(static_cast<double>(s.n));
    double total = 0.0;
    for (const auto& m : s.samples) total += std::exp((x.conjugate().cwiseProduct(rn * m)).sum().real());
    return total / static_cast<double>(s.samples.size()) / std::exp(x.squaredNorm() / 2.0);
}

}  // namespace sidonlab
