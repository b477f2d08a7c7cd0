#pragma once

// Exact Sidon constants of real systems on a finite cube:
//
//     C = max { ||x||_1 : |sum_k x_k phi_k(w)| <= 1 for every atom w }.
//
// ||x||_1 = max_s s.x over sign patterns s, and s and -s give the same value,
// so C is the largest of 2^{n-1} LP optima with s_1 = +1.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sidonlab/cube.hpp"
#include "sidonlab/parallel.hpp"
#include "sidonlab/simplex.hpp"

namespace sidonlab {

struct SidonOptions {
    std::size_t max_functions = 12;
    double tolerance = 1e-9;
    std::optional<std::vector<double>> witness;  // coefficients for lower_witness
};

struct SidonReport {
    double constant = 0.0;
    std::vector<double> witness;         // argmax vertex, sup|sum x phi| <= 1
    std::vector<double> orthant_values;  // orthant o: s_1 = +1, s_{k+2} = -1 iff bit k of o
    std::optional<double> upper_trivial;
    std::optional<double> lower_witness;
    double tolerance = 1e-9;
    std::size_t distinct_rows = 0;
    double max_duality_gap = 0.0;
    std::size_t total_pivots = 0;
};

/// ||x||_1 / ||sum_k x_k phi_k||_inf, a lower bound for the Sidon constant.
inline double witness_ratio(const OrthoSystem& sys, std::span<const double> x) {
    double l1 = 0.0;
    for (double v : x) l1 += std::abs(v);
    if (l1 == 0.0) throw std::invalid_argument("witness_ratio: x must be non-zero");
    const double sup = sup_norm(sys.combination(x));
    if (sup == 0.0) return std::numeric_limits<double>::infinity();
    return l1 / sup;
}

/// Distinct constraint rows (phi_1(w), .., phi_n(w)) up to sign; zero rows
/// carry no constraint and are dropped.
inline Eigen::MatrixXd distinct_constraint_rows(const OrthoSystem& sys) {
    const std::size_t n = sys.size();
    std::map<std::vector<double>, int> seen;
    std::vector<double> row(n);
    for (std::uint64_t a = 0; a < sys.space().atom_count(); ++a) {
        bool nonzero = false;
        double flip = 1.0;
        for (std::size_t k = 0; k < n; ++k) {
            row[k] = sys[k][a];
            if (!nonzero && row[k] != 0.0) {
                nonzero = true;
                flip = row[k] < 0.0 ? -1.0 : 1.0;
            }
        }
        if (!nonzero) continue;
        for (double& v : row) v = flip * v + 0.0;
        seen.emplace(row, 0);
    }
    Eigen::MatrixXd out(static_cast<Eigen::Index>(seen.size()), static_cast<Eigen::Index>(n));
    Eigen::Index r = 0;
    for (const auto& [values, unused] : seen) {
        for (std::size_t k = 0; k < n; ++k) out(r, static_cast<Eigen::Index>(k)) = values[k];
        ++r;
    }
    return out;
}

inline bool is_orthonormal(const OrthoSystem& sys, double tol) {
    const Eigen::MatrixXd g = gram_matrix(sys);
    const auto n = g.rows();
    return (g - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() <= tol;
}

inline SidonReport sidon_constant_exact(const OrthoSystem& sys, const SidonOptions& opt = {}) {
    const std::size_t n = sys.size();
    if (n == 0) throw std::invalid_argument("sidon_constant_exact: empty system");
    if (n > opt.max_functions) {
        throw SizeError("sidon_constant_exact: " + std::to_string(n) + " functions exceeds the limit of " +
                        std::to_string(opt.max_functions) + " (2^(n-1) orthant LPs)");
    }
    const Eigen::MatrixXd rows = distinct_constraint_rows(sys);
    LpProblem base;
    base.constraints.resize(2 * rows.rows(), static_cast<Eigen::Index>(n));
    base.constraints << rows, -rows;
    base.rhs = Eigen::VectorXd::Ones(2 * rows.rows());

    const std::size_t orthants = std::size_t{1} << (n - 1);
    auto solve_orthant = [&](std::size_t o) {
        LpProblem p = base;
        p.objective = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n));
        for (std::size_t k = 0; k + 1 < n; ++k) {
            if (((o >> k) & 1U) != 0) p.objective(static_cast<Eigen::Index>(k + 1)) = -1.0;
        }
        return lp_solve(p);
    };
    const auto solutions = parallel_map(orthants, solve_orthant);

    SidonReport r;
    r.tolerance = opt.tolerance;
    r.distinct_rows = static_cast<std::size_t>(rows.rows());
    std::size_t best = 0;
    for (std::size_t o = 0; o < orthants; ++o) {
        const auto& s = solutions[o];
        if (s.status == LpStatus::unbounded) {
            throw DegenerateInput("sidon_constant_exact: orthant " + std::to_string(o) +
                                  " is unbounded; the system is linearly dependent (or has a zero function)");
        }
        if (!s.certified(opt.tolerance)) {
            throw std::runtime_error("sidon_constant_exact: LP in orthant " + std::to_string(o) +
                                     " did not converge to a certified optimum (status " + to_string(s.status) + ")");
        }
        r.orthant_values.push_back(s.value);
        r.max_duality_gap = std::max(r.max_duality_gap, s.duality_gap);
        r.total_pivots += static_cast<std::size_t>(s.pivots);
        if (s.value > solutions[best].value) best = o;
    }
    r.constant = solutions[best].value;
    r.witness.assign(solutions[best].x.data(), solutions[best].x.data() + solutions[best].x.size());
    if (is_orthonormal(sys, opt.tolerance)) r.upper_trivial = std::sqrt(static_cast<double>(n));
    if (opt.witness) r.lower_witness = witness_ratio(sys, *opt.witness);
    return r;
}

}  // namespace sidonlab
