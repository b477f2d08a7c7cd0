#pragma once

// Dense two-phase simplex for
//
//     maximize c.x  subject to  A x <= b,  x free.
//
// The solver works on the dual, min b.y s.t. A^T y = c, y >= 0, which is in
// standard form with one row per primal variable. The Sidon LPs have few
// variables and many constraints, so the dual tableau is short and wide. At
// the optimum the simplex multipliers of the dual are a primal vertex, and
// the dual basic solution is the optimality certificate.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

namespace sidonlab {

struct LpProblem {
    Eigen::VectorXd objective;    // c, length n
    Eigen::MatrixXd constraints;  // A, m x n
    Eigen::VectorXd rhs;          // b, length m

    Eigen::Index variable_count() const { return objective.size(); }
    Eigen::Index constraint_count() const { return constraints.rows(); }
};

enum class LpStatus { optimal, infeasible, unbounded };

inline const char* to_string(LpStatus s) {
    switch (s) {
        case LpStatus::optimal: return "optimal";
        case LpStatus::infeasible: return "infeasible";
        case LpStatus::unbounded: return "unbounded";
    }
    return "?";
}

struct LpSolution {
    LpStatus status = LpStatus::infeasible;
    double value = 0.0;
    Eigen::VectorXd x;     // primal vertex
    Eigen::VectorXd dual;  // y >= 0 with A^T y = c
    double duality_gap = 0.0;
    double primal_violation = 0.0;
    double dual_violation = 0.0;
    int pivots = 0;

    /// Weak-duality certificate: x feasible, y feasible, c.x = b.y, all
    /// within tol (the gap relative to 1 + |value|).
    bool certified(double tol) const {
        return status == LpStatus::optimal && primal_violation <= tol && dual_violation <= tol &&
               duality_gap <= tol * (1.0 + std::abs(value));
    }
};

namespace detail {

class DualTableau {
public:
    // Rows: one per primal variable. Columns: m dual variables, n artificials,
    // then the right-hand side. Row signs are flipped so the rhs is >= 0.
    DualTableau(const LpProblem& p, const Eigen::VectorXd& c)
        : n_(static_cast<std::size_t>(p.variable_count())),
          m_(static_cast<std::size_t>(p.constraint_count())),
          width_(m_ + n_ + 1),
          cells_(n_ * width_, 0.0),
          basis_(n_),
          row_sign_(n_, 1.0),
          cost_(width_, 0.0) {
        for (std::size_t i = 0; i < n_; ++i) {
            row_sign_[i] = c(static_cast<Eigen::Index>(i)) < 0.0 ? -1.0 : 1.0;
            double* r = row(i);
            for (std::size_t j = 0; j < m_; ++j) {
                r[j] = row_sign_[i] * p.constraints(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));
            }
            r[m_ + i] = 1.0;
            r[width_ - 1] = row_sign_[i] * c(static_cast<Eigen::Index>(i));
            basis_[i] = m_ + i;
        }
    }

    // Returns false when the objective is unbounded below.
    bool minimize(const std::vector<double>& cost, bool allow_artificials, int& pivots) {
        cost_ = cost;
        cost_.resize(width_, 0.0);
        // Reduced costs r_j = cost_j - sum_i cost_{basis_i} T_ij; the last
        // entry holds -objective.
        std::vector<double> reduced(width_, 0.0);
        for (std::size_t j = 0; j < width_; ++j) {
            double s = j + 1 == width_ ? 0.0 : cost_[j];
            for (std::size_t i = 0; i < n_; ++i) s -= cost_[basis_[i]] * row(i)[j];
            reduced[j] = s;
        }
        const std::size_t last_col = allow_artificials ? m_ + n_ : m_;
        for (;;) {
            // Bland: smallest improving index enters.
            std::size_t enter = width_;
            for (std::size_t j = 0; j < last_col; ++j) {
                if (reduced[j] < -kReducedCostTol) {
                    enter = j;
                    break;
                }
            }
            if (enter == width_) return true;
            std::size_t leave = n_;
            double best_ratio = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < n_; ++i) {
                const double a = row(i)[enter];
                if (a <= kPivotTol) continue;
                const double ratio = row(i)[width_ - 1] / a;
                if (leave == n_ || ratio < best_ratio - kRatioTol * (1.0 + std::abs(best_ratio))) {
                    best_ratio = ratio;
                    leave = i;
                } else if (ratio <= best_ratio + kRatioTol * (1.0 + std::abs(best_ratio)) && basis_[i] < basis_[leave]) {
                    leave = i;
                }
            }
            if (leave == n_) return false;
            pivot(leave, enter, reduced);
            ++pivots;
        }
    }

    // After phase one, pivots basic artificials out where a structural
    // column allows it. Rows that stay artificial are redundant.
    void expel_artificials(int& pivots) {
        std::vector<double> unused(width_, 0.0);
        for (std::size_t i = 0; i < n_; ++i) {
            if (basis_[i] < m_) continue;
            const double* r = row(i);
            std::size_t best = m_;
            double best_abs = kPivotTol;
            for (std::size_t j = 0; j < m_; ++j) {
                if (std::abs(r[j]) > best_abs) {
                    best_abs = std::abs(r[j]);
                    best = j;
                }
            }
            if (best < m_) {
                pivot(i, best, unused);
                ++pivots;
            }
        }
    }

    double objective(const std::vector<double>& cost) const {
        double s = 0.0;
        for (std::size_t i = 0; i < n_; ++i) s += cost[basis_[i]] * row(i)[width_ - 1];
        return s;
    }

    Eigen::VectorXd basic_solution() const {
        Eigen::VectorXd y = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m_));
        for (std::size_t i = 0; i < n_; ++i) {
            if (basis_[i] < m_) y(static_cast<Eigen::Index>(basis_[i])) = std::max(0.0, row(i)[width_ - 1]);
        }
        return y;
    }

    // x = D pi with pi^T = c_B^T B^{-1}; B^{-1} sits in the artificial columns.
    Eigen::VectorXd multipliers(const std::vector<double>& cost) const {
        Eigen::VectorXd x(static_cast<Eigen::Index>(n_));
        for (std::size_t k = 0; k < n_; ++k) {
            double s = 0.0;
            for (std::size_t i = 0; i < n_; ++i) s += cost[basis_[i]] * row(i)[m_ + k];
            x(static_cast<Eigen::Index>(k)) = row_sign_[k] * s;
        }
        return x;
    }

    std::size_t structural_count() const { return m_; }
    std::size_t artificial_begin() const { return m_; }
    std::size_t width() const { return width_; }

private:
    static constexpr double kPivotTol = 1e-11;
    static constexpr double kReducedCostTol = 1e-11;
    static constexpr double kRatioTol = 1e-12;

    double* row(std::size_t i) { return cells_.data() + i * width_; }
    const double* row(std::size_t i) const { return cells_.data() + i * width_; }

    void pivot(std::size_t r, std::size_t col, std::vector<double>& reduced) {
        double* pr = row(r);
        const double inv = 1.0 / pr[col];
        for (std::size_t j = 0; j < width_; ++j) pr[j] *= inv;
        pr[col] = 1.0;
        for (std::size_t i = 0; i < n_; ++i) {
            if (i == r) continue;
            double* ri = row(i);
            const double f = ri[col];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < width_; ++j) ri[j] -= f * pr[j];
            ri[col] = 0.0;
        }
        const double f = reduced[col];
        if (f != 0.0) {
            for (std::size_t j = 0; j < width_; ++j) reduced[j] -= f * pr[j];
            reduced[col] = 0.0;
        }
        basis_[r] = col;
    }

    std::size_t n_, m_, width_;
    std::vector<double> cells_;
    std::vector<std::size_t> basis_;
    std::vector<double> row_sign_;
    std::vector<double> cost_;
};

inline void fill_certificate(const LpProblem& p, LpSolution& s) {
    const Eigen::VectorXd slack = p.rhs - p.constraints * s.x;
    s.primal_violation = std::max(0.0, -slack.minCoeff());
    const Eigen::VectorXd residual = p.constraints.transpose() * s.dual - p.objective;
    s.dual_violation = std::max(residual.cwiseAbs().maxCoeff(), std::max(0.0, -s.dual.minCoeff()));
    s.value = p.objective.dot(s.x);
    s.duality_gap = std::abs(s.value - p.rhs.dot(s.dual));
}

// Phase one then phase two on the dual with objective vector c. Returns the
// phase-one status as infeasible (dual infeasible) or the phase-two status.
inline LpSolution solve_dual(const LpProblem& p, const Eigen::VectorXd& c) {
    LpSolution out;
    DualTableau t(p, c);
    const std::size_t m = t.structural_count();
    std::vector<double> phase1(t.width(), 0.0);
    for (std::size_t j = t.artificial_begin(); j + 1 < t.width(); ++j) phase1[j] = 1.0;
    t.minimize(phase1, true, out.pivots);
    const double scale = 1.0 + c.cwiseAbs().sum();
    if (t.objective(phase1) > 1e-9 * scale) {
        out.status = LpStatus::infeasible;
        return out;
    }
    t.expel_artificials(out.pivots);
    std::vector<double> phase2(t.width(), 0.0);
    for (std::size_t j = 0; j < m; ++j) phase2[j] = p.rhs(static_cast<Eigen::Index>(j));
    if (!t.minimize(phase2, false, out.pivots)) {
        out.status = LpStatus::unbounded;
        return out;
    }
    out.status = LpStatus::optimal;
    out.x = t.multipliers(phase2);
    out.dual = t.basic_solution();
    return out;
}

}  // namespace detail

/// Solves max c.x s.t. A x <= b with x free. Pivoting follows Bland's rule in
/// index order, so the result is a deterministic function of the input.
inline LpSolution lp_solve(const LpProblem& p) {
    if (p.constraints.cols() != p.variable_count() || p.rhs.size() != p.constraint_count()) {
        throw std::invalid_argument("lp_solve: inconsistent problem dimensions");
    }
    auto dual = detail::solve_dual(p, p.objective);
    if (dual.status == LpStatus::optimal) {
        detail::fill_certificate(p, dual);
        return dual;
    }
    LpSolution out;
    out.pivots = dual.pivots;
    if (dual.status == LpStatus::unbounded) {
        // Unbounded dual: the primal has no feasible point.
        out.status = LpStatus::infeasible;
        return out;
    }
    // Infeasible dual: the primal is unbounded if it is feasible at all. With
    // c = 0 the dual is feasible (y = 0) and is unbounded iff the primal is
    // infeasible.
    const auto probe = detail::solve_dual(p, Eigen::VectorXd::Zero(p.variable_count()));
    out.pivots += probe.pivots;
    out.status = probe.status == LpStatus::unbounded ? LpStatus::infeasible : LpStatus::unbounded;
    return out;
}

}  // namespace sidonlab
