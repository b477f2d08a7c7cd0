#pragma once

// Finite uniform sign cubes {-1,1}^N and dense real functions on them.
//
// Atom a in [0, 2^N) encodes the sign pattern with eps_b = +1 when bit b of a
// is set and eps_b = -1 when it is clear. Every atom has weight 2^-N.

#include <Eigen/Dense>

#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sidonlab/config.hpp"
#include "sidonlab/parallel.hpp"

namespace sidonlab {

class CubeSpace {
public:
    CubeSpace() = default;
    explicit CubeSpace(int coord_count) : coords_(coord_count) {
        if (coord_count < 0 || coord_count > 62) {
            throw std::invalid_argument("CubeSpace: coordinate count must lie in [0, 62]");
        }
        require_atoms_within_budget(atom_count(), "CubeSpace with " + std::to_string(coord_count) + " coordinates");
    }

    int coord_count() const { return coords_; }
    std::uint64_t atom_count() const { return std::uint64_t{1} << coords_; }
    double weight() const { return std::ldexp(1.0, -coords_); }

    /// Value of eps_coord at the given atom.
    static int sign(std::uint64_t atom, int coord) { return ((atom >> coord) & 1U) != 0 ? 1 : -1; }

    friend bool operator==(const CubeSpace&, const CubeSpace&) = default;

private:
    int coords_ = 0;
};

class CubeFunction {
public:
    CubeFunction() = default;
    CubeFunction(CubeSpace space, std::vector<double> values) : space_(space), values_(std::move(values)) {
        if (values_.size() != space_.atom_count()) {
            throw std::invalid_argument("CubeFunction: " + std::to_string(values_.size()) + " values for a space of " +
                                        std::to_string(space_.atom_count()) + " atoms");
        }
    }

    static CubeFunction constant(CubeSpace space, double v) {
        return CubeFunction(space, std::vector<double>(space.atom_count(), v));
    }

    static CubeFunction coordinate(CubeSpace space, int coord) {
        if (coord < 0 || coord >= space.coord_count()) throw std::out_of_range("CubeFunction::coordinate");
        std::vector<double> v(space.atom_count());
        for (std::uint64_t a = 0; a < v.size(); ++a) v[a] = CubeSpace::sign(a, coord);
        return CubeFunction(space, std::move(v));
    }

    /// Walsh character prod_{b in mask} eps_b.
    static CubeFunction character(CubeSpace space, std::uint64_t mask) {
        std::vector<double> v(space.atom_count());
        for (std::uint64_t a = 0; a < v.size(); ++a) {
            v[a] = (std::popcount(mask & ~a) & 1) != 0 ? -1.0 : 1.0;
        }
        return CubeFunction(space, std::move(v));
    }

    const CubeSpace& space() const { return space_; }
    std::span<const double> values() const { return values_; }
    double operator[](std::uint64_t atom) const { return values_[atom]; }
    std::size_t size() const { return values_.size(); }

    friend CubeFunction operator+(const CubeFunction& f, const CubeFunction& g) { return combine(f, g, std::plus<>{}); }
    friend CubeFunction operator-(const CubeFunction& f, const CubeFunction& g) { return combine(f, g, std::minus<>{}); }
    friend CubeFunction operator*(const CubeFunction& f, const CubeFunction& g) {
        return combine(f, g, std::multiplies<>{});
    }
    friend CubeFunction operator*(double s, const CubeFunction& f) {
        std::vector<double> v(f.values_);
        for (double& x : v) x *= s;
        return CubeFunction(f.space_, std::move(v));
    }

    friend bool operator==(const CubeFunction&, const CubeFunction&) = default;

private:
    template <class Op>
    static CubeFunction combine(const CubeFunction& f, const CubeFunction& g, Op op) {
        if (!(f.space_ == g.space_)) throw std::invalid_argument("CubeFunction: operands live on different spaces");
        std::vector<double> v(f.values_.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = op(f.values_[i], g.values_[i]);
        return CubeFunction(f.space_, std::move(v));
    }

    CubeSpace space_;
    std::vector<double> values_;
};

inline double expectation(const CubeFunction& f) {
    const auto v = f.values();
    return chunked_sum(v.size(), [&](std::size_t i) { return v[i]; }) * f.space().weight();
}

inline double sup_norm(const CubeFunction& f) {
    const auto v = f.values();
    return chunked_max(v.size(), [&](std::size_t i) { return std::abs(v[i]); });
}

/// (E|f|^p)^{1/p} for finite p >= 1, or the sup norm for p = +infinity.
inline double lp_norm(const CubeFunction& f, double p) {
    if (std::isnan(p) || p < 1.0) throw std::invalid_argument("lp_norm: p must be >= 1");
    if (std::isinf(p)) return sup_norm(f);
    const auto v = f.values();
    double m;
    if (p == 2.0) {
        m = chunked_sum(v.size(), [&](std::size_t i) { return v[i] * v[i]; });
    } else {
        m = chunked_sum(v.size(), [&](std::size_t i) { return std::pow(std::abs(v[i]), p); });
    }
    return std::pow(m * f.space().weight(), 1.0 / p);
}

inline double inner_product(const CubeFunction& f, const CubeFunction& g) {
    if (!(f.space() == g.space())) throw std::invalid_argument("inner_product: functions live on different spaces");
    const auto a = f.values();
    const auto b = g.values();
    return chunked_sum(a.size(), [&](std::size_t i) { return a[i] * b[i]; }) * f.space().weight();
}

/// True iff f depends only on coordinates 0..bits-1.
inline bool is_measurable(const CubeFunction& f, int bits) {
    if (bits >= f.space().coord_count()) return true;
    const std::uint64_t low = (std::uint64_t{1} << bits) - 1;
    const auto v = f.values();
    for (std::uint64_t a = 0; a < v.size(); ++a) {
        if (v[a] != v[a & low]) return false;
    }
    return true;
}

/// Conditional expectation onto the algebra generated by coordinates 0..bits-1.
inline CubeFunction conditional_expectation(const CubeFunction& f, int bits) {
    const int n = f.space().coord_count();
    if (bits >= n) return f;
    const std::uint64_t cells = std::uint64_t{1} << bits;
    const std::uint64_t fibre = std::uint64_t{1} << (n - bits);
    const auto v = f.values();
    std::vector<double> mean(cells, 0.0);
    for (std::uint64_t a = 0; a < v.size(); ++a) mean[a & (cells - 1)] += v[a];
    for (double& m : mean) m /= static_cast<double>(fibre);
    std::vector<double> out(v.size());
    for (std::uint64_t a = 0; a < v.size(); ++a) out[a] = mean[a & (cells - 1)];
    return CubeFunction(f.space(), std::move(out));
}

/// Ordered family of functions on one cube, with their L2 norms.
class OrthoSystem {
public:
    OrthoSystem() = default;
    OrthoSystem(CubeSpace space, std::vector<CubeFunction> functions, std::vector<std::string> labels = {})
        : space_(space), functions_(std::move(functions)), labels_(std::move(labels)) {
        for (const auto& f : functions_) {
            if (!(f.space() == space_)) throw std::invalid_argument("OrthoSystem: functions must share one space");
        }
        if (labels_.empty()) {
            for (std::size_t k = 0; k < functions_.size(); ++k) labels_.push_back("phi_" + std::to_string(k + 1));
        }
        if (labels_.size() != functions_.size()) throw std::invalid_argument("OrthoSystem: label count mismatch");
        l2_norms_.reserve(functions_.size());
        for (const auto& f : functions_) l2_norms_.push_back(lp_norm(f, 2.0));
    }

    const CubeSpace& space() const { return space_; }
    std::size_t size() const { return functions_.size(); }
    bool empty() const { return functions_.empty(); }
    const CubeFunction& operator[](std::size_t k) const { return functions_[k]; }
    const std::vector<CubeFunction>& functions() const { return functions_; }
    const std::vector<std::string>& labels() const { return labels_; }
    const std::vector<double>& l2_norms() const { return l2_norms_; }

    /// Each function divided by its L2 norm. Zero functions are rejected.
    OrthoSystem normalized() const {
        std::vector<CubeFunction> out;
        out.reserve(functions_.size());
        for (std::size_t k = 0; k < functions_.size(); ++k) {
            if (l2_norms_[k] == 0.0) throw std::invalid_argument("OrthoSystem::normalized: zero function " + labels_[k]);
            out.push_back((1.0 / l2_norms_[k]) * functions_[k]);
        }
        return OrthoSystem(space_, std::move(out), labels_);
    }

    /// sum_k x_k phi_k.
    CubeFunction combination(std::span<const double> x) const {
        if (x.size() != functions_.size()) throw std::invalid_argument("OrthoSystem::combination: coefficient count");
        std::vector<double> v(space_.atom_count(), 0.0);
        for (std::size_t k = 0; k < functions_.size(); ++k) {
            if (x[k] == 0.0) continue;
            const auto f = functions_[k].values();
            for (std::size_t a = 0; a < v.size(); ++a) v[a] += x[k] * f[a];
        }
        return CubeFunction(space_, std::move(v));
    }

private:
    CubeSpace space_;
    std::vector<CubeFunction> functions_;
    std::vector<std::string> labels_;
    std::vector<double> l2_norms_;
};

inline Eigen::MatrixXd gram_matrix(const OrthoSystem& sys) {
    if (sys.empty()) throw std::invalid_argument("gram_matrix: empty system");
    const auto n = static_cast<Eigen::Index>(sys.size());
    Eigen::MatrixXd g(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            g(i, j) = g(j, i) = inner_product(sys[static_cast<std::size_t>(i)], sys[static_cast<std::size_t>(j)]);
        }
    }
    return g;
}

/// In-place unnormalized Hadamard transform, h[s] = sum_a v[a] (-1)^{|s & a|}.
/// Applying it twice multiplies by the length.
inline void hadamard_transform(std::span<double> v) {
    if (!std::has_single_bit(v.size())) throw std::invalid_argument("hadamard_transform: length must be a power of two");
    for (std::size_t h = 1; h < v.size(); h <<= 1) {
        for (std::size_t i = 0; i < v.size(); i += 2 * h) {
            for (std::size_t j = i; j < i + h; ++j) {
                const double x = v[j];
                const double y = v[j + h];
                v[j] = x + y;
                v[j + h] = x - y;
            }
        }
    }
}

/// Walsh-Fourier coefficients E[f w_S] indexed by the subset mask S.
inline std::vector<double> walsh_spectrum(const CubeFunction& f) {
    std::vector<double> c(f.values().begin(), f.values().end());
    hadamard_transform(c);
    const double w = f.space().weight();
    // eps_b = +1 on set bits, the opposite of the (-1)^{bit} convention.
    for (std::uint64_t s = 0; s < c.size(); ++s) c[s] *= ((std::popcount(s) & 1) != 0 ? -w : w);
    return c;
}

/// f = sum_S c_S w_S.
inline CubeFunction walsh_synthesis(CubeSpace space, std::span<const double> coefficients) {
    if (coefficients.size() != space.atom_count()) throw std::invalid_argument("walsh_synthesis: coefficient count");
    std::vector<double> v(coefficients.begin(), coefficients.end());
    for (std::uint64_t s = 0; s < v.size(); ++s) {
        if ((std::popcount(s) & 1) != 0) v[s] = -v[s];
    }
    hadamard_transform(v);
    return CubeFunction(space, std::move(v));
}

/// k-fold tensor powers phi_n(w_1)...phi_n(w_k) on the product cube. Factor j
/// occupies coordinates [jN, (j+1)N).
inline OrthoSystem tensor_system(const OrthoSystem& sys, int k) {
    if (k < 1) throw std::invalid_argument("tensor_system: power must be >= 1");
    const int n = sys.space().coord_count();
    if (static_cast<long long>(n) * k > 62) throw SizeError("tensor_system: product space too large");
    const std::uint64_t atoms = std::uint64_t{1} << (n * k);
    require_atoms_within_budget(atoms, "tensor_system power " + std::to_string(k));
    const CubeSpace product(n * k);
    const std::uint64_t factor_mask = sys.space().atom_count() - 1;
    std::vector<CubeFunction> out;
    std::vector<std::string> labels;
    for (std::size_t f = 0; f < sys.size(); ++f) {
        const auto base = sys[f].values();
        std::vector<double> v(atoms);
        for (std::uint64_t a = 0; a < atoms; ++a) {
            double p = 1.0;
            for (int j = 0; j < k; ++j) p *= base[(a >> (j * n)) & factor_mask];
            v[a] = p;
        }
        out.emplace_back(product, std::move(v));
        labels.push_back(k == 1 ? sys.labels()[f] : sys.labels()[f] + "^(x" + std::to_string(k) + ")");
    }
    return OrthoSystem(product, std::move(out), std::move(labels));
}

}  // namespace sidonlab
