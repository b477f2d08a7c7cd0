#pragma once

// Riesz-product splitting F = t + r of F = sum_n z0_n z_n (x) z_n on the
// finite torus (Z_m)^N, with t of small projective norm and r of small
// injective norm.
//
// Characters are chi_g(z) = omega^{<g, z>} with omega = exp(2 pi i / m); an
// exponent vector g in (Z_m)^N is encoded as sum_n g_n m^n.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sidonlab/config.hpp"
#include "sidonlab/parallel.hpp"

namespace sidonlab {

using cplx = std::complex<double>;

inline constexpr std::uint64_t kMaxTorusPoints = std::uint64_t{1} << 20;

class TorusGrid {
public:
    TorusGrid(int coords, int modulus) : n_(coords), m_(modulus) {
        if (n_ < 1) throw std::invalid_argument("TorusGrid: N must be >= 1");
        if (m_ < 4 || m_ < n_ + 2) {
            throw std::invalid_argument("TorusGrid: need m >= max(4, N + 2); got N=" + std::to_string(n_) +
                                        ", m=" + std::to_string(m_));
        }
        points_ = 1;
        for (int i = 0; i < n_; ++i) {
            points_ *= static_cast<std::uint64_t>(m_);
            if (points_ > kMaxTorusPoints) {
                throw SizeError("TorusGrid: m^N exceeds " + std::to_string(kMaxTorusPoints) + " points");
            }
        }
        roots_.resize(static_cast<std::size_t>(m_));
        for (int k = 0; k < m_; ++k) roots_[static_cast<std::size_t>(k)] = std::polar(1.0, 2.0 * std::numbers::pi * k / m_);
    }

    int coords() const { return n_; }
    int modulus() const { return m_; }
    std::uint64_t points() const { return points_; }
    double weight() const { return 1.0 / static_cast<double>(points_); }

    /// omega^k for any integer k.
    cplx root(long long k) const { return roots_[static_cast<std::size_t>(((k % m_) + m_) % m_)]; }

    std::vector<int> decode(std::uint64_t code) const {
        std::vector<int> g(static_cast<std::size_t>(n_));
        for (int i = 0; i < n_; ++i) {
            g[static_cast<std::size_t>(i)] = static_cast<int>(code % static_cast<std::uint64_t>(m_));
            code /= static_cast<std::uint64_t>(m_);
        }
        return g;
    }

    std::uint64_t encode(const std::vector<int>& g) const {
        if (static_cast<int>(g.size()) != n_) throw std::invalid_argument("TorusGrid::encode: wrong length");
        std::uint64_t code = 0;
        for (int i = n_ - 1; i >= 0; --i) {
            code = code * static_cast<std::uint64_t>(m_) + static_cast<std::uint64_t>(((g[static_cast<std::size_t>(i)] % m_) + m_) % m_);
        }
        return code;
    }

    /// Signed representative in (-m/2, m/2].
    int centered(int e) const {
        e = ((e % m_) + m_) % m_;
        return 2 * e > m_ ? e - m_ : e;
    }

    bool operator==(const TorusGrid& o) const { return n_ == o.n_ && m_ == o.m_; }

private:
    int n_;
    int m_;
    std::uint64_t points_ = 1;
    std::vector<cplx> roots_;
};

/// Finite sum  sum c_{g,g'} chi_g(z) chi_{g'}(z')  keyed by encoded (g, g').
struct FourierTensor {
    explicit FourierTensor(TorusGrid g) : grid(std::move(g)) {}

    TorusGrid grid;
    std::map<std::pair<std::uint64_t, std::uint64_t>, cplx> coeffs;

    void add(std::uint64_t left, std::uint64_t right, cplx c) {
        auto [it, inserted] = coeffs.try_emplace({left, right}, c);
        if (!inserted) it->second += c;
        if (it->second == cplx{}) coeffs.erase(it);
    }

    std::size_t size() const { return coeffs.size(); }

    bool diagonal() const {
        return std::all_of(coeffs.begin(), coeffs.end(), [](const auto& kv) { return kv.first.first == kv.first.second; });
    }

    /// Number of non-zero coordinates of the left exponent.
    int layer_of(std::uint64_t left) const {
        int k = 0;
        for (int e : grid.decode(left)) k += e != 0 ? 1 : 0;
        return k;
    }

    cplx evaluate(const std::vector<int>& z, const std::vector<int>& zp) const {
        cplx s{};
        for (const auto& [key, c] : coeffs) {
            const auto g = grid.decode(key.first);
            const auto gp = grid.decode(key.second);
            long long e = 0;
            for (std::size_t i = 0; i < g.size(); ++i) e += static_cast<long long>(g[i]) * z[i] + static_cast<long long>(gp[i]) * zp[i];
            s += c * grid.root(e);
        }
        return s;
    }

    friend FourierTensor operator-(const FourierTensor& a, const FourierTensor& b) {
        if (!(a.grid == b.grid)) throw std::invalid_argument("FourierTensor: grid mismatch");
        FourierTensor out = a;
        for (const auto& [key, c] : b.coeffs) out.add(key.first, key.second, -c);
        return out;
    }

    friend FourierTensor operator+(const FourierTensor& a, const FourierTensor& b) {
        if (!(a.grid == b.grid)) throw std::invalid_argument("FourierTensor: grid mismatch");
        FourierTensor out = a;
        for (const auto& [key, c] : b.coeffs) out.add(key.first, key.second, c);
        return out;
    }

    /// Largest coefficient difference against another tensor.
    double max_difference(const FourierTensor& o) const {
        const FourierTensor d = *this - o;
        double m = 0.0;
        for (const auto& kv : d.coeffs) m = std::max(m, std::abs(kv.second));
        return m;
    }
};

namespace detail {

// In-place character synthesis along every axis of a dense array on
// (Z_m)^dims: values(w) = sum_g data(g) omega^{sign <g, w>}.
inline void torus_transform(std::vector<cplx>& data, int dims, const TorusGrid& grid, int sign) {
    const auto m = static_cast<std::size_t>(grid.modulus());
    std::vector<cplx> line(m), out(m);
    std::size_t stride = 1;
    for (int d = 0; d < dims; ++d) {
        for (std::size_t base = 0; base < data.size(); ++base) {
            if ((base / stride) % m != 0) continue;
            for (std::size_t k = 0; k < m; ++k) line[k] = data[base + k * stride];
            for (std::size_t w = 0; w < m; ++w) {
                cplx s{};
                for (std::size_t k = 0; k < m; ++k) {
                    s += line[k] * grid.root(sign * static_cast<long long>((k * w) % m));
                }
                out[w] = s;
            }
            for (std::size_t w = 0; w < m; ++w) data[base + w * stride] = out[w];
        }
        stride *= m;
    }
}

}  // namespace detail

/// Values of f on the grid. A diagonal tensor depends only on z + z', so it
/// is returned as a function of that sum (m^N values); otherwise the values
/// on the full product (m^{2N}, first factor in the low digits).
inline std::vector<cplx> tensor_values(const FourierTensor& f) {
    const auto& g = f.grid;
    if (f.diagonal()) {
        std::vector<cplx> data(g.points());
        for (const auto& [key, c] : f.coeffs) data[key.first] += c;
        detail::torus_transform(data, g.coords(), g, +1);
        return data;
    }
    const std::uint64_t total = g.points() * g.points();
    if (total > atom_budget()) {
        throw SizeError("tensor_values: product grid of " + std::to_string(total) + " points exceeds the atom budget");
    }
    std::vector<cplx> data(total);
    for (const auto& [key, c] : f.coeffs) data[key.first + key.second * g.points()] += c;
    detail::torus_transform(data, 2 * g.coords(), g, +1);
    return data;
}

/// ||f||_wedge = integral of |f| over the product grid.
inline double projective_norm(const FourierTensor& f) {
    const auto v = tensor_values(f);
    return chunked_sum(v.size(), [&](std::size_t i) { return std::abs(v[i]); }) / static_cast<double>(v.size());
}

struct InjectiveBounds {
    std::optional<double> upper;  // absent when the layer certificate does not apply
    double lower = 0.0;
    std::string warning;
};

struct InjectiveOptions {
    int restarts = 16;
    int max_iterations = 60;
    std::uint64_t seed = 20240601;
    double cost_budget = 4e9;  // rough complex multiply-adds for the ascent; 0 skips it
};

namespace detail {

// Layer certificate: sum over layers of the largest |coefficient|, valid when
// characters are distinct on each side within every layer.
inline std::optional<double> layer_certificate(const FourierTensor& f, std::string& warning) {
    std::map<int, double> top;
    std::map<int, std::vector<std::uint64_t>> lefts, rights;
    for (const auto& [key, c] : f.coeffs) {
        const int k = f.layer_of(key.first);
        top[k] = std::max(top[k], std::abs(c));
        lefts[k].push_back(key.first);
        rights[k].push_back(key.second);
    }
    for (auto* side : {&lefts, &rights}) {
        for (auto& [k, v] : *side) {
            std::sort(v.begin(), v.end());
            if (std::adjacent_find(v.begin(), v.end()) != v.end()) {
                warning = "layer " + std::to_string(k) + " repeats a character; no certified upper bound";
                return std::nullopt;
            }
        }
    }
    double s = 0.0;
    for (const auto& kv : top) s += kv.second;
    return s;
}

// Alternating maximization of |sum c a^(g) b^(g')| over unimodular a, b on the
// grid, where a^(g) = E[a chi_g]. Each half-step is exact given the other
// side, so the value never decreases.
inline double injective_ascent(const FourierTensor& f, const InjectiveOptions& opt) {
    const auto& grid = f.grid;
    const std::size_t pts = grid.points();
    std::vector<std::pair<std::pair<std::uint64_t, std::uint64_t>, cplx>> terms(f.coeffs.begin(), f.coeffs.end());
    if (terms.empty()) return 0.0;
    std::size_t best_term = 0;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        if (std::abs(terms[i].second) > std::abs(terms[best_term].second)) best_term = i;
    }
    const int dims = grid.coords();

    // E[b chi_g'] for every g', i.e. the conjugate-sign transform over the grid.
    auto coefficients = [&](const std::vector<cplx>& values) {
        std::vector<cplx> c = values;
        detail::torus_transform(c, dims, grid, +1);
        for (auto& v : c) v /= static_cast<double>(pts);
        return c;
    };
    // h(x) = sum c_{g g'} chi_g(x) B(g'), returned as values on the grid.
    auto side_function = [&](const std::vector<cplx>& other, bool left) {
        std::vector<cplx> data(pts);
        for (const auto& [key, c] : terms) {
            const std::uint64_t here = left ? key.first : key.second;
            const std::uint64_t there = left ? key.second : key.first;
            data[here] += c * other[there];
        }
        detail::torus_transform(data, dims, grid, +1);
        return data;
    };
    auto run = [&](std::size_t restart) {
        std::vector<cplx> b(pts);
        if (restart == 0) {
            // Start at the conjugate of the heaviest right character.
            const auto gp = grid.decode(terms[best_term].first.second);
            for (std::uint64_t y = 0; y < pts; ++y) {
                const auto w = grid.decode(y);
                long long e = 0;
                for (int i = 0; i < dims; ++i) e += static_cast<long long>(gp[static_cast<std::size_t>(i)]) * w[static_cast<std::size_t>(i)];
                b[y] = grid.root(-e);
            }
        } else {
            std::mt19937_64 rng(opt.seed + restart);
            std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
            for (auto& v : b) v = std::polar(1.0, phase(rng));
        }
        double value = 0.0;
        for (int it = 0; it < opt.max_iterations; ++it) {
            const auto h = side_function(coefficients(b), true);
            std::vector<cplx> a(pts);
            for (std::size_t x = 0; x < pts; ++x) {
                const double r = std::abs(h[x]);
                a[x] = r > 0.0 ? std::conj(h[x]) / r : cplx{1.0, 0.0};
            }
            const auto k = side_function(coefficients(a), false);
            double next = 0.0;
            for (std::size_t y = 0; y < pts; ++y) {
                const double r = std::abs(k[y]);
                next += r;
                b[y] = r > 0.0 ? std::conj(k[y]) / r : cplx{1.0, 0.0};
            }
            next /= static_cast<double>(pts);
            const bool settled = next <= value * (1.0 + 1e-13);
            value = std::max(value, next);
            if (settled) break;
        }
        return value;
    };
    const auto values = parallel_map(static_cast<std::size_t>(std::max(1, opt.restarts)), run);
    return *std::max_element(values.begin(), values.end());
}

}  // namespace detail

/// Certified upper bound (layer certificate) and a search lower bound on
/// ||f||_vee = sup |E_{x,y} f(x,y) a(x) b(y)| over |a|, |b| <= 1 on the grid.
inline InjectiveBounds injective_norm_bounds(const FourierTensor& f, const InjectiveOptions& opt = {}) {
    InjectiveBounds out;
    out.upper = detail::layer_certificate(f, out.warning);
    const auto& g = f.grid;
    const double cost = static_cast<double>(opt.restarts) * opt.max_iterations * 4.0 *
                        static_cast<double>(g.points()) * g.coords() * g.modulus();
    if (f.coeffs.empty()) return out;
    if (cost > opt.cost_budget) {
        // No search: the heaviest single term is still a valid lower bound.
        for (const auto& kv : f.coeffs) out.lower = std::max(out.lower, std::abs(kv.second));
        if (out.warning.empty()) out.warning = "ascent skipped (cost budget); lower bound is the largest coefficient";
        return out;
    }
    out.lower = detail::injective_ascent(f, opt);
    return out;
}

struct RieszDecomposition {
    explicit RieszDecomposition(const TorusGrid& g) : F(g), nu(g), t_prime(g), r_prime(g), t(g), r(g) {}

    double eps = 0.0;
    std::vector<int> z0;  // exponents: z0_n = omega^{z0[n]}
    FourierTensor F, nu, t_prime, r_prime, t, r;
    double wedge_t = 0.0;
    double vee_r_upper = 0.0;
    double vee_r_prime_upper = 0.0;
    std::optional<double> vee_r_lower;
};

/// The F-tensor sum_n z0_n z_n (x) z_n.
inline FourierTensor single_layer_tensor(const TorusGrid& grid, const std::vector<int>& z0) {
    FourierTensor f(grid);
    for (int n = 0; n < grid.coords(); ++n) {
        std::vector<int> e(static_cast<std::size_t>(grid.coords()), 0);
        e[static_cast<std::size_t>(n)] = 1;
        const auto code = grid.encode(e);
        f.add(code, code, grid.root(z0[static_cast<std::size_t>(n)]));
    }
    return f;
}

/// nu_eps = prod_n (1 + eps Re(z0_n z_n z'_n)) expanded in characters: each
/// coordinate contributes 1, (eps/2) z0 z z' or (eps/2) conj(z0 z z').
inline FourierTensor riesz_product(const TorusGrid& grid, const std::vector<int>& z0, double eps) {
    const int n = grid.coords();
    FourierTensor nu(grid);
    std::uint64_t patterns = 1;
    for (int i = 0; i < n; ++i) patterns *= 3;
    for (std::uint64_t p = 0; p < patterns; ++p) {
        std::vector<int> g(static_cast<std::size_t>(n));
        std::uint64_t q = p;
        int layer = 0;
        long long phase = 0;
        for (int i = 0; i < n; ++i) {
            const int d = static_cast<int>(q % 3);
            q /= 3;
            const int s = d == 0 ? 0 : (d == 1 ? 1 : -1);
            g[static_cast<std::size_t>(i)] = s;
            layer += s != 0 ? 1 : 0;
            phase += static_cast<long long>(s) * z0[static_cast<std::size_t>(i)];
        }
        const auto code = grid.encode(g);
        nu.add(code, code, std::pow(eps / 2.0, layer) * grid.root(phase));
    }
    return nu;
}

/// 2 E_omega[conj(omega) f(omega z, z')] over the m-th roots: keeps the terms
/// whose left degree sum_n g_n is 1 mod m and doubles them.
inline FourierTensor rotation_average(const FourierTensor& f) {
    const auto& grid = f.grid;
    FourierTensor out(grid);
    for (const auto& [key, c] : f.coeffs) {
        long long deg = 0;
        for (int e : grid.decode(key.first)) deg += e;
        if (((deg - 1) % grid.modulus() + grid.modulus()) % grid.modulus() == 0) out.add(key.first, key.second, 2.0 * c);
    }
    return out;
}

struct RieszOptions {
    bool search_lower = true;
    InjectiveOptions injective;
};

inline RieszDecomposition decompose(const TorusGrid& grid, const std::vector<int>& z0, double eps,
                                    const RieszOptions& opt = {}) {
    if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("decompose: eps must lie in (0, 1]");
    if (static_cast<int>(z0.size()) != grid.coords()) throw std::invalid_argument("decompose: z0 must have N entries");
    RieszDecomposition d(grid);
    d.eps = eps;
    for (int e : z0) d.z0.push_back(((e % grid.modulus()) + grid.modulus()) % grid.modulus());
    d.F = single_layer_tensor(grid, d.z0);
    d.nu = riesz_product(grid, d.z0, eps);

    // t' = (nu_eps - nu_0) / eps; r' = Re-part of F minus t'.
    FourierTensor re_f(grid);
    for (const auto& [key, c] : d.nu.coeffs) {
        const int layer = d.nu.layer_of(key.first);
        if (layer >= 1) d.t_prime.add(key.first, key.second, c / eps);
        if (layer == 1) re_f.add(key.first, key.second, c / eps);
    }
    d.r_prime = re_f - d.t_prime;
    d.t = rotation_average(d.t_prime);
    d.r = d.F - d.t;

    std::string unused;
    d.wedge_t = projective_norm(d.t);
    d.vee_r_upper = detail::layer_certificate(d.r, unused).value_or(std::numeric_limits<double>::infinity());
    d.vee_r_prime_upper = detail::layer_certificate(d.r_prime, unused).value_or(std::numeric_limits<double>::infinity());
    if (opt.search_lower) {
        const auto b = injective_norm_bounds(d.r, opt.injective);
        d.vee_r_lower = b.lower;
    }
    return d;
}

/// Sum |a_n| <= 2 w(eps) ||Psi||_inf with w(eps) = 4 / eps at eps = 1/(2 C'^2).
inline double tensor2_sidon_bound(double c_prime) {
    if (!(c_prime >= 1.0)) throw std::invalid_argument("tensor2_sidon_bound: C' must be >= 1");
    const double eps = 1.0 / (2.0 * c_prime * c_prime);
    return 2.0 * (4.0 / eps);
}

}  // namespace sidonlab
