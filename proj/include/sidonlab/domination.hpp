#pragma once

// L1-domination inequalities in B = l_inf^d, checked by exact enumeration:
// the two-point barycentric bound, its conditional form, martingale
// difference sequences against independent signs, the failure of the complex
// analogue, and the union / tensor stability remarks.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sidonlab/config.hpp"
#include "sidonlab/constructions.hpp"
#include "sidonlab/cube.hpp"
#include "sidonlab/parallel.hpp"

namespace sidonlab {

using Vec = std::vector<double>;

struct DominationCheck {
    std::string id;  // two_point, conditional_two_point, mds, sup_criterion
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;
    bool pass = false;
    std::string detail;

    void settle() {
        slack = rhs - lhs;
        pass = slack >= -kReportTolerance;
    }
};

inline double sup_norm(const Vec& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

namespace detail {
inline double norm_of_combination(const Vec& x0, double a, const Vec& x1, double b) {
    double m = 0.0;
    for (std::size_t i = 0; i < x0.size(); ++i) m = std::max(m, std::abs(a * x0[i] + b * x1[i]));
    return m;
}

inline void require_same_dimension(const std::vector<Vec>& xs, const char* who) {
    if (xs.empty()) throw std::invalid_argument(std::string(who) + ": no vectors");
    for (const auto& x : xs) {
        if (x.size() != xs.front().size() || x.empty()) throw std::invalid_argument(std::string(who) + ": vectors must share one dimension d >= 1");
    }
}
}  // namespace detail

/// Finite law on [-1, 1]: (value, probability) pairs.
using FiniteLaw = std::vector<std::pair<double, double>>;

/// Equal mixture of 1..max_pairs centred two-point laws {a, b}, a < 0 < b.
template <class Rng>
FiniteLaw random_centered_law(Rng& rng, int max_pairs = 3) {
    std::uniform_real_distribution<double> u(1e-3, 1.0);
    std::uniform_int_distribution<int> count(1, std::max(1, max_pairs));
    const int pairs = count(rng);
    FiniteLaw law;
    for (int j = 0; j < pairs; ++j) {
        const double a = -u(rng), b = u(rng);
        law.push_back({a, b / (b - a) / pairs});
        law.push_back({b, -a / (b - a) / pairs});
    }
    return law;
}

struct TwoPointReport {
    DominationCheck check;
    double kernel_value = 0.0;  // sum_v p_v int_0^1 ||x0 + F(t, v) x1|| dt
    bool routes_agree = false;  // kernel_value equals the sign expectation
    bool pointwise_jensen = false;
};

/// E'||x0 + phi x1|| <= E||x0 + eps x1|| for mean-zero phi in [-1, 1].
inline TwoPointReport check_two_point(const FiniteLaw& phi, const Vec& x0, const Vec& x1) {
    if (x0.size() != x1.size() || x0.empty()) throw std::invalid_argument("check_two_point: x0 and x1 must share a dimension");
    double total = 0.0, mean = 0.0;
    for (const auto& [v, p] : phi) {
        if (!(v >= -1.0 && v <= 1.0)) throw std::invalid_argument("check_two_point: support must lie in [-1, 1]");
        if (!(p >= 0.0)) throw std::invalid_argument("check_two_point: negative probability");
        total += p;
        mean += p * v;
    }
    if (std::abs(total - 1.0) > 1e-14) throw std::invalid_argument("check_two_point: probabilities must sum to 1");
    if (std::abs(mean) > 1e-14) throw std::invalid_argument("check_two_point: phi must have mean 0");

    const double plus = detail::norm_of_combination(x0, 1.0, x1, 1.0);
    const double minus = detail::norm_of_combination(x0, 1.0, x1, -1.0);
    TwoPointReport r;
    r.check.id = "two_point";
    r.pointwise_jensen = true;
    for (const auto& [v, p] : phi) {
        const double direct = detail::norm_of_combination(x0, 1.0, x1, v);
        // F(t, v) = -1 on [0, (1-v)/2] and +1 after it.
        const double kernel = minus * (1.0 - v) / 2.0 + plus * (1.0 + v) / 2.0;
        r.check.lhs += p * direct;
        r.kernel_value += p * kernel;
        if (direct > kernel + kReportTolerance) r.pointwise_jensen = false;
    }
    r.check.rhs = (plus + minus) / 2.0;
    r.routes_agree = std::abs(r.kernel_value - r.check.rhs) <= 1e-12 * (1.0 + r.check.rhs);
    r.check.settle();
    r.check.pass = r.check.pass && r.routes_agree && r.pointwise_jensen;
    return r;
}

/// Conditional form on an atomic algebra: phi on a cube with E[phi | low
/// `bits` coordinates] = 0, x0 measurable for the same algebra (one vector per
/// atom). Besides the global inequality, each atom of the algebra is checked.
inline DominationCheck check_conditional_two_point(const CubeFunction& phi, int bits, const std::vector<Vec>& x0,
                                                   const Vec& x1) {
    const CubeSpace& s = phi.space();
    if (x0.size() != s.atom_count()) throw std::invalid_argument("check_conditional_two_point: x0 needs one vector per atom");
    if (sup_norm(conditional_expectation(phi, bits)) > 1e-14) {
        throw std::invalid_argument("check_conditional_two_point: E[phi | algebra] != 0");
    }
    const std::uint64_t cells = std::uint64_t{1} << bits;
    for (std::uint64_t a = 0; a < s.atom_count(); ++a) {
        if (std::abs(phi[a]) > 1.0) throw std::invalid_argument("check_conditional_two_point: |phi| > 1");
        if (x0[a] != x0[a & (cells - 1)]) throw std::invalid_argument("check_conditional_two_point: x0 is not measurable");
    }
    std::vector<double> left(cells, 0.0), right(cells, 0.0);
    for (std::uint64_t a = 0; a < s.atom_count(); ++a) {
        const auto c = a & (cells - 1);
        left[c] += detail::norm_of_combination(x0[a], 1.0, x1, phi[a]);
        right[c] += (detail::norm_of_combination(x0[a], 1.0, x1, 1.0) + detail::norm_of_combination(x0[a], 1.0, x1, -1.0)) / 2.0;
    }
    DominationCheck r;
    r.id = "conditional_two_point";
    const double fibre = static_cast<double>(s.atom_count() / cells);
    for (std::uint64_t c = 0; c < cells; ++c) {
        r.lhs += left[c];
        r.rhs += right[c];
        if (left[c] / fibre > right[c] / fibre + kReportTolerance && r.detail.empty()) {
            r.detail = "violated on atom " + std::to_string(c) + " of the conditioning algebra";
        }
    }
    r.lhs *= s.weight();
    r.rhs *= s.weight();
    r.settle();
    r.pass = r.pass && r.detail.empty();
    return r;
}

/// Martingale differences d_1..d_k on a cube with filtration A_n generated by
/// the low bits[n] coordinates (bits[0] = 0), constant d0, vectors x_0..x_k.
struct VectorSequenceInstance {
    CubeSpace space;
    std::vector<int> bits;       // bits[0..k], nondecreasing
    double d0 = 1.0;
    std::vector<CubeFunction> d;  // d_1..d_k
    std::vector<Vec> x;           // x_0..x_k in l_inf^d

    int steps() const { return static_cast<int>(d.size()); }
    int dimension() const { return x.empty() ? 0 : static_cast<int>(x.front().size()); }
};

/// Returns an empty string or the first violated hypothesis with its step.
inline std::string validate_instance(const VectorSequenceInstance& inst) {
    const int k = inst.steps();
    if (static_cast<int>(inst.bits.size()) != k + 1) return "bits must have k + 1 entries";
    if (static_cast<int>(inst.x.size()) != k + 1) return "x must have k + 1 vectors";
    if (inst.bits[0] != 0) return "A_0 must be trivial";
    for (int n = 1; n <= k; ++n) {
        if (inst.bits[n] < inst.bits[n - 1] || inst.bits[n] > inst.space.coord_count()) return "filtration bits must be nondecreasing";
    }
    if (std::abs(inst.d0) > 1.0) return "|d_0| > 1";
    for (int n = 1; n <= k; ++n) {
        const auto& dn = inst.d[static_cast<std::size_t>(n - 1)];
        const std::string step = " at step " + std::to_string(n);
        if (sup_norm(dn) > 1.0) return "|d_n| > 1" + step;
        if (!is_measurable(dn, inst.bits[n])) return "d_n is not A_n-measurable" + step;
        if (sup_norm(conditional_expectation(dn, inst.bits[n - 1])) > 1e-14) return "E[d_n | A_{n-1}] != 0" + step;
    }
    for (const auto& v : inst.x) {
        if (v.size() != inst.x.front().size() || v.empty()) return "vectors must share one dimension";
    }
    return {};
}

struct MdsDominationReport {
    DominationCheck check;
    std::vector<double> hybrid;  // H_k (= lhs) .. H_0 (= rhs)
    bool chain_monotone = false;
};

/// ||d0 x0 + sum d_n x_n||_{L1} <= ||d0 x0 + sum eps_n x_n||_{L1}, with the
/// hybrids H_j (d_1..d_j then eps_{j+1}..eps_k) checked to be nondecreasing
/// from H_k to H_0.
inline MdsDominationReport check_mds_domination(const VectorSequenceInstance& inst) {
    if (const auto why = validate_instance(inst); !why.empty()) throw std::invalid_argument("check_mds_domination: " + why);
    const int k = inst.steps();
    const std::size_t dim = inst.x.front().size();
    auto hybrid = [&](int j) {
        // d_1..d_j depend on the low bits[j] coordinates only.
        const int coarse = inst.bits[static_cast<std::size_t>(j)];
        const int free = k - j;
        require_atoms_within_budget(std::uint64_t{1} << (coarse + free), "check_mds_domination hybrid");
        const std::uint64_t total = std::uint64_t{1} << (coarse + free);
        const std::uint64_t cmask = (std::uint64_t{1} << coarse) - 1;
        const double sum = chunked_sum(total, [&](std::size_t idx) {
            const std::uint64_t cell = idx & cmask;
            const std::uint64_t signs = idx >> coarse;
            double m = 0.0;
            for (std::size_t i = 0; i < dim; ++i) {
                double v = inst.d0 * inst.x[0][i];
                for (int n = 1; n <= j; ++n) v += inst.d[static_cast<std::size_t>(n - 1)][cell] * inst.x[static_cast<std::size_t>(n)][i];
                for (int n = j + 1; n <= k; ++n) {
                    const double e = ((signs >> (n - j - 1)) & 1U) != 0 ? 1.0 : -1.0;
                    v += e * inst.x[static_cast<std::size_t>(n)][i];
                }
                m = std::max(m, std::abs(v));
            }
            return m;
        });
        return sum / static_cast<double>(total);
    };
    MdsDominationReport r;
    for (int j = k; j >= 0; --j) r.hybrid.push_back(hybrid(j));
    r.check.id = "mds";
    r.check.lhs = r.hybrid.front();
    r.check.rhs = r.hybrid.back();
    r.check.settle();
    r.chain_monotone = true;
    for (std::size_t i = 1; i < r.hybrid.size(); ++i) {
        if (r.hybrid[i - 1] > r.hybrid[i] + kReportTolerance) {
            r.chain_monotone = false;
            r.check.detail = "hybrid step " + std::to_string(k - static_cast<int>(i) + 1) + " decreases";
            break;
        }
    }
    r.check.pass = r.check.pass && r.chain_monotone;
    return r;
}

/// Instance built from a construction trace: d_n = f_n, d0 = 1.
inline VectorSequenceInstance instance_from_trace(const ConstructionTrace& t, std::vector<Vec> x) {
    VectorSequenceInstance inst;
    inst.space = t.space;
    inst.bits.push_back(0);
    for (int n = 1; n <= t.steps; ++n) {
        inst.d.push_back(t.increment(n));
        inst.bits.push_back(t.measurable_bits(n));
    }
    inst.x = std::move(x);
    return inst;
}

/// Random martingale differences: each step adds r fresh coordinates, and on
/// every atom of A_{n-1} the 2^r values of d_n are random, centred and
/// scaled into [-1, 1].
template <class Rng>
VectorSequenceInstance random_mds_instance(int k, int dim, int r, Rng& rng) {
    if (k < 1 || r < 1 || dim < 1) throw std::invalid_argument("random_mds_instance: k, r and d must be >= 1");
    VectorSequenceInstance inst;
    inst.space = CubeSpace(k * r);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_int_distribution<int> ix(-3, 3);
    inst.d0 = u(rng);
    inst.bits.push_back(0);
    for (int n = 1; n <= k; ++n) {
        const int lo = (n - 1) * r;
        const std::uint64_t cells = std::uint64_t{1} << lo;
        const std::uint64_t fresh = std::uint64_t{1} << r;
        std::vector<double> table(cells * fresh);
        for (std::uint64_t c = 0; c < cells; ++c) {
            double mean = 0.0, top = 0.0;
            for (std::uint64_t f = 0; f < fresh; ++f) mean += (table[c + cells * f] = u(rng));
            mean /= static_cast<double>(fresh);
            for (std::uint64_t f = 0; f < fresh; ++f) top = std::max(top, std::abs(table[c + cells * f] -= mean));
            if (top > 1.0) {
                for (std::uint64_t f = 0; f < fresh; ++f) table[c + cells * f] /= top;
            }
        }
        std::vector<double> v(inst.space.atom_count());
        const std::uint64_t low = (std::uint64_t{1} << (lo + r)) - 1;
        for (std::uint64_t a = 0; a < v.size(); ++a) v[a] = table[a & low];
        inst.d.emplace_back(inst.space, std::move(v));
        inst.bits.push_back(lo + r);
    }
    for (int n = 0; n <= k; ++n) {
        Vec x(static_cast<std::size_t>(dim));
        for (double& e : x) e = ix(rng);
        inst.x.push_back(std::move(x));
    }
    return inst;
}

/// d_n = eps_n 1_{A_{n-1}} with random predictable masks.
template <class Rng>
VectorSequenceInstance predictable_mask_instance(int k, int dim, Rng& rng) {
    VectorSequenceInstance inst;
    inst.space = CubeSpace(k);
    std::bernoulli_distribution coin(0.6);
    std::uniform_int_distribution<int> ix(-3, 3);
    inst.bits.push_back(0);
    for (int n = 1; n <= k; ++n) {
        const std::uint64_t cells = std::uint64_t{1} << (n - 1);
        std::vector<bool> keep(cells);
        for (std::uint64_t c = 0; c < cells; ++c) keep[c] = coin(rng);
        std::vector<double> v(inst.space.atom_count());
        for (std::uint64_t a = 0; a < v.size(); ++a) v[a] = keep[a & (cells - 1)] ? CubeSpace::sign(a, n - 1) : 0.0;
        inst.d.emplace_back(inst.space, std::move(v));
        inst.bits.push_back(n);
    }
    for (int n = 0; n <= k; ++n) {
        Vec x(static_cast<std::size_t>(dim));
        for (double& e : x) e = ix(rng);
        inst.x.push_back(std::move(x));
    }
    return inst;
}

struct Mm3Result {
    double lhs = 2.0;
    double rhs = 0.0;
    bool violated = false;
    int points_used = 0;
};

/// (1, eps_1) is not 1-dominated by (1, z_1): E max|1 +- eps_1| = 2 exceeds
/// (1/2pi) int max(2|cos(t/2)|, 2|sin(t/2)|) dt. Composite Simpson on a grid
/// that contains the kinks, refined by doubling with a Richardson step until
/// successive values differ by less than 1e-8.
inline Mm3Result mm3_counterexample(int quad_points = 64) {
    if (quad_points < 64) throw std::invalid_argument("mm3_counterexample: need at least 64 points");
    auto integrand = [](double t) { return std::max(2.0 * std::abs(std::cos(t / 2.0)), 2.0 * std::abs(std::sin(t / 2.0))); };
    auto simpson = [&](int panels) {
        const double h = 2.0 * std::numbers::pi / panels;
        double s = integrand(0.0) + integrand(2.0 * std::numbers::pi);
        for (int i = 1; i < panels; ++i) s += (i % 2 != 0 ? 4.0 : 2.0) * integrand(i * h);
        return s * h / 3.0 / (2.0 * std::numbers::pi);
    };
    int panels = (quad_points + 7) / 8 * 8;
    double coarse = simpson(panels);
    double previous = coarse;
    Mm3Result r;
    for (int round = 0; round < 30; ++round) {
        panels *= 2;
        const double fine = simpson(panels);
        const double extrapolated = fine + (fine - coarse) / 15.0;
        r.rhs = extrapolated;
        r.points_used = panels;
        if (round > 0 && std::abs(extrapolated - previous) < 1e-8) break;
        previous = extrapolated;
        coarse = fine;
    }
    r.violated = r.lhs > r.rhs;
    return r;
}

namespace detail {

// Reference variables: signs (m = 2) or fourth roots of unity (m = 4).
inline std::complex<double> unit_root(int m, std::uint64_t j) {
    if (m == 2) return j == 0 ? 1.0 : -1.0;
    static const std::complex<double> r4[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return r4[j & 3U];
}

inline double reference_expectation(int m, const std::vector<Vec>& x) {
    const std::size_t k = x.size();
    const std::size_t dim = x.front().size();
    std::uint64_t total = 1;
    for (std::size_t n = 0; n < k; ++n) total *= static_cast<std::uint64_t>(m);
    require_atoms_within_budget(total, "reference expectation");
    const double sum = chunked_sum(total, [&](std::size_t idx) {
        double best = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            std::complex<double> v{};
            std::uint64_t q = idx;
            for (std::size_t n = 0; n < k; ++n) {
                v += unit_root(m, q % static_cast<std::uint64_t>(m)) * x[n][i];
                q /= static_cast<std::uint64_t>(m);
            }
            best = std::max(best, std::abs(v));
        }
        return best;
    });
    return sum / static_cast<double>(total);
}

}  // namespace detail

/// ||sum f_n x_n||_{L1} <= (c1 + c2) ||sum eps_n x_n||_{L1} for the
/// interleaved system f_{2k} = f2_k, f_{2k+1} = f1_k (indices from 0).
inline DominationCheck check_union_domination(const OrthoSystem& f1, const OrthoSystem& f2, double c1, double c2,
                                              const std::vector<Vec>& x) {
    if (!(f1.space() == f2.space())) throw std::invalid_argument("check_union_domination: systems must share a space");
    if (f1.size() != f2.size()) throw std::invalid_argument("check_union_domination: systems must have equal length");
    if (x.size() != 2 * f1.size()) throw std::invalid_argument("check_union_domination: need one vector per function");
    detail::require_same_dimension(x, "check_union_domination");
    std::vector<const CubeFunction*> f;
    for (std::size_t k = 0; k < f1.size(); ++k) {
        f.push_back(&f2[k]);
        f.push_back(&f1[k]);
    }
    const std::size_t dim = x.front().size();
    const auto& s = f1.space();
    DominationCheck r;
    r.id = "sup_criterion";
    r.detail = "union";
    r.lhs = chunked_sum(s.atom_count(), [&](std::size_t a) {
                double best = 0.0;
                for (std::size_t i = 0; i < dim; ++i) {
                    double v = 0.0;
                    for (std::size_t n = 0; n < f.size(); ++n) v += (*f[n])[a] * x[n][i];
                    best = std::max(best, std::abs(v));
                }
                return best;
            }) * s.weight();
    r.rhs = (c1 + c2) * detail::reference_expectation(2, x);
    r.settle();
    return r;
}

/// ||sum phi_n (x) z_n x_n||_{L1} <= ||sum z_n x_n||_{L1} for ||phi_n||_inf <= 1,
/// with z_n signs (m = 2) or fourth roots of unity (m = 4).
inline DominationCheck check_tensor_domination(const OrthoSystem& phi, const std::vector<Vec>& x, int m) {
    if (m != 2 && m != 4) throw std::invalid_argument("check_tensor_domination: m must be 2 or 4");
    if (x.size() != phi.size()) throw std::invalid_argument("check_tensor_domination: need one vector per function");
    detail::require_same_dimension(x, "check_tensor_domination");
    for (std::size_t n = 0; n < phi.size(); ++n) {
        if (sup_norm(phi[n]) > 1.0 + 1e-15) throw std::invalid_argument("check_tensor_domination: ||phi_n||_inf > 1");
    }
    const std::size_t k = phi.size();
    const std::size_t dim = x.front().size();
    const auto& s = phi.space();
    std::uint64_t cells = 1;
    for (std::size_t n = 0; n < k; ++n) cells *= static_cast<std::uint64_t>(m);
    require_atoms_within_budget(s.atom_count() * cells, "check_tensor_domination");
    const double lhs = chunked_sum(s.atom_count() * cells, [&](std::size_t idx) {
        const std::uint64_t a = idx % s.atom_count();
        std::uint64_t q = idx / s.atom_count();
        std::vector<std::complex<double>> z(k);
        for (std::size_t n = 0; n < k; ++n) {
            z[n] = detail::unit_root(m, q % static_cast<std::uint64_t>(m)) * phi[n][a];
            q /= static_cast<std::uint64_t>(m);
        }
        double best = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            std::complex<double> v{};
            for (std::size_t n = 0; n < k; ++n) v += z[n] * x[n][i];
            best = std::max(best, std::abs(v));
        }
        return best;
    });
    DominationCheck r;
    r.id = "sup_criterion";
    r.detail = "tensor m=" + std::to_string(m);
    r.lhs = lhs / static_cast<double>(s.atom_count() * cells);
    r.rhs = detail::reference_expectation(m, x);
    r.settle();
    return r;
}

/// Batch of union checks on (f1, f2) and tensor checks on f1 and f2 for
/// random integer vectors in l_inf^dim. Trial i uses seed (seed, i).
inline std::vector<DominationCheck> check_union_and_tensor_domination(const OrthoSystem& f1, const OrthoSystem& f2,
                                                                      double c1, double c2, int trials,
                                                                      std::uint64_t seed = 1, int dim = 3) {
    auto vectors = [&](std::mt19937_64& rng, std::size_t count) {
        std::uniform_int_distribution<int> ix(-4, 4);
        std::vector<Vec> x(count, Vec(static_cast<std::size_t>(dim)));
        for (auto& v : x)
            for (double& e : v) e = ix(rng);
        return x;
    };
    auto run = [&](std::size_t t) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(t)};
        std::mt19937_64 rng(seq);
        std::vector<DominationCheck> out;
        out.push_back(check_union_domination(f1, f2, c1, c2, vectors(rng, 2 * f1.size())));
        for (const OrthoSystem* phi : {&f1, &f2}) {
            for (int m : {2, 4}) out.push_back(check_tensor_domination(*phi, vectors(rng, phi->size()), m));
        }
        return out;
    };
    std::vector<DominationCheck> all;
    for (auto& batch : parallel_map(static_cast<std::size_t>(trials), run)) {
        for (auto& c : batch) all.push_back(std::move(c));
    }
    return all;
}

}  // namespace sidonlab
