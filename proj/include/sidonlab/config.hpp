#pragma once

#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace sidonlab {

/// Raised when a requested object would exceed a configured size limit.
class SizeError : public std::length_error {
public:
    using std::length_error::length_error;
};

/// Raised when an internal invariant that the mathematics guarantees fails
/// to hold on an enumerated instance.
class CertificationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised for LP inputs whose optimum is not finite.
class DegenerateInput : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t kDefaultAtomBudget = std::uint64_t{1} << 24;
inline constexpr double kReportTolerance = 1e-12;

namespace detail {
inline std::uint64_t& atom_budget_override() {
    static std::uint64_t value = 0;
    return value;
}
}  // namespace detail

/// Atom budget per space. SIDONLAB_ATOM_BUDGET overrides the default; an
/// explicit set_atom_budget() call overrides both.
inline std::uint64_t atom_budget() {
    if (detail::atom_budget_override() != 0) return detail::atom_budget_override();
    if (const char* env = std::getenv("SIDONLAB_ATOM_BUDGET")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return v;
    }
    return kDefaultAtomBudget;
}

inline void set_atom_budget(std::uint64_t budget) { detail::atom_budget_override() = budget; }

inline void require_atoms_within_budget(std::uint64_t atoms, const std::string& what) {
    if (atoms > atom_budget()) {
        throw SizeError(what + ": " + std::to_string(atoms) + " atoms exceeds the atom budget of " +
                        std::to_string(atom_budget()) + " (SIDONLAB_ATOM_BUDGET)");
    }
}

}  // namespace sidonlab
