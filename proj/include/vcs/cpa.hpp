#pragma once

#include <span>

#include "vcs/lattice.hpp"

namespace vcs {

/// Nearest lattice point to w (internal coordinates), exact for every family.
///
/// Ties, which have measure zero under continuous noise, resolve to the first
/// candidate in a fixed enumeration order: round-half-up per coordinate, the
/// lowest index among equal rounding errors, the D8 coset before its glue
/// coset, and the lowest (coset, Golay message) pair for the Leech lattice.
Point closest_point(const LatticeSpec& spec, std::span<const double> w);

/// Allocation-free variant; `out` must have ambient_dimension() entries and
/// may not alias `w`.
void closest_point(const LatticeSpec& spec, std::span<const double> w, std::span<double> out);

/// Exhaustive-search nearest point: enumerates every lattice point inside the
/// ball whose radius is the distance to the Babai rounding point. Test oracle;
/// throws std::length_error past `budget` enumeration nodes and
/// std::invalid_argument for LEECH24.
Point closest_point_bruteforce(const LatticeSpec& spec, std::span<const double> w,
                               std::size_t budget = 10'000'000);

namespace cpa {

/// floor(x + 1/2).
double round_half_up(double x);

/// Z^n: per-coordinate rounding.
void closest_cubic(std::span<const double> w, std::span<double> out);

/// D_n = {x in Z^n : sum x even}.
void closest_dn(std::span<const double> w, std::span<double> out);

/// A_n in the zero-sum hyperplane of R^{n+1}; w is projected onto the plane first.
void closest_an(std::span<const double> w, std::span<double> out);

/// E_8 = D_8 union (D_8 + (1/2)^8).
void closest_e8(std::span<const double> w, std::span<double> out);

/// Leech lattice in sqrt(8)-scaled integer coordinates: exact maximum
/// likelihood over both half-lattice cosets and all 4096 Golay codewords.
void closest_leech(std::span<const double> w, std::span<double> out);

}  // namespace cpa
}  // namespace vcs
