#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vcs {

/// Real vector in internal (scaled) lattice coordinates unless stated otherwise.
using Point = std::vector<double>;
/// Integer coefficient vector z of a lattice point G z.
using IntegerVector = std::vector<std::int64_t>;

enum class LatticeFamily { Cubic, A2, D4, E8, Leech24 };

std::string_view to_string(LatticeFamily family);
/// Accepts "cubic"/"zn", "a2", "d4", "e8", "leech24"/"leech" (case-insensitive).
LatticeFamily parse_family(std::string_view name);

/// Dense row-major integer matrix with a common denominator: value(i, j) = num(i, j) / den.
struct ScaledIntMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::int64_t den = 1;
  std::vector<std::int64_t> num;

  std::int64_t at(std::size_t i, std::size_t j) const { return num[i * cols + j]; }
  std::int64_t& at(std::size_t i, std::size_t j) { return num[i * cols + j]; }
};

/// Immutable description of one supported lattice.
///
/// Lattice points are G z for integer z, where the columns of the generator G
/// are the basis vectors g_0 ... g_{N-1}. G is stored exactly as an integer
/// matrix over a common denominator. Internal coordinates live in an ambient
/// space that equals the rank N for every family except A2, which is embedded
/// in the zero-sum plane of Z^3 so that its coordinates stay integral.
///
/// Physical coordinates are obtained by projecting onto the lattice span
/// (A2 only) and dividing by coord_scale, with coord_scale^2 rational.
class LatticeSpec {
 public:
  LatticeFamily family() const { return family_; }
  /// Rank N (physical dimension).
  std::size_t dimension() const { return n_; }
  /// Number of internal coordinates (3 for A2, N otherwise).
  std::size_t ambient_dimension() const { return ambient_; }

  const ScaledIntMatrix& generator() const { return generator_; }
  /// Generator entry as a double (exact for every supported family).
  double generator_entry(std::size_t row, std::size_t col) const { return g_[row * n_ + col]; }

  /// Exact left inverse of G (N x ambient) over a common denominator.
  const ScaledIntMatrix& generator_inverse() const { return inverse_; }

  std::int64_t coord_scale_squared() const { return scale2_; }
  double coord_scale() const { return scale_; }

  /// Squared minimum distance of the infinite lattice, internal coordinates.
  std::int64_t dmin2_internal() const { return dmin2_; }
  /// Number of lattice vectors of squared norm dmin2_internal.
  std::uint64_t kissing() const { return kissing_; }
  /// Packing radius in internal coordinates.
  double packing_radius() const;

  /// Internal -> physical coordinates (length N).
  Point to_physical(std::span<const double> internal) const;
  /// Physical -> internal coordinates (length ambient_dimension).
  Point from_physical(std::span<const double> physical) const;
  void to_physical(std::span<const double> internal, std::span<double> out) const;
  void from_physical(std::span<const double> physical, std::span<double> out) const;

  /// Left-inverse coefficients k' = G^+ x as doubles (no rounding).
  void raw_coefficients(std::span<const double> x, std::span<double> out) const;

 private:
  friend LatticeSpec make_lattice(LatticeFamily family, std::size_t n);

  LatticeFamily family_ = LatticeFamily::Cubic;
  std::size_t n_ = 0;
  std::size_t ambient_ = 0;
  ScaledIntMatrix generator_;
  ScaledIntMatrix inverse_;
  std::vector<double> g_;
  std::vector<double> ginv_;
  std::int64_t scale2_ = 1;
  double scale_ = 1.0;
  std::int64_t dmin2_ = 1;
  std::uint64_t kissing_ = 0;
};

/// Builds a lattice. CUBIC accepts any N >= 1; A2, D4, E8 and LEECH24 require
/// N = 2, 4, 8 and 24 respectively. Throws std::invalid_argument otherwise.
LatticeSpec make_lattice(LatticeFamily family, std::size_t n);

/// The lattice point G z, internal coordinates.
Point lattice_point(const LatticeSpec& spec, std::span<const std::int64_t> z);

/// Integer z with G z = lambda. Throws std::domain_error("not a lattice point")
/// when some coefficient is further than 1e-6 from an integer or the
/// reconstruction misses lambda by more than 1e-6.
IntegerVector coeffs_of(const LatticeSpec& spec, std::span<const double> lambda);

/// Same as coeffs_of but writes into caller storage; no allocation.
void coeffs_of(const LatticeSpec& spec, std::span<const double> lambda, std::span<std::int64_t> out);

/// All lattice points within squared distance radius2 of center, by exhaustive
/// Fincke-Pohst enumeration of the integer coefficient box. The enumeration
/// visits at most `budget` tree nodes; exceeding it throws std::length_error.
std::vector<Point> enumerate_ball(const LatticeSpec& spec, std::span<const double> center,
                                  double radius2, std::size_t budget = 10'000'000);

/// Squared Euclidean distance between two equally sized vectors.
double distance2(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

}  // namespace vcs
