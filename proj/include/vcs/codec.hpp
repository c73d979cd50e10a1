#pragma once

#include <cstdint>
#include <span>

#include "vcs/index.hpp"
#include "vcs/lattice.hpp"

namespace vcs {

/// How constellation energy and centroid are obtained: full enumeration when
/// M <= exact_limit, otherwise `samples` uniform random indices.
struct EnergyOptions {
  std::uint64_t exact_limit = 65536;
  std::size_t samples = 100000;
  std::uint64_t seed = 1;
};

/// Mean energy (physical coordinates, before channel normalization) and
/// centroid (internal coordinates) of C(r, a).
struct ConstellationMoments {
  double energy = 0.0;
  double energy_stderr = 0.0;
  Point centroid;
  bool exact = false;
  std::size_t count = 0;
};

ConstellationMoments constellation_moments(const LatticeSpec& lattice, unsigned r, std::span<const double> shift,
                                           const EnergyOptions& options = {});

/// Voronoi constellation C(r, a) = {x - a : x in lattice, x in a + r V(0)},
/// addressed by index through the closest-point algorithm only.
///
/// Three coordinate systems appear: internal (lattice generator space),
/// physical (internal / coord_scale, projected to N dimensions) and channel
/// (physical * norm_factor, unit average energy per dimension pair).
class VoronoiConstellation {
 public:
  /// `shift` is in internal coordinates and must satisfy closest_point(a) = 0.
  VoronoiConstellation(LatticeSpec lattice, unsigned r, Point shift, const EnergyOptions& energy = {});

  const LatticeSpec& lattice() const { return lattice_; }
  unsigned r() const { return r_; }
  const Point& shift() const { return shift_; }
  std::size_t dimension() const { return lattice_.dimension(); }
  const BigIndex& size() const { return size_; }
  /// m = N log2(r).
  unsigned bits_per_symbol() const { return bits_; }
  unsigned bits_per_digit() const { return digit_bits_; }

  /// Average symbol energy in physical coordinates.
  double energy() const { return moments_.energy; }
  const ConstellationMoments& moments() const { return moments_; }
  double norm_factor() const { return norm_; }
  /// Minimum distance in channel coordinates.
  double dmin_channel() const;

  /// Encoding map on a digit vector; internal-coordinate result c = x - r lambda - a.
  void encode_internal(std::span<const std::uint32_t> digits, std::span<double> c) const;
  /// Encoding map producing channel coordinates (length N).
  void encode_digits(std::span<const std::uint32_t> digits, std::span<double> y) const;
  Point encode(const BigIndex& k) const;

  /// Low-complexity decoder: channel coordinates to digits. Total over all inputs.
  void decode_digits(std::span<const double> y, std::span<std::uint32_t> digits) const;
  /// Low-complexity decoder starting from internal coordinates.
  void decode_internal(std::span<const double> c, std::span<std::uint32_t> digits) const;
  BigIndex decode(std::span<const double> y) const;

  void to_channel(std::span<const double> internal, std::span<double> y) const;
  void from_channel(std::span<const double> y, std::span<double> internal) const;

 private:
  LatticeSpec lattice_;
  unsigned r_;
  Point shift_;
  BigIndex size_;
  unsigned bits_;
  unsigned digit_bits_;
  ConstellationMoments moments_;
  double norm_ = 1.0;
};

/// Throws std::invalid_argument unless closest_point(a) is the origin. For A2
/// the shift is first projected onto the zero-sum plane.
Point checked_shift(const LatticeSpec& lattice, std::span<const double> shift);

}  // namespace vcs
