#include "vcs/codec.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "vcs/cpa.hpp"
#include "vcs/rng.hpp"

namespace vcs {
namespace {

struct Scratch {
  std::vector<double> a, b, c;
  std::vector<std::int64_t> z;

  void fit(std::size_t ambient, std::size_t n) {
    if (a.size() < ambient) {
      a.resize(ambient);
      b.resize(ambient);
      c.resize(ambient);
    }
    if (z.size() < n) z.resize(n);
  }
};

Scratch& scratch(std::size_t ambient, std::size_t n) {
  thread_local Scratch s;
  s.fit(ambient, n);
  return s;
}

// Digit-to-point map without validation; used by the codec and by energy estimation.
void encode_raw(const LatticeSpec& lat, unsigned r, std::span<const double> shift, std::span<const std::uint32_t> digits,
                std::span<double> c) {
  const std::size_t amb = lat.ambient_dimension();
  const std::size_t n = lat.dimension();
  Scratch& s = scratch(amb, n);
  std::span<double> x(s.a.data(), amb), w(s.b.data(), amb), lambda(s.c.data(), amb);
  const double inv_r = 1.0 / static_cast<double>(r);
  for (std::size_t i = 0; i < amb; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += lat.generator_entry(i, j) * static_cast<double>(digits[j]);
    x[i] = acc;
    w[i] = (acc - shift[i]) * inv_r;
  }
  closest_point(lat, w, lambda);
  for (std::size_t i = 0; i < amb; ++i) c[i] = x[i] - static_cast<double>(r) * lambda[i] - shift[i];
}

bool next_digits(std::span<std::uint32_t> digits, unsigned r) {
  for (std::size_t i = digits.size(); i-- > 0;) {
    if (++digits[i] < r) return true;
    digits[i] = 0;
  }
  return false;
}

}  // namespace

Point checked_shift(const LatticeSpec& lattice, std::span<const double> shift) {
  if (shift.size() != lattice.ambient_dimension()) {
    throw std::invalid_argument("shift vector has " + std::to_string(shift.size()) + " entries, expected " +
                                std::to_string(lattice.ambient_dimension()));
  }
  Point a(shift.begin(), shift.end());
  if (lattice.family() == LatticeFamily::A2) {
    const double mean = (a[0] + a[1] + a[2]) / 3.0;
    for (double& v : a) v -= mean;
  }
  for (double v : a) {
    if (!std::isfinite(v)) throw std::invalid_argument("shift vector must be finite");
  }
  const Point lambda = closest_point(lattice, a);
  if (norm2(lambda) != 0.0) throw std::invalid_argument("shift vector must lie in the Voronoi region of the origin");
  return a;
}

ConstellationMoments constellation_moments(const LatticeSpec& lattice, unsigned r, std::span<const double> shift,
                                           const EnergyOptions& options) {
  validate_scale(r);
  const std::size_t n = lattice.dimension();
  const std::size_t amb = lattice.ambient_dimension();
  const double inv_s2 = 1.0 / static_cast<double>(lattice.coord_scale_squared());
  const BigIndex m = constellation_size(r, n);

  ConstellationMoments out;
  out.centroid.assign(amb, 0.0);
  std::vector<std::uint32_t> digits(n, 0);
  Point c(amb);
  double mean = 0.0, m2 = 0.0;
  std::size_t count = 0;
  auto accumulate = [&] {
    encode_raw(lattice, r, shift, digits, c);
    const double e = norm2(c) * inv_s2;
    ++count;
    const double d = e - mean;
    mean += d / static_cast<double>(count);
    m2 += d * (e - mean);
    for (std::size_t i = 0; i < amb; ++i) out.centroid[i] += c[i];
  };

  if (m <= options.exact_limit) {
    do accumulate();
    while (next_digits(digits, r));
    out.exact = true;
  } else {
    if (options.samples < 2) throw std::invalid_argument("energy sampling needs at least 2 samples");
    CounterRng rng(options.seed, 0);
    for (std::size_t s = 0; s < options.samples; ++s) {
      for (auto& d : digits) d = static_cast<std::uint32_t>(rng() & (r - 1));
      accumulate();
    }
    out.energy_stderr = std::sqrt(m2 / static_cast<double>(count - 1) / static_cast<double>(count));
  }
  out.energy = mean;
  out.count = count;
  for (double& v : out.centroid) v /= static_cast<double>(count);
  return out;
}

VoronoiConstellation::VoronoiConstellation(LatticeSpec lattice, unsigned r, Point shift, const EnergyOptions& energy)
    : lattice_(std::move(lattice)), r_(r) {
  validate_scale(r_);
  shift_ = checked_shift(lattice_, shift);
  size_ = constellation_size(r_, lattice_.dimension());
  digit_bits_ = vcs::bits_per_digit(r_);
  bits_ = digit_bits_ * static_cast<unsigned>(lattice_.dimension());
  moments_ = constellation_moments(lattice_, r_, shift_, energy);
  if (!(moments_.energy > 0.0)) throw std::domain_error("constellation energy is not positive");
  norm_ = std::sqrt(0.5 * static_cast<double>(lattice_.dimension()) / moments_.energy);
}

double VoronoiConstellation::dmin_channel() const {
  return std::sqrt(static_cast<double>(lattice_.dmin2_internal()) / static_cast<double>(lattice_.coord_scale_squared())) *
         norm_;
}

void VoronoiConstellation::encode_internal(std::span<const std::uint32_t> digits, std::span<double> c) const {
  if (digits.size() != lattice_.dimension()) throw std::invalid_argument("encode: wrong digit count");
  if (c.size() != lattice_.ambient_dimension()) throw std::invalid_argument("encode: wrong output size");
  for (std::uint32_t d : digits) {
    if (d >= r_) throw std::out_of_range("encode: digit out of range");
  }
  encode_raw(lattice_, r_, shift_, digits, c);
}

void VoronoiConstellation::to_channel(std::span<const double> internal, std::span<double> y) const {
  lattice_.to_physical(internal, y);
  for (double& v : y) v *= norm_;
}

void VoronoiConstellation::from_channel(std::span<const double> y, std::span<double> internal) const {
  if (y.size() != lattice_.dimension()) throw std::invalid_argument("decode: wrong input dimension");
  lattice_.from_physical(y, internal);
  const double inv = 1.0 / norm_;
  for (double& v : internal) v *= inv;
}

void VoronoiConstellation::encode_digits(std::span<const std::uint32_t> digits, std::span<double> y) const {
  thread_local std::vector<double> c;
  c.resize(lattice_.ambient_dimension());
  encode_internal(digits, c);
  to_channel(c, y);
}

Point VoronoiConstellation::encode(const BigIndex& k) const {
  const DigitVector digits = index_to_digits(k, r_, lattice_.dimension());
  Point y(lattice_.dimension());
  encode_digits(digits, y);
  return y;
}

void VoronoiConstellation::decode_internal(std::span<const double> c, std::span<std::uint32_t> digits) const {
  const std::size_t amb = lattice_.ambient_dimension();
  const std::size_t n = lattice_.dimension();
  if (c.size() != amb || digits.size() != n) throw std::invalid_argument("decode: dimension mismatch");
  Scratch& s = scratch(amb, n);
  std::span<double> w(s.a.data(), amb), lambda(s.b.data(), amb);
  for (std::size_t i = 0; i < amb; ++i) w[i] = c[i] + shift_[i];
  closest_point(lattice_, w, lambda);
  std::span<std::int64_t> z(s.z.data(), n);
  coeffs_of(lattice_, lambda, z);
  const auto mask = static_cast<std::int64_t>(r_ - 1);
  // r is a power of two, so two's-complement masking is the nonnegative residue.
  for (std::size_t j = 0; j < n; ++j) digits[j] = static_cast<std::uint32_t>(z[j] & mask);
}

void VoronoiConstellation::decode_digits(std::span<const double> y, std::span<std::uint32_t> digits) const {
  thread_local std::vector<double> c;
  c.resize(lattice_.ambient_dimension());
  from_channel(y, c);
  decode_internal(c, digits);
}

BigIndex VoronoiConstellation::decode(std::span<const double> y) const {
  DigitVector digits(lattice_.dimension());
  decode_digits(y, digits);
  return digits_to_index(digits, r_);
}

}  // namespace vcs
