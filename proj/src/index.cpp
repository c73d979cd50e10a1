#include "vcs/index.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <stdexcept>
#include <string>

namespace vcs {

void validate_scale(unsigned r) {
  if (r < 2 || r > kMaxScale || !std::has_single_bit(r)) {
    throw std::invalid_argument("scale factor r must be a power of two in [2, 65536], got " + std::to_string(r));
  }
}

unsigned bits_per_digit(unsigned r) {
  validate_scale(r);
  return static_cast<unsigned>(std::countr_zero(r));
}

BigIndex constellation_size(unsigned r, std::size_t n) {
  validate_scale(r);
  BigIndex m = 1;
  m <<= static_cast<unsigned>(bits_per_digit(r) * n);
  return m;
}

DigitVector index_to_digits(const BigIndex& k, unsigned r, std::size_t n) {
  const unsigned b = bits_per_digit(r);
  if (k < 0 || k >= constellation_size(r, n)) throw std::out_of_range("symbol index out of range");
  DigitVector digits(n);
  BigIndex rest = k;
  for (std::size_t i = n; i-- > 0;) {
    digits[i] = static_cast<std::uint32_t>(rest & (r - 1));
    rest >>= b;
  }
  return digits;
}

BigIndex digits_to_index(std::span<const std::uint32_t> digits, unsigned r) {
  const unsigned b = bits_per_digit(r);
  BigIndex k = 0;
  for (std::uint32_t d : digits) {
    if (d >= r) throw std::out_of_range("digit out of range");
    k <<= b;
    k |= d;
  }
  return k;
}

std::string_view to_string(Labeling labeling) {
  return labeling == Labeling::QuasiGray ? "quasi-gray" : "natural-binary";
}

Labeling parse_labeling(std::string_view name) {
  std::string s(name);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "natural" || s == "natural-binary" || s == "nb" || s == "binary") return Labeling::NaturalBinary;
  if (s == "quasi-gray" || s == "gray" || s == "qg" || s == "quasigray") return Labeling::QuasiGray;
  throw std::invalid_argument("unknown labeling '" + std::string(name) + "'");
}

std::uint32_t gray_decode(std::uint32_t g) {
  g ^= g >> 16;
  g ^= g >> 8;
  g ^= g >> 4;
  g ^= g >> 2;
  g ^= g >> 1;
  return g;
}

BigIndex bits_to_index(std::span<const std::uint8_t> bits, Labeling labeling, unsigned r, std::size_t n) {
  const unsigned b = bits_per_digit(r);
  if (bits.size() != static_cast<std::size_t>(b) * n) {
    throw std::invalid_argument("expected " + std::to_string(b * n) + " bits, got " + std::to_string(bits.size()));
  }
  DigitVector digits(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::uint32_t label = 0;
    for (unsigned j = 0; j < b; ++j) {
      const std::uint8_t bit = bits[i * b + j];
      if (bit > 1) throw std::invalid_argument("bit values must be 0 or 1");
      label = (label << 1) | bit;
    }
    digits[i] = label_to_digit(label, labeling);
  }
  return digits_to_index(digits, r);
}

BitVector index_to_bits(const BigIndex& k, Labeling labeling, unsigned r, std::size_t n) {
  const unsigned b = bits_per_digit(r);
  const DigitVector digits = index_to_digits(k, r, n);
  BitVector bits(static_cast<std::size_t>(b) * n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint32_t label = digit_to_label(digits[i], labeling);
    for (unsigned j = 0; j < b; ++j) bits[i * b + j] = static_cast<std::uint8_t>((label >> (b - 1 - j)) & 1u);
  }
  return bits;
}

}  // namespace vcs
