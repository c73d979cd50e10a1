#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace vcs {

/// Unbounded unsigned symbol index K in [0, r^N).
using BigIndex = boost::multiprecision::cpp_int;
/// Base-r digits of K, most significant first.
using DigitVector = std::vector<std::uint32_t>;
/// One bit per element, values 0 or 1, most significant first.
using BitVector = std::vector<std::uint8_t>;

/// Largest supported scale factor. Powers of two only.
inline constexpr unsigned kMaxScale = 1u << 16;

/// Throws std::invalid_argument unless r is a power of two in [2, kMaxScale].
void validate_scale(unsigned r);
/// log2(r) for a valid scale.
unsigned bits_per_digit(unsigned r);

/// M = r^N, exact.
BigIndex constellation_size(unsigned r, std::size_t n);

DigitVector index_to_digits(const BigIndex& k, unsigned r, std::size_t n);
BigIndex digits_to_index(std::span<const std::uint32_t> digits, unsigned r);

enum class Labeling { NaturalBinary, QuasiGray };

std::string_view to_string(Labeling labeling);
/// Accepts "natural", "natural-binary", "nb", "quasi-gray", "gray", "qg".
Labeling parse_labeling(std::string_view name);

inline std::uint32_t gray_encode(std::uint32_t v) { return v ^ (v >> 1); }
std::uint32_t gray_decode(std::uint32_t g);

/// Label of one digit: its own binary value (natural) or its Gray code.
inline std::uint32_t digit_to_label(std::uint32_t digit, Labeling labeling) {
  return labeling == Labeling::QuasiGray ? gray_encode(digit) : digit;
}
inline std::uint32_t label_to_digit(std::uint32_t label, Labeling labeling) {
  return labeling == Labeling::QuasiGray ? gray_decode(label) : label;
}

/// m = N log2(r) bits -> K. Natural binary reads the bits as the big-endian
/// binary value of K; quasi-Gray splits them into N groups of log2(r) bits and
/// Gray-decodes each group into one digit.
BigIndex bits_to_index(std::span<const std::uint8_t> bits, Labeling labeling, unsigned r, std::size_t n);
BitVector index_to_bits(const BigIndex& k, Labeling labeling, unsigned r, std::size_t n);

}  // namespace vcs
