#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace vcs {

/// Extended binary Golay code [24, 12, 8] in standard form [I_12 | A].
///
/// Codewords are 24-bit masks, bit i = coordinate i. Message bits occupy
/// coordinates 0..11 and parity bits coordinates 12..23, so the codeword of
/// message `msg` is `msg | (parity(msg) << 12)`. The code is the extended
/// cyclic code generated by 1 + x^2 + x^4 + x^5 + x^6 + x^10 + x^11.
class GolayCode {
 public:
  static constexpr std::size_t kLength = 24;
  static constexpr std::size_t kDimension = 12;
  static constexpr std::size_t kSize = 4096;

  static const GolayCode& instance();

  /// Rows of the standard-form generator matrix.
  std::span<const std::uint32_t, kDimension> generator_rows() const { return rows_; }
  /// All 4096 codewords indexed by message.
  std::span<const std::uint32_t, kSize> codewords() const { return codewords_; }
  /// Parity half of the codeword for `msg`, as a 12-bit value.
  std::uint32_t parity(std::uint32_t msg) const { return parity_[msg & 0xFFFu]; }
  std::uint32_t encode(std::uint32_t msg) const { return codewords_[msg & 0xFFFu]; }

 private:
  GolayCode();

  std::array<std::uint32_t, kDimension> rows_{};
  std::array<std::uint32_t, kSize> codewords_{};
  std::array<std::uint16_t, kSize> parity_{};
};

}  // namespace vcs
