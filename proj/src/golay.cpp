#include "vcs/golay.hpp"

#include <bit>
#include <stdexcept>
#include <utility>

namespace vcs {

const GolayCode& GolayCode::instance() {
  static const GolayCode code;
  return code;
}

GolayCode::GolayCode() {
  // Cyclic [23, 12] code: rows are x^i g(x), then an overall parity bit.
  constexpr std::uint32_t kPoly = (1u << 0) | (1u << 2) | (1u << 4) | (1u << 5) | (1u << 6) |
                                  (1u << 10) | (1u << 11);
  std::array<std::uint32_t, kDimension> rows{};
  for (std::size_t i = 0; i < kDimension; ++i) {
    std::uint32_t row = kPoly << i;
    if (std::popcount(row) % 2 != 0) row |= 1u << 23;
    rows[i] = row;
  }

  // Gauss-Jordan over GF(2) on the first 12 coordinates. Any 12 consecutive
  // positions of a cyclic code form an information set, so no column swaps.
  for (std::size_t col = 0; col < kDimension; ++col) {
    std::size_t pivot = col;
    while (pivot < kDimension && !((rows[pivot] >> col) & 1u)) ++pivot;
    if (pivot == kDimension) throw std::logic_error("golay: singular information set");
    std::swap(rows[col], rows[pivot]);
    for (std::size_t r = 0; r < kDimension; ++r) {
      if (r != col && ((rows[r] >> col) & 1u)) rows[r] ^= rows[col];
    }
  }
  rows_ = rows;

  for (std::uint32_t msg = 0; msg < kSize; ++msg) {
    std::uint32_t word = 0;
    for (std::size_t i = 0; i < kDimension; ++i) {
      if ((msg >> i) & 1u) word ^= rows_[i];
    }
    codewords_[msg] = word;
    parity_[msg] = static_cast<std::uint16_t>(word >> 12);
  }
}

}  // namespace vcs
