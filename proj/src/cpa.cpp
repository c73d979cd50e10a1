#include "vcs/cpa.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "vcs/golay.hpp"

namespace vcs {
namespace cpa {

double round_half_up(double x) { return std::floor(x + 0.5); }

void closest_cubic(std::span<const double> w, std::span<double> out) {
  for (std::size_t i = 0; i < w.size(); ++i) out[i] = round_half_up(w[i]);
}

void closest_dn(std::span<const double> w, std::span<double> out) {
  double sum = 0.0;
  std::size_t worst = 0;
  double worst_err = -1.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    out[i] = round_half_up(w[i]);
    sum += out[i];
    const double err = std::abs(w[i] - out[i]);
    if (err > worst_err) {
      worst_err = err;
      worst = i;
    }
  }
  if (std::fmod(std::abs(sum), 2.0) != 0.0) {
    out[worst] += (w[worst] - out[worst] >= 0.0) ? 1.0 : -1.0;
  }
}

void closest_an(std::span<const double> w, std::span<double> out) {
  const std::size_t m = w.size();
  const double mean = std::accumulate(w.begin(), w.end(), 0.0) / static_cast<double>(m);
  std::array<double, 32> err{};
  std::array<std::size_t, 32> order{};
  if (m > err.size()) throw std::invalid_argument("closest_an: dimension too large");
  double deficiency = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double x = w[i] - mean;
    out[i] = round_half_up(x);
    err[i] = x - out[i];
    deficiency += out[i];
    order[i] = i;
  }
  auto delta = static_cast<long>(deficiency);
  if (delta == 0) return;
  std::stable_sort(order.begin(), order.begin() + static_cast<long>(m),
                   [&](std::size_t a, std::size_t b) { return err[a] < err[b]; });
  if (delta > 0) {
    for (long k = 0; k < delta; ++k) out[order[static_cast<std::size_t>(k)]] -= 1.0;
  } else {
    for (long k = 0; k < -delta; ++k) out[order[m - 1 - static_cast<std::size_t>(k)]] += 1.0;
  }
}

void closest_e8(std::span<const double> w, std::span<double> out) {
  std::array<double, 8> shifted{}, glue{};
  closest_dn(w, out);
  for (std::size_t i = 0; i < 8; ++i) shifted[i] = w[i] - 0.5;
  closest_dn(shifted, glue);
  double d_even = 0.0, d_glue = 0.0;
  for (std::size_t i = 0; i < 8; ++i) {
    glue[i] += 0.5;
    d_even += (w[i] - out[i]) * (w[i] - out[i]);
    d_glue += (w[i] - glue[i]) * (w[i] - glue[i]);
  }
  if (d_glue < d_even) std::copy(glue.begin(), glue.end(), out.begin());
}

namespace {

constexpr std::size_t kHalf = 12;
constexpr std::size_t kWords = 4096;

struct CoordinateChoice {
  double cost[2][24];   // squared error of the nearest value = m + 2b (mod 4)
  double delta[2][24];  // extra cost of the second-nearest value in that class
  std::uint8_t par[2][24];
};

struct HalfTables {
  std::array<double, kWords> sum;
  std::array<double, kWords> min_delta;
  std::array<std::uint8_t, kWords> parity;
};

std::int64_t nearest_multiplier(double wi, int t) { return static_cast<std::int64_t>(round_half_up((wi - t) / 4.0)); }

void fill_choice(std::span<const double> w, int m, CoordinateChoice& c) {
  for (std::size_t i = 0; i < 24; ++i) {
    for (int b = 0; b < 2; ++b) {
      const int t = m + 2 * b;
      const double q = (w[i] - t) / 4.0;
      const std::int64_t y = nearest_multiplier(w[i], t);
      const double v = t + 4.0 * static_cast<double>(y);
      const std::int64_t y2 = (q >= static_cast<double>(y)) ? y + 1 : y - 1;
      const double v2 = t + 4.0 * static_cast<double>(y2);
      c.cost[b][i] = (w[i] - v) * (w[i] - v);
      c.delta[b][i] = (w[i] - v2) * (w[i] - v2) - c.cost[b][i];
      c.par[b][i] = static_cast<std::uint8_t>(y & 1);
    }
  }
}

// Tables indexed by the 12 codeword bits of one half: total cost, parity of
// the chosen multipliers and the cheapest parity repair.
void build_half(const CoordinateChoice& c, std::size_t offset, HalfTables& t) {
  double base = 0.0;
  std::uint8_t par0 = 0;
  std::array<double, kHalf> diff{};
  std::array<std::uint8_t, kHalf> pflip{};
  for (std::size_t k = 0; k < kHalf; ++k) {
    base += c.cost[0][offset + k];
    par0 ^= c.par[0][offset + k];
    diff[k] = c.cost[1][offset + k] - c.cost[0][offset + k];
    pflip[k] = c.par[0][offset + k] ^ c.par[1][offset + k];
  }
  t.sum[0] = base;
  t.parity[0] = par0;
  for (std::size_t s = 1; s < kWords; ++s) {
    const std::size_t low = static_cast<std::size_t>(std::countr_zero(static_cast<unsigned>(s)));
    const std::size_t rest = s & (s - 1);
    t.sum[s] = t.sum[rest] + diff[low];
    t.parity[s] = t.parity[rest] ^ pflip[low];
  }
  t.min_delta[0] = c.delta[0][offset];
  t.min_delta[1] = c.delta[1][offset];
  for (std::size_t k = 1; k < kHalf; ++k) {
    const std::size_t span = std::size_t{1} << k;
    const double d0 = c.delta[0][offset + k];
    const double d1 = c.delta[1][offset + k];
    for (std::size_t s = 0; s < span; ++s) {
      t.min_delta[s | span] = std::min(t.min_delta[s], d1);
      t.min_delta[s] = std::min(t.min_delta[s], d0);
    }
  }
}

}  // namespace

void closest_leech(std::span<const double> w, std::span<double> out) {
  const auto& golay = GolayCode::instance();
  thread_local CoordinateChoice choice[2];
  thread_local HalfTables lo, hi;

  double best = std::numeric_limits<double>::infinity();
  int best_m = 0;
  std::uint32_t best_msg = 0;
  for (int m = 0; m < 2; ++m) {
    CoordinateChoice& c = choice[m];
    fill_choice(w, m, c);
    build_half(c, 0, lo);
    build_half(c, kHalf, hi);
    for (std::uint32_t msg = 0; msg < kWords; ++msg) {
      const std::uint32_t h = golay.parity(msg);
      double total = lo.sum[msg] + hi.sum[h];
      if (total >= best) continue;
      if ((lo.parity[msg] ^ hi.parity[h]) != m) {
        total += std::min(lo.min_delta[msg], hi.min_delta[h]);
        if (total >= best) continue;
      }
      best = total;
      best_m = m;
      best_msg = msg;
    }
  }

  const std::uint32_t word = golay.encode(best_msg);
  const CoordinateChoice& c = choice[best_m];
  std::uint8_t parity = 0;
  std::size_t repair = 0;
  double repair_cost = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < 24; ++i) {
    const int b = static_cast<int>((word >> i) & 1u);
    const int t = best_m + 2 * b;
    const std::int64_t y = nearest_multiplier(w[i], t);
    out[i] = t + 4.0 * static_cast<double>(y);
    parity ^= c.par[b][i];
    if (c.delta[b][i] < repair_cost) {
      repair_cost = c.delta[b][i];
      repair = i;
    }
  }
  if (parity != best_m) {
    const int b = static_cast<int>((word >> repair) & 1u);
    const double q = (w[repair] - (best_m + 2 * b)) / 4.0;
    const double y = (out[repair] - (best_m + 2 * b)) / 4.0;
    out[repair] += (q >= y) ? 4.0 : -4.0;
  }
}

}  // namespace cpa

void closest_point(const LatticeSpec& spec, std::span<const double> w, std::span<double> out) {
  if (w.size() != spec.ambient_dimension() || out.size() != spec.ambient_dimension()) {
    throw std::invalid_argument("closest_point: dimension mismatch");
  }
  switch (spec.family()) {
    case LatticeFamily::Cubic: cpa::closest_cubic(w, out); return;
    case LatticeFamily::A2: cpa::closest_an(w, out); return;
    case LatticeFamily::D4: cpa::closest_dn(w, out); return;
    case LatticeFamily::E8: cpa::closest_e8(w, out); return;
    case LatticeFamily::Leech24: cpa::closest_leech(w, out); return;
  }
}

Point closest_point(const LatticeSpec& spec, std::span<const double> w) {
  Point out(spec.ambient_dimension());
  closest_point(spec, w, out);
  return out;
}

Point closest_point_bruteforce(const LatticeSpec& spec, std::span<const double> w, std::size_t budget) {
  if (spec.family() == LatticeFamily::Leech24) {
    throw std::invalid_argument("closest_point_bruteforce: enumeration is infeasible for leech24");
  }
  if (w.size() != spec.ambient_dimension()) throw std::invalid_argument("closest_point_bruteforce: dimension mismatch");
  std::vector<double> raw(spec.dimension());
  spec.raw_coefficients(w, raw);
  IntegerVector z(spec.dimension());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = static_cast<std::int64_t>(std::nearbyint(raw[i]));
  const Point babai = lattice_point(spec, z);
  const double radius2 = distance2(w, babai);
  const auto candidates = enumerate_ball(spec, w, radius2, budget);
  if (candidates.empty()) return babai;
  std::size_t best = 0;
  double best_d = distance2(w, candidates[0]);
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const double d = distance2(w, candidates[i]);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return candidates[best];
}

}  // namespace vcs
