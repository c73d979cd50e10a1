#include "vcs/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include "vcs/cpa.hpp"
#include "vcs/rng.hpp"

namespace vcs {
namespace {

// Squared covering radius in internal coordinates.
double covering_radius2(const LatticeSpec& lattice) {
  switch (lattice.family()) {
    case LatticeFamily::Cubic: return 0.25 * static_cast<double>(lattice.dimension());
    case LatticeFamily::A2: return 2.0 / 3.0;
    case LatticeFamily::D4: return 1.0;
    case LatticeFamily::E8: return 1.0;
    case LatticeFamily::Leech24: return 16.0;
  }
  return INFINITY;
}

bool next_digits(std::span<std::uint32_t> digits, unsigned r) {
  for (std::size_t i = digits.size(); i-- > 0;) {
    if (++digits[i] < r) return true;
    digits[i] = 0;
  }
  return false;
}

}  // namespace

double to_db(double ratio) { return 10.0 * std::log10(ratio); }

std::vector<Point> minimal_vectors(const LatticeSpec& lattice) {
  const Point origin(lattice.ambient_dimension(), 0.0);
  std::vector<Point> pts = enumerate_ball(lattice, origin, static_cast<double>(lattice.dmin2_internal()));
  std::erase_if(pts, [](const Point& p) { return norm2(p) == 0.0; });
  if (pts.size() != lattice.kissing()) throw std::logic_error("minimal vector count does not match kissing number");
  return pts;
}

bool in_constellation(const VoronoiConstellation& vc, std::span<const double> x) {
  const LatticeSpec& lat = vc.lattice();
  Point w(x.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = (x[i] - vc.shift()[i]) / static_cast<double>(vc.r());
  return norm2(closest_point(lat, w)) == 0.0;
}

KissingEstimate average_kissing(const VoronoiConstellation& vc, const KissingOptions& options) {
  const LatticeSpec& lat = vc.lattice();
  const std::size_t amb = lat.ambient_dimension();
  const std::vector<Point> mins = minimal_vectors(lat);
  const double r = static_cast<double>(vc.r());
  const double inside2 = r * r * static_cast<double>(lat.dmin2_internal()) / 4.0;
  const double outside2 = r * r * covering_radius2(lat);

  Point c(amb), w(amb), lambda(amb);
  auto count_neighbours = [&](std::span<const std::uint32_t> digits) {
    vc.encode_internal(digits, c);
    std::size_t tau = 0;
    for (const Point& v : mins) {
      double d2 = 0.0;
      for (std::size_t i = 0; i < amb; ++i) {
        w[i] = c[i] + v[i];
        d2 += w[i] * w[i];
      }
      // c + v inside the inscribed ball of r V(0) is certainly a member; outside
      // the circumscribed ball it certainly is not.
      if (d2 < inside2) {
        ++tau;
        continue;
      }
      if (d2 > outside2) continue;
      for (std::size_t i = 0; i < amb; ++i) w[i] /= r;
      closest_point(lat, w, lambda);
      if (norm2(lambda) == 0.0) ++tau;
    }
    return static_cast<double>(tau);
  };

  KissingEstimate out;
  std::vector<std::uint32_t> digits(lat.dimension(), 0);
  double mean = 0.0, m2 = 0.0;
  std::size_t count = 0;
  auto add = [&](double t) {
    ++count;
    const double d = t - mean;
    mean += d / static_cast<double>(count);
    m2 += d * (t - mean);
  };
  if (vc.size() <= options.exact_limit) {
    do add(count_neighbours(digits));
    while (next_digits(digits, vc.r()));
    out.exact = true;
  } else {
    if (options.samples < 2) throw std::invalid_argument("average_kissing: need at least 2 samples");
    CounterRng rng(options.seed, 1);
    for (std::size_t s = 0; s < options.samples; ++s) {
      for (auto& d : digits) d = static_cast<std::uint32_t>(rng() & (vc.r() - 1));
      add(count_neighbours(digits));
    }
    out.stderr_tau = std::sqrt(m2 / static_cast<double>(count - 1) / static_cast<double>(count));
  }
  out.tau_bar = mean;
  out.points = count;
  return out;
}

MeritReport merit_report(const VoronoiConstellation& vc, const KissingOptions& options) {
  MeritReport rep;
  rep.family = vc.lattice().family();
  rep.n = vc.dimension();
  rep.r = vc.r();
  rep.m = vc.size();
  rep.se = 2.0 * std::log2(static_cast<double>(vc.r()));
  rep.es = 0.5 * static_cast<double>(vc.dimension());
  rep.eb = rep.es / static_cast<double>(vc.bits_per_symbol());
  rep.dmin = vc.dmin_channel();
  rep.gamma = rep.dmin * rep.dmin / (4.0 * rep.eb);
  rep.gamma_db = to_db(rep.gamma);
  rep.penalty_db = -rep.gamma_db;
  rep.energy_exact = vc.moments().exact;
  rep.energy_stderr = vc.moments().energy_stderr * vc.norm_factor() * vc.norm_factor();
  rep.tau = average_kissing(vc, options);
  return rep;
}

double union_bound_ser(const VoronoiConstellation& vc, double n0) {
  if (vc.size() > 4096) throw std::length_error("union bound needs M <= 4096");
  if (!(n0 > 0.0)) throw std::invalid_argument("union bound needs N0 > 0");
  const auto m = static_cast<std::size_t>(vc.size());
  const std::size_t n = vc.dimension();
  std::vector<double> pts(m * n);
  std::vector<std::uint32_t> digits(n, 0);
  for (std::size_t k = 0; k < m; ++k) {
    vc.encode_digits(digits, std::span<double>(pts.data() + k * n, n));
    next_digits(digits, vc.r());
  }
  const double scale = 1.0 / (2.0 * std::sqrt(n0));
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const double d = std::sqrt(distance2(std::span<const double>(pts.data() + i * n, n),
                                           std::span<const double>(pts.data() + j * n, n)));
      total += std::erfc(d * scale);
    }
  }
  // Each unordered pair contributes twice, each term carries a factor 1/2.
  return total / static_cast<double>(m);
}

SerBounds ser_bounds(double dmin, double tau_bar, double n0) {
  SerBounds b;
  b.lower = 0.5 * std::erfc(dmin / (2.0 * std::sqrt(n0)));
  b.upper = tau_bar * b.lower;
  return b;
}

const std::array<GainEntry, 5>& gain_table() {
  static const std::array<GainEntry, 5> table = {{
      {LatticeFamily::Cubic, 0.0, 0.0},
      {LatticeFamily::A2, 0.62, 0.17},
      {LatticeFamily::D4, 1.51, 0.37},
      {LatticeFamily::E8, 3.01, 0.65},
      {LatticeFamily::Leech24, 6.02, 1.03},
  }};
  return table;
}

}  // namespace vcs
