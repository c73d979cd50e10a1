#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "vcs/codec.hpp"

namespace vcs {

struct KissingOptions {
  /// All points are examined when M <= exact_limit, otherwise `samples` random ones.
  std::uint64_t exact_limit = 65536;
  std::size_t samples = 2000;
  std::uint64_t seed = 1;
};

struct KissingEstimate {
  double tau_bar = 0.0;
  double stderr_tau = 0.0;
  bool exact = false;
  std::size_t points = 0;
};

/// Figures of merit in channel coordinates (unit energy per dimension pair).
struct MeritReport {
  LatticeFamily family = LatticeFamily::Cubic;
  std::size_t n = 0;
  unsigned r = 0;
  BigIndex m;
  double se = 0.0;
  double es = 0.0;
  double eb = 0.0;
  double dmin = 0.0;
  double gamma = 0.0;
  double gamma_db = 0.0;
  double penalty_db = 0.0;
  bool energy_exact = false;
  double energy_stderr = 0.0;
  KissingEstimate tau;
};

double to_db(double ratio);

/// Minimal vectors of the infinite lattice (internal coordinates).
std::vector<Point> minimal_vectors(const LatticeSpec& lattice);

/// Whether the lattice point x (internal) belongs to C(r, a) + a, i.e. x - a lies in r V(0).
bool in_constellation(const VoronoiConstellation& vc, std::span<const double> x);

/// Average number of minimum-distance neighbours per constellation point.
KissingEstimate average_kissing(const VoronoiConstellation& vc, const KissingOptions& options = {});

MeritReport merit_report(const VoronoiConstellation& vc, const KissingOptions& options = {});

/// Union bound on SER from all pairwise distances (channel coordinates).
/// Throws std::length_error for M > 4096.
double union_bound_ser(const VoronoiConstellation& vc, double n0);

struct SerBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// lower = erfc(d / (2 sqrt(N0))) / 2 and upper = tau_bar * lower.
SerBounds ser_bounds(double dmin, double tau_bar, double n0);

struct GainEntry {
  LatticeFamily family;
  double coding_gain_db;
  double shaping_gain_db;
};

/// Asymptotic coding and shaping gains of the supported lattices.
const std::array<GainEntry, 5>& gain_table();

}  // namespace vcs
