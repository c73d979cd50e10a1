#pragma once

#include <cstdint>
#include <vector>

#include "vcs/codec.hpp"

namespace vcs {

/// Uniform random point of V(0): a = x - CPA(x) for x uniform in the
/// fundamental parallelotope. Deterministic in `seed`.
Point sample_shift_uniform(const LatticeSpec& lattice, std::uint64_t seed);

/// a - CPA(a): the representative of a modulo the lattice inside V(0).
Point reduce_shift(const LatticeSpec& lattice, std::span<const double> a);

struct ShiftOptions {
  int max_iter = 50;
  double tol = 1e-6;
  EnergyOptions energy;
};

struct ShiftResult {
  Point shift;
  double energy = 0.0;
  /// Energy after every accepted iterate, starting with the initial shift.
  std::vector<double> trace;
  int iterations = 0;
  bool converged = false;
};

/// Centroid iteration a <- a + centroid(C(r, a)). A step is accepted only when
/// it lowers the energy; otherwise the step length is halved. Energies are
/// evaluated with a fixed seed so successive iterates are compared on the same
/// index sample when M is too large to enumerate.
ShiftResult optimize_shift(const LatticeSpec& lattice, unsigned r, std::span<const double> initial,
                           const ShiftOptions& options = {});

struct MuEstimate {
  double mu = 0.0;
  double stderr_mu = 0.0;
  double mean_energy = 0.0;
  double optimal_energy = 0.0;
  std::size_t samples = 0;
};

/// Relative excess energy of random shifts over the optimized shift:
/// mu = (E_a[E_s] - E_opt) / E_opt, with E_a over sample_shift_uniform draws.
MuEstimate estimate_mu(const LatticeSpec& lattice, unsigned r, std::size_t n_samples, std::uint64_t seed,
                       const ShiftOptions& options = {});

}  // namespace vcs
