#include "vcs/shaping.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "vcs/cpa.hpp"
#include "vcs/rng.hpp"

namespace vcs {

Point sample_shift_uniform(const LatticeSpec& lattice, std::uint64_t seed) {
  CounterRng rng(seed, 0);
  Point x(lattice.ambient_dimension(), 0.0);
  for (std::size_t j = 0; j < lattice.dimension(); ++j) {
    const double u = rng.uniform();
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += lattice.generator_entry(i, j) * u;
  }
  return reduce_shift(lattice, x);
}

Point reduce_shift(const LatticeSpec& lattice, std::span<const double> a) {
  const Point lambda = closest_point(lattice, a);
  Point out(a.begin(), a.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= lambda[i];
  return out;
}

ShiftResult optimize_shift(const LatticeSpec& lattice, unsigned r, std::span<const double> initial,
                           const ShiftOptions& options) {
  if (options.max_iter < 0 || !(options.tol > 0.0)) throw std::invalid_argument("optimize_shift: bad options");
  ShiftResult res;
  res.shift = checked_shift(lattice, initial);
  ConstellationMoments cur = constellation_moments(lattice, r, res.shift, options.energy);
  res.energy = cur.energy;
  res.trace.push_back(cur.energy);

  double step = 1.0;
  Point trial(res.shift.size());
  while (res.iterations < options.max_iter) {
    ++res.iterations;
    for (std::size_t i = 0; i < trial.size(); ++i) trial[i] = res.shift[i] + step * cur.centroid[i];
    trial = reduce_shift(lattice, trial);
    const ConstellationMoments next = constellation_moments(lattice, r, trial, options.energy);
    if (next.energy < cur.energy) {
      const double gain = cur.energy - next.energy;
      res.shift = trial;
      cur = next;
      res.energy = cur.energy;
      res.trace.push_back(cur.energy);
      step = 1.0;
      if (gain < options.tol * cur.energy) {
        res.converged = true;
        break;
      }
    } else {
      step *= 0.5;
      // No improving step of any useful length exists: a fixed point.
      if (step < 1e-6) {
        res.converged = true;
        break;
      }
    }
  }
  return res;
}

MuEstimate estimate_mu(const LatticeSpec& lattice, unsigned r, std::size_t n_samples, std::uint64_t seed,
                       const ShiftOptions& options) {
  if (n_samples < 2) throw std::invalid_argument("estimate_mu: need at least 2 samples");
  MuEstimate out;
  out.samples = n_samples;
  double mean = 0.0, m2 = 0.0;
  double best_energy = INFINITY;
  Point best_shift;
  for (std::size_t s = 0; s < n_samples; ++s) {
    const Point a = sample_shift_uniform(lattice, derive_seed(seed, s));
    const double e = constellation_moments(lattice, r, a, options.energy).energy;
    const double d = e - mean;
    mean += d / static_cast<double>(s + 1);
    m2 += d * (e - mean);
    if (e < best_energy) {
      best_energy = e;
      best_shift = a;
    }
  }
  const ShiftResult opt = optimize_shift(lattice, r, best_shift, options);
  out.optimal_energy = std::min(opt.energy, best_energy);
  out.mean_energy = mean;
  out.mu = (mean - out.optimal_energy) / out.optimal_energy;
  const double sd = std::sqrt(m2 / static_cast<double>(n_samples - 1));
  out.stderr_mu = sd / std::sqrt(static_cast<double>(n_samples)) / out.optimal_energy;
  return out;
}

}  // namespace vcs
