#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "vcs/codec.hpp"

namespace vcs {

enum class Detector { Alg2, ML };

std::string_view to_string(Detector detector);
/// Accepts "alg2", "algorithm2", "ml".
Detector parse_detector(std::string_view name);

/// Bits in, channel samples out and back. Implementations are immutable and
/// safe to share between threads.
class Modem {
 public:
  virtual ~Modem() = default;
  /// Real dimensions per symbol.
  virtual std::size_t dimension() const = 0;
  virtual unsigned bits_per_symbol() const = 0;
  /// Average symbol energy in channel units.
  virtual double symbol_energy() const = 0;
  virtual void modulate(std::span<const std::uint8_t> bits, std::span<double> y) const = 0;
  virtual void detect(std::span<const double> y, std::span<std::uint8_t> bits) const = 0;
};

/// Voronoi constellation with a bit labeling and either detector.
class VcModem final : public Modem {
 public:
  /// ML detection enumerates the constellation once; it needs M <= 2^20.
  VcModem(std::shared_ptr<const VoronoiConstellation> vc, Labeling labeling, Detector detector);

  std::size_t dimension() const override { return vc_->dimension(); }
  unsigned bits_per_symbol() const override { return vc_->bits_per_symbol(); }
  double symbol_energy() const override { return 0.5 * static_cast<double>(vc_->dimension()); }
  void modulate(std::span<const std::uint8_t> bits, std::span<double> y) const override;
  void detect(std::span<const double> y, std::span<std::uint8_t> bits) const override;

  const VoronoiConstellation& constellation() const { return *vc_; }
  Labeling labeling() const { return labeling_; }
  Detector detector() const { return detector_; }
  /// Index of the nearest constellation point (ties: lowest index). ML only.
  std::size_t ml_index(std::span<const double> y) const;

 private:
  void bits_to_digits(std::span<const std::uint8_t> bits, std::span<std::uint32_t> digits) const;
  void digits_to_bits(std::span<const std::uint32_t> digits, std::span<std::uint8_t> bits) const;

  std::shared_ptr<const VoronoiConstellation> vc_;
  Labeling labeling_;
  Detector detector_;
  std::vector<double> table_;  // ML: M points, channel coordinates
};

/// Square QAM on `pairs` independent dimension pairs: `levels` amplitudes per
/// rail, binary-reflected Gray per rail (I bits then Q bits, MSB first), unit
/// average energy per pair and threshold-slicing ML detection.
class QamModem final : public Modem {
 public:
  QamModem(unsigned levels, std::size_t pairs = 1);

  std::size_t dimension() const override { return 2 * pairs_; }
  unsigned bits_per_symbol() const override { return static_cast<unsigned>(2 * pairs_) * rail_bits_; }
  double symbol_energy() const override { return static_cast<double>(pairs_); }
  void modulate(std::span<const std::uint8_t> bits, std::span<double> y) const override;
  void detect(std::span<const double> y, std::span<std::uint8_t> bits) const override;

  unsigned levels() const { return levels_; }
  double amplitude_step() const { return step_; }
  double dmin() const { return 2.0 * step_; }

 private:
  unsigned levels_;
  std::size_t pairs_;
  unsigned rail_bits_;
  double step_;
};

struct StopRule {
  std::uint64_t min_bit_errors = 100;
  std::uint64_t max_symbols = 100'000'000;
  /// Symbols per work unit; the stop rule is evaluated at block boundaries.
  std::uint64_t block_symbols = 512;
};

struct AwgnPoint {
  double ebn0_db = 0.0;
  std::uint64_t symbols = 0;
  std::uint64_t bit_errors = 0;
  std::uint64_t symbol_errors = 0;
  double ber = 0.0;
  double ser = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  /// Stop rule ended on max_symbols before reaching min_bit_errors.
  bool low_confidence = false;
  double wall_seconds = 0.0;
};

/// N0 for a target Eb/N0 given the modem's symbol energy and bits per symbol.
double noise_density(const Modem& modem, double ebn0_db);

/// Wilson score interval (95%) for `errors` successes out of `trials`.
std::pair<double, double> wilson_interval(std::uint64_t errors, std::uint64_t trials);

/// Monte-Carlo error counts at every Eb/N0. Symbol s of grid cell i draws its
/// bits and noise from the counter-based stream (derive_seed(master, cell_base + i), s),
/// and blocks are merged in order, so counts do not depend on `threads`.
std::vector<AwgnPoint> run_awgn(const Modem& modem, std::span<const double> ebn0_db, const StopRule& stop,
                                std::uint64_t master_seed, std::uint64_t cell_base = 0, unsigned threads = 0);

/// Worker count: `requested` if nonzero, else hardware concurrency, capped by VC_THREADS.
unsigned worker_count(unsigned requested = 0);

}  // namespace vcs
