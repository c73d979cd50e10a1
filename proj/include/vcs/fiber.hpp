#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "vcs/awgn.hpp"

namespace vcs {

using Complex = std::complex<double>;

struct SignalParams {
  double symbol_rate_gbaud = 28.0;
  double rolloff = 0.2;
  unsigned oversampling = 32;
  double wdm_spacing_ghz = 50.0;
  std::size_t n_wavelengths = 1;
  /// Bookkeeping only; no pilots are inserted.
  double pilot_overhead = 0.0156;
  /// Total launch power over all wavelengths and both polarizations.
  double launch_power_dbm = 0.0;
  std::size_t n_symbols = 1u << 14;

  double symbol_period_s() const { return 1e-9 / symbol_rate_gbaud; }
  double sample_rate_hz() const { return symbol_rate_gbaud * 1e9 * oversampling; }
  /// Net information rate for `bits_per_slot` bits per symbol slot over all wavelengths.
  double bit_rate_gbps(unsigned bits_per_slot) const {
    return bits_per_slot * symbol_rate_gbaud / (1.0 + pilot_overhead);
  }
  void validate() const;
};

struct FiberConfig {
  double gamma_per_w_km = 1.3;
  double dispersion_ps_nm_km = 17.0;
  double attenuation_db_km = 0.2;
  double span_length_km = 80.0;
  std::size_t n_spans = 10;
  double noise_figure_db = 5.0;
  double step_km = 0.5;
  double wavelength_nm = 1550.0;
  bool ase = true;

  /// Group-velocity dispersion at the reference wavelength, s^2/m.
  double beta2() const;
  /// Power attenuation coefficient, 1/m.
  double alpha() const;
  /// EDFA power gain that exactly compensates one span.
  double span_gain() const;
  /// One-sided ASE power spectral density per polarization added by one EDFA, W/Hz.
  double ase_psd_per_pol() const;
  void validate() const;
};

/// Dual-polarization oversampled baseband field in sqrt(W).
struct WdmFrame {
  std::vector<Complex> x;
  std::vector<Complex> y;
  double sample_rate_hz = 0.0;
  /// Centre of each wavelength as an FFT bin offset.
  std::vector<long> channel_bins;
  std::size_t n_symbols = 0;
  unsigned oversampling = 0;
  double rolloff = 0.0;

  double power_w() const;
};

/// Transmitted frame plus the reference symbols used for genie synchronization.
struct TxFrame {
  WdmFrame frame;
  /// symbols[w][pol][k], channel units (unit energy per dimension pair).
  std::vector<std::array<std::vector<Complex>, 2>> symbols;
  std::vector<std::uint8_t> bits;
};

/// Channel centre frequencies in Hz, symmetric around baseband.
std::vector<double> channel_offsets_hz(const SignalParams& params);

/// Deterministic payload: n_symbols * bits_per_symbol bits.
std::vector<std::uint8_t> random_bits(const Modem& modem, std::size_t n_symbols, std::uint64_t seed);

/// Splits each modem symbol into 4-dimensional groups (xI, xQ, yI, yQ), one
/// per wavelength, shapes them with a root-raised-cosine filter, places them
/// on the WDM grid and scales the sum to the launch power.
TxFrame build_wdm(const Modem& modem, std::span<const std::uint8_t> bits, const SignalParams& params);

/// Called after each span with the span count and the current field.
using SpanObserver = std::function<void(std::size_t span, const WdmFrame& frame)>;

/// Symmetric split-step solution of the Manakov equations, span by span, each
/// followed by an EDFA restoring the span loss and adding ASE noise.
void propagate(WdmFrame& frame, const FiberConfig& fiber, std::uint64_t noise_seed,
               const SpanObserver& observer = {});

/// Lossless linear propagation over `distance_m`; negative distances undo dispersion.
void apply_dispersion(WdmFrame& frame, double beta2, double distance_m);

struct RxResult {
  /// symbols[w][pol][k] after matched filtering, sampling and genie gain/phase.
  std::vector<std::array<std::vector<Complex>, 2>> symbols;
  /// Signal-to-error ratio over all wavelengths and polarizations, dB.
  double snr_db = 0.0;
};

/// Full-link dispersion compensation over `distance_m`, per-wavelength matched
/// filter, symbol-rate sampling and least-squares complex gain per wavelength
/// and polarization against the transmitted symbols.
RxResult receive(const WdmFrame& frame, const TxFrame& tx, double beta2, double distance_m);

/// Regroups received 4-D groups into modem symbols and detects bits.
std::vector<std::uint8_t> detect_bits(const Modem& modem, const RxResult& rx);

struct FiberRow {
  double power_dbm = 0.0;
  std::size_t n_spans = 0;
  double distance_km = 0.0;
  std::uint64_t symbols = 0;
  std::uint64_t bit_errors = 0;
  double ber = 0.0;
  double snr_db = 0.0;
};

struct FiberExperiment {
  SignalParams signal;
  FiberConfig fiber;
  std::vector<double> powers_dbm;
  /// Span counts at which the receiver runs; propagation stops at the largest.
  std::vector<std::size_t> detect_spans;
  std::uint64_t master_seed = 1;
};

/// One propagation per launch power, detection at every requested span count.
/// Rows are ordered by power, then span count. Powers run concurrently.
std::vector<FiberRow> run_fiber_experiment(const Modem& modem, const FiberExperiment& config, unsigned threads = 0);

/// Per distance, the row with the lowest BER (ties: lowest SNR penalty, then lowest power).
std::vector<FiberRow> optimum_power_trace(std::span<const FiberRow> rows);

}  // namespace vcs
