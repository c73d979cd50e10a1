#include "vcs/fiber.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <thread>

#include <fftw3.h>

#include "vcs/rng.hpp"

namespace vcs {
namespace {

constexpr double kPlanck = 6.62607015e-34;
constexpr double kLightSpeed = 299792458.0;

// In-place FFTW plans, one pair per length. The planner is not thread-safe,
// execution of an existing plan on new arrays is.
class Fft {
 public:
  static const Fft& get(std::size_t n) {
    static std::mutex mu;
    static std::map<std::size_t, std::unique_ptr<Fft>> cache;
    std::lock_guard lock(mu);
    auto& slot = cache[n];
    if (!slot) slot.reset(new Fft(n));
    return *slot;
  }

  void forward(std::span<Complex> data) const { run(fwd_, data); }
  /// Unnormalized inverse.
  void inverse(std::span<Complex> data) const { run(inv_, data); }

 private:
  explicit Fft(std::size_t n) : n_(n) {
    auto* buf = fftw_alloc_complex(n);
    fwd_ = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    inv_ = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    if (!fwd_ || !inv_) throw std::runtime_error("FFTW planning failed");
  }

  void run(fftw_plan plan, std::span<Complex> data) const {
    if (data.size() != n_) throw std::invalid_argument("FFT length mismatch");
    auto* p = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plan, p, p);
  }

  std::size_t n_;
  fftw_plan fwd_ = nullptr;
  fftw_plan inv_ = nullptr;
};

// Signed frequency of FFT bin m for an n-point transform.
double bin_frequency(std::size_t m, std::size_t n, double df) {
  const auto sm = static_cast<long>(m);
  const auto sn = static_cast<long>(n);
  return static_cast<double>(sm < sn / 2 ? sm : sm - sn) * df;
}

std::size_t wrap(long m, std::size_t n) {
  const auto sn = static_cast<long>(n);
  return static_cast<std::size_t>(((m % sn) + sn) % sn);
}

// Root-raised-cosine amplitude response; its square folds to one at the symbol rate.
double rrc(double f, double rs, double beta) {
  const double af = std::abs(f);
  const double lo = 0.5 * (1.0 - beta) * rs;
  const double hi = 0.5 * (1.0 + beta) * rs;
  if (af <= lo) return 1.0;
  if (af >= hi) return 0.0;
  return std::sqrt(0.5 * (1.0 + std::cos(std::numbers::pi / (beta * rs) * (af - lo))));
}

// Half-width of the RRC band in symbol-rate bins of an n_sym-point grid.
long band_halfwidth(std::size_t n_sym, double beta) {
  return static_cast<long>(std::ceil(0.5 * (1.0 + beta) * static_cast<double>(n_sym))) + 1;
}

void check_finite(const WdmFrame& f) {
  for (std::size_t i = 0; i < f.x.size(); i += 97) {
    if (!std::isfinite(f.x[i].real()) || !std::isfinite(f.y[i].real())) {
      throw std::overflow_error("field diverged during propagation; check step size and launch power");
    }
  }
}

}  // namespace

void SignalParams::validate() const {
  if (!(symbol_rate_gbaud > 0.0) || !(rolloff > 0.0 && rolloff <= 1.0) || oversampling < 2 || n_wavelengths == 0 ||
      n_symbols < 16 || !(wdm_spacing_ghz > 0.0)) {
    throw std::invalid_argument("invalid signal parameters");
  }
  if (oversampling * symbol_rate_gbaud <= static_cast<double>(n_wavelengths) * wdm_spacing_ghz) {
    throw std::invalid_argument("oversampled bandwidth does not cover the WDM grid");
  }
  if (wdm_spacing_ghz < (1.0 + rolloff) * symbol_rate_gbaud) {
    throw std::invalid_argument("WDM spacing narrower than the signal bandwidth");
  }
}

double FiberConfig::beta2() const {
  const double d = dispersion_ps_nm_km * 1e-12 / (1e-9 * 1e3);  // s/m^2
  const double lambda = wavelength_nm * 1e-9;
  return -d * lambda * lambda / (2.0 * std::numbers::pi * kLightSpeed);
}

double FiberConfig::alpha() const { return attenuation_db_km / (10.0 * std::log10(std::numbers::e)) / 1e3; }

double FiberConfig::span_gain() const { return std::exp(alpha() * span_length_km * 1e3); }

double FiberConfig::ase_psd_per_pol() const {
  const double nu = kLightSpeed / (wavelength_nm * 1e-9);
  const double f = std::pow(10.0, noise_figure_db / 10.0);
  return (span_gain() - 1.0) * f * kPlanck * nu / 2.0;
}

void FiberConfig::validate() const {
  if (!(gamma_per_w_km >= 0.0) || !(attenuation_db_km >= 0.0) || !(span_length_km > 0.0) || !(step_km > 0.0) ||
      !(wavelength_nm > 0.0) || !(noise_figure_db >= 0.0)) {
    throw std::invalid_argument("invalid fiber parameters");
  }
  const double steps = span_length_km / step_km;
  if (std::abs(steps - std::round(steps)) > 1e-9) throw std::invalid_argument("step_km must divide span_length_km");
}

double WdmFrame::power_w() const {
  double p = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) p += std::norm(x[i]) + std::norm(y[i]);
  return p / static_cast<double>(x.size());
}

std::vector<double> channel_offsets_hz(const SignalParams& params) {
  std::vector<double> f(params.n_wavelengths);
  for (std::size_t w = 0; w < f.size(); ++w) {
    f[w] = (static_cast<double>(w) - 0.5 * static_cast<double>(params.n_wavelengths - 1)) * params.wdm_spacing_ghz * 1e9;
  }
  return f;
}

std::vector<std::uint8_t> random_bits(const Modem& modem, std::size_t n_symbols, std::uint64_t seed) {
  const unsigned m = modem.bits_per_symbol();
  std::vector<std::uint8_t> bits(n_symbols * m);
  for (std::size_t k = 0; k < n_symbols; ++k) {
    CounterRng rng(seed, k);
    for (unsigned i = 0; i < m; i += 64) {
      std::uint64_t word = rng();
      for (unsigned j = i; j < std::min(m, i + 64); ++j, word >>= 1) bits[k * m + j] = word & 1u;
    }
  }
  return bits;
}

TxFrame build_wdm(const Modem& modem, std::span<const std::uint8_t> bits, const SignalParams& params) {
  params.validate();
  const std::size_t nw = params.n_wavelengths;
  if (modem.dimension() != 4 * nw) {
    throw std::invalid_argument("modem dimension " + std::to_string(modem.dimension()) + " needs " +
                                std::to_string(modem.dimension() / 4) + " wavelengths of 4 dimensions");
  }
  const unsigned m = modem.bits_per_symbol();
  const std::size_t ns = params.n_symbols;
  if (bits.size() != ns * m) throw std::invalid_argument("build_wdm: wrong payload length");

  TxFrame tx;
  tx.bits.assign(bits.begin(), bits.end());
  tx.symbols.resize(nw);
  for (auto& ch : tx.symbols) {
    ch[0].resize(ns);
    ch[1].resize(ns);
  }
  std::vector<double> y(modem.dimension());
  for (std::size_t k = 0; k < ns; ++k) {
    modem.modulate(bits.subspan(k * m, m), y);
    for (std::size_t w = 0; w < nw; ++w) {
      tx.symbols[w][0][k] = {y[4 * w], y[4 * w + 1]};
      tx.symbols[w][1][k] = {y[4 * w + 2], y[4 * w + 3]};
    }
  }

  WdmFrame& f = tx.frame;
  const std::size_t total = ns * params.oversampling;
  f.sample_rate_hz = params.sample_rate_hz();
  f.n_symbols = ns;
  f.oversampling = params.oversampling;
  f.rolloff = params.rolloff;
  const double rs = params.symbol_rate_gbaud * 1e9;
  const double df = f.sample_rate_hz / static_cast<double>(total);
  for (double off : channel_offsets_hz(params)) f.channel_bins.push_back(std::lround(off / df));

  std::vector<Complex> spec_x(total), spec_y(total), s(ns);
  const Fft& small = Fft::get(ns);
  const long half = band_halfwidth(ns, params.rolloff);
  for (std::size_t w = 0; w < nw; ++w) {
    for (int pol = 0; pol < 2; ++pol) {
      std::copy(tx.symbols[w][pol].begin(), tx.symbols[w][pol].end(), s.begin());
      small.forward(s);
      auto& dst = pol == 0 ? spec_x : spec_y;
      for (long b = -half; b <= half; ++b) {
        const double h = rrc(static_cast<double>(b) * df, rs, params.rolloff);
        if (h == 0.0) continue;
        dst[wrap(b + f.channel_bins[w], total)] += static_cast<double>(params.oversampling) * h * s[wrap(b, ns)];
      }
    }
  }
  const Fft& big = Fft::get(total);
  big.inverse(spec_x);
  big.inverse(spec_y);
  const double target = 1e-3 * std::pow(10.0, params.launch_power_dbm / 10.0);
  f.x = std::move(spec_x);
  f.y = std::move(spec_y);
  const double scale = std::sqrt(target / f.power_w());
  for (auto& v : f.x) v *= scale;
  for (auto& v : f.y) v *= scale;
  return tx;
}

void apply_dispersion(WdmFrame& frame, double beta2, double distance_m) {
  const std::size_t n = frame.x.size();
  const Fft& fft = Fft::get(n);
  const double df = frame.sample_rate_hz / static_cast<double>(n);
  fft.forward(frame.x);
  fft.forward(frame.y);
  for (std::size_t m = 0; m < n; ++m) {
    const double w = 2.0 * std::numbers::pi * bin_frequency(m, n, df);
    const Complex h = std::polar(1.0 / static_cast<double>(n), 0.5 * beta2 * w * w * distance_m);
    frame.x[m] *= h;
    frame.y[m] *= h;
  }
  fft.inverse(frame.x);
  fft.inverse(frame.y);
}

void propagate(WdmFrame& frame, const FiberConfig& fiber, std::uint64_t noise_seed, const SpanObserver& observer) {
  fiber.validate();
  const std::size_t n = frame.x.size();
  if (frame.y.size() != n || n == 0) throw std::invalid_argument("propagate: malformed frame");
  const Fft& fft = Fft::get(n);
  const double df = frame.sample_rate_hz / static_cast<double>(n);
  const double alpha = fiber.alpha();
  const double beta2 = fiber.beta2();
  const double gamma = fiber.gamma_per_w_km * 1e-3 * 8.0 / 9.0;
  const double h = fiber.step_km * 1e3;
  const auto steps = static_cast<std::size_t>(std::llround(fiber.span_length_km / fiber.step_km));
  // Integral of the power decay over one step, centred on the nonlinear kick.
  const double h_eff = alpha > 0.0 ? 2.0 * std::sinh(0.5 * alpha * h) / alpha : h;
  const double inv_n = 1.0 / static_cast<double>(n);

  // Linear operator for half and full steps; adjacent half steps are merged.
  std::vector<Complex> half(n), full(n);
  for (std::size_t m = 0; m < n; ++m) {
    const double w = 2.0 * std::numbers::pi * bin_frequency(m, n, df);
    const Complex gen(-0.5 * alpha, 0.5 * beta2 * w * w);
    half[m] = std::exp(gen * (0.5 * h));
    full[m] = std::exp(gen * h);
  }

  const double amp_gain = std::sqrt(fiber.span_gain());
  const double noise_sigma = std::sqrt(fiber.ase_psd_per_pol() * frame.sample_rate_hz / 2.0);
  // Lossless dispersion-free fiber: the linear operator is the identity, so the
  // FFT round trips are skipped and each step is the bare phase rotation.
  const bool identity_linear = alpha == 0.0 && beta2 == 0.0;
  const auto to_frequency = [&](const std::vector<Complex>& op) {
    if (identity_linear) return;
    fft.forward(frame.x);
    fft.forward(frame.y);
    for (std::size_t m = 0; m < n; ++m) {
      frame.x[m] *= op[m];
      frame.y[m] *= op[m];
    }
  };
  const auto to_time = [&](double scale) {
    if (!identity_linear) {
      fft.inverse(frame.x);
      fft.inverse(frame.y);
      scale *= inv_n;
    }
    if (scale == 1.0) return;
    for (std::size_t i = 0; i < n; ++i) {
      frame.x[i] *= scale;
      frame.y[i] *= scale;
    }
  };
  for (std::size_t span = 0; span < fiber.n_spans; ++span) {
    to_frequency(half);
    for (std::size_t s = 0; s < steps; ++s) {
      to_time(1.0);
      if (gamma != 0.0) {
        for (std::size_t i = 0; i < n; ++i) {
          const double phi = gamma * (std::norm(frame.x[i]) + std::norm(frame.y[i])) * h_eff;
          const Complex rot = std::polar(1.0, phi);
          frame.x[i] *= rot;
          frame.y[i] *= rot;
        }
      }
      to_frequency((s + 1 == steps) ? half : full);
    }
    to_time(amp_gain);
    if (fiber.ase) {
      CounterRng rx(derive_seed(noise_seed, 2 * span), 0), ry(derive_seed(noise_seed, 2 * span + 1), 0);
      for (std::size_t i = 0; i < n; ++i) {
        frame.x[i] += Complex(rx.normal(), rx.normal()) * noise_sigma;
        frame.y[i] += Complex(ry.normal(), ry.normal()) * noise_sigma;
      }
    }
    check_finite(frame);
    if (observer) observer(span + 1, frame);
  }
}

RxResult receive(const WdmFrame& frame, const TxFrame& tx, double beta2, double distance_m) {
  const std::size_t n = frame.x.size();
  const std::size_t ns = frame.n_symbols;
  const std::size_t nw = frame.channel_bins.size();
  if (tx.symbols.size() != nw) throw std::invalid_argument("receive: wavelength count mismatch");
  const Fft& fft = Fft::get(n);
  const Fft& small = Fft::get(ns);
  const double df = frame.sample_rate_hz / static_cast<double>(n);
  const double rs = frame.sample_rate_hz / frame.oversampling;

  std::array<std::vector<Complex>, 2> spec{frame.x, frame.y};
  for (auto& s : spec) {
    fft.forward(s);
    for (std::size_t m = 0; m < n; ++m) {
      const double w = 2.0 * std::numbers::pi * bin_frequency(m, n, df);
      s[m] *= std::polar(1.0, -0.5 * beta2 * w * w * distance_m);
    }
  }

  RxResult rx;
  rx.symbols.resize(nw);
  const long half = band_halfwidth(ns, frame.rolloff);
  double signal = 0.0, error = 0.0;
  for (std::size_t w = 0; w < nw; ++w) {
    for (int pol = 0; pol < 2; ++pol) {
      std::vector<Complex> z(ns);
      for (long b = -half; b <= half; ++b) {
        const double h = rrc(static_cast<double>(b) * df, rs, frame.rolloff);
        if (h == 0.0) continue;
        z[wrap(b, ns)] += h * spec[pol][wrap(b + frame.channel_bins[w], n)];
      }
      small.inverse(z);
      const auto& ref = tx.symbols[w][pol];
      Complex num = 0.0;
      double den = 0.0;
      for (std::size_t k = 0; k < ns; ++k) {
        num += z[k] * std::conj(ref[k]);
        den += std::norm(ref[k]);
      }
      const Complex gain = num / den;
      for (std::size_t k = 0; k < ns; ++k) {
        z[k] /= gain;
        signal += std::norm(ref[k]);
        error += std::norm(z[k] - ref[k]);
      }
      rx.symbols[w][pol] = std::move(z);
    }
  }
  rx.snr_db = 10.0 * std::log10(signal / std::max(error, 1e-300));
  return rx;
}

std::vector<std::uint8_t> detect_bits(const Modem& modem, const RxResult& rx) {
  const std::size_t nw = rx.symbols.size();
  if (modem.dimension() != 4 * nw) throw std::invalid_argument("detect_bits: dimension mismatch");
  const std::size_t ns = nw ? rx.symbols[0][0].size() : 0;
  const unsigned m = modem.bits_per_symbol();
  std::vector<std::uint8_t> bits(ns * m);
  std::vector<double> y(modem.dimension());
  for (std::size_t k = 0; k < ns; ++k) {
    for (std::size_t w = 0; w < nw; ++w) {
      y[4 * w] = rx.symbols[w][0][k].real();
      y[4 * w + 1] = rx.symbols[w][0][k].imag();
      y[4 * w + 2] = rx.symbols[w][1][k].real();
      y[4 * w + 3] = rx.symbols[w][1][k].imag();
    }
    modem.detect(y, std::span<std::uint8_t>(bits.data() + k * m, m));
  }
  return bits;
}

std::vector<FiberRow> run_fiber_experiment(const Modem& modem, const FiberExperiment& config, unsigned threads) {
  config.signal.validate();
  config.fiber.validate();
  if (config.detect_spans.empty()) throw std::invalid_argument("fiber experiment needs at least one span count");
  std::vector<std::size_t> spans = config.detect_spans;
  std::sort(spans.begin(), spans.end());
  spans.erase(std::unique(spans.begin(), spans.end()), spans.end());
  if (spans.front() == 0) throw std::invalid_argument("span counts must be positive");
  FiberConfig fiber = config.fiber;
  fiber.n_spans = spans.back();

  const auto bits = random_bits(modem, config.signal.n_symbols, derive_seed(config.master_seed, 0));
  SignalParams base = config.signal;
  base.launch_power_dbm = 0.0;
  const TxFrame tx = build_wdm(modem, bits, base);

  const std::size_t np = config.powers_dbm.size();
  std::vector<std::vector<FiberRow>> per_power(np);
  auto run_cell = [&](std::size_t i) {
    WdmFrame frame = tx.frame;
    const double scale = std::pow(10.0, config.powers_dbm[i] / 20.0);
    for (auto& v : frame.x) v *= scale;
    for (auto& v : frame.y) v *= scale;
    auto observe = [&](std::size_t span, const WdmFrame& f) {
      if (!std::binary_search(spans.begin(), spans.end(), span)) return;
      const double distance = static_cast<double>(span) * fiber.span_length_km * 1e3;
      const RxResult rx = receive(f, tx, fiber.beta2(), distance);
      const auto got = detect_bits(modem, rx);
      FiberRow row;
      row.power_dbm = config.powers_dbm[i];
      row.n_spans = span;
      row.distance_km = distance / 1e3;
      row.symbols = config.signal.n_symbols;
      for (std::size_t j = 0; j < got.size(); ++j) row.bit_errors += got[j] != tx.bits[j];
      row.ber = static_cast<double>(row.bit_errors) / static_cast<double>(got.size());
      row.snr_db = rx.snr_db;
      per_power[i].push_back(row);
    };
    propagate(frame, fiber, derive_seed(config.master_seed, 1 + i), observe);
  };

  const unsigned workers = std::min<std::size_t>(worker_count(threads), std::max<std::size_t>(np, 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < np; ++i) run_cell(i);
  } else {
    std::atomic<std::size_t> cursor{0};
    std::vector<std::exception_ptr> errors(workers);
    {
      std::vector<std::jthread> pool;
      for (unsigned t = 0; t < workers; ++t) {
        pool.emplace_back([&, t] {
          try {
            for (std::size_t i; (i = cursor.fetch_add(1)) < np;) run_cell(i);
          } catch (...) {
            errors[t] = std::current_exception();
          }
        });
      }
    }
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  std::vector<FiberRow> rows;
  for (auto& v : per_power) rows.insert(rows.end(), v.begin(), v.end());
  return rows;
}

std::vector<FiberRow> optimum_power_trace(std::span<const FiberRow> rows) {
  std::map<std::size_t, FiberRow> best;
  for (const FiberRow& r : rows) {
    auto it = best.find(r.n_spans);
    if (it == best.end()) {
      best.emplace(r.n_spans, r);
      continue;
    }
    const FiberRow& b = it->second;
    const bool better = r.ber < b.ber || (r.ber == b.ber && r.snr_db > b.snr_db) ||
                        (r.ber == b.ber && r.snr_db == b.snr_db && r.power_dbm < b.power_dbm);
    if (better) it->second = r;
  }
  std::vector<FiberRow> out;
  for (auto& [span, row] : best) out.push_back(row);
  return out;
}

}  // namespace vcs
