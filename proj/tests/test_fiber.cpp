#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "vcs/fiber.hpp"

using namespace vcs;

namespace {

SignalParams small_signal(std::size_t wavelengths = 1) {
  SignalParams p;
  p.oversampling = 8;
  p.n_wavelengths = wavelengths;
  p.n_symbols = 1024;
  return p;
}

FiberConfig quiet_fiber() {
  FiberConfig f;
  f.gamma_per_w_km = 0.0;
  f.ase = false;
  f.n_spans = 2;
  return f;
}

double relative_error(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return std::sqrt(num / den);
}

TxFrame make_tx(const Modem& modem, const SignalParams& p, std::uint64_t seed = 1) {
  return build_wdm(modem, random_bits(modem, p.n_symbols, seed), p);
}

}  // namespace

TEST_CASE("fiber parameters") {
  const FiberConfig f;
  CHECK(f.beta2() * 1e27 == doctest::Approx(-21.68).epsilon(1e-3));
  CHECK(f.span_gain() == doctest::Approx(std::pow(10.0, 1.6)));
  CHECK(f.alpha() * 80e3 == doctest::Approx(std::log(std::pow(10.0, 1.6))));

  FiberConfig bad = f;
  bad.step_km = 0.3;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = f;
  bad.span_length_km = -1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  SignalParams p;
  p.n_wavelengths = 6;
  const auto off = channel_offsets_hz(p);
  REQUIRE(off.size() == 6);
  CHECK(off[0] == -125e9);
  CHECK(off[2] == -25e9);
  CHECK(off[5] == 125e9);
  p.oversampling = 8;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("transmitter power and back-to-back recovery") {
  const QamModem qam(2, 2);
  for (std::size_t nw : {1u, 3u}) {
    SignalParams p = small_signal(nw);
    p.oversampling = 16;
    p.launch_power_dbm = 3.0;
    const QamModem m(2, 2 * nw);
    const TxFrame tx = make_tx(m, p);
    CHECK(std::abs(10.0 * std::log10(tx.frame.power_w() / 1e-3) - 3.0) < 0.01);
    const RxResult rx = receive(tx.frame, tx, 0.0, 0.0);
    CHECK(rx.snr_db > 60.0);
    CHECK(detect_bits(m, rx) == tx.bits);
  }
  SignalParams p = small_signal(2);
  CHECK_THROWS_AS(make_tx(qam, p), std::invalid_argument);
}

TEST_CASE("linear channel is invertible") {
  const QamModem qam(2, 2);
  const SignalParams p = small_signal();
  const TxFrame tx = make_tx(qam, p);
  const FiberConfig f = quiet_fiber();
  WdmFrame frame = tx.frame;
  propagate(frame, f, 7);
  apply_dispersion(frame, f.beta2(), -static_cast<double>(f.n_spans) * f.span_length_km * 1e3);
  CHECK(relative_error(frame.x, tx.frame.x) < 1e-9);
  CHECK(relative_error(frame.y, tx.frame.y) < 1e-9);

  const RxResult rx = receive(frame, tx, 0.0, 0.0);
  CHECK(detect_bits(qam, rx) == tx.bits);
}

TEST_CASE("nonlinear step conserves per-sample power") {
  const QamModem qam(2, 2);
  SignalParams p = small_signal();
  p.launch_power_dbm = 10.0;
  const TxFrame tx = make_tx(qam, p);
  FiberConfig f = quiet_fiber();
  f.gamma_per_w_km = 1.3;
  f.attenuation_db_km = 0.0;
  f.dispersion_ps_nm_km = 0.0;
  WdmFrame frame = tx.frame;
  propagate(frame, f, 7);
  double worst = 0.0, phase = 0.0;
  for (std::size_t i = 0; i < frame.x.size(); ++i) {
    const double before = std::norm(tx.frame.x[i]) + std::norm(tx.frame.y[i]);
    const double after = std::norm(frame.x[i]) + std::norm(frame.y[i]);
    worst = std::max(worst, std::abs(after - before) / before);
    phase = std::max(phase, std::abs(std::arg(frame.x[i] / tx.frame.x[i])));
  }
  CHECK(worst < 1e-12);
  CHECK(phase > 0.01);
}

TEST_CASE("received SNR follows the ASE budget") {
  const QamModem qam(2, 2);
  SignalParams p = small_signal();
  p.n_symbols = 4096;
  p.launch_power_dbm = -10.0;
  const TxFrame tx = make_tx(qam, p);
  FiberConfig f;
  f.gamma_per_w_km = 0.0;
  f.n_spans = 10;
  f.step_km = 40.0;
  const double distance = static_cast<double>(f.n_spans) * f.span_length_km * 1e3;
  for (std::uint64_t seed : {3u, 4u}) {
    WdmFrame frame = tx.frame;
    propagate(frame, f, seed);
    const RxResult rx = receive(frame, tx, f.beta2(), distance);
    const double nu = 299792458.0 / 1550e-9;
    const double ase = f.n_spans * (f.span_gain() - 1.0) * std::pow(10.0, 0.5) * 6.62607015e-34 * nu * 28e9;
    const double expected = 10.0 * std::log10(1e-4 / ase);
    CHECK(std::abs(rx.snr_db - expected) < 0.5);
  }
}

TEST_CASE("halving the step barely moves Q at 6 dBm on three wavelengths") {
  const QamModem qam(2, 6);
  SignalParams p = small_signal(3);
  p.launch_power_dbm = 6.0;
  const TxFrame tx = make_tx(qam, p);
  FiberConfig f;
  f.n_spans = 2;
  double q[2];
  for (int i = 0; i < 2; ++i) {
    f.step_km = i == 0 ? 0.5 : 0.25;
    WdmFrame frame = tx.frame;
    propagate(frame, f, 9);
    q[i] = receive(frame, tx, f.beta2(), 2 * f.span_length_km * 1e3).snr_db;
  }
  CHECK(std::abs(q[0] - q[1]) < 0.1);
}

TEST_CASE("fiber experiment rows") {
  const QamModem qam(2, 2);
  FiberExperiment e;
  e.signal = small_signal();
  e.fiber.step_km = 20.0;
  e.fiber.gamma_per_w_km = 0.0;
  e.powers_dbm = {-24.0, -20.0};
  e.detect_spans = {10, 2, 4, 6, 8};
  e.master_seed = 5;
  const auto rows = run_fiber_experiment(qam, e, 2);
  REQUIRE(rows.size() == 10);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const FiberRow& r = rows[i];
    CHECK(r.power_dbm == e.powers_dbm[i / 5]);
    CHECK(r.n_spans == 2 * (i % 5 + 1));
    CHECK(r.distance_km == 80.0 * r.n_spans);
    CHECK(r.symbols == 1024);
    if (i % 5) CHECK(r.ber >= rows[i - 1].ber);
  }
  CHECK(rows[4].bit_errors > 0);
  CHECK(rows[4].ber > rows[9].ber);

  const auto again = run_fiber_experiment(qam, e, 1);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(again[i].bit_errors == rows[i].bit_errors);
    CHECK(again[i].snr_db == rows[i].snr_db);
  }

  const auto best = optimum_power_trace(rows);
  REQUIRE(best.size() == 5);
  for (const FiberRow& r : best) CHECK(r.power_dbm == -20.0);
}
