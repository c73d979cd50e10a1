#include <cmath>
#include <random>

#include "doctest.h"
#include "vcs/awgn.hpp"
#include "vcs/rng.hpp"

using namespace vcs;

namespace {

std::shared_ptr<const VoronoiConstellation> cubic2(unsigned r) {
  return std::make_shared<const VoronoiConstellation>(make_lattice(LatticeFamily::Cubic, 2), r, Point{-0.5, -0.5});
}

}  // namespace

TEST_CASE("QAM construction and slicing") {
  const QamModem q4(2);
  std::vector<double> y(2);
  q4.modulate(std::vector<std::uint8_t>{0, 1}, y);
  CHECK(y[0] == doctest::Approx(-1.0 / std::sqrt(2.0)));
  CHECK(y[1] == doctest::Approx(1.0 / std::sqrt(2.0)));

  const QamModem q16(4, 3);
  CHECK(q16.bits_per_symbol() == 12);
  CHECK(q16.dimension() == 6);
  // Average energy over all labels is one per pair.
  double e = 0.0;
  for (std::uint32_t lab = 0; lab < 16; ++lab) {
    std::vector<std::uint8_t> bits(12, 0);
    for (unsigned j = 0; j < 4; ++j) bits[j] = (lab >> (3 - j)) & 1u;
    std::vector<double> p(6);
    q16.modulate(bits, p);
    e += p[0] * p[0] + p[1] * p[1];
  }
  CHECK(e / 16 == doctest::Approx(1.0));
  CHECK_THROWS_AS(QamModem(3), std::invalid_argument);

  // Slicing agrees with nearest-point search over the whole constellation.
  const QamModem q(8);
  std::vector<std::vector<double>> pts;
  std::vector<std::vector<std::uint8_t>> labels;
  for (std::uint32_t lab = 0; lab < 64; ++lab) {
    std::vector<std::uint8_t> bits(6);
    for (unsigned j = 0; j < 6; ++j) bits[j] = (lab >> (5 - j)) & 1u;
    std::vector<double> p(2);
    q.modulate(bits, p);
    pts.push_back(p);
    labels.push_back(bits);
  }
  std::mt19937_64 gen(1);
  std::normal_distribution<double> g(0.0, 0.6);
  for (int t = 0; t < 10000; ++t) {
    const std::vector<double> yy{g(gen), g(gen)};
    std::size_t best = 0;
    for (std::size_t k = 1; k < pts.size(); ++k) {
      if (distance2(yy, pts[k]) < distance2(yy, pts[best])) best = k;
    }
    std::vector<std::uint8_t> got(6);
    q.detect(yy, got);
    REQUIRE(got == labels[best]);
  }
}

TEST_CASE("VC modem roundtrip and ML agreement") {
  const auto e8 = std::make_shared<const VoronoiConstellation>(make_lattice(LatticeFamily::E8, 8), 2,
                                                               Point{0.1, 0.05, 0, 0, 0, 0, -0.03, 0});
  const VcModem alg2(e8, Labeling::QuasiGray, Detector::Alg2);
  const VcModem ml(e8, Labeling::QuasiGray, Detector::ML);
  CounterRng rng(5, 0);
  std::vector<std::uint8_t> bits(8), a(8), b(8);
  std::vector<double> y(8);
  const double rho = e8->dmin_channel() / 2.0;
  for (int t = 0; t < 2000; ++t) {
    for (auto& v : bits) v = rng() & 1u;
    alg2.modulate(bits, y);
    ml.detect(y, a);
    REQUIRE(a == bits);
    // Noise inside the packing radius: both detectors pick the sent point.
    std::vector<double> e(8);
    double norm = 0.0;
    for (auto& v : e) {
      v = rng.normal();
      norm += v * v;
    }
    for (std::size_t i = 0; i < 8; ++i) y[i] += 0.99 * rho * e[i] / std::sqrt(norm) * rng.uniform();
    alg2.detect(y, a);
    ml.detect(y, b);
    REQUIRE(a == bits);
    REQUIRE(b == bits);
  }
}

TEST_CASE("4-QAM Monte Carlo matches the closed form") {
  const QamModem q4(2);
  const std::vector<double> grid{4.0, 6.0};
  const auto res = run_awgn(q4, grid, StopRule{2000, 10'000'000, 512}, 42);
  for (const auto& p : res) {
    const double ref = 0.5 * std::erfc(std::sqrt(std::pow(10.0, p.ebn0_db / 10.0)));
    const double sigma = std::sqrt(ref * (1.0 - ref) / (static_cast<double>(p.symbols) * 2.0));
    CHECK(std::abs(p.ber - ref) < 3.0 * sigma);
    CHECK(p.ci_lo <= p.ber);
    CHECK(p.ci_hi >= p.ber);
    CHECK(!p.low_confidence);
  }
}

TEST_CASE("counts do not depend on the worker count") {
  const VcModem modem(cubic2(4), Labeling::QuasiGray, Detector::Alg2);
  const std::vector<double> grid{2.0, 5.0, 8.0};
  const StopRule stop{300, 200000, 256};
  const auto one = run_awgn(modem, grid, stop, 9, 0, 1);
  const auto three = run_awgn(modem, grid, stop, 9, 0, 3);
  REQUIRE(one.size() == three.size());
  for (std::size_t i = 0; i < one.size(); ++i) {
    CHECK(one[i].symbols == three[i].symbols);
    CHECK(one[i].bit_errors == three[i].bit_errors);
    CHECK(one[i].symbol_errors == three[i].symbol_errors);
  }
}

TEST_CASE("ML is never worse than the low-complexity detector") {
  const auto vc = cubic2(4);
  const VcModem alg2(vc, Labeling::QuasiGray, Detector::Alg2);
  const VcModem ml(vc, Labeling::QuasiGray, Detector::ML);
  const std::vector<double> grid{4.0, 8.0};
  const StopRule stop{1000, 2'000'000, 512};
  const auto ra = run_awgn(alg2, grid, stop, 3);
  const auto rm = run_awgn(ml, grid, stop, 3);
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(rm[i].ser < ra[i].ser);
}

TEST_CASE("wilson interval") {
  const auto [lo, hi] = wilson_interval(0, 100);
  CHECK(lo == doctest::Approx(0.0));
  CHECK(hi == doctest::Approx(0.037).epsilon(0.01));
  const auto [lo2, hi2] = wilson_interval(50, 100);
  CHECK(lo2 == doctest::Approx(0.4038).epsilon(0.001));
  CHECK(hi2 == doctest::Approx(0.5962).epsilon(0.001));
}
