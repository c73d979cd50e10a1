#include <array>
#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "vcs/cpa.hpp"

using namespace vcs;

namespace {

Point random_in_parallelotope(const LatticeSpec& spec, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Point x(spec.ambient_dimension(), 0.0);
  for (std::size_t j = 0; j < spec.dimension(); ++j) {
    const double t = u(gen);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += spec.generator_entry(i, j) * t;
  }
  return x;
}

Point random_lattice_point(const LatticeSpec& spec, std::mt19937_64& gen, std::int64_t range) {
  std::uniform_int_distribution<std::int64_t> coef(-range, range);
  IntegerVector z(spec.dimension());
  for (auto& v : z) v = coef(gen);
  return lattice_point(spec, z);
}

}  // namespace

TEST_CASE("closest_point examples") {
  const auto z2 = make_lattice(LatticeFamily::Cubic, 2);
  CHECK(closest_point(z2, Point{0.4, -1.6}) == Point{0.0, -2.0});

  const auto d4 = make_lattice(LatticeFamily::D4, 4);
  CHECK(closest_point(d4, Point{0.6, 0.7, 0.8, 0.2}) == Point{0.0, 1.0, 1.0, 0.0});
  const Point hole{0.5, 0.5, 0.5, 0.5};
  CHECK(distance2(hole, closest_point(d4, hole)) == doctest::Approx(1.0));
  CHECK(distance2(hole, closest_point_bruteforce(d4, hole)) == doctest::Approx(1.0));

  const auto e8 = make_lattice(LatticeFamily::E8, 8);
  const Point half(8, 0.5);
  CHECK(closest_point(e8, half) == half);

  const auto a2 = make_lattice(LatticeFamily::A2, 2);
  const Point off_plane{3.2, 1.1, 0.0};
  const Point lambda = closest_point(a2, off_plane);
  CHECK(lambda[0] + lambda[1] + lambda[2] == 0.0);

  CHECK_THROWS_AS(closest_point(z2, Point{1.0}), std::invalid_argument);
  CHECK_THROWS_AS(closest_point_bruteforce(make_lattice(LatticeFamily::Leech24, 24), Point(24, 0.0)),
                  std::invalid_argument);
}

TEST_CASE("closest_point agrees with exhaustive search") {
  std::mt19937_64 gen(17);
  const std::array<std::pair<LatticeFamily, std::size_t>, 5> lattices = {{
      {LatticeFamily::Cubic, 3}, {LatticeFamily::Cubic, 4}, {LatticeFamily::A2, 2}, {LatticeFamily::D4, 4},
      {LatticeFamily::E8, 8},
  }};
  for (auto [family, n] : lattices) {
    const auto spec = make_lattice(family, n);
    for (int t = 0; t < 2000; ++t) {
      const Point w = random_in_parallelotope(spec, gen);
      const double fast = distance2(w, closest_point(spec, w));
      const double slow = distance2(w, closest_point_bruteforce(spec, w));
      REQUIRE(std::abs(fast - slow) <= 1e-9 * std::max(1.0, slow));
    }
  }
}

TEST_CASE("closest_point is idempotent and translation equivariant") {
  std::mt19937_64 gen(23);
  std::normal_distribution<double> noise(0.0, 3.0);
  for (auto family : {LatticeFamily::Cubic, LatticeFamily::A2, LatticeFamily::D4, LatticeFamily::E8,
                      LatticeFamily::Leech24}) {
    const std::size_t n = family == LatticeFamily::Cubic ? 5 : family == LatticeFamily::A2 ? 2
                          : family == LatticeFamily::D4  ? 4
                          : family == LatticeFamily::E8  ? 8
                                                         : 24;
    const auto spec = make_lattice(family, n);
    for (int t = 0; t < 300; ++t) {
      const Point lambda = random_lattice_point(spec, gen, 20);
      REQUIRE(closest_point(spec, lambda) == lambda);
      Point w(spec.ambient_dimension());
      for (auto& v : w) v = noise(gen);
      Point shifted = w;
      for (std::size_t i = 0; i < w.size(); ++i) shifted[i] += lambda[i];
      const Point a = closest_point(spec, w);
      const Point b = closest_point(spec, shifted);
      for (std::size_t i = 0; i < w.size(); ++i) REQUIRE(std::abs(b[i] - a[i] - lambda[i]) < 1e-9);
    }
  }
}

TEST_CASE("leech decoder recovers points inside the packing radius") {
  const auto leech = make_lattice(LatticeFamily::Leech24, 24);
  std::mt19937_64 gen(29);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double rho = leech.packing_radius();
  for (int t = 0; t < 1000; ++t) {
    const Point lambda = random_lattice_point(leech, gen, 50);
    Point e(24);
    for (auto& v : e) v = g(gen);
    const double scale = 0.999 * rho * std::pow(u(gen), 1.0 / 24.0) / std::sqrt(norm2(e));
    Point w = lambda;
    for (std::size_t i = 0; i < 24; ++i) w[i] += scale * e[i];
    REQUIRE(closest_point(leech, w) == lambda);
  }
}
