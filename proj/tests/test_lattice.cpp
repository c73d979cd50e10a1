#include <array>
#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <stdexcept>

#include <boost/multiprecision/cpp_int.hpp>

#include "doctest.h"
#include "vcs/golay.hpp"
#include "vcs/lattice.hpp"
#include "vcs/rng.hpp"

using namespace vcs;

namespace {

const std::array<std::pair<LatticeFamily, std::size_t>, 5> kSmallLattices = {{
    {LatticeFamily::Cubic, 4}, {LatticeFamily::Cubic, 1}, {LatticeFamily::A2, 2}, {LatticeFamily::D4, 4},
    {LatticeFamily::E8, 8},
}};

// Membership test for the sqrt(8)-scaled Leech lattice straight from its
// Golay-code definition: x = m 1 + 2c (mod 4) for a codeword c, sum x = 4m (mod 8).
bool in_leech(std::span<const std::int64_t> x) {
  const auto mod = [](std::int64_t v, std::int64_t q) { return ((v % q) + q) % q; };
  const std::int64_t m = mod(x[0], 2);
  std::uint32_t word = 0;
  std::int64_t sum = 0;
  for (std::size_t i = 0; i < 24; ++i) {
    if (mod(x[i], 2) != m) return false;
    if (mod(x[i] - m, 4) == 2) word |= 1u << i;
    sum += x[i];
  }
  if (mod(sum, 8) != 4 * m) return false;
  const auto& golay = GolayCode::instance();
  return golay.encode(word & 0xFFFu) == word;
}

// Counts vectors of squared norm `target` in the Leech lattice, coset by coset.
std::uint64_t leech_shell_count(std::int64_t target, std::int64_t& below_count) {
  const auto& golay = GolayCode::instance();
  std::uint64_t count = 0;
  below_count = 0;
  std::array<std::int64_t, 24> x{};
  for (int m = 0; m < 2; ++m) {
    for (std::uint32_t word : golay.codewords()) {
      // Cheapest possible contribution of coordinates i..23.
      std::array<std::int64_t, 25> tail{};
      for (std::size_t i = 24; i-- > 0;) {
        const bool two = (word >> i) & 1u;
        tail[i] = tail[i + 1] + (m == 1 ? 1 : (two ? 4 : 0));
      }
      // Depth-first over coordinates with entries |x_i| <= 6 in the right class.
      auto dfs = [&](auto&& self, std::size_t i, std::int64_t norm, std::int64_t sum) -> void {
        if (norm + tail[i] > target) return;
        if (i == 24) {
          if (((sum % 8) + 8) % 8 != 4 * m) return;
          if (norm == target) ++count;
          else if (norm > 0) ++below_count;
          return;
        }
        const std::int64_t cls = m + 2 * ((word >> i) & 1u);
        for (std::int64_t v = -6; v <= 6; ++v) {
          if ((((v - cls) % 4) + 4) % 4 != 0) continue;
          x[i] = v;
          self(self, i + 1, norm + v * v, sum + v);
        }
      };
      dfs(dfs, 0, 0, 0);
    }
  }
  return count;
}

}  // namespace

TEST_CASE("golay code has the extended Golay weight distribution") {
  const auto& golay = GolayCode::instance();
  std::array<int, 25> weights{};
  for (std::uint32_t w : golay.codewords()) ++weights[static_cast<std::size_t>(std::popcount(w))];
  CHECK(weights[0] == 1);
  CHECK(weights[8] == 759);
  CHECK(weights[12] == 2576);
  CHECK(weights[16] == 759);
  CHECK(weights[24] == 1);
  for (std::uint32_t msg = 0; msg < 4096; ++msg) CHECK_EQ(golay.encode(msg) & 0xFFFu, msg);
}

TEST_CASE("philox matches the published known-answer vectors") {
  using A4 = std::array<std::uint32_t, 4>;
  CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == A4{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}) ==
        A4{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
        A4{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("counter rng streams are reproducible and distinct") {
  CounterRng a(derive_seed(7, 1), 3), b(derive_seed(7, 1), 3), c(derive_seed(7, 1), 4);
  for (int i = 0; i < 100; ++i) {
    const auto va = a();
    CHECK(va == b());
    CHECK(va != c());
  }
  CounterRng u(11, 0);
  double mean = 0.0;
  for (int i = 0; i < 100000; ++i) mean += u.uniform();
  CHECK(std::abs(mean / 100000 - 0.5) < 0.005);
}

TEST_CASE("make_lattice validates family and dimension") {
  CHECK_THROWS_AS(make_lattice(LatticeFamily::E8, 4), std::invalid_argument);
  CHECK_THROWS_AS(make_lattice(LatticeFamily::A2, 3), std::invalid_argument);
  CHECK_THROWS_AS(make_lattice(LatticeFamily::Cubic, 0), std::invalid_argument);
  CHECK(parse_family("Leech") == LatticeFamily::Leech24);
  CHECK_THROWS_AS(parse_family("z9"), std::invalid_argument);

  const auto z4 = make_lattice(LatticeFamily::Cubic, 4);
  CHECK(z4.dmin2_internal() == 1);
  CHECK(z4.kissing() == 8);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) CHECK(z4.generator_entry(i, j) == (i == j ? 1.0 : 0.0));
  }
  const auto leech = make_lattice(LatticeFamily::Leech24, 24);
  CHECK(leech.dmin2_internal() == 32);
  CHECK(leech.kissing() == 196560);
  CHECK(leech.coord_scale_squared() == 8);
}

TEST_CASE("lattice_point examples") {
  const auto z2 = make_lattice(LatticeFamily::Cubic, 2);
  const std::array<std::int64_t, 2> z{3, -1};
  CHECK(lattice_point(z2, z) == Point{3.0, -1.0});

  const auto a2 = make_lattice(LatticeFamily::A2, 2);
  const std::array<std::int64_t, 2> e1{1, 0}, e2{0, 1}, both{1, 1};
  const Point g1 = a2.to_physical(lattice_point(a2, e1));
  const Point g2 = a2.to_physical(lattice_point(a2, e2));
  const Point s = a2.to_physical(lattice_point(a2, both));
  CHECK(g1[0] == doctest::Approx(1.0));
  CHECK(g1[1] == doctest::Approx(0.0));
  CHECK(g2[0] == doctest::Approx(0.5));
  CHECK(g2[1] == doctest::Approx(std::sqrt(3.0) / 2));
  CHECK(s[0] == doctest::Approx(1.5));
  CHECK(s[1] == doctest::Approx(std::sqrt(3.0) / 2));

  const auto d4 = make_lattice(LatticeFamily::D4, 4);
  const std::array<std::int64_t, 4> z1{1, 0, 0, 0};
  const Point v = lattice_point(d4, z1);
  CHECK(norm2(v) == 2.0);
  CHECK(std::fmod(v[0] + v[1] + v[2] + v[3], 2.0) == 0.0);
}

TEST_CASE("coeffs_of inverts lattice_point") {
  std::mt19937_64 gen(5);
  std::uniform_int_distribution<std::int64_t> coef(-40, 40);
  for (auto [family, n] : kSmallLattices) {
    const auto spec = make_lattice(family, n);
    for (int t = 0; t < 10000; ++t) {
      IntegerVector z(n);
      for (auto& v : z) v = coef(gen);
      REQUIRE(coeffs_of(spec, lattice_point(spec, z)) == z);
    }
  }
  const auto leech = make_lattice(LatticeFamily::Leech24, 24);
  for (int t = 0; t < 10000; ++t) {
    IntegerVector z(24);
    for (auto& v : z) v = coef(gen);
    REQUIRE(coeffs_of(leech, lattice_point(leech, z)) == z);
  }

  const auto e8 = make_lattice(LatticeFamily::E8, 8);
  const std::array<std::int64_t, 8> z0{1, 0, 0, 0, 0, 0, 0, 0}, z1{0, 1, 0, 0, 0, 0, 0, 0};
  Point sum = lattice_point(e8, z0);
  const Point b = lattice_point(e8, z1);
  for (std::size_t i = 0; i < 8; ++i) sum[i] += b[i];
  CHECK(coeffs_of(e8, sum) == IntegerVector{1, 1, 0, 0, 0, 0, 0, 0});

  const auto z2 = make_lattice(LatticeFamily::Cubic, 2);
  CHECK(coeffs_of(z2, Point{5.0, -2.0}) == IntegerVector{5, -2});
  CHECK_THROWS_AS(coeffs_of(z2, Point{0.5, 0.0}), std::domain_error);
  CHECK_THROWS_AS(coeffs_of(z2, Point{1.0}), std::invalid_argument);
}

TEST_CASE("enumerate_ball finds the kissing configuration") {
  for (auto [family, n] : kSmallLattices) {
    const auto spec = make_lattice(family, n);
    const Point origin(spec.ambient_dimension(), 0.0);
    const auto pts = enumerate_ball(spec, origin, static_cast<double>(spec.dmin2_internal()));
    CHECK(pts.size() == spec.kissing() + 1);
  }
  const auto leech = make_lattice(LatticeFamily::Leech24, 24);
  CHECK(enumerate_ball(leech, Point(24, 0.0), 32.0).size() == 196561);
  const auto z1 = make_lattice(LatticeFamily::Cubic, 1);
  auto pts = enumerate_ball(z1, Point{0.2}, 1.0);
  std::sort(pts.begin(), pts.end());
  CHECK(pts == std::vector<Point>{{0.0}, {1.0}});
  CHECK_THROWS_AS(enumerate_ball(make_lattice(LatticeFamily::E8, 8), Point(8, 0.0), 40.0, 1000), std::length_error);
}

TEST_CASE("E8 minimum and kissing by coordinate enumeration") {
  // E8 = {x in Z^8 or (Z + 1/2)^8 : sum x even}; every vector of norm <= 2
  // has entries in [-2, 2].
  const auto e8 = make_lattice(LatticeFamily::E8, 8);
  double best = 1e9;
  std::uint64_t count = 0;
  for (int glue = 0; glue < 2; ++glue) {
    const int levels = glue ? 4 : 5;
    const double lo = glue ? -1.5 : -2.0;
    std::array<int, 8> idx{};
    for (;;) {
      Point x(8);
      double norm = 0.0, sum = 0.0;
      for (std::size_t i = 0; i < 8; ++i) {
        x[i] = lo + idx[i];
        norm += x[i] * x[i];
        sum += x[i];
      }
      if (norm > 0.0 && std::fmod(std::abs(sum), 2.0) == 0.0) {
        REQUIRE_NOTHROW(coeffs_of(e8, x));
        if (norm < best - 1e-9) {
          best = norm;
          count = 0;
        }
        if (std::abs(norm - best) < 1e-9) ++count;
      }
      std::size_t k = 0;
      while (k < 8 && ++idx[k] == levels) idx[k++] = 0;
      if (k == 8) break;
    }
  }
  CHECK(best == doctest::Approx(2.0));
  CHECK(count == 240);
}

TEST_CASE("leech generator spans the Golay-defined lattice") {
  const auto leech = make_lattice(LatticeFamily::Leech24, 24);
  const auto& g = leech.generator();
  REQUIRE(g.den == 1);
  using boost::multiprecision::cpp_rational;
  std::vector<std::vector<cpp_rational>> m(24, std::vector<cpp_rational>(24));
  for (std::size_t j = 0; j < 24; ++j) {
    std::array<std::int64_t, 24> col{};
    for (std::size_t i = 0; i < 24; ++i) {
      col[i] = g.at(i, j);
      m[i][j] = g.at(i, j);
    }
    CHECK(in_leech(col));
  }
  cpp_rational det = 1;
  for (std::size_t c = 0; c < 24; ++c) {
    std::size_t p = c;
    while (p < 24 && m[p][c] == 0) ++p;
    REQUIRE(p < 24);
    if (p != c) {
      std::swap(m[p], m[c]);
      det = -det;
    }
    det *= m[c][c];
    for (std::size_t r = c + 1; r < 24; ++r) {
      const cpp_rational f = m[r][c] / m[c][c];
      for (std::size_t k = c; k < 24; ++k) m[r][k] -= f * m[c][k];
    }
  }
  CHECK(abs(det) == cpp_rational(boost::multiprecision::cpp_int(1) << 36));
}

TEST_CASE("leech minimum norm and kissing number by coset enumeration") {
  std::int64_t below = 0;
  CHECK(leech_shell_count(32, below) == 196560);
  CHECK(below == 0);
}

TEST_CASE("A2 physical round trip") {
  const auto a2 = make_lattice(LatticeFamily::A2, 2);
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int t = 0; t < 1000; ++t) {
    const Point p{u(gen), u(gen)};
    const Point back = a2.to_physical(a2.from_physical(p));
    CHECK(std::abs(back[0] - p[0]) < 1e-12);
    CHECK(std::abs(back[1] - p[1]) < 1e-12);
  }
}
