#include "vcs/lattice.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <boost/multiprecision/cpp_int.hpp>

#include "vcs/golay.hpp"

namespace vcs {
namespace {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

constexpr double kLatticeTolerance = 1e-6;

ScaledIntMatrix identity(std::size_t n) {
  ScaledIntMatrix m{n, n, 1, std::vector<std::int64_t>(n * n, 0)};
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

ScaledIntMatrix from_columns(std::size_t rows, const std::vector<std::vector<std::int64_t>>& cols,
                             std::int64_t den) {
  ScaledIntMatrix m{rows, cols.size(), den, std::vector<std::int64_t>(rows * cols.size(), 0)};
  for (std::size_t j = 0; j < cols.size(); ++j) {
    for (std::size_t i = 0; i < rows; ++i) m.at(i, j) = cols[j][i];
  }
  return m;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

// Integer Hermite normal form (row style) of a generating set for the Leech
// lattice in sqrt(8)-scaled coordinates. Returns the 24 basis rows, upper
// triangular with positive diagonal.
std::vector<std::array<std::int64_t, 24>> leech_basis_rows() {
  using Row = std::array<std::int64_t, 24>;
  std::vector<Row> rows;
  const auto& golay = GolayCode::instance();
  for (std::uint32_t g : golay.generator_rows()) {
    Row r{};
    for (std::size_t i = 0; i < 24; ++i) r[i] = ((g >> i) & 1u) ? 2 : 0;
    rows.push_back(r);
  }
  for (std::size_t i = 0; i + 1 < 24; ++i) {
    Row r{};
    r[i] = 4;
    r[i + 1] = -4;
    rows.push_back(r);
  }
  {
    Row r{};
    r[0] = 4;
    r[1] = 4;
    rows.push_back(r);
  }
  {
    Row r;
    r.fill(1);
    r[0] = -3;
    rows.push_back(r);
  }

  std::size_t pivot = 0;
  for (std::size_t col = 0; col < 24; ++col) {
    for (;;) {
      std::size_t best = rows.size();
      for (std::size_t i = pivot; i < rows.size(); ++i) {
        if (rows[i][col] != 0 && (best == rows.size() || std::llabs(rows[i][col]) < std::llabs(rows[best][col]))) {
          best = i;
        }
      }
      if (best == rows.size()) throw std::logic_error("leech: generating set is rank deficient");
      std::swap(rows[pivot], rows[best]);
      bool cleared = true;
      for (std::size_t i = pivot + 1; i < rows.size(); ++i) {
        if (rows[i][col] == 0) continue;
        const std::int64_t q = floor_div(rows[i][col], rows[pivot][col]);
        for (std::size_t k = 0; k < 24; ++k) rows[i][k] -= q * rows[pivot][k];
        if (rows[i][col] != 0) cleared = false;
      }
      if (cleared) break;
    }
    if (rows[pivot][col] < 0) {
      for (auto& v : rows[pivot]) v = -v;
    }
    for (std::size_t i = 0; i < pivot; ++i) {
      const std::int64_t q = floor_div(rows[i][col], rows[pivot][col]);
      if (q == 0) continue;
      for (std::size_t k = 0; k < 24; ++k) rows[i][k] -= q * rows[pivot][k];
    }
    ++pivot;
  }
  rows.resize(24);
  for (const auto& r : rows) {
    for (auto v : r) {
      if (std::llabs(v) > (1LL << 30)) throw std::logic_error("leech: basis entries overflowed");
    }
  }
  return rows;
}

ScaledIntMatrix leech_generator() {
  static const ScaledIntMatrix g = [] {
    const auto rows = leech_basis_rows();
    ScaledIntMatrix m{24, 24, 1, std::vector<std::int64_t>(24 * 24, 0)};
    for (std::size_t j = 0; j < 24; ++j) {
      for (std::size_t i = 0; i < 24; ++i) m.at(i, j) = rows[j][i];
    }
    return m;
  }();
  return g;
}

// Exact left inverse (G^T G)^{-1} G^T with a common integer denominator.
ScaledIntMatrix exact_left_inverse(const ScaledIntMatrix& g) {
  const std::size_t a = g.rows;
  const std::size_t n = g.cols;
  std::vector<cpp_rational> gr(a * n);
  for (std::size_t i = 0; i < a * n; ++i) gr[i] = cpp_rational(g.num[i], g.den);

  // Augmented [G^T G | G^T], reduced to [I | G^+].
  const std::size_t w = n + a;
  std::vector<cpp_rational> m(n * w);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      cpp_rational s = 0;
      for (std::size_t k = 0; k < a; ++k) s += gr[k * n + i] * gr[k * n + j];
      m[i * w + j] = s;
    }
    for (std::size_t k = 0; k < a; ++k) m[i * w + n + k] = gr[k * n + i];
  }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t p = col;
    while (p < n && m[p * w + col] == 0) ++p;
    if (p == n) throw std::invalid_argument("generator is singular");
    if (p != col) {
      for (std::size_t k = 0; k < w; ++k) std::swap(m[p * w + k], m[col * w + k]);
    }
    const cpp_rational piv = m[col * w + col];
    for (std::size_t k = 0; k < w; ++k) m[col * w + k] /= piv;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || m[r * w + col] == 0) continue;
      const cpp_rational f = m[r * w + col];
      for (std::size_t k = 0; k < w; ++k) m[r * w + k] -= f * m[col * w + k];
    }
  }

  cpp_int den = 1;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < a; ++k) {
      const cpp_int d = boost::multiprecision::denominator(m[i * w + n + k]);
      den = den / boost::multiprecision::gcd(den, d) * d;
    }
  }
  ScaledIntMatrix inv{n, a, static_cast<std::int64_t>(den), std::vector<std::int64_t>(n * a)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < a; ++k) {
      const cpp_rational v = m[i * w + n + k] * den;
      inv.at(i, k) = static_cast<std::int64_t>(boost::multiprecision::numerator(v));
    }
  }
  return inv;
}

std::vector<double> to_doubles(const ScaledIntMatrix& m) {
  std::vector<double> out(m.num.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<double>(m.num[i]) / static_cast<double>(m.den);
  }
  return out;
}

}  // namespace

std::string_view to_string(LatticeFamily family) {
  switch (family) {
    case LatticeFamily::Cubic: return "cubic";
    case LatticeFamily::A2: return "a2";
    case LatticeFamily::D4: return "d4";
    case LatticeFamily::E8: return "e8";
    case LatticeFamily::Leech24: return "leech24";
  }
  return "unknown";
}

LatticeFamily parse_family(std::string_view name) {
  std::string s(name);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "cubic" || s == "zn" || s == "z") return LatticeFamily::Cubic;
  if (s == "a2") return LatticeFamily::A2;
  if (s == "d4") return LatticeFamily::D4;
  if (s == "e8") return LatticeFamily::E8;
  if (s == "leech24" || s == "leech" || s == "lambda24") return LatticeFamily::Leech24;
  throw std::invalid_argument("unknown lattice family '" + std::string(name) + "'");
}

LatticeSpec make_lattice(LatticeFamily family, std::size_t n) {
  LatticeSpec spec;
  spec.family_ = family;
  spec.n_ = n;
  spec.ambient_ = n;
  auto require = [&](std::size_t expected) {
    if (n != expected) {
      throw std::invalid_argument(std::string(to_string(family)) + " requires dimension " +
                                  std::to_string(expected) + ", got " + std::to_string(n));
    }
  };

  switch (family) {
    case LatticeFamily::Cubic:
      if (n < 1) throw std::invalid_argument("cubic lattice requires dimension >= 1");
      spec.generator_ = identity(n);
      spec.scale2_ = 1;
      spec.dmin2_ = 1;
      spec.kissing_ = 2 * n;
      break;
    case LatticeFamily::A2:
      require(2);
      spec.ambient_ = 3;
      spec.generator_ = from_columns(3, {{1, -1, 0}, {1, 0, -1}}, 1);
      spec.scale2_ = 2;
      spec.dmin2_ = 2;
      spec.kissing_ = 6;
      break;
    case LatticeFamily::D4:
      require(4);
      spec.generator_ = from_columns(4, {{-1, -1, 0, 0}, {1, -1, 0, 0}, {0, 1, -1, 0}, {0, 0, 1, -1}}, 1);
      spec.scale2_ = 1;
      spec.dmin2_ = 2;
      spec.kissing_ = 24;
      break;
    case LatticeFamily::E8: {
      require(8);
      std::vector<std::vector<std::int64_t>> cols;
      std::vector<std::int64_t> c(8, 0);
      c[0] = 4;
      cols.push_back(c);
      for (std::size_t i = 1; i < 7; ++i) {
        std::vector<std::int64_t> d(8, 0);
        d[i - 1] = -2;
        d[i] = 2;
        cols.push_back(d);
      }
      cols.emplace_back(8, 1);
      spec.generator_ = from_columns(8, cols, 2);
      spec.scale2_ = 1;
      spec.dmin2_ = 2;
      spec.kissing_ = 240;
      break;
    }
    case LatticeFamily::Leech24:
      require(24);
      spec.generator_ = leech_generator();
      spec.scale2_ = 8;
      spec.dmin2_ = 32;
      spec.kissing_ = 196560;
      break;
  }
  spec.scale_ = std::sqrt(static_cast<double>(spec.scale2_));
  spec.inverse_ = exact_left_inverse(spec.generator_);
  spec.g_ = to_doubles(spec.generator_);
  spec.ginv_ = to_doubles(spec.inverse_);
  return spec;
}

double LatticeSpec::packing_radius() const { return 0.5 * std::sqrt(static_cast<double>(dmin2_)); }

void LatticeSpec::to_physical(std::span<const double> internal, std::span<double> out) const {
  if (internal.size() != ambient_ || out.size() != n_) throw std::invalid_argument("to_physical: dimension mismatch");
  if (family_ == LatticeFamily::A2) {
    // Orthonormal basis (1,-1,0)/sqrt2, (1,1,-2)/sqrt6 of the zero-sum plane, then / sqrt2.
    out[0] = 0.5 * (internal[0] - internal[1]);
    out[1] = (internal[0] + internal[1] - 2.0 * internal[2]) / (2.0 * std::sqrt(3.0));
    return;
  }
  for (std::size_t i = 0; i < n_; ++i) out[i] = internal[i] / scale_;
}

void LatticeSpec::from_physical(std::span<const double> physical, std::span<double> out) const {
  if (physical.size() != n_ || out.size() != ambient_) throw std::invalid_argument("from_physical: dimension mismatch");
  if (family_ == LatticeFamily::A2) {
    const double t = physical[1] / std::sqrt(3.0);
    out[0] = physical[0] + t;
    out[1] = -physical[0] + t;
    out[2] = -2.0 * t;
    return;
  }
  for (std::size_t i = 0; i < n_; ++i) out[i] = physical[i] * scale_;
}

Point LatticeSpec::to_physical(std::span<const double> internal) const {
  Point out(n_);
  to_physical(internal, out);
  return out;
}

Point LatticeSpec::from_physical(std::span<const double> physical) const {
  Point out(ambient_);
  from_physical(physical, out);
  return out;
}

void LatticeSpec::raw_coefficients(std::span<const double> x, std::span<double> out) const {
  for (std::size_t i = 0; i < n_; ++i) {
    double s = 0.0;
    const double* row = &ginv_[i * ambient_];
    for (std::size_t k = 0; k < ambient_; ++k) s += row[k] * x[k];
    out[i] = s;
  }
}

Point lattice_point(const LatticeSpec& spec, std::span<const std::int64_t> z) {
  if (z.size() != spec.dimension()) throw std::invalid_argument("lattice_point: dimension mismatch");
  const auto& g = spec.generator();
  Point out(spec.ambient_dimension());
  for (std::size_t i = 0; i < g.rows; ++i) {
    std::int64_t s = 0;
    for (std::size_t j = 0; j < g.cols; ++j) s += g.at(i, j) * z[j];
    out[i] = static_cast<double>(s) / static_cast<double>(g.den);
  }
  return out;
}

void coeffs_of(const LatticeSpec& spec, std::span<const double> lambda, std::span<std::int64_t> out) {
  const std::size_t n = spec.dimension();
  const std::size_t a = spec.ambient_dimension();
  if (lambda.size() != a || out.size() != n) throw std::invalid_argument("coeffs_of: dimension mismatch");
  std::array<double, 32> small{};
  std::vector<double> large;
  std::span<double> raw(small.data(), std::min<std::size_t>(n, small.size()));
  if (n > small.size()) {
    large.resize(n);
    raw = large;
  }
  spec.raw_coefficients(lambda, raw);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = std::nearbyint(raw[i]);
    if (!(std::abs(raw[i] - r) <= kLatticeTolerance)) throw std::domain_error("not a lattice point");
    out[i] = static_cast<std::int64_t>(r);
  }
  for (std::size_t i = 0; i < a; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += spec.generator_entry(i, j) * static_cast<double>(out[j]);
    if (!(std::abs(s - lambda[i]) <= kLatticeTolerance)) throw std::domain_error("not a lattice point");
  }
}

IntegerVector coeffs_of(const LatticeSpec& spec, std::span<const double> lambda) {
  IntegerVector z(spec.dimension());
  coeffs_of(spec, lambda, z);
  return z;
}

std::vector<Point> enumerate_ball(const LatticeSpec& spec, std::span<const double> center, double radius2,
                                  std::size_t budget) {
  const std::size_t n = spec.dimension();
  const std::size_t a = spec.ambient_dimension();
  if (center.size() != a) throw std::invalid_argument("enumerate_ball: dimension mismatch");
  if (!(radius2 >= 0.0)) throw std::invalid_argument("enumerate_ball: negative radius");

  Eigen::MatrixXd g(a, n);
  for (std::size_t i = 0; i < a; ++i)
    for (std::size_t j = 0; j < n; ++j) g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = spec.generator_entry(i, j);
  const Eigen::MatrixXd gram = g.transpose() * g;
  const Eigen::LLT<Eigen::MatrixXd> llt(gram);
  const Eigen::MatrixXd r = llt.matrixU();

  std::vector<double> u(n);
  spec.raw_coefficients(center, u);
  double perp2 = 0.0;
  for (std::size_t i = 0; i < a; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += spec.generator_entry(i, j) * u[j];
    perp2 += (center[i] - s) * (center[i] - s);
  }
  const double slack = 1e-9 * std::max(1.0, radius2);
  std::vector<Point> found;
  const double rem0 = radius2 - perp2 + slack;
  if (rem0 < 0.0) return found;

  // Depth-first Fincke-Pohst: level i fixes z_i given z_{i+1..n-1}.
  std::vector<std::int64_t> z(n, 0), hi(n, 0);
  std::vector<double> rem(n + 1, 0.0), ctr(n, 0.0);
  std::size_t nodes = 0;
  auto setup_level = [&](std::size_t i) {
    double s = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) s += r(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * (static_cast<double>(z[j]) - u[j]);
    const double rii = r(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
    ctr[i] = u[i] - s / rii;
    const double bound = std::sqrt(std::max(rem[i + 1], 0.0)) / rii;
    z[i] = static_cast<std::int64_t>(std::ceil(ctr[i] - bound - 1e-12));
    hi[i] = static_cast<std::int64_t>(std::floor(ctr[i] + bound + 1e-12));
  };

  rem[n] = rem0;
  std::size_t level = n - 1;
  setup_level(level);
  std::vector<std::int64_t> zc(n);
  for (;;) {
    if (z[level] > hi[level]) {
      if (level == n - 1) break;
      ++level;
      ++z[level];
      continue;
    }
    if (++nodes > budget) throw std::length_error("enumerate_ball: candidate budget exceeded");
    const double rii = r(static_cast<Eigen::Index>(level), static_cast<Eigen::Index>(level));
    const double d = rii * (static_cast<double>(z[level]) - ctr[level]);
    rem[level] = rem[level + 1] - d * d;
    if (level == 0) {
      std::copy(z.begin(), z.end(), zc.begin());
      Point p = lattice_point(spec, zc);
      if (distance2(p, center) <= radius2 + slack) found.push_back(std::move(p));
      ++z[0];
      continue;
    }
    --level;
    setup_level(level);
  }
  return found;
}

double distance2(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

double norm2(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return s;
}

}  // namespace vcs
