#include "vcs/awgn.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <thread>

#include "vcs/rng.hpp"

namespace vcs {

std::string_view to_string(Detector detector) { return detector == Detector::ML ? "ml" : "alg2"; }

Detector parse_detector(std::string_view name) {
  if (name == "alg2" || name == "algorithm2" || name == "ALG2") return Detector::Alg2;
  if (name == "ml" || name == "ML") return Detector::ML;
  throw std::invalid_argument("unknown detector '" + std::string(name) + "'");
}

VcModem::VcModem(std::shared_ptr<const VoronoiConstellation> vc, Labeling labeling, Detector detector)
    : vc_(std::move(vc)), labeling_(labeling), detector_(detector) {
  if (!vc_) throw std::invalid_argument("VcModem: null constellation");
  if (detector_ == Detector::ML) {
    if (vc_->size() > (1u << 20)) throw std::invalid_argument("ML detection needs M <= 2^20");
    const auto m = static_cast<std::size_t>(vc_->size());
    const std::size_t n = vc_->dimension();
    table_.resize(m * n);
    std::vector<std::uint32_t> digits(n, 0);
    for (std::size_t k = 0; k < m; ++k) {
      vc_->encode_digits(digits, std::span<double>(table_.data() + k * n, n));
      for (std::size_t i = n; i-- > 0;) {
        if (++digits[i] < vc_->r()) break;
        digits[i] = 0;
      }
    }
  }
}

void VcModem::bits_to_digits(std::span<const std::uint8_t> bits, std::span<std::uint32_t> digits) const {
  const unsigned b = vc_->bits_per_digit();
  for (std::size_t i = 0; i < digits.size(); ++i) {
    std::uint32_t label = 0;
    for (unsigned j = 0; j < b; ++j) label = (label << 1) | bits[i * b + j];
    digits[i] = label_to_digit(label, labeling_);
  }
}

void VcModem::digits_to_bits(std::span<const std::uint32_t> digits, std::span<std::uint8_t> bits) const {
  const unsigned b = vc_->bits_per_digit();
  for (std::size_t i = 0; i < digits.size(); ++i) {
    const std::uint32_t label = digit_to_label(digits[i], labeling_);
    for (unsigned j = 0; j < b; ++j) bits[i * b + j] = static_cast<std::uint8_t>((label >> (b - 1 - j)) & 1u);
  }
}

void VcModem::modulate(std::span<const std::uint8_t> bits, std::span<double> y) const {
  thread_local std::vector<std::uint32_t> digits;
  digits.resize(vc_->dimension());
  bits_to_digits(bits, digits);
  vc_->encode_digits(digits, y);
}

std::size_t VcModem::ml_index(std::span<const double> y) const {
  if (table_.empty()) throw std::logic_error("ml_index needs an ML modem");
  const std::size_t n = vc_->dimension();
  const std::size_t m = table_.size() / n;
  std::size_t best = 0;
  double best_d = INFINITY;
  for (std::size_t k = 0; k < m; ++k) {
    const double* p = table_.data() + k * n;
    double d = 0.0;
    for (std::size_t i = 0; i < n && d < best_d; ++i) d += (y[i] - p[i]) * (y[i] - p[i]);
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  return best;
}

void VcModem::detect(std::span<const double> y, std::span<std::uint8_t> bits) const {
  thread_local std::vector<std::uint32_t> digits;
  const std::size_t n = vc_->dimension();
  digits.resize(n);
  if (detector_ == Detector::ML) {
    std::size_t k = ml_index(y);
    for (std::size_t i = n; i-- > 0;) {
      digits[i] = static_cast<std::uint32_t>(k & (vc_->r() - 1));
      k >>= vc_->bits_per_digit();
    }
  } else {
    vc_->decode_digits(y, digits);
  }
  digits_to_bits(digits, bits);
}

QamModem::QamModem(unsigned levels, std::size_t pairs) : levels_(levels), pairs_(pairs) {
  if (levels < 2 || !std::has_single_bit(levels)) throw std::invalid_argument("QAM levels per rail must be a power of two");
  if (pairs == 0) throw std::invalid_argument("QAM needs at least one dimension pair");
  rail_bits_ = static_cast<unsigned>(std::countr_zero(levels));
  const double l = levels;
  // Rail amplitudes (2i - L + 1) * step; average pair energy 2 step^2 (L^2 - 1) / 3.
  step_ = std::sqrt(3.0 / (2.0 * (l * l - 1.0)));
}

void QamModem::modulate(std::span<const std::uint8_t> bits, std::span<double> y) const {
  for (std::size_t rail = 0; rail < 2 * pairs_; ++rail) {
    std::uint32_t label = 0;
    for (unsigned j = 0; j < rail_bits_; ++j) label = (label << 1) | bits[rail * rail_bits_ + j];
    const double level = gray_decode(label);
    y[rail] = (2.0 * level - (levels_ - 1.0)) * step_;
  }
}

void QamModem::detect(std::span<const double> y, std::span<std::uint8_t> bits) const {
  for (std::size_t rail = 0; rail < 2 * pairs_; ++rail) {
    const double u = (y[rail] / step_ + (levels_ - 1.0)) / 2.0;
    const double clamped = std::clamp(std::floor(u + 0.5), 0.0, levels_ - 1.0);
    const std::uint32_t label = gray_encode(static_cast<std::uint32_t>(clamped));
    for (unsigned j = 0; j < rail_bits_; ++j) {
      bits[rail * rail_bits_ + j] = static_cast<std::uint8_t>((label >> (rail_bits_ - 1 - j)) & 1u);
    }
  }
}

double noise_density(const Modem& modem, double ebn0_db) {
  const double eb = modem.symbol_energy() / static_cast<double>(modem.bits_per_symbol());
  return eb / std::pow(10.0, ebn0_db / 10.0);
}

std::pair<double, double> wilson_interval(std::uint64_t errors, std::uint64_t trials) {
  if (trials == 0) return {0.0, 1.0};
  constexpr double z = 1.959963984540054;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(errors) / n;
  const double denom = 1.0 + z * z / n;
  const double centre = (p + z * z / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

unsigned worker_count(unsigned requested) {
  unsigned n = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("VC_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap > 0) n = std::min(n, static_cast<unsigned>(cap));
  }
  return std::max(1u, n);
}

namespace {

struct Counts {
  std::uint64_t symbols = 0;
  std::uint64_t bit_errors = 0;
  std::uint64_t symbol_errors = 0;
};

Counts run_block(const Modem& modem, std::uint64_t key, std::uint64_t first, std::uint64_t count, double sigma) {
  const std::size_t n = modem.dimension();
  const unsigned m = modem.bits_per_symbol();
  std::vector<std::uint8_t> sent(m), got(m);
  std::vector<double> y(n);
  Counts c;
  for (std::uint64_t s = first; s < first + count; ++s) {
    CounterRng rng(key, s);
    for (unsigned i = 0; i < m; i += 64) {
      std::uint64_t word = rng();
      for (unsigned j = i; j < std::min(m, i + 64); ++j, word >>= 1) sent[j] = static_cast<std::uint8_t>(word & 1u);
    }
    modem.modulate(sent, y);
    for (double& v : y) v += sigma * rng.normal();
    modem.detect(y, got);
    std::uint64_t errs = 0;
    for (unsigned j = 0; j < m; ++j) errs += sent[j] != got[j];
    c.bit_errors += errs;
    c.symbol_errors += errs != 0;
  }
  c.symbols = count;
  return c;
}

}  // namespace

std::vector<AwgnPoint> run_awgn(const Modem& modem, std::span<const double> ebn0_db, const StopRule& stop,
                                std::uint64_t master_seed, std::uint64_t cell_base, unsigned threads) {
  if (stop.block_symbols == 0 || stop.max_symbols == 0) throw std::invalid_argument("run_awgn: empty stop rule");
  const unsigned workers = worker_count(threads);
  constexpr std::uint64_t kRoundBlocks = 32;
  const std::uint64_t total_blocks = (stop.max_symbols + stop.block_symbols - 1) / stop.block_symbols;

  std::vector<AwgnPoint> out;
  out.reserve(ebn0_db.size());
  for (std::size_t cell = 0; cell < ebn0_db.size(); ++cell) {
    const auto t0 = std::chrono::steady_clock::now();
    const double n0 = noise_density(modem, ebn0_db[cell]);
    const double sigma = std::sqrt(n0 / 2.0);
    const std::uint64_t key = derive_seed(master_seed, cell_base + cell);

    Counts total;
    std::uint64_t next = 0;
    bool done = false;
    std::vector<Counts> round(kRoundBlocks);
    while (!done && next < total_blocks) {
      const std::uint64_t nblocks = std::min(kRoundBlocks, total_blocks - next);
      auto work = [&](std::uint64_t b) {
        const std::uint64_t first = (next + b) * stop.block_symbols;
        const std::uint64_t count = std::min(stop.block_symbols, stop.max_symbols - first);
        round[b] = run_block(modem, key, first, count, sigma);
      };
      if (workers == 1) {
        for (std::uint64_t b = 0; b < nblocks; ++b) work(b);
      } else {
        std::atomic<std::uint64_t> cursor{0};
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < std::min<std::uint64_t>(workers, nblocks); ++t) {
          pool.emplace_back([&] {
            for (std::uint64_t b; (b = cursor.fetch_add(1)) < nblocks;) work(b);
          });
        }
      }
      for (std::uint64_t b = 0; b < nblocks; ++b) {
        total.symbols += round[b].symbols;
        total.bit_errors += round[b].bit_errors;
        total.symbol_errors += round[b].symbol_errors;
        if (total.bit_errors >= stop.min_bit_errors || total.symbols >= stop.max_symbols) {
          done = true;
          break;
        }
      }
      next += nblocks;
    }

    AwgnPoint p;
    p.ebn0_db = ebn0_db[cell];
    p.symbols = total.symbols;
    p.bit_errors = total.bit_errors;
    p.symbol_errors = total.symbol_errors;
    const double bits = static_cast<double>(total.symbols) * modem.bits_per_symbol();
    p.ber = static_cast<double>(total.bit_errors) / bits;
    p.ser = static_cast<double>(total.symbol_errors) / static_cast<double>(total.symbols);
    std::tie(p.ci_lo, p.ci_hi) = wilson_interval(total.bit_errors, total.symbols * modem.bits_per_symbol());
    p.low_confidence = total.bit_errors < stop.min_bit_errors;
    p.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.push_back(p);
  }
  return out;
}

}  // namespace vcs
