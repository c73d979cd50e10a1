#include "vcs/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "vcs/metrics.hpp"
#include "vcs/rng.hpp"
#include "vcs/shaping.hpp"

namespace vcs {
namespace {

// Seed identifiers derived from the master seed.
constexpr std::uint64_t kShiftStart = 1;
constexpr std::uint64_t kShiftEnergy = 2;
constexpr std::uint64_t kEnergy = 3;
constexpr std::uint64_t kKissing = 4;
constexpr std::uint64_t kMu = 5;
constexpr std::uint64_t kSweep = 6;

constexpr std::string_view kCurveKeys[] = {"lattice", "dimension", "r", "shift", "labeling", "detector",
                                           "energy_samples", "shift_samples"};

std::vector<std::string> key_list(bool multi_curve, std::initializer_list<std::string_view> extra) {
  std::vector<std::string> keys;
  for (std::string_view k : kCurveKeys) {
    keys.push_back("constellation." + std::string(k));
    if (multi_curve) keys.push_back("curve*." + std::string(k));
  }
  keys.emplace_back("run.master_seed");
  for (std::string_view k : extra) keys.emplace_back(k);
  return keys;
}

std::size_t default_dimension(LatticeFamily family) {
  switch (family) {
    case LatticeFamily::A2: return 2;
    case LatticeFamily::D4: return 4;
    case LatticeFamily::E8: return 8;
    case LatticeFamily::Leech24: return 24;
    case LatticeFamily::Cubic: return 2;
  }
  return 2;
}

CurveSpec read_curve(const Config& c, const std::string& section) {
  auto key = [&](const char* name) {
    const std::string own = section + "." + name;
    if (c.has(own) || section == "constellation") return own;
    return "constellation." + std::string(name);
  };
  CurveSpec curve;
  curve.section = section;
  const std::string lattice = c.get_string(key("lattice"));
  try {
    if (lattice == "qam" || lattice == "QAM") {
      curve.qam = true;
      curve.family = LatticeFamily::Cubic;
    } else {
      curve.family = parse_family(lattice);
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(key("lattice"), e.what());
  }
  curve.n = c.get_uint(key("dimension"), default_dimension(curve.family));
  for (std::uint64_t r : c.get_uints(key("r"))) {
    if (r > kMaxScale || r < 2 || (r & (r - 1)) != 0) {
      throw ConfigError(key("r"), "r must be a power of two in [2, " + std::to_string(kMaxScale) + "]");
    }
    curve.r.push_back(static_cast<unsigned>(r));
  }
  curve.shift = c.get_string(key("shift"), "auto");
  try {
    curve.labeling = parse_labeling(c.get_string(key("labeling"), "quasi-gray"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(key("labeling"), e.what());
  }
  try {
    curve.detector = parse_detector(c.get_string(key("detector"), "alg2"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(key("detector"), e.what());
  }
  curve.energy_samples = c.get_uint(key("energy_samples"), curve.energy_samples);
  curve.shift_samples = c.get_uint(key("shift_samples"), curve.shift_samples);
  if (curve.qam && (curve.n % 2 != 0 || curve.n == 0)) throw ConfigError(key("dimension"), "QAM needs an even dimension");
  try {
    (void)make_lattice(curve.family, curve.n);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(key("dimension"), e.what());
  }
  return curve;
}

Point resolve_shift(const CurveSpec& curve, const LatticeSpec& lattice, unsigned r, std::uint64_t seed) {
  std::string mode = curve.shift;
  if (mode == "auto") mode = curve.family == LatticeFamily::Cubic ? "centered" : "optimized";
  const std::string key = curve.section + ".shift";
  if (curve.qam && mode != "centered") throw ConfigError(key, "QAM uses the centred shift");
  if (mode == "centered") {
    if (curve.family != LatticeFamily::Cubic) throw ConfigError(key, "centered shift is only defined for cubic lattices");
    return Point(curve.n, -0.5);
  }
  if (mode == "zero") return Point(lattice.ambient_dimension(), 0.0);
  const Point start = sample_shift_uniform(lattice, derive_seed(seed, kShiftStart));
  if (mode == "random") return start;
  if (mode == "optimized") {
    ShiftOptions opt;
    opt.energy = EnergyOptions{65536, curve.shift_samples, derive_seed(seed, kShiftEnergy)};
    return optimize_shift(lattice, r, start, opt).shift;
  }
  Point explicit_shift;
  std::istringstream in(mode);
  for (std::string item; std::getline(in, item, ',');) {
    try {
      explicit_shift.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError(key, "expected auto, optimized, random, centered, zero or a comma-separated vector");
    }
  }
  if (explicit_shift.size() != lattice.ambient_dimension()) {
    throw ConfigError(key, "shift needs " + std::to_string(lattice.ambient_dimension()) + " internal coordinates");
  }
  return explicit_shift;
}

std::string se_text(unsigned r) { return format_double(2.0 * std::log2(static_cast<double>(r))); }

unsigned config_threads(const Config& c, unsigned threads) {
  return threads ? threads : static_cast<unsigned>(c.get_uint("run.threads", 0));
}

}  // namespace

std::string CurveSpec::family_name() const { return qam ? "qam" : std::string(to_string(family)); }

std::vector<std::string> allowed_keys(std::string_view command) {
  if (command == "encode" || command == "decode") return key_list(false, {"io.input", "io.output", "io.format"});
  if (command == "metrics") return key_list(true, {"run.output", "metrics.kissing_samples", "metrics.exact_limit"});
  if (command == "shift-opt") {
    return key_list(true, {"run.output", "shift.mu_samples", "shift.max_iter", "shift.tol", "shift.energy_samples"});
  }
  if (command == "awgn") {
    return key_list(true, {"run.output", "run.threads", "awgn.ebn0_db", "awgn.min_bit_errors", "awgn.max_symbols",
                           "awgn.block_symbols"});
  }
  if (command == "fiber") {
    return key_list(true, {"run.output", "run.optimum_output", "run.threads", "signal.symbol_rate_gbaud",
                           "signal.rolloff", "signal.oversampling", "signal.wdm_spacing_ghz", "signal.pilot_overhead",
                           "signal.n_symbols", "fiber.gamma_per_w_km", "fiber.dispersion_ps_nm_km",
                           "fiber.attenuation_db_km", "fiber.span_length_km", "fiber.noise_figure_db", "fiber.step_km",
                           "fiber.wavelength_nm", "fiber.ase", "sweep.power_dbm", "sweep.n_spans"});
  }
  throw std::invalid_argument("unknown command '" + std::string(command) + "'");
}

std::uint64_t master_seed(const Config& config) {
  if (!config.has("run.master_seed")) throw ConfigError("run.master_seed", "required key is missing");
  return config.get_uint("run.master_seed");
}

std::vector<CurveSpec> read_curves(const Config& config) {
  std::vector<CurveSpec> curves;
  for (const std::string& s : config.sections()) {
    if (s.rfind("curve", 0) == 0) curves.push_back(read_curve(config, s));
  }
  if (curves.empty()) curves.push_back(read_curve(config, "constellation"));
  return curves;
}

std::shared_ptr<const VoronoiConstellation> build_constellation(const CurveSpec& curve, unsigned r,
                                                                std::uint64_t seed) {
  const LatticeSpec lattice = make_lattice(curve.family, curve.n);
  Point shift = resolve_shift(curve, lattice, r, seed);
  try {
    return std::make_shared<const VoronoiConstellation>(
        lattice, r, std::move(shift), EnergyOptions{65536, curve.energy_samples, derive_seed(seed, kEnergy)});
  } catch (const std::invalid_argument& e) {
    throw ConfigError(curve.section + ".shift", e.what());
  }
}

std::shared_ptr<const Modem> build_modem(const CurveSpec& curve, unsigned r, std::uint64_t seed) {
  if (curve.qam) return std::make_shared<const QamModem>(r, curve.n / 2);
  try {
    return std::make_shared<const VcModem>(build_constellation(curve, r, seed), curve.labeling, curve.detector);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(curve.section + ".detector", e.what());
  }
}

Table awgn_table(const Config& config, unsigned threads) {
  const std::uint64_t seed = master_seed(config);
  const std::vector<double> grid = config.get_doubles("awgn.ebn0_db");
  if (grid.size() >= (1u << 24)) throw ConfigError("awgn.ebn0_db", "grid too large");
  StopRule stop;
  stop.min_bit_errors = config.get_uint("awgn.min_bit_errors", stop.min_bit_errors);
  stop.max_symbols = config.get_uint("awgn.max_symbols", stop.max_symbols);
  stop.block_symbols = config.get_uint("awgn.block_symbols", stop.block_symbols);
  if (stop.max_symbols == 0) throw ConfigError("awgn.max_symbols", "must be positive");
  if (stop.block_symbols == 0) throw ConfigError("awgn.block_symbols", "must be positive");

  Table t;
  t.header = {"family", "r", "SE", "labeling", "detector", "eb_n0_db", "symbols", "bit_errors",
              "sym_errors", "ber", "ser", "ci_lo", "ci_hi"};
  const auto curves = read_curves(config);
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const CurveSpec& curve = curves[i];
    for (std::size_t j = 0; j < curve.r.size(); ++j) {
      const unsigned r = curve.r[j];
      const auto modem = build_modem(curve, r, seed);
      const std::uint64_t base = (static_cast<std::uint64_t>(i) << 40) | (static_cast<std::uint64_t>(j) << 24);
      const auto points = run_awgn(*modem, grid, stop, derive_seed(seed, kSweep), base, config_threads(config, threads));
      for (const AwgnPoint& p : points) {
        t.rows.push_back({curve.family_name(), std::to_string(r), se_text(r),
                          curve.qam ? "gray" : std::string(to_string(curve.labeling)),
                          curve.qam ? "ml" : std::string(to_string(curve.detector)), format_double(p.ebn0_db),
                          std::to_string(p.symbols), std::to_string(p.bit_errors), std::to_string(p.symbol_errors),
                          format_double(p.ber), format_double(p.ser), format_double(p.ci_lo), format_double(p.ci_hi)});
      }
    }
  }
  return t;
}

Table fiber_table(const Config& config, unsigned threads, Table* optimum) {
  FiberExperiment e;
  e.master_seed = derive_seed(master_seed(config), kSweep);
  SignalParams& s = e.signal;
  s.symbol_rate_gbaud = config.get_double("signal.symbol_rate_gbaud", s.symbol_rate_gbaud);
  s.rolloff = config.get_double("signal.rolloff", s.rolloff);
  s.oversampling = static_cast<unsigned>(config.get_uint("signal.oversampling", s.oversampling));
  s.wdm_spacing_ghz = config.get_double("signal.wdm_spacing_ghz", s.wdm_spacing_ghz);
  s.pilot_overhead = config.get_double("signal.pilot_overhead", s.pilot_overhead);
  s.n_symbols = config.get_uint("signal.n_symbols", s.n_symbols);
  FiberConfig& f = e.fiber;
  f.gamma_per_w_km = config.get_double("fiber.gamma_per_w_km", f.gamma_per_w_km);
  f.dispersion_ps_nm_km = config.get_double("fiber.dispersion_ps_nm_km", f.dispersion_ps_nm_km);
  f.attenuation_db_km = config.get_double("fiber.attenuation_db_km", f.attenuation_db_km);
  f.span_length_km = config.get_double("fiber.span_length_km", f.span_length_km);
  f.noise_figure_db = config.get_double("fiber.noise_figure_db", f.noise_figure_db);
  f.step_km = config.get_double("fiber.step_km", f.step_km);
  f.wavelength_nm = config.get_double("fiber.wavelength_nm", f.wavelength_nm);
  f.ase = config.get_bool("fiber.ase", f.ase);
  try {
    f.validate();
  } catch (const std::invalid_argument& err) {
    throw ConfigError("fiber.step_km", err.what());
  }
  e.powers_dbm = config.get_doubles("sweep.power_dbm");
  for (std::uint64_t n : config.get_uints("sweep.n_spans")) {
    if (n == 0) throw ConfigError("sweep.n_spans", "span counts must be positive");
    e.detect_spans.push_back(n);
  }
  f.n_spans = *std::max_element(e.detect_spans.begin(), e.detect_spans.end());

  Table t;
  t.header = {"family", "r", "SE", "power_dbm", "n_spans", "distance_km", "symbols", "bit_errors", "ber"};
  if (optimum) {
    optimum->header = {"family", "r", "SE", "n_spans", "distance_km", "power_dbm", "bit_errors", "ber", "snr_db"};
    optimum->rows.clear();
  }
  const std::uint64_t seed = master_seed(config);
  for (const CurveSpec& curve : read_curves(config)) {
    if (curve.n % 4 != 0) throw ConfigError(curve.section + ".dimension", "fiber transmission needs a multiple of 4 dimensions");
    for (unsigned r : curve.r) {
      const auto modem = build_modem(curve, r, seed);
      FiberExperiment cell = e;
      cell.signal.n_wavelengths = curve.n / 4;
      try {
        cell.signal.validate();
      } catch (const std::invalid_argument& err) {
        throw ConfigError("signal.oversampling", err.what());
      }
      const auto rows = run_fiber_experiment(*modem, cell, config_threads(config, threads));
      for (const FiberRow& row : rows) {
        t.rows.push_back({curve.family_name(), std::to_string(r), se_text(r), format_double(row.power_dbm),
                          std::to_string(row.n_spans), format_double(row.distance_km), std::to_string(row.symbols),
                          std::to_string(row.bit_errors), format_double(row.ber)});
      }
      if (optimum) {
        for (const FiberRow& row : optimum_power_trace(rows)) {
          optimum->rows.push_back({curve.family_name(), std::to_string(r), se_text(r),
                                   std::to_string(row.n_spans), format_double(row.distance_km),
                                   format_double(row.power_dbm), std::to_string(row.bit_errors), format_double(row.ber),
                                   format_double(row.snr_db)});
        }
      }
    }
  }
  return t;
}

Table metrics_table(const Config& config) {
  const std::uint64_t seed = master_seed(config);
  Table t;
  t.header = {"family", "n", "r", "M", "SE", "Es", "Eb", "dmin", "gamma", "gamma_db", "penalty_db",
              "tau_bar", "tau_stderr", "tau_exact", "energy_exact"};
  for (const CurveSpec& curve : read_curves(config)) {
    const std::uint64_t default_samples = curve.family == LatticeFamily::Leech24 ? 4 : 256;
    KissingOptions k;
    k.samples = config.get_uint("metrics.kissing_samples", default_samples);
    k.exact_limit = config.get_uint("metrics.exact_limit", k.exact_limit);
    k.seed = derive_seed(seed, kKissing);
    for (unsigned r : curve.r) {
      const MeritReport m = merit_report(*build_constellation(curve, r, seed), k);
      t.rows.push_back({curve.family_name(), std::to_string(m.n), std::to_string(m.r), m.m.str(), format_double(m.se),
                        format_double(m.es), format_double(m.eb), format_double(m.dmin), format_double(m.gamma),
                        format_double(m.gamma_db), format_double(m.penalty_db), format_double(m.tau.tau_bar),
                        format_double(m.tau.stderr_tau), m.tau.exact ? "1" : "0", m.energy_exact ? "1" : "0"});
    }
  }
  return t;
}

Table shift_table(const Config& config) {
  const std::uint64_t seed = master_seed(config);
  const std::uint64_t samples = config.get_uint("shift.mu_samples", 200);
  if (samples < 2) throw ConfigError("shift.mu_samples", "need at least 2 samples");
  ShiftOptions opt;
  opt.max_iter = static_cast<int>(config.get_uint("shift.max_iter", 50));
  opt.tol = config.get_double("shift.tol", opt.tol);
  opt.energy.samples = config.get_uint("shift.energy_samples", 20000);
  opt.energy.seed = derive_seed(seed, kShiftEnergy);
  Table t;
  t.header = {"family", "n", "r", "mu", "mu_stderr", "mean_energy", "optimal_energy", "samples"};
  for (const CurveSpec& curve : read_curves(config)) {
    const LatticeSpec lattice = make_lattice(curve.family, curve.n);
    for (unsigned r : curve.r) {
      const MuEstimate mu = estimate_mu(lattice, r, samples, derive_seed(seed, kMu), opt);
      t.rows.push_back({curve.family_name(), std::to_string(curve.n), std::to_string(r), format_double(mu.mu),
                        format_double(mu.stderr_mu), format_double(mu.mean_energy), format_double(mu.optimal_energy),
                        std::to_string(mu.samples)});
    }
  }
  return t;
}

}  // namespace vcs
