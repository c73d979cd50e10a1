// Command-line front end: encode, decode, metrics, shift-opt, awgn, fiber.
#include <bit>
#include <cstring>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "vcs/experiment.hpp"

using namespace vcs;

namespace {

constexpr int kConfigFailure = 1;
constexpr int kRuntimeFailure = 2;

struct Invocation {
  std::string config_path;
  std::vector<std::string> sets;
  // Shortcut flags, keyed by the config key they override.
  std::map<std::string, std::string> flags;
  unsigned threads = 0;
};

void add_common(CLI::App* app, Invocation& inv, bool sweep) {
  app->add_option("-c,--config", inv.config_path, "Config file (sectioned key = value)");
  app->add_option("--set", inv.sets, "Override any key: section.key=value (repeatable)");
  app->add_option("--lattice", inv.flags["constellation.lattice"], "cubic, a2, d4, e8, leech24 or qam");
  app->add_option("--dimension", inv.flags["constellation.dimension"], "Dimension (cubic and qam only)");
  app->add_option("--r", inv.flags["constellation.r"], "Scale factor r (power of two); sweeps accept a list");
  app->add_option("--shift", inv.flags["constellation.shift"],
                  "auto, optimized, random, centered, zero or comma-separated internal coordinates");
  app->add_option("--labeling", inv.flags["constellation.labeling"], "natural or quasi-gray");
  app->add_option("--detector", inv.flags["constellation.detector"], "alg2 or ml");
  app->add_option("--seed", inv.flags["run.master_seed"], "Master seed");
  if (sweep) {
    app->add_option("-o,--out", inv.flags["run.output"], "Output CSV (default: stdout)");
    app->add_option("--threads", inv.threads, "Worker threads (0: all cores, capped by VC_THREADS)");
  }
  std::ostringstream keys;
  keys << "Config keys:";
  for (const std::string& k : allowed_keys(app->get_name())) keys << "\n  " << k;
  app->footer(keys.str());
}

Config resolve(const std::string& command, const Invocation& inv) {
  Config c;
  if (!inv.config_path.empty()) {
    c = Config::load(inv.config_path);
  } else if (inv.flags.at("run.master_seed").empty()) {
    // Without a config file the seed defaults to 1; config files must name it.
    c.set("run.master_seed", "1");
  }
  for (const auto& [key, value] : inv.flags) {
    if (!value.empty()) c.set(key, value);
  }
  for (const std::string& kv : inv.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError(kv, "--set expects section.key=value");
    c.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  c.require_known(allowed_keys(command));
  (void)master_seed(c);
  return c;
}

void emit(const Config& c, const std::string& key, const Table& t) {
  const std::string path = c.get_string(key, "");
  if (path.empty() || path == "-") {
    std::cout << csv_text(t.header, t.rows);
  } else {
    write_csv_atomic(path, t.header, t.rows);
    std::cerr << "wrote " << t.rows.size() << " rows to " << path << "\n";
  }
}

void write_f64(std::ostream& out, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  char buf[8];
  std::memcpy(buf, &bits, 8);
  out.write(buf, 8);
}

bool read_f64(std::istream& in, double& v) {
  char buf[8];
  if (!in.read(buf, 8)) return false;
  std::uint64_t bits;
  std::memcpy(&bits, buf, 8);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  v = std::bit_cast<double>(bits);
  return true;
}

std::string io_format(const Config& c) {
  const std::string f = c.get_string("io.format", "bits");
  if (f != "bits" && f != "index") throw ConfigError("io.format", "expected bits or index");
  return f;
}

std::ifstream open_in(const Config& c, std::ios::openmode mode) {
  const std::string path = c.get_string("io.input");
  std::ifstream in(path, mode);
  if (!in) throw ConfigError("io.input", "cannot open " + path);
  return in;
}

std::ofstream open_out(const Config& c, std::ios::openmode mode) {
  const std::string path = c.get_string("io.output");
  std::ofstream out(path, mode | std::ios::trunc);
  if (!out) throw ConfigError("io.output", "cannot write " + path);
  return out;
}

std::pair<CurveSpec, std::shared_ptr<const VoronoiConstellation>> codec_constellation(const Config& c) {
  const CurveSpec curve = read_curves(c).front();
  if (curve.qam) throw ConfigError("constellation.lattice", "encode/decode work on lattice constellations");
  if (curve.r.size() != 1) throw ConfigError("constellation.r", "encode/decode need a single r");
  return {curve, build_constellation(curve, curve.r.front(), master_seed(c))};
}

int run_encode(const Config& c) {
  const auto [curve, vc] = codec_constellation(c);
  const VcModem modem(vc, curve.labeling, Detector::Alg2);
  const std::string format = io_format(c);
  std::ifstream in = open_in(c, std::ios::in);
  std::ofstream out = open_out(c, std::ios::binary);
  const std::size_t n = vc->dimension();
  const unsigned m = vc->bits_per_symbol();
  std::vector<double> y(n);
  std::size_t symbols = 0;
  if (format == "bits") {
    std::vector<std::uint8_t> bits;
    for (char ch; in.get(ch);) {
      if (ch == '0' || ch == '1') {
        bits.push_back(static_cast<std::uint8_t>(ch - '0'));
      } else if (!std::isspace(static_cast<unsigned char>(ch))) {
        throw std::invalid_argument("bit file may only contain 0, 1 and whitespace");
      }
      if (bits.size() == m) {
        modem.modulate(bits, y);
        for (double v : y) write_f64(out, v);
        bits.clear();
        ++symbols;
      }
    }
    if (!bits.empty()) throw std::invalid_argument("bit count is not a multiple of " + std::to_string(m));
  } else {
    for (std::string line; std::getline(in, line);) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      BigIndex k;
      try {
        k = BigIndex(line.substr(line.find_first_not_of(" \t"), line.find_last_not_of(" \t\r") + 1));
      } catch (const std::exception&) {
        throw std::invalid_argument("bad index '" + line + "'");
      }
      if (k < 0 || k >= vc->size()) throw std::invalid_argument("index out of range: " + line);
      const Point p = vc->encode(k);
      for (double v : p) write_f64(out, v);
      ++symbols;
    }
  }
  std::cerr << "encoded " << symbols << " symbols of dimension " << n << "\n";
  return 0;
}

int run_decode(const Config& c) {
  const auto [curve, vc] = codec_constellation(c);
  const VcModem modem(vc, curve.labeling, curve.detector);
  const std::string format = io_format(c);
  std::ifstream in = open_in(c, std::ios::binary);
  std::ofstream out = open_out(c, std::ios::out);
  const std::size_t n = vc->dimension();
  std::vector<double> y(n);
  std::vector<std::uint8_t> bits(vc->bits_per_symbol());
  std::size_t symbols = 0;
  while (true) {
    std::size_t got = 0;
    while (got < n && read_f64(in, y[got])) ++got;
    if (got == 0) break;
    if (got != n) throw std::invalid_argument("symbol file ends inside a symbol");
    if (format == "bits") {
      modem.detect(y, bits);
      for (auto b : bits) out.put(static_cast<char>('0' + b));
      out.put('\n');
    } else if (curve.detector == Detector::ML) {
      // ML index order enumerates digit vectors, which is the index order.
      out << modem.ml_index(y) << '\n';
    } else {
      out << vc->decode(y).str() << '\n';
    }
    ++symbols;
  }
  std::cerr << "decoded " << symbols << " symbols\n";
  return 0;
}

int dispatch(const std::string& command, const Config& c, unsigned threads) {
  if (command == "encode") return run_encode(c);
  if (command == "decode") return run_decode(c);
  if (command == "metrics") {
    emit(c, "run.output", metrics_table(c));
  } else if (command == "shift-opt") {
    emit(c, "run.output", shift_table(c));
  } else if (command == "awgn") {
    emit(c, "run.output", awgn_table(c, threads));
  } else if (command == "fiber") {
    Table optimum;
    const Table rows = fiber_table(c, threads, &optimum);
    emit(c, "run.output", rows);
    if (c.has("run.optimum_output")) emit(c, "run.optimum_output", optimum);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lattice Voronoi constellations: coding, figures of merit and link simulation"};
  app.require_subcommand(1);
  const std::pair<const char*, const char*> commands[] = {
      {"encode", "Bits or indices to float64 symbol records"},
      {"decode", "Float64 symbol records to bits or indices"},
      {"metrics", "Figures of merit as CSV"},
      {"shift-opt", "Random-shift energy penalty versus the optimized shift"},
      {"awgn", "Monte-Carlo BER/SER sweep on the AWGN channel"},
      {"fiber", "Split-step WDM link sweep over launch power and distance"}};
  std::map<std::string, Invocation> invocations;
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    Invocation& inv = invocations[name];
    const bool codec = std::string(name) == "encode" || std::string(name) == "decode";
    add_common(sub, inv, !codec);
    if (codec) {
      sub->add_option("--in", inv.flags["io.input"], "Input file");
      sub->add_option("--out", inv.flags["io.output"], "Output file");
      sub->add_option("--format", inv.flags["io.format"], "bits (default) or index");
    }
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigFailure;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    const Invocation& inv = invocations.at(command);
    const Config config = resolve(command, inv);
    return dispatch(command, config, inv.threads);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigFailure;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigFailure;
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << "\n";
    return kRuntimeFailure;
  }
}
