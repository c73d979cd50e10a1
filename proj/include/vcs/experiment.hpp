#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vcs/awgn.hpp"
#include "vcs/config.hpp"
#include "vcs/fiber.hpp"

namespace vcs {

/// One constellation family as read from a [constellation] or [curve.*] section.
/// `qam` selects square QAM with a per-rail slicer; its geometry equals the
/// cubic Voronoi constellation with a centred shift.
struct CurveSpec {
  std::string section;
  LatticeFamily family = LatticeFamily::Cubic;
  bool qam = false;
  std::size_t n = 0;
  std::vector<unsigned> r;
  /// "auto", "optimized", "random", "centered", "zero" or explicit internal coordinates.
  std::string shift = "auto";
  Labeling labeling = Labeling::QuasiGray;
  Detector detector = Detector::Alg2;
  std::uint64_t energy_samples = 100000;
  std::uint64_t shift_samples = 20000;

  std::string family_name() const;
};

/// Keys accepted by each subcommand.
std::vector<std::string> allowed_keys(std::string_view command);

/// run.master_seed; its absence is a configuration error.
std::uint64_t master_seed(const Config& config);

/// Every [curve*] section in file order, or the [constellation] section alone.
std::vector<CurveSpec> read_curves(const Config& config);

/// Deterministic in `seed`: the same config always yields the same shift and normalization.
std::shared_ptr<const VoronoiConstellation> build_constellation(const CurveSpec& curve, unsigned r,
                                                                std::uint64_t seed);
std::shared_ptr<const Modem> build_modem(const CurveSpec& curve, unsigned r, std::uint64_t seed);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// One row per curve, r and Eb/N0 point.
Table awgn_table(const Config& config, unsigned threads);
/// One row per curve, r, launch power and span count; `optimum` receives the
/// per-distance optimum-power trace.
Table fiber_table(const Config& config, unsigned threads, Table* optimum = nullptr);
/// One MeritReport row per curve and r.
Table metrics_table(const Config& config);
/// Random-shift energy penalty per curve and r.
Table shift_table(const Config& config);

}  // namespace vcs
