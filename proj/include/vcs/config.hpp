#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace vcs {

/// Bad or missing configuration; `key()` names the offending entry.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(key.empty() ? message : key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// Sectioned key = value file. Keys are addressed as "section.key"; entries
/// before the first section header live in section "run". '#' and ';' start
/// comments. Later assignments override earlier ones.
class Config {
 public:
  static Config parse(std::istream& in, const std::string& origin = "<config>");
  static Config load(const std::filesystem::path& path);

  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::map<std::string, std::string>& values() const { return values_; }

  /// Section names in file order of first appearance.
  std::vector<std::string> sections() const;

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  std::uint64_t get_uint(const std::string& key) const;
  std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  /// Comma- or space-separated list; "a:step:b" expands to an inclusive range.
  std::vector<double> get_doubles(const std::string& key) const;
  std::vector<std::uint64_t> get_uints(const std::string& key) const;

  /// Throws ConfigError for the first key matching none of `allowed`. A
  /// pattern "curve*.lattice" matches any section starting with "curve".
  void require_known(std::span<const std::string> allowed) const;

 private:
  const std::string& raw(const std::string& key) const;

  std::map<std::string, std::string> values_;
  std::vector<std::string> section_order_;
};

/// Full-precision decimal form (17 significant digits), locale independent.
std::string format_double(double v);

/// Writes an RFC 4180 CSV with header through a temporary file and a rename,
/// so the target path never holds a partial file.
void write_csv_atomic(const std::filesystem::path& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows);

/// Same content write_csv_atomic would produce.
std::string csv_text(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows);

}  // namespace vcs
