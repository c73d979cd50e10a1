#include "vcs/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace vcs {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',' || c == ' ' || c == '\t') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

double to_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) throw ConfigError(key, "expected a number, got '" + text + "'");
  return v;
}

std::uint64_t to_uint(const std::string& key, const std::string& text) {
  std::uint64_t v = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    // Accept integral values written in floating notation, e.g. 1e8.
    double d = 0.0;
    auto [p2, e2] = std::from_chars(text.data(), end, d);
    if (e2 != std::errc() || p2 != end || d < 0.0 || d != std::floor(d) || d > 1.8e19) {
      throw ConfigError(key, "expected a non-negative integer, got '" + text + "'");
    }
    return static_cast<std::uint64_t>(d);
  }
  return v;
}

bool matches(std::string_view pattern, std::string_view key) {
  const auto star = pattern.find('*');
  if (star == std::string_view::npos) return pattern == key;
  const auto prefix = pattern.substr(0, star);
  const auto suffix = pattern.substr(star + 1);
  if (key.size() < prefix.size() + suffix.size() || key.substr(0, prefix.size()) != prefix) return false;
  return key.substr(key.size() - suffix.size()) == suffix;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

Config Config::parse(std::istream& in, const std::string& origin) {
  Config cfg;
  std::string section = "run";
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    const std::string text = trim(std::string_view(line).substr(0, hash));
    if (text.empty()) continue;
    const std::string where = origin + ":" + std::to_string(lineno);
    if (text.front() == '[') {
      if (text.back() != ']') throw ConfigError("", where + ": unterminated section header");
      section = trim(std::string_view(text).substr(1, text.size() - 2));
      if (section.empty()) throw ConfigError("", where + ": empty section name");
      if (std::find(cfg.section_order_.begin(), cfg.section_order_.end(), section) == cfg.section_order_.end()) {
        cfg.section_order_.push_back(section);
      }
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError("", where + ": expected 'key = value'");
    const std::string key = trim(std::string_view(text).substr(0, eq));
    if (key.empty()) throw ConfigError("", where + ": missing key");
    if (std::find(cfg.section_order_.begin(), cfg.section_order_.end(), section) == cfg.section_order_.end()) {
      cfg.section_order_.push_back(section);
    }
    cfg.values_[section + "." + key] = trim(std::string_view(text).substr(eq + 1));
  }
  return cfg;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file " + path.string());
  return parse(in, path.string());
}

std::vector<std::string> Config::sections() const {
  std::vector<std::string> out = section_order_;
  for (const auto& [key, value] : values_) {
    const std::string s = key.substr(0, key.rfind('.'));
    if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
  }
  return out;
}

const std::string& Config::raw(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError(key, "required key is missing");
  return it->second;
}

std::string Config::get_string(const std::string& key) const { return raw(key); }

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  return has(key) ? raw(key) : fallback;
}

double Config::get_double(const std::string& key) const { return to_double(key, raw(key)); }

double Config::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

std::uint64_t Config::get_uint(const std::string& key) const { return to_uint(key, raw(key)); }

std::uint64_t Config::get_uint(const std::string& key, std::uint64_t fallback) const {
  return has(key) ? get_uint(key) : fallback;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string& v = raw(key);
  if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
  if (v == "false" || v == "no" || v == "off" || v == "0") return false;
  throw ConfigError(key, "expected a boolean, got '" + v + "'");
}

std::vector<double> Config::get_doubles(const std::string& key) const {
  std::vector<double> out;
  for (const std::string& item : split_list(raw(key))) {
    const auto c1 = item.find(':');
    if (c1 == std::string::npos) {
      out.push_back(to_double(key, item));
      continue;
    }
    const auto c2 = item.find(':', c1 + 1);
    if (c2 == std::string::npos) throw ConfigError(key, "range must be start:step:stop, got '" + item + "'");
    const double a = to_double(key, item.substr(0, c1));
    const double step = to_double(key, item.substr(c1 + 1, c2 - c1 - 1));
    const double b = to_double(key, item.substr(c2 + 1));
    if (!(step > 0.0) || b < a) throw ConfigError(key, "range needs step > 0 and start <= stop");
    const auto count = static_cast<long>(std::floor((b - a) / step + 1e-9));
    if (count > 100000) throw ConfigError(key, "range has too many points");
    for (long i = 0; i <= count; ++i) out.push_back(a + static_cast<double>(i) * step);
  }
  if (out.empty()) throw ConfigError(key, "empty list");
  return out;
}

std::vector<std::uint64_t> Config::get_uints(const std::string& key) const {
  std::vector<std::uint64_t> out;
  for (const std::string& item : split_list(raw(key))) out.push_back(to_uint(key, item));
  if (out.empty()) throw ConfigError(key, "empty list");
  return out;
}

void Config::require_known(std::span<const std::string> allowed) const {
  for (const auto& [key, value] : values_) {
    const bool ok = std::any_of(allowed.begin(), allowed.end(), [&](const std::string& p) { return matches(p, key); });
    if (!ok) throw ConfigError(key, "unknown key");
  }
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

std::string csv_text(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream out;
  auto emit = [&](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) out << (i ? "," : "") << csv_field(fields[i]);
    out << "\r\n";
  };
  emit(header);
  for (const auto& row : rows) {
    if (row.size() != header.size()) throw std::invalid_argument("CSV row width does not match the header");
    emit(row);
  }
  return out.str();
}

void write_csv_atomic(const std::filesystem::path& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows) {
  const std::string text = csv_text(header, rows);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << text;
    out.flush();
    if (!out) {
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw std::runtime_error("write failed for " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw std::runtime_error("cannot rename into " + path.string());
  }
}

}  // namespace vcs
