#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "vcs/config.hpp"

using namespace vcs;

namespace {

Config from_text(const std::string& text) {
  std::istringstream in(text);
  return Config::parse(in, "test.cfg");
}

}  // namespace

TEST_CASE("config parsing") {
  const Config c = from_text(
      "master_seed = 7   # comment\n"
      "\n"
      "[constellation]\n"
      "lattice = e8\n"
      "r=4\n"
      "[awgn]\n"
      "ebn0_db = 0:0.5:2, 5\n"
      "max_symbols = 1e6\n"
      "[curve.qam]\n"
      "lattice = qam\n");
  CHECK(c.get_uint("run.master_seed") == 7);
  CHECK(c.get_string("constellation.lattice") == "e8");
  CHECK(c.get_uint("constellation.r") == 4);
  CHECK(c.get_doubles("awgn.ebn0_db") == std::vector<double>{0.0, 0.5, 1.0, 1.5, 2.0, 5.0});
  CHECK(c.get_uint("awgn.max_symbols") == 1000000);
  CHECK(c.get_double("awgn.missing", 2.5) == 2.5);
  CHECK(c.sections() == std::vector<std::string>{"run", "constellation", "awgn", "curve.qam"});

  const std::vector<std::string> allowed = {"run.master_seed", "constellation.lattice", "constellation.r", "awgn.ebn0_db",
                                      "awgn.max_symbols", "curve*.lattice"};
  CHECK_NOTHROW(c.require_known(allowed));
  Config extra = c;
  extra.set("fiber.span_length", "80");
  try {
    extra.require_known(allowed);
    FAIL("unknown key accepted");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "fiber.span_length");
  }
}

TEST_CASE("config errors name the key") {
  const Config c = from_text("[a]\nx = abc\ny = -3\nz = 1:0:3\n");
  try {
    (void)c.get_double("a.x");
    FAIL("accepted a non-number");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "a.x");
  }
  CHECK_THROWS_AS((void)c.get_uint("a.y"), ConfigError);
  CHECK_THROWS_AS((void)c.get_doubles("a.z"), ConfigError);
  CHECK_THROWS_AS((void)c.get_string("a.w"), ConfigError);
  CHECK_THROWS_AS(from_text("[open\n"), ConfigError);
  CHECK_THROWS_AS(from_text("novalue\n"), ConfigError);
}

TEST_CASE("csv output") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(2.0) == "2");
  CHECK(format_double(1e-5) == "1.0000000000000001e-05");
  CHECK(csv_text({"a", "b"}, {}) == "a,b\r\n");
  CHECK(csv_text({"a", "b"}, {{"x,y", "q\"t"}}) == "a,b\r\n\"x,y\",\"q\"\"t\"\r\n");
  CHECK_THROWS_AS(csv_text({"a"}, {{"1", "2"}}), std::invalid_argument);

  const auto dir = std::filesystem::temp_directory_path() / "vcs_csv_test";
  std::filesystem::remove_all(dir);
  const auto path = dir / "out.csv";
  write_csv_atomic(path, {"k"}, {{"1"}, {"2"}});
  std::ifstream in(path, std::ios::binary);
  std::stringstream text;
  text << in.rdbuf();
  CHECK(text.str() == "k\r\n1\r\n2\r\n");
  int files = 0;
  for ([[maybe_unused]] const auto& entry : std::filesystem::directory_iterator(dir)) ++files;
  CHECK(files == 1);
  std::filesystem::remove_all(dir);
}
