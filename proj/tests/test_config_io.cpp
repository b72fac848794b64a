// Config boundary (JSON round-trip, validation, hashing) and output plumbing
// (CSV, graymap, manifest).

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "json.hpp"
#include "vhcomp/config.hpp"
#include "vhcomp/io.hpp"

using namespace vhcomp;
namespace fs = std::filesystem;

namespace {
fs::path temp_dir() {
  auto p = fs::temp_directory_path() / "vhcomp_io_test";
  fs::create_directories(p);
  return p;
}
} // namespace

TEST_CASE("config JSON round-trip preserves every field and the hash") {
  NetworkConfig cfg;
  cfg.r_C = 742.0;
  cfg.h = 97.5;
  cfg.N = 31;
  cfg.lambda_TBS = 13.25e-6;
  cfg.alpha_TBS_N = 2.95;
  cfg.gamma_ABS = db_to_linear(-3.0);
  cfg.env = Environment::highrise_urban();

  NetworkConfig back = config_from_json(config_to_json(cfg));
  CHECK(back.r_C == cfg.r_C);
  CHECK(back.h == cfg.h);
  CHECK(back.N == cfg.N);
  CHECK(back.lambda_TBS == doctest::Approx(cfg.lambda_TBS).epsilon(1e-12));
  CHECK(back.alpha_TBS_N == cfg.alpha_TBS_N);
  CHECK(back.gamma_ABS == doctest::Approx(cfg.gamma_ABS).epsilon(1e-12));
  CHECK(back.env.b == doctest::Approx(cfg.env.b).epsilon(1e-12));
  CHECK(config_hash(back) == config_hash(cfg));

  // Any substantive change moves the hash.
  NetworkConfig other = cfg;
  other.h = 98.0;
  CHECK(config_hash(other) != config_hash(cfg));
}

TEST_CASE("environment presets parse by name") {
  std::string base = config_to_json(NetworkConfig{});
  auto j = nlohmann::json::parse(base);
  j["env"] = "highrise";
  NetworkConfig hi = config_from_json(j.dump());
  CHECK(hi.env.a == doctest::Approx(1.124));
  CHECK(hi.env.c == doctest::Approx(1.024));
  // Fitted-in-degrees slope arrives converted to radians.
  CHECK(hi.env.b == doctest::Approx(0.049 * 180.0 / 3.14159265358979323846).epsilon(1e-12));

  j["env"] = "suburban";
  NetworkConfig sub = config_from_json(j.dump());
  CHECK(sub.env.b == doctest::Approx(6.581));
}

TEST_CASE("validation names each offending field") {
  NetworkConfig cfg;
  cfg.h = cfg.H + 5.0; // user above the ABS plane
  cfg.N = 2;
  cfg.lambda_TBS = 0.0;
  auto bad = validate(cfg);
  REQUIRE(bad.size() == 3);
  bool saw_h = false, saw_n = false, saw_lambda = false;
  for (const auto& m : bad) {
    saw_h |= m.find("h must be < H") != std::string::npos;
    saw_n |= m.find("N must be >= 3") != std::string::npos;
    saw_lambda |= m.find("lambda_TBS") != std::string::npos;
  }
  CHECK(saw_h);
  CHECK(saw_n);
  CHECK(saw_lambda);
  CHECK_THROWS_AS(require_valid(cfg), std::invalid_argument);
  CHECK_NOTHROW(require_valid(NetworkConfig{}));
}

TEST_CASE("missing and malformed config fields throw with context") {
  CHECK_THROWS_WITH_AS(config_from_json(R"({"r_C": 100})"),
                       doctest::Contains("missing field"), std::invalid_argument);
  CHECK_THROWS_AS(config_from_json("not json at all"), std::invalid_argument);
  // Density unit conversion: per km^2 at the boundary, per m^2 inside.
  auto j = nlohmann::json::parse(config_to_json(NetworkConfig{}));
  j["lambda_TBS"] = 20.0;
  CHECK(config_from_json(j.dump()).lambda_TBS == doctest::Approx(20e-6).epsilon(1e-12));
}

TEST_CASE("format_double round-trips exactly and stays short") {
  for (double v : {0.0, 1.0, -1.0, 0.1, 1.0 / 3.0, 6.02e23, 1e-17, -3.704e-12,
                   123456789.123456789, 2.5}) {
    std::string s = format_double(v);
    CHECK(std::stod(s) == v);
  }
  CHECK(format_double(2.5) == "2.5"); // not 2.5000000000000000
  CHECK(format_double(1.0) == "1");
}

TEST_CASE("CSV write/read round-trip and ragged-row rejection") {
  auto dir = temp_dir();
  auto path = (dir / "t.csv").string();
  std::vector<std::vector<double>> rows = {{1.0, 0.5, -2.25}, {4.0, 1.0 / 3.0, 9.75}};
  write_csv(path, {"a", "b", "c"}, rows);
  CsvTable t = read_csv(path);
  REQUIRE(t.header == std::vector<std::string>{"a", "b", "c"});
  REQUIRE(t.rows.size() == 2);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      CHECK(t.rows[i][j] == rows[i][j]); // exact via shortest round-trip formatting

  CHECK_THROWS(write_csv(path, {"a", "b"}, {{1.0, 2.0, 3.0}}));
}

TEST_CASE("graymap bytes, header, and sidecar extents") {
  auto dir = temp_dir();
  auto path = (dir / "map.pgm").string();
  PgmExtents ex;
  ex.x_min = -10.0;
  ex.x_max = 10.0;
  ex.y_min = 0.0;
  ex.y_max = 5.0;
  ex.cells_x = 2;
  ex.cells_y = 2;
  // Row-major, y slow and increasing; file is written north-up.
  write_pgm_with_extents(path, {0.0, 1.0, 0.5, 2.0 /* clamps to 1 */}, ex);

  std::ifstream in(path, std::ios::binary);
  std::string magic;
  int w, h, maxval;
  in >> magic >> w >> h >> maxval;
  in.get(); // single whitespace before the raster
  CHECK(magic == "P5");
  CHECK(w == 2);
  CHECK(h == 2);
  CHECK(maxval == 255);
  unsigned char px[4];
  in.read(reinterpret_cast<char*>(px), 4);
  // Top row of the image is the last value row.
  CHECK(static_cast<int>(px[0]) == 128); // 0.5
  CHECK(static_cast<int>(px[1]) == 255); // clamped
  CHECK(static_cast<int>(px[2]) == 0);
  CHECK(static_cast<int>(px[3]) == 255);

  auto side = nlohmann::json::parse(read_text_file(path + ".json"));
  CHECK(side["x_min"].get<double>() == -10.0);
  CHECK(side["cells_y"].get<int>() == 2);
}

TEST_CASE("manifest serializes every field and parses as JSON") {
  ExperimentManifest mf;
  mf.subcommand = "assoc-sweep";
  mf.config_hash = "00ff00ff00ff00ff";
  mf.seed = 42;
  mf.wall_clock_utc = "2026-01-01T00:00:00Z";
  mf.parameters = {{"h_min", "30"}, {"placement", "region"}};
  mf.outputs = {"assoc_sweep.csv"};
  auto j = nlohmann::json::parse(manifest_to_json(mf));
  CHECK(j["subcommand"] == "assoc-sweep");
  CHECK(j["seed"].get<std::uint64_t>() == 42);
  CHECK(j["tool_version"] == kToolVersion);
  CHECK(j["parameters"]["placement"] == "region");
  CHECK(j["outputs"][0] == "assoc_sweep.csv");

  auto dir = temp_dir();
  write_manifest((dir / "m.json").string(), mf);
  auto loaded = nlohmann::json::parse(read_text_file((dir / "m.json").string()));
  CHECK(loaded["config_hash"] == "00ff00ff00ff00ff");
}

TEST_CASE("iso8601 clock shape") {
  std::string t = iso8601_now_utc();
  REQUIRE(t.size() == 20);
  CHECK(t[4] == '-');
  CHECK(t[10] == 'T');
  CHECK(t.back() == 'Z');
}
