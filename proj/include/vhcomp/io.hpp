// Output plumbing shared by the CLI and the tests: CSV tables, graymap
// images with extent sidecars, and the experiment manifest that makes every
// artifact reproducible from (config, seed, subcommand) alone.

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace vhcomp {

inline constexpr const char* kToolVersion = "1.0.0";

// Shortest decimal string that parses back to exactly the same double.
// Keeps CSV output byte-stable without dragging 17 digits everywhere.
std::string format_double(double v);

// Comma-separated, '.' decimal, one header row.  Every row must match the
// header width.  Throws std::runtime_error on I/O failure.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

// Strict numeric reader for the format written above.
CsvTable read_csv(const std::string& path);

// Same layout with preformatted cells, for tables that mix labels and
// numbers.  Cells must not contain commas or newlines.
void write_csv_text(const std::string& path, const std::vector<std::string>& header,
                    const std::vector<std::vector<std::string>>& rows);

struct PgmExtents {
  double x_min = 0.0, x_max = 0.0;
  double y_min = 0.0, y_max = 0.0;
  int cells_x = 0, cells_y = 0;
};

// Binary graymap (P5), one byte per cell, values clamped to [0,1] and scaled
// to 0..255.  Input is row-major with the y axis slow and increasing; the
// image is written north-up (last input row first).  A sidecar JSON at
// path + ".json" records the physical extents and the value scaling.
void write_pgm_with_extents(const std::string& path, const std::vector<double>& values,
                            const PgmExtents& extents);

struct ExperimentManifest {
  std::string subcommand;
  std::string config_hash; // 16 hex digits of the canonical config form
  std::uint64_t seed = 0;
  std::string tool_version = kToolVersion;
  std::string wall_clock_utc; // ISO 8601; informational, not part of outputs
  std::vector<std::pair<std::string, std::string>> parameters; // resolved values
  std::vector<std::string> outputs; // files this run produced
};

std::string iso8601_now_utc();

// Serializes the manifest as JSON (schema in schemas/manifest.schema.json).
std::string manifest_to_json(const ExperimentManifest& mf);
void write_manifest(const std::string& path, const ExperimentManifest& mf);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

} // namespace vhcomp
