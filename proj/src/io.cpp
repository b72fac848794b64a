// CSV, PGM and manifest serialization.

#include "vhcomp/io.hpp"

#include <charconv>
#include <cmath>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace vhcomp {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ostringstream out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out << ',';
    out << header[i];
  }
  out << '\n';
  for (const auto& row : rows) {
    if (row.size() != header.size())
      throw std::runtime_error("csv row width does not match header: " + path);
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << format_double(row[i]);
    }
    out << '\n';
  }
  write_text_file(path, out.str());
}

void write_csv_text(const std::string& path, const std::vector<std::string>& header,
                    const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out << ',';
    out << header[i];
  }
  out << '\n';
  for (const auto& row : rows) {
    if (row.size() != header.size())
      throw std::runtime_error("csv row width does not match header: " + path);
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      if (row[i].find_first_of(",\n") != std::string::npos)
        throw std::runtime_error("csv cell contains separator: " + path);
      out << row[i];
    }
    out << '\n';
  }
  write_text_file(path, out.str());
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open csv: " + path);
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty csv: " + path);
  std::istringstream hs(line);
  std::string field;
  while (std::getline(hs, field, ',')) table.header.push_back(field);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) {
      double v = 0.0;
      const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
      if (res.ec != std::errc() || res.ptr != field.data() + field.size())
        throw std::runtime_error("bad csv number '" + field + "' in " + path);
      row.push_back(v);
    }
    if (row.size() != table.header.size())
      throw std::runtime_error("ragged csv row in " + path);
    table.rows.push_back(std::move(row));
  }
  return table;
}

void write_pgm_with_extents(const std::string& path, const std::vector<double>& values,
                            const PgmExtents& extents) {
  if (extents.cells_x < 1 || extents.cells_y < 1)
    throw std::runtime_error("pgm extents have no cells: " + path);
  const std::size_t n =
      static_cast<std::size_t>(extents.cells_x) * static_cast<std::size_t>(extents.cells_y);
  if (values.size() != n) throw std::runtime_error("pgm value count mismatch: " + path);

  std::ostringstream out;
  out << "P5\n" << extents.cells_x << ' ' << extents.cells_y << "\n255\n";
  for (int iy = extents.cells_y - 1; iy >= 0; --iy) {
    for (int ix = 0; ix < extents.cells_x; ++ix) {
      double v = values[static_cast<std::size_t>(iy) * extents.cells_x + ix];
      v = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
      out.put(static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0))));
    }
  }
  write_text_file(path, out.str());

  nlohmann::json side;
  side["x_min"] = extents.x_min;
  side["x_max"] = extents.x_max;
  side["y_min"] = extents.y_min;
  side["y_max"] = extents.y_max;
  side["cells_x"] = extents.cells_x;
  side["cells_y"] = extents.cells_y;
  side["value_scale"] = "byte 0..255 maps to value 0..1";
  side["row_order"] = "first image row is y_max";
  write_text_file(path + ".json", side.dump(2) + "\n");
}

std::string iso8601_now_utc() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string manifest_to_json(const ExperimentManifest& mf) {
  nlohmann::json j;
  j["subcommand"] = mf.subcommand;
  j["config_hash"] = mf.config_hash;
  j["seed"] = mf.seed;
  j["tool_version"] = mf.tool_version;
  j["wall_clock_utc"] = mf.wall_clock_utc;
  nlohmann::json params = nlohmann::json::object();
  for (const auto& [key, value] : mf.parameters) params[key] = value;
  j["parameters"] = params;
  j["outputs"] = mf.outputs;
  return j.dump(2) + "\n";
}

void write_manifest(const std::string& path, const ExperimentManifest& mf) {
  write_text_file(path, manifest_to_json(mf));
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for write: " + path);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for read: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace vhcomp
