#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pnmc/grid.hpp"

namespace pnmc {

/// Locale-independent decimal form with 17 significant digits, enough to
/// reproduce the double exactly on read-back.
std::string format_double(double x);

/// Writes `# u v name...` followed by one row per node, row-major in u.
void write_grid_csv(const std::filesystem::path& path, const GridGeometry& geom,
                    const std::vector<std::pair<std::string, const GridField*>>& columns);

struct GridCsv {
  GridGeometry geom;
  std::vector<std::string> names;
  std::vector<GridField> fields;
  /// Node coordinates exactly as parsed; rewriting from them reproduces the
  /// source bytes even where u0 + i*h would re-round differently.
  std::vector<double> u_coords, v_coords;

  /// Column by header name; throws io_error when absent.
  const GridField& column(const std::string& name) const;
};

/// Reads a file produced by write_grid_csv, inferring the geometry from the
/// node coordinates.
GridCsv read_grid_csv(const std::filesystem::path& path);

/// Writes a parsed grid back out byte-identically.
void write_grid_csv(const std::filesystem::path& path, const GridCsv& grid);

/// Serializes with a stable key order and two-space indentation.
void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j);

}  // namespace pnmc
