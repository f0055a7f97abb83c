#include "pnmc/grid_io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

#include "pnmc/errors.hpp"

namespace pnmc {

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

double parse_double(const std::string& tok, const std::filesystem::path& path) {
  double x = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto res = std::from_chars(first, last, x);
  if (res.ec != std::errc{} || res.ptr != last) {
    fail(ErrorKind::io_error, "bad numeric token '" + tok + "' in " + path.string());
  }
  return x;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::io_error, "cannot open " + path.string() + " for writing");
  out << text;
  if (!out) fail(ErrorKind::io_error, "write failed for " + path.string());
}

}  // namespace

std::string format_double(double x) {
  std::array<char, 64> buf;
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x,
                           std::chars_format::general, 17);
  return std::string(buf.data(), res.ptr);
}

void write_grid_csv(const std::filesystem::path& path, const GridGeometry& geom,
                    const std::vector<std::pair<std::string, const GridField*>>& columns) {
  if (columns.empty()) fail(ErrorKind::config_error, "grid dump needs at least one column");
  for (const auto& [name, f] : columns) {
    if (f == nullptr || !f->geom.compatible(geom)) {
      fail(ErrorKind::grid_mismatch, "column '" + name + "' does not match the dump geometry");
    }
  }
  std::string text = "# u v";
  for (const auto& [name, f] : columns) {
    (void)f;
    text += ' ';
    text += name;
  }
  text += '\n';
  for (int i = 0; i < geom.n_u; ++i) {
    for (int j = 0; j < geom.n_v; ++j) {
      text += format_double(geom.u(i));
      text += ' ';
      text += format_double(geom.v(j));
      for (const auto& [name, f] : columns) {
        (void)name;
        text += ' ';
        text += format_double(f->at(i, j));
      }
      text += '\n';
    }
  }
  write_text(path, text);
}

void write_grid_csv(const std::filesystem::path& path, const GridCsv& grid) {
  std::string text = "# u v";
  for (const auto& name : grid.names) {
    text += ' ';
    text += name;
  }
  text += '\n';
  for (int i = 0; i < grid.geom.n_u; ++i) {
    for (int j = 0; j < grid.geom.n_v; ++j) {
      text += format_double(grid.u_coords[static_cast<std::size_t>(i)]);
      text += ' ';
      text += format_double(grid.v_coords[static_cast<std::size_t>(j)]);
      for (const auto& f : grid.fields) {
        text += ' ';
        text += format_double(f.at(i, j));
      }
      text += '\n';
    }
  }
  write_text(path, text);
}

const GridField& GridCsv::column(const std::string& name) const {
  for (std::size_t k = 0; k < names.size(); ++k) {
    if (names[k] == name) return fields[k];
  }
  fail(ErrorKind::io_error, "grid file has no column named '" + name + "'");
}

GridCsv read_grid_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io_error, "cannot open " + path.string());

  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::io_error, "empty grid file " + path.string());
  auto header = split_ws(line);
  if (header.size() < 4 || header[0] != "#" || header[1] != "u" || header[2] != "v") {
    fail(ErrorKind::io_error, "grid file header must read '# u v name...': " + path.string());
  }

  GridCsv out;
  out.names.assign(header.begin() + 3, header.end());
  const std::size_t n_cols = out.names.size();

  std::vector<double> us, vs;
  std::vector<std::vector<double>> data(n_cols);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto toks = split_ws(line);
    if (toks.size() != n_cols + 2) {
      fail(ErrorKind::io_error, "row width does not match the header in " + path.string());
    }
    us.push_back(parse_double(toks[0], path));
    vs.push_back(parse_double(toks[1], path));
    for (std::size_t k = 0; k < n_cols; ++k) {
      data[k].push_back(parse_double(toks[k + 2], path));
    }
  }
  if (us.empty()) fail(ErrorKind::io_error, "grid file has no data rows: " + path.string());

  // Row-major in u: the v index cycles fastest.
  std::size_t n_v = 1;
  while (n_v < us.size() && us[n_v] == us[0]) ++n_v;
  if (us.size() % n_v != 0) {
    fail(ErrorKind::io_error, "row count is not a full grid in " + path.string());
  }
  GridGeometry g;
  g.n_v = static_cast<int>(n_v);
  g.n_u = static_cast<int>(us.size() / n_v);
  g.u0 = us[0];
  g.v0 = vs[0];
  g.h_u = g.n_u > 1 ? us[n_v] - us[0] : 0.0;
  g.h_v = g.n_v > 1 ? vs[1] - vs[0] : 0.0;
  out.geom = g;
  out.u_coords.reserve(static_cast<std::size_t>(g.n_u));
  for (int i = 0; i < g.n_u; ++i) out.u_coords.push_back(us[static_cast<std::size_t>(i) * n_v]);
  out.v_coords.assign(vs.begin(), vs.begin() + static_cast<std::ptrdiff_t>(n_v));
  for (std::size_t k = 0; k < n_cols; ++k) {
    GridField f(g);
    f.values = std::move(data[k]);
    out.fields.push_back(std::move(f));
  }
  return out;
}

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j) {
  write_text(path, j.dump(2) + "\n");
}

}  // namespace pnmc
