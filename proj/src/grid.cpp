#include "fdml/grid.hpp"

#include <fstream>
#include <sstream>

#include "fdml/error.hpp"
#include "fdml/formation.hpp"
#include "fdml/text_io.hpp"

namespace fdml {

std::string grid_label(int index0, int k) {
  if (k == kGroupCount) return std::string(kGroupLabels[static_cast<std::size_t>(index0)]);
  return std::to_string(index0 + 1);
}

namespace {

template <class T, class F>
std::string to_csv(const SquareGrid<T>& grid, F format) {
  std::string out = "main\\rival";
  for (int j = 0; j < grid.k(); ++j) out += "," + grid_label(j, grid.k());
  out += '\n';
  for (int i = 0; i < grid.k(); ++i) {
    out += grid_label(i, grid.k());
    for (int j = 0; j < grid.k(); ++j) out += "," + format(grid(i, j));
    out += '\n';
  }
  return out;
}

}  // namespace

std::string grid_to_csv(const SquareGrid<double>& grid, int digits) {
  return to_csv(grid, [&](double v) { return digits < 0 ? format_double(v) : format_fixed(v, digits); });
}

std::string grid_to_csv(const SquareGrid<std::string>& grid) {
  return to_csv(grid, [](const std::string& v) { return v; });
}

std::string grid_to_csv(const SquareGrid<long>& grid) {
  return to_csv(grid, [](long v) { return std::to_string(v); });
}

SquareGrid<double> parse_grid_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || line[0] == '#') continue;
    rows.push_back(split_record(line, ','));
  }
  if (rows.empty()) throw Error(ErrorCode::schema, "grid file is empty");
  const int k = static_cast<int>(rows[0].size()) - 1;
  if (k < 1 || static_cast<int>(rows.size()) != k + 1)
    throw Error(ErrorCode::schema, "grid file is not square (header has " + std::to_string(k) + " columns, " +
                                       std::to_string(rows.size() - 1) + " data rows)");
  SquareGrid<double> g(k);
  for (int i = 0; i < k; ++i) {
    const auto& r = rows[static_cast<std::size_t>(i + 1)];
    if (static_cast<int>(r.size()) != k + 1) throw Error(ErrorCode::schema, "grid row " + std::to_string(i + 1) + " has wrong width");
    for (int j = 0; j < k; ++j) {
      auto v = parse_double(r[static_cast<std::size_t>(j + 1)]);
      if (!v) throw Error(ErrorCode::schema, "grid cell (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ") is not numeric");
      g(i, j) = *v;
    }
  }
  return g;
}

SquareGrid<double> read_grid_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_grid_csv(ss.str());
}

}  // namespace fdml
