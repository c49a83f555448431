#include "pdcp/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace pdcp {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::vector<std::vector<double>> load_rows(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open CSV file: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        size_t used = 0;
        double v = std::stod(cell, &used);
        while (used < cell.size() && std::isspace((unsigned char)cell[used]))
          ++used;
        if (used != cell.size()) throw std::invalid_argument(cell);
        row.push_back(v);
      } catch (const std::exception&) {
        throw ConfigError("bad CSV cell '" + cell + "' in " + path);
      }
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw ConfigError("ragged CSV rows in " + path);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ConfigError("empty CSV file: " + path);
  return rows;
}

}  // namespace

Matrix load_matrix_csv(const std::string& path) {
  auto rows = load_rows(path);
  Matrix m(rows.size(), rows.front().size());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  return m;
}

Vec load_vector_csv(const std::string& path) {
  Matrix m = load_matrix_csv(path);
  if (m.cols() == 1) return m.col(0);
  if (m.rows() == 1) return m.row(0).transpose();
  throw ConfigError("expected a single-row or single-column CSV in " + path);
}

}  // namespace pdcp
