#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gsbench/common.hpp"

namespace gsbench {

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << content;
  if (!out) throw ValidationError("write failed for " + path.string());
}

// Square matrix CSV: comma-separated reals at 17 significant digits, NaN
// entries spelled "nan" (used for masked MI diagonals).
inline std::string matrix_to_csv(const RealMatrix& m) {
  std::string out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out += ',';
      const double v = m(i, j);
      out += std::isnan(v) ? "nan" : format_real(v);
    }
    out += '\n';
  }
  return out;
}

inline RealMatrix matrix_from_csv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      if (cell == "nan" || cell == "NaN" || cell == "NAN")
        row.push_back(std::numeric_limits<double>::quiet_NaN());
      else {
        try {
          row.push_back(std::stod(cell));
        } catch (const std::exception&) {
          throw ValidationError("bad CSV cell '" + cell + "'");
        }
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ValidationError("empty CSV matrix");
  RealMatrix m(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) throw ValidationError("ragged CSV matrix");
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

}  // namespace gsbench
