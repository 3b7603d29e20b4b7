// Copyright 2026 The qpca Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "qpca/data_matrix.hpp"
#include "qpca/error.hpp"

namespace qpca::cli {

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline Error parse_error(const std::string& path, std::size_t line, std::size_t column,
                         const std::string& what) {
  std::string where = path + ":" + std::to_string(line);
  if (column > 0) where += ":" + std::to_string(column);
  return Error(ErrorCode::ParseError, where + ": " + what);
}

inline double parse_number(std::string_view field, const std::string& path, std::size_t line,
                           std::size_t column) {
  const std::string_view f = trim(field);
  if (f.empty()) throw parse_error(path, line, column, "empty field");
  double value = 0.0;
  const char* begin = f.data();
  if (*begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, f.data() + f.size(), value);
  if (ec == std::errc::result_out_of_range)
    throw parse_error(path, line, column, "value out of range '" + std::string(f) + "'");
  if (ec != std::errc() || ptr != f.data() + f.size())
    throw parse_error(path, line, column, "not a number '" + std::string(f) + "'");
  if (!std::isfinite(value)) throw parse_error(path, line, column, "non-finite value");
  return value;
}

inline std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

}  // namespace detail

/**
 * Comma-separated numeric rows. Blank lines and lines starting with '#' are
 * skipped. Line and column numbers in errors are 1-based.
 */
inline Eigen::MatrixXd parse_csv(const std::vector<std::string>& lines, const std::string& path) {
  std::vector<std::vector<double>> rows;
  std::size_t cols = 0;
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const std::string_view line = detail::trim(lines[n]);
    if (line.empty() || line.front() == '#') continue;
    std::vector<double> row;
    std::size_t start = 0;
    for (std::size_t col = 1;; ++col) {
      const auto comma = line.find(',', start);
      const auto field = line.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                            : comma - start);
      row.push_back(detail::parse_number(field, path, n + 1, col));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (rows.empty()) cols = row.size();
    if (row.size() != cols)
      throw detail::parse_error(path, n + 1, 0,
                                "expected " + std::to_string(cols) + " columns, found " +
                                    std::to_string(row.size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorCode::ParseError, path + ": no data rows");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols; ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return m;
}

inline Eigen::MatrixXd read_csv(const std::string& path) {
  return parse_csv(detail::read_lines(path), path);
}

/// Loads a data matrix; an all-zero row is reported with its line number.
inline DataMatrix ingest_csv(const std::string& path) {
  const auto lines = detail::read_lines(path);
  const Eigen::MatrixXd m = parse_csv(lines, path);
  Eigen::Index row = 0;
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const std::string_view line = detail::trim(lines[n]);
    if (line.empty() || line.front() == '#') continue;
    if (m.row(row).squaredNorm() == 0.0) throw detail::parse_error(path, n + 1, 0, "all-zero row");
    ++row;
  }
  return DataMatrix(m);
}

/// One value per line; the count must equal `expected`.
inline Eigen::VectorXd ingest_labels(const std::string& path, std::size_t expected) {
  const Eigen::MatrixXd m = read_csv(path);
  if (m.cols() != 1) throw Error(ErrorCode::ParseError, path + ": expected one value per line");
  if (static_cast<std::size_t>(m.rows()) != expected)
    throw Error(ErrorCode::DimensionMismatch, path + ": expected " + std::to_string(expected) +
                                                  " labels, found " + std::to_string(m.rows()));
  return m.col(0);
}

inline void write_csv(const std::string& path, const Eigen::MatrixXd& m, const std::string& header = {}) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  if (!header.empty()) out << "# " << header << '\n';
  char buf[32];
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
      out << (j ? "," : "") << buf;
    }
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + path);
}

}  // namespace qpca::cli
