// Copyright 2026 The MagSpec Authors.
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

#include "magspec/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

namespace magspec::csv {

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

namespace {

double parse_cell(const std::string& cell, const std::string& path,
                  std::size_t line_no) {
  const char* begin = cell.c_str();
  char* end = nullptr;
  const double value = std::strtod(begin, &end);
  // Trailing whitespace is tolerated, anything else is a parse error.
  while (end && *end != '\0' && (*end == ' ' || *end == '\t' || *end == '\r'))
    ++end;
  if (end == begin || (end && *end != '\0')) {
    throw ParseError(path + ":" + std::to_string(line_no) +
                     ": non-numeric cell '" + cell + "'");
  }
  return value;
}

}  // namespace

Matrix read_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      row.push_back(parse_cell(cell, path, line_no));
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError(path + ":" + std::to_string(line_no) +
                       ": ragged row (expected " +
                       std::to_string(rows.front().size()) + " cells, got " +
                       std::to_string(row.size()) + ")");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(path + ": empty matrix");
  Matrix m(static_cast<Index>(rows.size()),
           static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j)
      m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return m;
}

void write_matrix(const std::string& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) throw LoadError("cannot write " + path);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

Labels read_labels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open " + path);
  Labels labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const char* begin = line.c_str();
    char* end = nullptr;
    const long value = std::strtol(begin, &end, 10);
    while (end && (*end == ' ' || *end == '\t')) ++end;
    if (end == begin || (end && *end != '\0')) {
      throw ParseError(path + ":" + std::to_string(line_no) +
                       ": non-integer label '" + line + "'");
    }
    labels.push_back(static_cast<int>(value));
  }
  return labels;
}

void write_labels(const std::string& path, const Labels& labels) {
  std::ofstream out(path);
  if (!out) throw LoadError("cannot write " + path);
  for (int label : labels) out << label << '\n';
}

void write_triples(const std::string& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) throw LoadError("cannot write " + path);
  out << "row,col,value\n";
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j)
      if (m(i, j) != 0.0)
        out << i << ',' << j << ',' << format_double(m(i, j)) << '\n';
}

void write_vector(const std::string& path, const Vector& v) {
  std::ofstream out(path);
  if (!out) throw LoadError("cannot write " + path);
  for (Index i = 0; i < v.size(); ++i) out << format_double(v(i)) << '\n';
}

}  // namespace magspec::csv
