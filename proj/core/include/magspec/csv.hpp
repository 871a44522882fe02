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

#pragma once

#include <string>

#include "magspec/types.hpp"

namespace magspec::csv {

// Formats a double with 17 significant digits, enough for an exact
// round-trip of any IEEE-754 binary64 value.
std::string format_double(double x);

// Reads a headerless comma-separated matrix. Throws LoadError if the file
// cannot be opened, ParseError (with file and line) on non-numeric cells or
// ragged rows.
Matrix read_matrix(const std::string& path);

void write_matrix(const std::string& path, const Matrix& m);

Labels read_labels(const std::string& path);

void write_labels(const std::string& path, const Labels& labels);

// Sparse dump as "row,col,value" triples, row-major order, zeros skipped.
void write_triples(const std::string& path, const Matrix& m);

void write_vector(const std::string& path, const Vector& v);

}  // namespace magspec::csv
