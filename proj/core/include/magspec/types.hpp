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

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace magspec {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using Index = Eigen::Index;
using Labels = std::vector<int>;

// Failure to open or locate an input file.
struct LoadError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed file contents (message carries file and line).
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Dimension mismatch between related matrices or vectors.
struct ShapeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Argument outside an operation's documented domain.
struct ParameterError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A numerical precondition (e.g. Hermiticity) violated beyond tolerance.
struct ContractError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad run configuration; the CLI maps this to exit code 2.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Non-finite loss during training; the CLI maps this to exit code 3.
struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace magspec
