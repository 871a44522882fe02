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

#include <cstdint>
#include <vector>

#include "magspec/types.hpp"

namespace magspec {

struct KMeansResult {
  Matrix centers;            // k x d
  std::vector<int> assignments;  // length n, values in [0, k)
  double inertia = 0.0;      // sum of squared distances to assigned centers
  int iterations = 0;
};

// Lloyd's algorithm with k-means++ seeding. Deterministic per seed: ties in
// nearest-center selection break toward the lowest center index, and empty
// clusters are repaired by stealing the farthest point from the largest
// cluster. Stops at an assignment fixpoint or after 300 iterations.
KMeansResult kmeans(const Matrix& points, int k, std::uint64_t seed);

// Euclidean projection onto the probability simplex {x >= 0, sum x = 1}
// by the sort-and-threshold method.
Vector project_to_simplex(const Vector& v);

struct HermitianEigen {
  Vector eigenvalues;        // ascending, length p
  ComplexMatrix eigenvectors;  // p orthonormal columns
};

// The p smallest eigenpairs of a Hermitian matrix. The input is symmetrized
// internally if it is Hermitian within 1e-10 in max norm; beyond that a
// ContractError is thrown. Each eigenvector is gauge-fixed so that its
// largest-magnitude entry is real and positive, which pins the free complex
// phase and makes results reproducible.
HermitianEigen hermitian_eigs(const ComplexMatrix& L, int p);

// Real symmetric counterpart, same gauge convention (largest-magnitude entry
// positive). Used by the real spectral path.
struct SymmetricEigen {
  Vector eigenvalues;
  Matrix eigenvectors;
};
SymmetricEigen symmetric_eigs(const Matrix& L, int p);

// Minimum-cost perfect matching on a square cost matrix. Returns the
// lexicographically smallest permutation among all optimal ones;
// perm[row] = assigned column.
std::vector<int> hungarian(const Matrix& costs);

double assignment_cost(const Matrix& costs, const std::vector<int>& perm);

}  // namespace magspec
