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

// Per-view anchor matrices (d_v x m_v, anchors as columns) plus the offsets
// mapping (view, local anchor) to a global index in [0, m).
struct AnchorSet {
  std::vector<Matrix> anchors;  // per view, d_v x m_v
  std::vector<int> offsets;     // length V+1; view v owns [offsets[v], offsets[v+1])
  int total() const { return offsets.empty() ? 0 : offsets.back(); }
  int global_index(int view, int local) const {
    return offsets[static_cast<std::size_t>(view)] + local;
  }
};

// Simplex-constrained sample-anchor coefficients: per view m_v x n with
// every column on the probability simplex, plus the row-wise concatenation.
struct CoefficientMatrices {
  std::vector<Matrix> per_view;  // m_v x n
  Matrix concatenated;           // m x n
};

// Hyperedge-per-sample incidence: column i holds sample i's surviving
// coefficients (at most r nonzeros). Weights start at one; degrees are the
// column sums of H.
struct AnchorHypergraph {
  Matrix incidence;  // m x n, nonnegative
  Vector weights;    // length n, > 0
  Vector degrees;    // length n, column sums of incidence
};

// Anchors as k-means centers of each view's latent codes.
AnchorSet init_anchors(const std::vector<Matrix>& latents,
                       const std::vector<int>& anchors_per_view,
                       std::uint64_t seed);

// Solves min_{c >= 0, 1'c = 1} ||z - A c||^2 + gamma ||c||^2 per column by
// accelerated projected gradient with step 1/L, L = 2 (lambda_max(A'A) +
// gamma); stops when the iterate moves less than 1e-8 or after 500 rounds.
Matrix solve_coefficients(const Matrix& latents, const Matrix& anchors,
                          double gamma);

CoefficientMatrices solve_all_coefficients(const std::vector<Matrix>& latents,
                                           const AnchorSet& anchors, double gamma);

// Column-wise top-r sparsification of the concatenated coefficients; ties
// break toward the lower global anchor index. Initial weights are all one.
AnchorHypergraph build_incidence(const CoefficientMatrices& coefficients, int top_r);

}  // namespace magspec
