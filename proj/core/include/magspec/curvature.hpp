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

#include <vector>

#include "magspec/anchor_hypergraph.hpp"
#include "magspec/types.hpp"

namespace magspec {

// Forman-style hyperedge curvature: raw_e = 2 - mean weighted degree of the
// anchors in e's support, where deg_w(a) sums the weights of hyperedges
// containing a. Normalized by the max absolute value so kappa lies in
// [-1, 1]; all-zero raw curvature stays zero.
Vector hyperedge_curvature(const Matrix& incidence, const Vector& weights);

struct RicciTraceRow {
  int iteration = 0;
  double total_weight = 0.0;
  double min_curvature = 0.0;
  double max_curvature = 0.0;
};

struct RicciFlowOptions {
  double step = 0.1;        // tau in (0, 1)
  int iterations = 20;      // T
  bool flip_sign = false;   // experiment switch: negate kappa in the update
  double weight_floor = 1e-12;
};

// Multiplicative curvature flow w <- w (1 - tau kappa), rescaled each
// iteration so the total weight is conserved. Weights stay positive.
Vector ricci_flow(const Matrix& incidence, const Vector& initial_weights,
                  const RicciFlowOptions& options,
                  std::vector<RicciTraceRow>* trace = nullptr);

// Refined anchor affinity S' = H D_e H' with D_e = diag(w / delta), plus the
// Gram factor C = D_e^{1/2} H' so that S' = C'C.
struct RefinedAffinity {
  Matrix affinity;     // m x m, symmetric PSD
  Matrix gram_factor;  // n x m
  Vector edge_scale;   // diag of D_e, length n
};

RefinedAffinity anchor_affinity(const AnchorHypergraph& hypergraph,
                                const Vector& refined_weights);

}  // namespace magspec
