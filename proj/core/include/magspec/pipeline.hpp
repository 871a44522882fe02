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

#include "magspec/anchor_hypergraph.hpp"
#include "magspec/curvature.hpp"
#include "magspec/magnetic.hpp"
#include "magspec/types.hpp"

namespace magspec {

struct GeometryOptions {
  int anchors_per_view = 0;  // 0 resolves to max(K, ceil(sqrt(n))), capped at 200
  double gamma = 0.1;
  int top_r = 3;
  RicciFlowOptions ricci;
  double q = 0.25;
  PhaseScheme scheme = PhaseScheme::kNetflow;
  FlowPairs flow_pairs = FlowPairs::kLowerUpper;
};

int resolve_anchor_count(Index n, int k, int requested);

// The shared magnitude backbone: anchors, simplex coefficients, top-r
// hypergraph, curvature-refined weights and the anchor affinity.
struct Backbone {
  AnchorSet anchors;
  CoefficientMatrices coefficients;
  AnchorHypergraph hypergraph;
  Vector refined_weights;
  RefinedAffinity refined;
  std::uint64_t affinity_hash = 0;  // FNV-1a over the affinity bytes
};

Backbone build_backbone(const std::vector<Matrix>& latents, int k,
                        const GeometryOptions& options, std::uint64_t seed);

// Phase plus spectral embedding on top of a fixed backbone. The zero scheme
// takes the classical real spectral path; the magnetic geometry is still
// assembled (with zero phase) for downstream sample-level smoothing.
struct SpectralSignal {
  PhaseMatrix phase;
  MagneticGeometry geometry;
  SpectralEmbedding embedding;
};

SpectralSignal build_spectral(const Backbone& backbone, int k, PhaseScheme scheme,
                              const GeometryOptions& options, std::uint64_t seed);

std::uint64_t hash_matrix(const Matrix& m);

}  // namespace magspec
