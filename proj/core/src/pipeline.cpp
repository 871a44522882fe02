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

#include "magspec/pipeline.hpp"

#include <cmath>
#include <cstring>

#include "magspec/rng.hpp"

namespace magspec {

int resolve_anchor_count(Index n, int k, int requested) {
  if (requested > 0) return requested;
  const int by_sqrt = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
  int m_v = std::max(k, by_sqrt);
  m_v = std::min(m_v, 200);
  m_v = std::min<int>(m_v, static_cast<int>(n));
  return std::max(m_v, 1);
}

std::uint64_t hash_matrix(const Matrix& m) {
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
  const auto* bytes = reinterpret_cast<const unsigned char*>(m.data());
  const std::size_t count = static_cast<std::size_t>(m.size()) * sizeof(double);
  for (std::size_t i = 0; i < count; ++i) {
    h ^= bytes[i];
    h *= 1099511628211ULL;
  }
  return h;
}

Backbone build_backbone(const std::vector<Matrix>& latents, int k,
                        const GeometryOptions& options, std::uint64_t seed) {
  if (latents.empty()) throw ParameterError("build_backbone: no views");
  const Index n = latents.front().rows();
  const int m_v = resolve_anchor_count(n, k, options.anchors_per_view);
  const std::vector<int> per_view(latents.size(), m_v);

  const Rng master(seed);
  Backbone backbone;
  backbone.anchors = init_anchors(latents, per_view, master.child(0xA).seed());
  backbone.coefficients =
      solve_all_coefficients(latents, backbone.anchors, options.gamma);
  backbone.hypergraph = build_incidence(backbone.coefficients, options.top_r);
  backbone.refined_weights =
      ricci_flow(backbone.hypergraph.incidence, backbone.hypergraph.weights,
                 options.ricci);
  backbone.refined = anchor_affinity(backbone.hypergraph, backbone.refined_weights);
  backbone.affinity_hash = hash_matrix(backbone.refined.affinity);
  return backbone;
}

SpectralSignal build_spectral(const Backbone& backbone, int k, PhaseScheme scheme,
                              const GeometryOptions& options, std::uint64_t seed) {
  const Matrix& affinity = backbone.refined.affinity;
  const Rng master(seed);

  SpectralSignal signal;
  switch (scheme) {
    case PhaseScheme::kZero: {
      signal.phase.scheme = PhaseScheme::kZero;
      signal.phase.q = 0.0;
      signal.phase.beta = 0.0;
      signal.phase.theta = Matrix::Zero(affinity.rows(), affinity.cols());
      break;
    }
    case PhaseScheme::kNetflow: {
      const FlowMatrices flows = flow_matrix(backbone.coefficients, backbone.anchors,
                                             options.flow_pairs);
      signal.phase = phase_from_flow(flows.netflow, affinity, options.q);
      break;
    }
    case PhaseScheme::kShuffled: {
      signal.phase = shuffled_phase(backbone.coefficients, backbone.anchors, affinity,
                                    options.q, master.child(0x5).seed(),
                                    options.flow_pairs);
      break;
    }
    case PhaseScheme::kRandom: {
      signal.phase = random_phase(affinity, options.q, master.child(0x6).seed());
      break;
    }
  }

  signal.geometry = magnetic_laplacian(affinity, signal.phase.theta);
  if (scheme == PhaseScheme::kZero) {
    signal.embedding = real_spectral_embedding(affinity, backbone.hypergraph, k);
  } else {
    signal.embedding = spectral_embedding(signal.geometry, backbone.hypergraph, k);
  }
  return signal;
}

}  // namespace magspec
