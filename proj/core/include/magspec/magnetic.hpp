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
#include <string>
#include <vector>

#include "magspec/anchor_hypergraph.hpp"
#include "magspec/types.hpp"

namespace magspec {

enum class PhaseScheme { kNetflow, kZero, kShuffled, kRandom };

PhaseScheme phase_scheme_from_name(const std::string& name);
const char* phase_scheme_name(PhaseScheme scheme);

// Whether the flow accumulates over view pairs v1 < v2 only (file order
// defines the direction) or over all ordered pairs. The latter makes the
// flow symmetric and the netflow identically zero; it exists as an
// experiment switch.
enum class FlowPairs { kLowerUpper, kAll };

struct PhaseMatrix {
  Matrix theta;  // m x m antisymmetric, zero off the affinity support
  PhaseScheme scheme = PhaseScheme::kZero;
  double q = 0.0;      // phase budget; beta = pi q
  double beta = 0.0;
};

struct FlowMatrices {
  Matrix flow;      // F, directed top-anchor co-assignment counts
  Matrix netflow;   // F - F'
};

// Per-sample top-1 anchor of each view (ties toward the lower local index),
// in global indices.
std::vector<std::vector<int>> top_anchor_indices(const CoefficientMatrices& coefficients,
                                                 const AnchorSet& anchors);

// Directed cross-view co-assignment flow accumulated from top-1 anchors.
FlowMatrices flow_matrix(const CoefficientMatrices& coefficients,
                         const AnchorSet& anchors,
                         FlowPairs pairs = FlowPairs::kLowerUpper);

FlowMatrices flow_from_top_anchors(const std::vector<std::vector<int>>& top_anchors,
                                   int num_anchors, FlowPairs pairs);

// Rescales the netflow to phases bounded by beta = pi q, masks to the
// affinity support and re-antisymmetrizes. A zero netflow yields the zero
// phase (graceful reduction to the real operator).
PhaseMatrix phase_from_flow(const Matrix& netflow, const Matrix& affinity, double q,
                            double epsilon = 1e-12);

// Counterfactual control: permutes the per-sample top-1 anchor sequence of
// each view independently (seeded), then re-estimates the netflow phase.
PhaseMatrix shuffled_phase(const CoefficientMatrices& coefficients,
                           const AnchorSet& anchors, const Matrix& affinity,
                           double q, std::uint64_t seed,
                           FlowPairs pairs = FlowPairs::kLowerUpper);

// Random antisymmetric phase, uniform in [-beta, beta] on the upper-triangle
// support of the affinity, mirrored with negation.
PhaseMatrix random_phase(const Matrix& affinity, double q, std::uint64_t seed);

struct MagneticGeometry {
  ComplexMatrix adjacency;  // S' .* exp(i Theta)
  Vector degree;            // |adjacency| row sums; isolated rows get 1
  ComplexMatrix laplacian;  // I - D^{-1/2} adjacency D^{-1/2}, Hermitian
};

MagneticGeometry magnetic_laplacian(const Matrix& affinity, const Matrix& theta);

struct SpectralEmbedding {
  ComplexMatrix anchor_embedding;  // m x K eigenvectors, gauge-fixed
  Vector eigenvalues;              // all m eigenvalues, ascending
  Matrix lift;                     // M = diag(delta)^{-1} H', n x m
  ComplexMatrix sample_embedding_complex;  // U_c = M Phi, n x K
  Matrix sample_embedding;         // U = row-norm([Re, Im]), n x 2K
  std::vector<Index> zero_rows;    // samples whose U_c row was exactly zero
};

// Magnetic spectral embedding lifted to samples through the hypergraph.
SpectralEmbedding spectral_embedding(const MagneticGeometry& geometry,
                                     const AnchorHypergraph& hypergraph, int k);

// Classical real spectral embedding of the affinity (the zero-phase path,
// kept distinct from the complex solver so the two can cross-check).
SpectralEmbedding real_spectral_embedding(const Matrix& affinity,
                                          const AnchorHypergraph& hypergraph, int k);

}  // namespace magspec
