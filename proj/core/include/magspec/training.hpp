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

#include "magspec/dataset.hpp"
#include "magspec/encoder.hpp"
#include "magspec/pipeline.hpp"
#include "magspec/types.hpp"

namespace magspec {

// ---------------------------------------------------------------------------
// Soft assignments and targets
// ---------------------------------------------------------------------------

struct StudentTCache {
  Matrix points;
  Matrix centers;
  Matrix kernel;  // (1 + d^2/alpha)^{-(alpha+1)/2}, unnormalized
  Matrix q;       // row-normalized kernel
  double alpha = 1.0;
};

// Student-t soft assignment of points to centers; rows sum to one.
Matrix student_t_assign(const Matrix& points, const Matrix& centers, double alpha,
                        StudentTCache* cache = nullptr);

// Chain rule through the Student-t assignment: given dL/dQ, accumulates
// dL/dPoints and dL/dCenters (either may be null).
void student_t_backward(const StudentTCache& cache, const Matrix& d_q,
                        Matrix* d_points, Matrix* d_centers);

// Sharpened target distribution: p_ij proportional to q_ij^2 / column sum,
// renormalized per row. Empty columns contribute nothing (1e-12 guard).
Matrix target_distribution(const Matrix& q);

// ---------------------------------------------------------------------------
// Losses (values plus gradients w.r.t. their direct inputs)
// ---------------------------------------------------------------------------

// Sum over views of KL(P || Q^(v)) with P held constant. d_q[v] receives the
// gradient w.r.t. Q^(v).
double spec_loss(const Matrix& targets, const std::vector<Matrix>& view_q,
                 std::vector<Matrix>* d_q = nullptr);

// Sample-level magnetic-cosine affinity and its normalized Laplacian.
// S_mc = [Re(M adjacency M')]_+ since |z| cos(arg z) = Re(z).
struct SampleLaplacian {
  ComplexMatrix sample_adjacency;  // n x n
  Matrix cosine_affinity;          // S_mc, symmetric nonnegative
  Vector degree;                   // row sums; zero rows get 1
  Matrix laplacian;                // L_cos, symmetric PSD
};

SampleLaplacian sample_laplacian(const ComplexMatrix& adjacency,
                                 const AnchorHypergraph& hypergraph);

// Per-view anchor self-reconstruction + coefficient ridge + Laplacian
// smoothing of the soft assignments:
//   sum_v ||Z - (A C)'||_F^2 + gamma ||C||_F^2
//          + lambda_c tr(Q' L Q) / (n K).
// Anchors and coefficients are constants; gradients flow to Z and Q.
double geom_loss(const std::vector<Matrix>& latents,
                 const std::vector<Matrix>& anchor_mats,
                 const std::vector<Matrix>& coeff_mats,
                 const std::vector<Matrix>& view_q, const Matrix& cos_laplacian,
                 double gamma, double lambda_c,
                 std::vector<Matrix>* d_latents = nullptr,
                 std::vector<Matrix>* d_q = nullptr);

// Cross-view cluster-profile contrastive loss over ordered view pairs with
// cosine similarity and temperature tau. Returns 0 (with a one-time warning)
// for fewer than two views.
double contrastive_loss(const std::vector<Matrix>& view_q, double tau,
                        std::vector<Matrix>* d_q = nullptr);

// ---------------------------------------------------------------------------
// Two-stage trainer
// ---------------------------------------------------------------------------

// Quantities held fixed between geometry refreshes.
struct FixedGeometry {
  std::vector<Matrix> anchor_mats;  // A^(v), d x m_v
  std::vector<Matrix> coeff_mats;   // C^(v), m_v x n
  Matrix targets;                   // shared P, n x K (no gradient)
  Matrix cos_laplacian;             // L_cos, n x n
};

enum class TrainStage { kPretrain, kStageOne, kStageTwo };

struct LossWeights {
  double lambda1 = 1.0;   // geometry loss
  double lambda2 = 1.0;   // spectral KL loss (stage I only)
  double lambda_c = 1.0;  // smoothing weight inside the geometry loss
  double gamma = 0.1;     // coefficient ridge
  double tau_con = 0.5;   // contrastive temperature
  double alpha = 1.0;     // Student-t degrees of freedom
};

struct TrainConfig {
  int num_clusters = 0;  // 0: take from dataset labels
  GeometryOptions geometry;
  LossWeights weights;
  Index latent_dim = 10;
  std::vector<Index> hidden_dims = {200};
  double learning_rate = 5e-4;
  int pretrain_epochs = 200;
  int stage1_epochs = 200;
  int stage2_epochs = 50;
  int refresh_period = 50;  // 0 disables mid-training geometry refresh
  bool identity_encoder = false;
  std::uint64_t seed = 1;
};

struct TraceRow {
  int epoch = 0;
  int stage = 0;  // 0 pretrain, 1 stage I, 2 stage II
  double rec = 0.0;
  double geom = 0.0;
  double spec = 0.0;
  double con = 0.0;
  double total = 0.0;
};

// One full-batch evaluation of a stage objective with gradients for every
// trainable tensor (encoder/decoder weights and per-view centers). The
// component losses are reported unweighted; `total` carries the weights.
struct StageLossResult {
  double rec = 0.0;
  double geom = 0.0;
  double spec = 0.0;
  double con = 0.0;
  double total = 0.0;
  std::vector<MlpGrads> encoder_grads;
  std::vector<MlpGrads> decoder_grads;
  std::vector<Matrix> center_grads;
  std::vector<Matrix> view_q;
};

StageLossResult stage_loss(const AutoencoderParams& nets,
                           const std::vector<Matrix>& view_centers,
                           const MultiViewDataset& dataset,
                           const FixedGeometry& geometry, const LossWeights& weights,
                           TrainStage stage);

struct TrainResult {
  Labels labels;
  Matrix embedding;  // final sample embedding U
  Matrix cosine_affinity;  // final sample-level magnetic-cosine affinity
  Matrix theta;            // final phase matrix
  Vector eigenvalues;
  std::vector<TraceRow> trace;
  AutoencoderParams params;
  std::vector<Matrix> view_centers;
  std::uint64_t affinity_hash = 0;
  // Worst deviations observed across all epochs; exercised by the
  // row-stochasticity and unit-norm acceptance checks.
  double max_row_sum_error = 0.0;
  double max_unit_norm_error = 0.0;
};

// Algorithm: pretrain autoencoders on the reconstruction loss; build the
// anchor geometry, magnetic spectrum and targets; stage I descends
// rec + lambda1 geom + lambda2 spec with optional periodic refresh; stage II
// descends rec + lambda1 geom + con; finally the geometry is rebuilt from
// the trained latents and k-means on U yields the labels.
TrainResult train(const MultiViewDataset& dataset, const TrainConfig& config);

}  // namespace magspec
