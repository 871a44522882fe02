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
#include <optional>
#include <string>
#include <vector>

#include "magspec/dataset.hpp"
#include "magspec/pipeline.hpp"
#include "magspec/types.hpp"

namespace magspec {

struct ClusteringMetrics {
  double acc = 0.0;
  double nmi = 0.0;
  double ari = 0.0;
};

// Best-match accuracy: contingency table, Hungarian matching on negated
// counts, matched fraction.
double clustering_accuracy(const Labels& predicted, const Labels& truth);

// Normalized mutual information with arithmetic-mean normalization; a
// constant labeling carries zero information and scores 0.
double nmi(const Labels& predicted, const Labels& truth);

// Adjusted Rand index.
double ari(const Labels& predicted, const Labels& truth);

ClusteringMetrics clustering_metrics(const Labels& predicted, const Labels& truth);

// lambda_{K+1} - lambda_K for ascending eigenvalues (1-indexed convention).
double eigengap(const Vector& eigenvalues, int k);

// Mean principal angle between the column spans of two n x p bases. Inputs
// are orthonormalized internally when they are not orthonormal within 1e-6.
double subspace_distance(const Matrix& basis_a, const Matrix& basis_b);

// ---------------------------------------------------------------------------
// Causal phase ablation under a fixed magnitude backbone
// ---------------------------------------------------------------------------

struct AblationRow {
  std::string variant;
  std::uint64_t seed = 0;
  std::optional<ClusteringMetrics> metrics;  // absent without ground truth
  double eigengap = 0.0;
  double inertia = 0.0;
  // Mean principal-angle distance across seed pairs; one value per variant,
  // absent when fewer than two seeds ran.
  std::optional<double> subspace;
  std::uint64_t affinity_hash = 0;
};

struct AblationConfig {
  int num_clusters = 0;  // 0: take from dataset labels
  GeometryOptions geometry;
  bool identity_encoder = true;
  // Autoencoder settings used when identity_encoder is false.
  Index latent_dim = 10;
  std::vector<Index> hidden_dims = {200};
  double learning_rate = 5e-4;
  int pretrain_epochs = 0;
};

struct AblationReport {
  std::vector<AblationRow> rows;  // variant-major, seed-minor
  std::vector<std::string> variants;
};

// Builds one backbone per seed and varies only the phase operator across
// the four variants (real-spec, mag-spec, shuffled, random). All variants of
// a seed consume the byte-identical affinity (hash-checked).
AblationReport run_ablation(const MultiViewDataset& dataset,
                            const AblationConfig& config,
                            const std::vector<std::uint64_t>& seeds);

void write_ablation_csv(const std::string& path, const AblationReport& report);

// ---------------------------------------------------------------------------
// Toy demonstrations and inspection dumps
// ---------------------------------------------------------------------------

struct CycleSpectra {
  Vector consistent;   // all edges phased +theta
  Vector alternating;  // edges phased +theta/-theta alternately
};

// Unit-magnitude cycle spectra under a consistent versus an alternating
// (conflicting) phase assignment. A 2-cycle collapses its double edge.
CycleSpectra fig1_demo(int cycle_size, double theta);

void write_fig1_csv(const std::string& path, const CycleSpectra& spectra);

// Rows/columns permuted so samples group by ground-truth label (stable by
// index inside a label); exposes block-diagonal structure as data.
Matrix reordered_affinity(const Matrix& affinity, const Labels& truth);

}  // namespace magspec
