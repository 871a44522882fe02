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

#include "magspec/types.hpp"

namespace magspec {

// A multi-view dataset: one feature matrix per view over the same n samples,
// optional ground-truth labels in [0, K).
struct MultiViewDataset {
  std::vector<Matrix> views;     // each n x d_v, row = sample
  std::optional<Labels> labels;  // length n when present
  Index n = 0;
  int num_views = 0;
  int num_clusters = 0;  // 0 when unknown (no labels, no generator info)

  void validate() const;
};

// Parameters for the synthetic multi-view generator. One designated view
// (the last one) has a conflict_rate fraction of its samples re-drawn from a
// different cluster's center, which plants cross-view structural conflicts.
struct SyntheticSpec {
  Index n = 600;
  int num_views = 3;
  int num_clusters = 3;
  std::vector<Index> view_dims;  // length num_views
  double cluster_spread = 0.15;
  double conflict_rate = 0.0;  // in [0, 1]
  double noise_sigma = 0.0;
  std::uint64_t seed = 1;

  void validate() const;
};

// Loads `view_0.csv ... view_{V-1}.csv` plus optional `labels.csv` from a
// directory. Views must agree on row count.
MultiViewDataset load_dataset(const std::string& dir);

// Inverse of load_dataset; values are written with 17 significant digits so
// the round-trip is exact.
void save_dataset(const std::string& dir, const MultiViewDataset& dataset);

// Per-feature min-max scaling to [0, 1]; constant columns map to 0.
MultiViewDataset minmax_normalize(const MultiViewDataset& dataset);

// Seeded Gaussian-blob generator; a pure function of the spec. Exactly
// floor(conflict_rate * n) samples, chosen by a seeded shuffle, are re-drawn
// from the next cluster's center in the last view.
MultiViewDataset generate_synthetic(const SyntheticSpec& spec);

}  // namespace magspec
