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

#include "magspec/types.hpp"

namespace magspec {

// Flat TOML-style run configuration. Every key has a default; unknown keys
// are rejected. `[section]` headers prefix the keys that follow them.
struct RunConfig {
  // Data source: a dataset directory, or the synthetic generator when empty.
  std::string dataset_path;
  bool normalize = true;
  Index synthetic_n = 600;
  int synthetic_views = 3;
  int synthetic_clusters = 3;
  std::vector<Index> synthetic_view_dims = {10, 10, 10};
  double synthetic_cluster_spread = 0.15;
  double synthetic_conflict_rate = 0.0;
  double synthetic_noise_sigma = 0.02;
  int clusters = 0;  // 0: derive from labels or the synthetic spec

  // Anchor hypergraph.
  int anchors_per_view = 0;  // 0: max(K, ceil(sqrt(n))) capped at 200
  double gamma = 0.1;
  int top_r = 3;

  // Ricci refinement.
  double ricci_tau = 0.1;
  int ricci_iterations = 20;
  bool ricci_flip_sign = false;

  // Phase estimation.
  double q = 0.25;
  std::string phase_scheme = "netflow";      // netflow | zero | shuffled | random
  std::string flow_pairs = "lower_upper";    // lower_upper | all

  // Encoders.
  std::string encoder_mode = "mlp";  // mlp | identity
  Index latent_dim = 10;
  std::vector<Index> hidden_dims = {200};

  // Training.
  double learning_rate = 5e-4;
  int pretrain_epochs = 200;
  int stage1_epochs = 200;
  int stage2_epochs = 50;
  int refresh_period = 50;
  double alpha = 1.0;
  double lambda1 = 1.0;
  double lambda2 = 1.0;
  double lambda_c = 1.0;
  double tau_con = 0.5;

  // Seeds: master seeds are seed_base .. seed_base + seeds - 1 (shifted by
  // the CLI --seed-offset flag).
  int seeds = 5;
  std::uint64_t seed_base = 1;

  // Sweep grids (log-spaced values listed explicitly).
  std::vector<double> sweep_lambda1 = {0.1, 1.0, 10.0};
  std::vector<double> sweep_lambda2 = {0.1, 1.0, 10.0};

  // Toy cycle demonstrator emitted by `ablate`.
  int fig1_cycle_size = 8;
  double fig1_theta = 0.78539816339744831;

  // Extra spectral dumps (theta, eigenvalues, U) from `run`.
  bool dump_spectral = false;

  // Throws ConfigError with a field-level message on any violation.
  void validate() const;

  // The effective configuration, re-consumable by parse_config.
  std::string to_toml() const;
};

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config(const std::string& path);

std::vector<std::uint64_t> resolve_seeds(const RunConfig& config,
                                         std::uint64_t seed_offset);

}  // namespace magspec
