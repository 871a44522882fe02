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

#include "magspec/config.hpp"

namespace magspec {

// Exit codes shared by the library-level commands and the CLI:
// 0 success, 2 invalid configuration, 3 runtime divergence.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;

// Trains per seed; writes labels.csv (first seed), labels_seed*.csv,
// trace_seed*.csv, checkpoint_seed*.csv, metrics.json, affinity.csv (when
// labels exist) and the effective config.
void cmd_run(const RunConfig& config, const std::string& out_dir,
             std::uint64_t seed_offset = 0);

// Fixed-backbone phase ablation; writes ablation.csv and fig1.csv.
void cmd_ablate(const RunConfig& config, const std::string& out_dir,
                std::uint64_t seed_offset = 0);

// Cartesian (lambda1, lambda2) grid; writes sweep.csv with per-cell mean
// accuracy over seeds.
void cmd_sweep(const RunConfig& config, const std::string& out_dir,
               std::uint64_t seed_offset = 0);

// Parses, validates and dispatches; maps ConfigError to 2, DivergenceError
// to 3, success to 0. Any other exception escapes to the caller.
int run_command(const std::string& command, const std::string& config_path,
                const std::string& out_dir, std::uint64_t seed_offset);

}  // namespace magspec
