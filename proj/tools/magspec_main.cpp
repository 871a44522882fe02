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

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "magspec/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Phase-consistent magnetic spectral learning for multi-view "
               "clustering"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed_offset = 0;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "Path to the run configuration")
        ->required();
    cmd->add_option("--out", out_dir, "Output directory")->required();
    cmd->add_option("--seed-offset", seed_offset,
                    "Shift applied to every master seed");
  };

  add_common(app.add_subcommand("run", "Train and cluster per seed"));
  add_common(app.add_subcommand(
      "ablate", "Phase ablation under a fixed magnitude backbone"));
  add_common(app.add_subcommand("sweep", "Accuracy grid over (lambda1, lambda2)"));

  CLI11_PARSE(app, argc, argv);

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return magspec::run_command(command, config_path, out_dir, seed_offset);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
