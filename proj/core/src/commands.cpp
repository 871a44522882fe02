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

#include "magspec/commands.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

#include <nlohmann/json.hpp>

#include "magspec/csv.hpp"
#include "magspec/evaluation.hpp"
#include "magspec/training.hpp"

namespace magspec {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

MultiViewDataset resolve_dataset(const RunConfig& config, std::uint64_t seed) {
  MultiViewDataset data;
  if (!config.dataset_path.empty()) {
    data = load_dataset(config.dataset_path);
  } else {
    SyntheticSpec spec;
    spec.n = config.synthetic_n;
    spec.num_views = config.synthetic_views;
    spec.num_clusters = config.synthetic_clusters;
    spec.view_dims = config.synthetic_view_dims;
    spec.cluster_spread = config.synthetic_cluster_spread;
    spec.conflict_rate = config.synthetic_conflict_rate;
    spec.noise_sigma = config.synthetic_noise_sigma;
    spec.seed = seed;
    data = generate_synthetic(spec);
  }
  if (config.normalize) data = minmax_normalize(data);
  return data;
}

GeometryOptions geometry_options(const RunConfig& config) {
  GeometryOptions geo;
  geo.anchors_per_view = config.anchors_per_view;
  geo.gamma = config.gamma;
  geo.top_r = config.top_r;
  geo.ricci.step = config.ricci_tau;
  geo.ricci.iterations = config.ricci_iterations;
  geo.ricci.flip_sign = config.ricci_flip_sign;
  geo.q = config.q;
  geo.scheme = phase_scheme_from_name(config.phase_scheme);
  geo.flow_pairs =
      config.flow_pairs == "all" ? FlowPairs::kAll : FlowPairs::kLowerUpper;
  return geo;
}

TrainConfig train_config(const RunConfig& config, std::uint64_t seed) {
  TrainConfig train;
  train.num_clusters = config.clusters;
  train.geometry = geometry_options(config);
  train.weights.lambda1 = config.lambda1;
  train.weights.lambda2 = config.lambda2;
  train.weights.lambda_c = config.lambda_c;
  train.weights.gamma = config.gamma;
  train.weights.tau_con = config.tau_con;
  train.weights.alpha = config.alpha;
  train.latent_dim = config.latent_dim;
  train.hidden_dims = config.hidden_dims;
  train.learning_rate = config.learning_rate;
  train.pretrain_epochs = config.pretrain_epochs;
  train.stage1_epochs = config.stage1_epochs;
  train.stage2_epochs = config.stage2_epochs;
  train.refresh_period = config.refresh_period;
  train.identity_encoder = config.encoder_mode == "identity";
  train.seed = seed;
  return train;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw LoadError("cannot write " + path.string());
  out << text;
}

void write_trace(const fs::path& path, const std::vector<TraceRow>& trace) {
  std::ofstream out(path);
  if (!out) throw LoadError("cannot write " + path.string());
  out << "epoch,stage,rec,geom,spec,con,total\n";
  for (const TraceRow& row : trace) {
    out << row.epoch << ',' << row.stage << ',' << csv::format_double(row.rec) << ','
        << csv::format_double(row.geom) << ',' << csv::format_double(row.spec) << ','
        << csv::format_double(row.con) << ',' << csv::format_double(row.total)
        << '\n';
  }
}

}  // namespace

void cmd_run(const RunConfig& config, const std::string& out_dir,
             std::uint64_t seed_offset) {
  config.validate();
  fs::create_directories(out_dir);
  write_text(fs::path(out_dir) / "effective_config.toml", config.to_toml());

  const std::vector<std::uint64_t> seeds = resolve_seeds(config, seed_offset);
  ordered_json per_seed = ordered_json::array();
  double sum_acc = 0.0, sum_nmi = 0.0, sum_ari = 0.0;
  int labeled_runs = 0;

  for (std::size_t s = 0; s < seeds.size(); ++s) {
    const std::uint64_t seed = seeds[s];
    const MultiViewDataset data = resolve_dataset(config, seed);
    const TrainResult result = train(data, train_config(config, seed));

    const std::string tag = "_seed" + std::to_string(seed);
    csv::write_labels((fs::path(out_dir) / ("labels" + tag + ".csv")).string(),
                      result.labels);
    if (s == 0) {
      csv::write_labels((fs::path(out_dir) / "labels.csv").string(), result.labels);
    }
    write_trace(fs::path(out_dir) / ("trace" + tag + ".csv"), result.trace);
    if (config.encoder_mode != "identity") {
      save_checkpoint((fs::path(out_dir) / ("checkpoint" + tag + ".csv")).string(),
                      result.params, result.view_centers);
    }
    if (config.dump_spectral) {
      csv::write_matrix((fs::path(out_dir) / ("theta" + tag + ".csv")).string(),
                        result.theta);
      csv::write_vector(
          (fs::path(out_dir) / ("eigenvalues" + tag + ".csv")).string(),
          result.eigenvalues);
      csv::write_matrix((fs::path(out_dir) / ("u" + tag + ".csv")).string(),
                        result.embedding);
    }
    if (s == 0 && data.labels) {
      csv::write_matrix((fs::path(out_dir) / "affinity.csv").string(),
                        reordered_affinity(result.cosine_affinity, *data.labels));
    }

    ordered_json row;
    row["seed"] = seed;
    if (data.labels) {
      const ClusteringMetrics metrics = clustering_metrics(result.labels, *data.labels);
      row["acc"] = metrics.acc;
      row["nmi"] = metrics.nmi;
      row["ari"] = metrics.ari;
      sum_acc += metrics.acc;
      sum_nmi += metrics.nmi;
      sum_ari += metrics.ari;
      ++labeled_runs;
    }
    row["eigengap"] =
        eigengap(result.eigenvalues,
                 config.clusters > 0 ? config.clusters : data.num_clusters);
    per_seed.push_back(row);
  }

  ordered_json metrics;
  metrics["per_seed"] = per_seed;
  if (labeled_runs > 0) {
    metrics["mean"]["acc"] = sum_acc / labeled_runs;
    metrics["mean"]["nmi"] = sum_nmi / labeled_runs;
    metrics["mean"]["ari"] = sum_ari / labeled_runs;
  }
  write_text(fs::path(out_dir) / "metrics.json", metrics.dump(2) + "\n");
}

void cmd_ablate(const RunConfig& config, const std::string& out_dir,
                std::uint64_t seed_offset) {
  config.validate();
  fs::create_directories(out_dir);
  write_text(fs::path(out_dir) / "effective_config.toml", config.to_toml());

  const std::vector<std::uint64_t> seeds = resolve_seeds(config, seed_offset);
  if (seeds.size() < 2) {
    std::cerr << "warning: subspace distance needs at least two seeds; "
                 "the column will be empty\n";
  }

  AblationConfig ablation;
  ablation.num_clusters = config.clusters;
  ablation.geometry = geometry_options(config);
  ablation.identity_encoder = config.encoder_mode == "identity";
  ablation.latent_dim = config.latent_dim;
  ablation.hidden_dims = config.hidden_dims;
  ablation.learning_rate = config.learning_rate;
  ablation.pretrain_epochs = config.pretrain_epochs;

  // The ablation compares phase variants under one backbone per seed; the
  // dataset itself is fixed across seeds (first master seed).
  const MultiViewDataset data = resolve_dataset(config, seeds.front());
  const AblationReport report = run_ablation(data, ablation, seeds);
  write_ablation_csv((fs::path(out_dir) / "ablation.csv").string(), report);

  write_fig1_csv((fs::path(out_dir) / "fig1.csv").string(),
                 fig1_demo(config.fig1_cycle_size, config.fig1_theta));
}

void cmd_sweep(const RunConfig& config, const std::string& out_dir,
               std::uint64_t seed_offset) {
  config.validate();
  fs::create_directories(out_dir);
  write_text(fs::path(out_dir) / "effective_config.toml", config.to_toml());

  const std::vector<std::uint64_t> seeds = resolve_seeds(config, seed_offset);
  std::ofstream out(fs::path(out_dir) / "sweep.csv");
  if (!out) throw LoadError("cannot write sweep.csv");
  out << "lambda1,lambda2,mean_acc\n";
  for (double l1 : config.sweep_lambda1) {
    for (double l2 : config.sweep_lambda2) {
      double sum_acc = 0.0;
      int counted = 0;
      for (std::uint64_t seed : seeds) {
        const MultiViewDataset data = resolve_dataset(config, seed);
        if (!data.labels) {
          throw ConfigError("sweep requires ground-truth labels");
        }
        TrainConfig cell = train_config(config, seed);
        cell.weights.lambda1 = l1;
        cell.weights.lambda2 = l2;
        const TrainResult result = train(data, cell);
        sum_acc += clustering_accuracy(result.labels, *data.labels);
        ++counted;
      }
      out << csv::format_double(l1) << ',' << csv::format_double(l2) << ','
          << csv::format_double(sum_acc / counted) << '\n';
    }
  }
}

int run_command(const std::string& command, const std::string& config_path,
                const std::string& out_dir, std::uint64_t seed_offset) {
  try {
    const RunConfig config = parse_config(config_path);
    config.validate();
    if (command == "run") {
      cmd_run(config, out_dir, seed_offset);
    } else if (command == "ablate") {
      cmd_ablate(config, out_dir, seed_offset);
    } else if (command == "sweep") {
      cmd_sweep(config, out_dir, seed_offset);
    } else {
      std::cerr << "error: unknown command '" << command << "'\n";
      return kExitConfig;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DivergenceError& e) {
    std::cerr << "runtime error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace magspec
