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

#include "magspec/config.hpp"

#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "magspec/csv.hpp"
#include "magspec/magnetic.hpp"

namespace magspec {

namespace {

std::string trim(const std::string& s) {
  std::size_t begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  std::size_t end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                        (s.front() == '\'' && s.back() == '\''))) {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

double parse_double(const std::string& key, const std::string& value) {
  const char* begin = value.c_str();
  char* end = nullptr;
  const double x = std::strtod(begin, &end);
  if (end == begin || *end != '\0') {
    throw ConfigError(key + ": expected a number, got '" + value + "'");
  }
  return x;
}

long parse_int(const std::string& key, const std::string& value) {
  const char* begin = value.c_str();
  char* end = nullptr;
  const long x = std::strtol(begin, &end, 10);
  if (end == begin || *end != '\0') {
    throw ConfigError(key + ": expected an integer, got '" + value + "'");
  }
  return x;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true") return true;
  if (value == "false") return false;
  throw ConfigError(key + ": expected true or false, got '" + value + "'");
}

std::vector<std::string> split_list(std::string value) {
  // Accepts bare "1,2,3" as well as bracketed "[1, 2, 3]".
  if (!value.empty() && value.front() == '[' && value.back() == ']') {
    value = value.substr(1, value.size() - 2);
  }
  std::vector<std::string> items;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

using Setter = std::function<void(RunConfig&, const std::string& key,
                                  const std::string& value)>;

const std::map<std::string, Setter>& key_table() {
  static const std::map<std::string, Setter> table = {
      {"dataset.path",
       [](RunConfig& c, const std::string&, const std::string& v) {
         c.dataset_path = unquote(v);
       }},
      {"dataset.normalize",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.normalize = parse_bool(k, v);
       }},
      {"synthetic.n",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.synthetic_n = parse_int(k, v);
       }},
      {"synthetic.views",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.synthetic_views = static_cast<int>(parse_int(k, v));
       }},
      {"synthetic.clusters",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.synthetic_clusters = static_cast<int>(parse_int(k, v));
       }},
      {"synthetic.view_dims",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.synthetic_view_dims.clear();
         for (const std::string& item : split_list(v)) {
           c.synthetic_view_dims.push_back(parse_int(k, item));
         }
       }},
      {"synthetic.cluster_spread",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.synthetic_cluster_spread = parse_double(k, v);
       }},
      {"synthetic.conflict_rate",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.synthetic_conflict_rate = parse_double(k, v);
       }},
      {"synthetic.noise_sigma",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.synthetic_noise_sigma = parse_double(k, v);
       }},
      {"clusters",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.clusters = static_cast<int>(parse_int(k, v));
       }},
      {"anchors.per_view",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.anchors_per_view = static_cast<int>(parse_int(k, v));
       }},
      {"anchors.gamma",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.gamma = parse_double(k, v);
       }},
      {"anchors.top_r",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.top_r = static_cast<int>(parse_int(k, v));
       }},
      {"ricci.tau",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.ricci_tau = parse_double(k, v);
       }},
      {"ricci.iterations",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.ricci_iterations = static_cast<int>(parse_int(k, v));
       }},
      {"ricci.flip_sign",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.ricci_flip_sign = parse_bool(k, v);
       }},
      {"phase.q",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.q = parse_double(k, v);
       }},
      {"phase.scheme",
       [](RunConfig& c, const std::string&, const std::string& v) {
         c.phase_scheme = unquote(v);
       }},
      {"phase.flow_pairs",
       [](RunConfig& c, const std::string&, const std::string& v) {
         c.flow_pairs = unquote(v);
       }},
      {"encoder.mode",
       [](RunConfig& c, const std::string&, const std::string& v) {
         c.encoder_mode = unquote(v);
       }},
      {"encoder.latent_dim",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.latent_dim = parse_int(k, v);
       }},
      {"encoder.hidden_dims",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.hidden_dims.clear();
         for (const std::string& item : split_list(v)) {
           c.hidden_dims.push_back(parse_int(k, item));
         }
       }},
      {"train.learning_rate",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.learning_rate = parse_double(k, v);
       }},
      {"train.pretrain_epochs",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.pretrain_epochs = static_cast<int>(parse_int(k, v));
       }},
      {"train.stage1_epochs",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.stage1_epochs = static_cast<int>(parse_int(k, v));
       }},
      {"train.stage2_epochs",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.stage2_epochs = static_cast<int>(parse_int(k, v));
       }},
      {"train.refresh_period",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.refresh_period = static_cast<int>(parse_int(k, v));
       }},
      {"train.alpha",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.alpha = parse_double(k, v);
       }},
      {"train.lambda1",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.lambda1 = parse_double(k, v);
       }},
      {"train.lambda2",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.lambda2 = parse_double(k, v);
       }},
      {"train.lambda_c",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.lambda_c = parse_double(k, v);
       }},
      {"train.tau_con",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.tau_con = parse_double(k, v);
       }},
      {"seeds",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.seeds = static_cast<int>(parse_int(k, v));
       }},
      {"seed_base",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.seed_base = static_cast<std::uint64_t>(parse_int(k, v));
       }},
      {"sweep.lambda1",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.sweep_lambda1.clear();
         for (const std::string& item : split_list(v)) {
           c.sweep_lambda1.push_back(parse_double(k, item));
         }
       }},
      {"sweep.lambda2",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.sweep_lambda2.clear();
         for (const std::string& item : split_list(v)) {
           c.sweep_lambda2.push_back(parse_double(k, item));
         }
       }},
      {"fig1.cycle_size",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.fig1_cycle_size = static_cast<int>(parse_int(k, v));
       }},
      {"fig1.theta",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.fig1_theta = parse_double(k, v);
       }},
      {"output.dump_spectral",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.dump_spectral = parse_bool(k, v);
       }},
  };
  return table;
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  RunConfig config;
  std::stringstream stream(text);
  std::string line;
  std::string section;
  std::size_t line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) +
                        ": expected 'key = value', got '" + line + "'");
    }
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!section.empty()) key = section + "." + key;
    const auto it = key_table().find(key);
    if (it == key_table().end()) {
      throw ConfigError("unknown config key '" + key + "'");
    }
    it->second(config, key, value);
  }
  return config;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

void RunConfig::validate() const {
  auto fail = [](const std::string& message) { throw ConfigError(message); };
  if (dataset_path.empty()) {
    if (synthetic_n < 2) fail("synthetic.n: must be >= 2");
    if (synthetic_views < 1) fail("synthetic.views: must be >= 1");
    if (synthetic_clusters < 1) fail("synthetic.clusters: must be >= 1");
    if (synthetic_n < synthetic_clusters) fail("synthetic.n: must be >= clusters");
    if (static_cast<int>(synthetic_view_dims.size()) != synthetic_views) {
      fail("synthetic.view_dims: need one dimension per view");
    }
    for (Index d : synthetic_view_dims) {
      if (d < 1) fail("synthetic.view_dims: dimensions must be >= 1");
    }
    if (synthetic_cluster_spread <= 0.0) fail("synthetic.cluster_spread: must be > 0");
    if (synthetic_conflict_rate < 0.0 || synthetic_conflict_rate > 1.0) {
      fail("synthetic.conflict_rate: must lie in [0, 1]");
    }
    if (synthetic_noise_sigma < 0.0) fail("synthetic.noise_sigma: must be >= 0");
  }
  if (clusters < 0) fail("clusters: must be >= 0");
  if (anchors_per_view < 0) fail("anchors.per_view: must be >= 0");
  if (gamma < 0.0) fail("anchors.gamma: must be >= 0");
  if (top_r < 1) fail("anchors.top_r: must be >= 1");
  if (ricci_tau <= 0.0 || ricci_tau >= 1.0) fail("ricci.tau: must lie in (0, 1)");
  if (ricci_iterations < 0) fail("ricci.iterations: must be >= 0");
  if (q < 0.0 || q > 1.0) fail("phase.q: must lie in [0, 1]");
  try {
    phase_scheme_from_name(phase_scheme);
  } catch (const ParameterError&) {
    fail("phase.scheme: unknown scheme '" + phase_scheme + "'");
  }
  if (flow_pairs != "lower_upper" && flow_pairs != "all") {
    fail("phase.flow_pairs: must be lower_upper or all");
  }
  if (encoder_mode != "mlp" && encoder_mode != "identity") {
    fail("encoder.mode: must be mlp or identity");
  }
  if (latent_dim < 1) fail("encoder.latent_dim: must be >= 1");
  for (Index h : hidden_dims) {
    if (h < 1) fail("encoder.hidden_dims: widths must be >= 1");
  }
  if (learning_rate <= 0.0) fail("train.learning_rate: must be > 0");
  if (pretrain_epochs < 0 || stage1_epochs < 0 || stage2_epochs < 0) {
    fail("train epochs: must be >= 0");
  }
  if (refresh_period < 0) fail("train.refresh_period: must be >= 0");
  if (alpha <= 0.0) fail("train.alpha: must be > 0");
  if (lambda1 < 0.0 || lambda2 < 0.0 || lambda_c < 0.0) {
    fail("train.lambda*: must be >= 0");
  }
  if (tau_con <= 0.0) fail("train.tau_con: must be > 0");
  if (seeds < 1) fail("seeds: must be >= 1");
  if (sweep_lambda1.empty() || sweep_lambda2.empty()) {
    fail("sweep.lambda*: grids must be non-empty");
  }
  if (fig1_cycle_size < 2) fail("fig1.cycle_size: must be >= 2");
}

std::string RunConfig::to_toml() const {
  std::ostringstream out;
  auto num = [](double x) { return csv::format_double(x); };
  auto int_list = [](const std::vector<Index>& xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(xs[i]);
    }
    return s;
  };
  auto double_list = [&](const std::vector<double>& xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (i) s += ",";
      s += num(xs[i]);
    }
    return s;
  };
  out << "dataset.path = \"" << dataset_path << "\"\n";
  out << "dataset.normalize = " << (normalize ? "true" : "false") << "\n";
  out << "synthetic.n = " << synthetic_n << "\n";
  out << "synthetic.views = " << synthetic_views << "\n";
  out << "synthetic.clusters = " << synthetic_clusters << "\n";
  out << "synthetic.view_dims = " << int_list(synthetic_view_dims) << "\n";
  out << "synthetic.cluster_spread = " << num(synthetic_cluster_spread) << "\n";
  out << "synthetic.conflict_rate = " << num(synthetic_conflict_rate) << "\n";
  out << "synthetic.noise_sigma = " << num(synthetic_noise_sigma) << "\n";
  out << "clusters = " << clusters << "\n";
  out << "anchors.per_view = " << anchors_per_view << "\n";
  out << "anchors.gamma = " << num(gamma) << "\n";
  out << "anchors.top_r = " << top_r << "\n";
  out << "ricci.tau = " << num(ricci_tau) << "\n";
  out << "ricci.iterations = " << ricci_iterations << "\n";
  out << "ricci.flip_sign = " << (ricci_flip_sign ? "true" : "false") << "\n";
  out << "phase.q = " << num(q) << "\n";
  out << "phase.scheme = \"" << phase_scheme << "\"\n";
  out << "phase.flow_pairs = \"" << flow_pairs << "\"\n";
  out << "encoder.mode = \"" << encoder_mode << "\"\n";
  out << "encoder.latent_dim = " << latent_dim << "\n";
  out << "encoder.hidden_dims = " << int_list(hidden_dims) << "\n";
  out << "train.learning_rate = " << num(learning_rate) << "\n";
  out << "train.pretrain_epochs = " << pretrain_epochs << "\n";
  out << "train.stage1_epochs = " << stage1_epochs << "\n";
  out << "train.stage2_epochs = " << stage2_epochs << "\n";
  out << "train.refresh_period = " << refresh_period << "\n";
  out << "train.alpha = " << num(alpha) << "\n";
  out << "train.lambda1 = " << num(lambda1) << "\n";
  out << "train.lambda2 = " << num(lambda2) << "\n";
  out << "train.lambda_c = " << num(lambda_c) << "\n";
  out << "train.tau_con = " << num(tau_con) << "\n";
  out << "seeds = " << seeds << "\n";
  out << "seed_base = " << seed_base << "\n";
  out << "sweep.lambda1 = " << double_list(sweep_lambda1) << "\n";
  out << "sweep.lambda2 = " << double_list(sweep_lambda2) << "\n";
  out << "fig1.cycle_size = " << fig1_cycle_size << "\n";
  out << "fig1.theta = " << num(fig1_theta) << "\n";
  out << "output.dump_spectral = " << (dump_spectral ? "true" : "false") << "\n";
  return out.str();
}

std::vector<std::uint64_t> resolve_seeds(const RunConfig& config,
                                         std::uint64_t seed_offset) {
  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < config.seeds; ++i) {
    seeds.push_back(config.seed_base + seed_offset + static_cast<std::uint64_t>(i));
  }
  return seeds;
}

}  // namespace magspec
