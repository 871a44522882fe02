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

#include "magspec/dataset.hpp"

#include <algorithm>
#include <filesystem>

#include "magspec/csv.hpp"
#include "magspec/rng.hpp"

namespace magspec {

namespace fs = std::filesystem;

void MultiViewDataset::validate() const {
  if (views.empty()) throw ShapeError("dataset: no views");
  if (n < 2) throw ShapeError("dataset: need at least 2 samples");
  for (std::size_t v = 0; v < views.size(); ++v) {
    if (views[v].rows() != n) {
      throw ShapeError("dataset: view " + std::to_string(v) + " has " +
                       std::to_string(views[v].rows()) + " rows, expected " +
                       std::to_string(n));
    }
  }
  if (labels) {
    if (static_cast<Index>(labels->size()) != n) {
      throw ShapeError("dataset: labels length mismatch");
    }
    for (int label : *labels) {
      if (label < 0 || label >= num_clusters) {
        throw ShapeError("dataset: label " + std::to_string(label) +
                         " outside [0, " + std::to_string(num_clusters) + ")");
      }
    }
  }
}

void SyntheticSpec::validate() const {
  if (num_views < 1) throw ParameterError("synthetic: need at least one view");
  if (static_cast<int>(view_dims.size()) != num_views) {
    throw ParameterError("synthetic: view_dims size must equal num_views");
  }
  for (Index d : view_dims) {
    if (d < 1) throw ParameterError("synthetic: view dims must be >= 1");
  }
  if (n < num_clusters) {
    throw ParameterError("synthetic: n must be >= num_clusters");
  }
  if (num_clusters < 1) throw ParameterError("synthetic: num_clusters >= 1");
  if (conflict_rate < 0.0 || conflict_rate > 1.0) {
    throw ParameterError("synthetic: conflict_rate must be in [0,1]");
  }
  if (cluster_spread <= 0.0) {
    throw ParameterError("synthetic: cluster_spread must be > 0");
  }
  if (noise_sigma < 0.0) {
    throw ParameterError("synthetic: noise_sigma must be >= 0");
  }
}

MultiViewDataset load_dataset(const std::string& dir) {
  MultiViewDataset data;
  int v = 0;
  while (true) {
    const fs::path path = fs::path(dir) / ("view_" + std::to_string(v) + ".csv");
    if (!fs::exists(path)) break;
    data.views.push_back(csv::read_matrix(path.string()));
    ++v;
  }
  if (data.views.empty()) {
    throw LoadError("no view_0.csv found in " + dir);
  }
  data.num_views = v;
  data.n = data.views.front().rows();
  for (int i = 1; i < v; ++i) {
    if (data.views[static_cast<std::size_t>(i)].rows() != data.n) {
      throw ShapeError("view_" + std::to_string(i) + ".csv has " +
                       std::to_string(data.views[static_cast<std::size_t>(i)].rows()) +
                       " rows, expected " + std::to_string(data.n));
    }
  }

  const fs::path labels_path = fs::path(dir) / "labels.csv";
  if (fs::exists(labels_path)) {
    Labels labels = csv::read_labels(labels_path.string());
    if (static_cast<Index>(labels.size()) != data.n) {
      throw ShapeError("labels.csv has " + std::to_string(labels.size()) +
                       " entries, expected " + std::to_string(data.n));
    }
    int max_label = 0;
    for (int label : labels) {
      if (label < 0) throw ParseError("labels.csv: negative label");
      max_label = std::max(max_label, label);
    }
    data.labels = std::move(labels);
    data.num_clusters = std::max(2, max_label + 1);
  }
  data.validate();
  return data;
}

void save_dataset(const std::string& dir, const MultiViewDataset& dataset) {
  fs::create_directories(dir);
  for (int v = 0; v < dataset.num_views; ++v) {
    const fs::path path = fs::path(dir) / ("view_" + std::to_string(v) + ".csv");
    csv::write_matrix(path.string(), dataset.views[static_cast<std::size_t>(v)]);
  }
  if (dataset.labels) {
    csv::write_labels((fs::path(dir) / "labels.csv").string(), *dataset.labels);
  }
}

MultiViewDataset minmax_normalize(const MultiViewDataset& dataset) {
  MultiViewDataset out = dataset;
  for (Matrix& view : out.views) {
    for (Index c = 0; c < view.cols(); ++c) {
      const double lo = view.col(c).minCoeff();
      const double hi = view.col(c).maxCoeff();
      if (hi > lo) {
        view.col(c) = (view.col(c).array() - lo) / (hi - lo);
      } else {
        view.col(c).setZero();
      }
    }
  }
  return out;
}

MultiViewDataset generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  const Rng master(spec.seed);

  MultiViewDataset data;
  data.n = spec.n;
  data.num_views = spec.num_views;
  data.num_clusters = spec.num_clusters;

  Labels labels(static_cast<std::size_t>(spec.n));
  for (Index i = 0; i < spec.n; ++i) {
    labels[static_cast<std::size_t>(i)] = static_cast<int>(i) % spec.num_clusters;
  }

  // Cluster centers, one matrix per view.
  Rng center_rng = master.child(0xC0);
  std::vector<Matrix> centers;
  centers.reserve(static_cast<std::size_t>(spec.num_views));
  for (int v = 0; v < spec.num_views; ++v) {
    Matrix c(spec.num_clusters, spec.view_dims[static_cast<std::size_t>(v)]);
    for (Index i = 0; i < c.rows(); ++i)
      for (Index j = 0; j < c.cols(); ++j) c(i, j) = center_rng.gaussian();
    centers.push_back(std::move(c));
  }

  // Conflicted sample set: first floor(rate * n) entries of a seeded shuffle.
  // The set only redirects which center a sample draws from in the conflict
  // view; per-view noise streams are untouched, so flipping conflict_rate
  // leaves every non-conflicted row bit-identical.
  const auto n_conflict = static_cast<std::size_t>(
      std::floor(spec.conflict_rate * static_cast<double>(spec.n)));
  Rng conflict_rng = master.child(0xCF);
  std::vector<std::size_t> order = conflict_rng.permutation(static_cast<std::size_t>(spec.n));
  std::vector<bool> conflicted(static_cast<std::size_t>(spec.n), false);
  for (std::size_t i = 0; i < n_conflict; ++i) conflicted[order[i]] = true;

  const int conflict_view = spec.num_views - 1;
  for (int v = 0; v < spec.num_views; ++v) {
    const Index d = spec.view_dims[static_cast<std::size_t>(v)];
    Matrix view(spec.n, d);
    Rng view_rng = master.child(0x10 + static_cast<std::uint64_t>(v));
    for (Index i = 0; i < spec.n; ++i) {
      int k = labels[static_cast<std::size_t>(i)];
      if (v == conflict_view && conflicted[static_cast<std::size_t>(i)] &&
          spec.num_clusters > 1) {
        k = (k + 1) % spec.num_clusters;
      }
      for (Index j = 0; j < d; ++j) {
        const double spread = view_rng.gaussian();
        const double noise = view_rng.gaussian();
        view(i, j) = centers[static_cast<std::size_t>(v)](k, j) +
                     spec.cluster_spread * spread + spec.noise_sigma * noise;
      }
    }
    data.views.push_back(std::move(view));
  }
  data.labels = std::move(labels);
  data.validate();
  return data;
}

}  // namespace magspec
