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

#include "magspec/evaluation.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "magspec/csv.hpp"
#include "magspec/encoder.hpp"
#include "magspec/numerics.hpp"
#include "magspec/rng.hpp"
#include "magspec/training.hpp"

namespace magspec {

namespace {

Matrix contingency(const Labels& predicted, const Labels& truth, int& size) {
  if (predicted.size() != truth.size()) {
    throw ShapeError("metrics: label sequences differ in length");
  }
  if (predicted.empty()) throw ParameterError("metrics: empty labelings");
  int max_label = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i] < 0 || truth[i] < 0) {
      throw ParameterError("metrics: negative label");
    }
    max_label = std::max({max_label, predicted[i], truth[i]});
  }
  size = max_label + 1;
  Matrix table = Matrix::Zero(size, size);
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    table(predicted[i], truth[i]) += 1.0;
  }
  return table;
}

}  // namespace

double clustering_accuracy(const Labels& predicted, const Labels& truth) {
  int k = 0;
  const Matrix table = contingency(predicted, truth, k);
  const std::vector<int> match = hungarian(-table);
  double matched = 0.0;
  for (int i = 0; i < k; ++i) matched += table(i, match[static_cast<std::size_t>(i)]);
  return matched / static_cast<double>(predicted.size());
}

double nmi(const Labels& predicted, const Labels& truth) {
  int k = 0;
  const Matrix table = contingency(predicted, truth, k);
  const double n = static_cast<double>(predicted.size());
  const Vector row = table.rowwise().sum();
  const Vector col = table.colwise().sum().transpose();

  double mutual = 0.0;
  for (Index i = 0; i < k; ++i) {
    for (Index j = 0; j < k; ++j) {
      const double nij = table(i, j);
      if (nij <= 0.0) continue;
      mutual += (nij / n) * std::log(n * nij / (row(i) * col(j)));
    }
  }
  auto entropy = [&](const Vector& counts) {
    double h = 0.0;
    for (Index i = 0; i < counts.size(); ++i) {
      if (counts(i) > 0.0) h -= (counts(i) / n) * std::log(counts(i) / n);
    }
    return h;
  };
  const double denom = 0.5 * (entropy(row) + entropy(col));
  if (denom <= 0.0) return 0.0;  // at least one labeling is constant
  return std::clamp(mutual / denom, 0.0, 1.0);
}

double ari(const Labels& predicted, const Labels& truth) {
  int k = 0;
  const Matrix table = contingency(predicted, truth, k);
  const double n = static_cast<double>(predicted.size());
  auto choose2 = [](double x) { return 0.5 * x * (x - 1.0); };

  double sum_cells = 0.0;
  for (Index i = 0; i < k; ++i)
    for (Index j = 0; j < k; ++j) sum_cells += choose2(table(i, j));
  double sum_rows = 0.0, sum_cols = 0.0;
  for (Index i = 0; i < k; ++i) sum_rows += choose2(table.rowwise().sum()(i));
  for (Index j = 0; j < k; ++j) sum_cols += choose2(table.colwise().sum()(j));

  const double expected = sum_rows * sum_cols / choose2(n);
  const double maximum = 0.5 * (sum_rows + sum_cols);
  const double numerator = sum_cells - expected;
  const double denominator = maximum - expected;
  if (std::abs(denominator) < 1e-15) {
    return std::abs(numerator) < 1e-15 ? 1.0 : 0.0;
  }
  return numerator / denominator;
}

ClusteringMetrics clustering_metrics(const Labels& predicted, const Labels& truth) {
  return {clustering_accuracy(predicted, truth), nmi(predicted, truth),
          ari(predicted, truth)};
}

double eigengap(const Vector& eigenvalues, int k) {
  if (k < 1 || eigenvalues.size() < k + 1) {
    throw ParameterError("eigengap: need at least K+1 eigenvalues");
  }
  return eigenvalues(k) - eigenvalues(k - 1);
}

namespace {

// Orthonormal basis of the column span. Rank-aware: zero or dependent
// columns (e.g. the vanishing imaginary half of a zero-phase embedding) are
// dropped instead of being padded with arbitrary directions.
Matrix orthonormal_span(const Matrix& u) {
  const Matrix gram = u.transpose() * u;
  const double deviation =
      (gram - Matrix::Identity(u.cols(), u.cols())).cwiseAbs().maxCoeff();
  if (deviation <= 1e-6) return u;
  Eigen::JacobiSVD<Matrix> svd(u, Eigen::ComputeThinU);
  const Vector sigma = svd.singularValues();
  const double tol = 1e-10 * std::max(1.0, sigma.size() > 0 ? sigma(0) : 0.0);
  Index rank = 0;
  for (Index j = 0; j < sigma.size(); ++j) {
    if (sigma(j) > tol) ++rank;
  }
  return svd.matrixU().leftCols(std::max<Index>(rank, 1));
}

}  // namespace

double subspace_distance(const Matrix& basis_a, const Matrix& basis_b) {
  if (basis_a.rows() != basis_b.rows()) {
    throw ShapeError("subspace_distance: row count mismatch");
  }
  const Matrix qa = orthonormal_span(basis_a);
  const Matrix qb = orthonormal_span(basis_b);
  // Principal angles between subspaces of (possibly) different dimensions:
  // the smaller dimension many angles are defined.
  Eigen::JacobiSVD<Matrix> svd(qa.transpose() * qb);
  const Index count = std::min(qa.cols(), qb.cols());
  const Vector sigma = svd.singularValues();
  double total = 0.0;
  for (Index j = 0; j < count; ++j) {
    total += std::acos(std::clamp(sigma(j), 0.0, 1.0));
  }
  return total / static_cast<double>(count);
}

AblationReport run_ablation(const MultiViewDataset& dataset,
                            const AblationConfig& config,
                            const std::vector<std::uint64_t>& seeds) {
  if (seeds.empty()) throw ParameterError("run_ablation: need at least one seed");
  const int k = config.num_clusters > 0 ? config.num_clusters : dataset.num_clusters;
  if (k < 1) throw ParameterError("run_ablation: cluster count unknown");

  AblationReport report;
  report.variants = {"real-spec", "mag-spec", "shuffled", "random"};
  const PhaseScheme schemes[] = {PhaseScheme::kZero, PhaseScheme::kNetflow,
                                 PhaseScheme::kShuffled, PhaseScheme::kRandom};

  // Embeddings per (variant, seed) for cross-seed subspace stability.
  std::vector<std::vector<Matrix>> embeddings(report.variants.size());
  std::vector<std::vector<AblationRow>> rows(report.variants.size());

  for (std::uint64_t seed : seeds) {
    const Rng master(seed);

    std::vector<Matrix> latents;
    if (config.identity_encoder) {
      latents = dataset.views;
    } else {
      TrainConfig pre;
      pre.num_clusters = k;
      pre.geometry = config.geometry;
      pre.latent_dim = config.latent_dim;
      pre.hidden_dims = config.hidden_dims;
      pre.learning_rate = config.learning_rate;
      pre.pretrain_epochs = config.pretrain_epochs;
      pre.stage1_epochs = 0;
      pre.stage2_epochs = 0;
      pre.seed = seed;
      const TrainResult pretrained = train(dataset, pre);
      for (int v = 0; v < dataset.num_views; ++v) {
        latents.push_back(encode(pretrained.params, v,
                                 dataset.views[static_cast<std::size_t>(v)]));
      }
    }

    const Backbone backbone =
        build_backbone(latents, k, config.geometry, master.child(0).seed());

    for (std::size_t variant = 0; variant < report.variants.size(); ++variant) {
      const SpectralSignal signal = build_spectral(
          backbone, k, schemes[variant], config.geometry, master.child(1).seed());
      const Matrix& u = signal.embedding.sample_embedding;
      const KMeansResult km = kmeans(u, k, master.child(2).seed());

      AblationRow row;
      row.variant = report.variants[variant];
      row.seed = seed;
      row.eigengap = eigengap(signal.embedding.eigenvalues, k);
      row.inertia = km.inertia;
      row.affinity_hash = backbone.affinity_hash;
      if (dataset.labels) {
        row.metrics = clustering_metrics(km.assignments, *dataset.labels);
      }
      rows[variant].push_back(std::move(row));
      embeddings[variant].push_back(u);
    }
  }

  // Every variant row of one seed must have consumed the identical backbone.
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    for (std::size_t variant = 1; variant < rows.size(); ++variant) {
      if (rows[variant][s].affinity_hash != rows[0][s].affinity_hash) {
        throw ContractError("run_ablation: variants disagree on the backbone");
      }
    }
  }

  // Mean pairwise subspace distance across seeds, per variant.
  for (std::size_t variant = 0; variant < rows.size(); ++variant) {
    std::optional<double> mean_distance;
    if (seeds.size() >= 2) {
      double total = 0.0;
      int pairs = 0;
      for (std::size_t a = 0; a < seeds.size(); ++a) {
        for (std::size_t b = a + 1; b < seeds.size(); ++b) {
          total += subspace_distance(embeddings[variant][a], embeddings[variant][b]);
          ++pairs;
        }
      }
      mean_distance = total / pairs;
    }
    for (AblationRow& row : rows[variant]) {
      row.subspace = mean_distance;
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

void write_ablation_csv(const std::string& path, const AblationReport& report) {
  std::ofstream out(path);
  if (!out) throw LoadError("cannot write " + path);
  out << "variant,seed,acc,nmi,ari,eigengap,subspace,inertia\n";
  for (const AblationRow& row : report.rows) {
    out << row.variant << ',' << row.seed << ',';
    if (row.metrics) {
      out << csv::format_double(row.metrics->acc) << ','
          << csv::format_double(row.metrics->nmi) << ','
          << csv::format_double(row.metrics->ari) << ',';
    } else {
      out << ",,,";
    }
    out << csv::format_double(row.eigengap) << ',';
    if (row.subspace) out << csv::format_double(*row.subspace);
    out << ',' << csv::format_double(row.inertia) << '\n';
  }
}

CycleSpectra fig1_demo(int cycle_size, double theta) {
  if (cycle_size < 2) throw ParameterError("fig1_demo: cycle needs >= 2 nodes");
  const Index m = cycle_size;
  Matrix affinity = Matrix::Zero(m, m);
  Matrix consistent = Matrix::Zero(m, m);
  Matrix alternating = Matrix::Zero(m, m);

  if (cycle_size == 2) {
    // The two parallel edges of a 2-cycle collapse into one.
    affinity(0, 1) = affinity(1, 0) = 1.0;
    consistent(0, 1) = theta;
    consistent(1, 0) = -theta;
    alternating = consistent;
  } else {
    for (int i = 0; i < cycle_size; ++i) {
      const int j = (i + 1) % cycle_size;
      affinity(i, j) = affinity(j, i) = 1.0;
      const double sign = (i % 2 == 0) ? 1.0 : -1.0;
      consistent(i, j) = theta;
      consistent(j, i) = -theta;
      alternating(i, j) = sign * theta;
      alternating(j, i) = -sign * theta;
    }
  }

  CycleSpectra spectra;
  spectra.consistent =
      hermitian_eigs(magnetic_laplacian(affinity, consistent).laplacian,
                     static_cast<int>(m))
          .eigenvalues;
  spectra.alternating =
      hermitian_eigs(magnetic_laplacian(affinity, alternating).laplacian,
                     static_cast<int>(m))
          .eigenvalues;
  return spectra;
}

void write_fig1_csv(const std::string& path, const CycleSpectra& spectra) {
  std::ofstream out(path);
  if (!out) throw LoadError("cannot write " + path);
  out << "index,consistent,alternating\n";
  for (Index i = 0; i < spectra.consistent.size(); ++i) {
    out << i << ',' << csv::format_double(spectra.consistent(i)) << ','
        << csv::format_double(spectra.alternating(i)) << '\n';
  }
}

Matrix reordered_affinity(const Matrix& affinity, const Labels& truth) {
  if (truth.empty()) throw ParameterError("reordered_affinity: missing labels");
  if (affinity.rows() != affinity.cols() ||
      affinity.rows() != static_cast<Index>(truth.size())) {
    throw ShapeError("reordered_affinity: affinity/labels shape mismatch");
  }
  std::vector<Index> order(truth.size());
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return truth[static_cast<std::size_t>(a)] < truth[static_cast<std::size_t>(b)];
  });
  Matrix out(affinity.rows(), affinity.cols());
  for (Index i = 0; i < out.rows(); ++i)
    for (Index j = 0; j < out.cols(); ++j)
      out(i, j) = affinity(order[static_cast<std::size_t>(i)],
                           order[static_cast<std::size_t>(j)]);
  return out;
}

}  // namespace magspec
