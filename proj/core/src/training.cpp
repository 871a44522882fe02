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

#include "magspec/training.hpp"

#include <cmath>
#include <iostream>

#include "magspec/numerics.hpp"
#include "magspec/rng.hpp"
#include "view_parallel.hpp"

namespace magspec {

using internal::for_each_view;

namespace {
constexpr double kLogFloor = 1e-12;
}

Matrix student_t_assign(const Matrix& points, const Matrix& centers, double alpha,
                        StudentTCache* cache) {
  if (alpha <= 0.0) throw ParameterError("student_t_assign: alpha must be > 0");
  if (points.cols() != centers.cols()) {
    throw ShapeError("student_t_assign: dimension mismatch");
  }
  // Pairwise squared distances via the Gram expansion; clamp tiny negative
  // roundoff.
  Matrix dist2 = (-2.0 * points * centers.transpose());
  dist2.colwise() += points.rowwise().squaredNorm();
  dist2.rowwise() += centers.rowwise().squaredNorm().transpose();
  dist2 = dist2.cwiseMax(0.0);

  Matrix kernel;
  if (alpha == 1.0) {
    kernel = (1.0 + dist2.array()).inverse().matrix();
  } else {
    const double exponent = -(alpha + 1.0) / 2.0;
    kernel = (1.0 + dist2.array() / alpha).pow(exponent).matrix();
  }
  Matrix q = kernel.array().colwise() /
             kernel.rowwise().sum().array().max(kLogFloor);
  if (cache) {
    cache->points = points;
    cache->centers = centers;
    cache->kernel = kernel;
    cache->q = q;
    cache->alpha = alpha;
  }
  return q;
}

void student_t_backward(const StudentTCache& cache, const Matrix& d_q,
                        Matrix* d_points, Matrix* d_centers) {
  const Matrix& points = cache.points;
  const Matrix& centers = cache.centers;
  const Matrix& kernel = cache.kernel;
  const Matrix& q = cache.q;
  const double alpha = cache.alpha;
  const Index n = points.rows();
  const Index k = centers.rows();

  // Softmax-style backward through the row normalization.
  const Vector row_sums = kernel.rowwise().sum().cwiseMax(kLogFloor);
  const Vector weighted = (d_q.cwiseProduct(q)).rowwise().sum();
  Matrix d_kernel =
      (d_q.colwise() - weighted).array().colwise() / row_sums.array();

  // kernel = base^{-(alpha+1)/2} with base = 1 + d^2/alpha, so
  // d kernel / d d^2 = -((alpha+1)/(2 alpha)) kernel / base, and
  // base = kernel^{-2/(alpha+1)}.
  const double coeff = -(alpha + 1.0) / (2.0 * alpha);
  Matrix d_dist2(n, k);
  if (alpha == 1.0) {
    d_dist2 = coeff * d_kernel.cwiseProduct(kernel.cwiseProduct(kernel));
  } else {
    const Matrix base = kernel.array().pow(-2.0 / (alpha + 1.0)).matrix();
    d_dist2 = coeff * d_kernel.cwiseProduct(kernel.cwiseQuotient(base));
  }

  if (d_points) {
    *d_points += 2.0 * (d_dist2.rowwise().sum().asDiagonal() * points -
                        d_dist2 * centers);
  }
  if (d_centers) {
    *d_centers += 2.0 * (d_dist2.colwise().sum().asDiagonal() * centers -
                         d_dist2.transpose() * points);
  }
}

Matrix target_distribution(const Matrix& q) {
  const Vector col_sums = q.colwise().sum().transpose();
  Matrix t = q.array().square().matrix();
  for (Index j = 0; j < q.cols(); ++j) {
    t.col(j) /= std::max(col_sums(j), kLogFloor);
  }
  const Vector row_sums = t.rowwise().sum().cwiseMax(kLogFloor);
  return t.array().colwise() / row_sums.array();
}

double spec_loss(const Matrix& targets, const std::vector<Matrix>& view_q,
                 std::vector<Matrix>* d_q) {
  double loss = 0.0;
  if (d_q) d_q->assign(view_q.size(), Matrix());
  for (std::size_t v = 0; v < view_q.size(); ++v) {
    const Matrix& q = view_q[v];
    if (q.rows() != targets.rows() || q.cols() != targets.cols()) {
      throw ShapeError("spec_loss: Q^(v) shape mismatch");
    }
    Matrix grad = Matrix::Zero(q.rows(), q.cols());
    for (Index i = 0; i < q.rows(); ++i) {
      for (Index j = 0; j < q.cols(); ++j) {
        const double p = targets(i, j);
        if (p <= 0.0) continue;
        const double qv = std::max(q(i, j), kLogFloor);
        loss += p * (std::log(std::max(p, kLogFloor)) - std::log(qv));
        grad(i, j) = -p / qv;
      }
    }
    if (d_q) (*d_q)[v] = std::move(grad);
  }
  return loss;
}

SampleLaplacian sample_laplacian(const ComplexMatrix& adjacency,
                                 const AnchorHypergraph& hypergraph) {
  const Matrix& h = hypergraph.incidence;
  const Vector& delta = hypergraph.degrees;
  if (adjacency.rows() != h.rows()) {
    throw ShapeError("sample_laplacian: adjacency/incidence mismatch");
  }
  const Matrix lift = delta.cwiseInverse().asDiagonal() * h.transpose();  // n x m

  SampleLaplacian out;
  out.sample_adjacency = lift * adjacency * lift.transpose();
  // |z| cos(arg z) = Re(z); clip negatives, then symmetrize exactly.
  Matrix s = out.sample_adjacency.real().cwiseMax(0.0);
  out.cosine_affinity = 0.5 * (s + s.transpose());

  const Index n = out.cosine_affinity.rows();
  out.degree = out.cosine_affinity.rowwise().sum();
  Vector inv_sqrt(n);
  for (Index i = 0; i < n; ++i) {
    if (out.degree(i) <= 0.0) {
      out.degree(i) = 1.0;
      inv_sqrt(i) = 1.0;
    } else {
      inv_sqrt(i) = 1.0 / std::sqrt(out.degree(i));
    }
  }
  out.laplacian = Matrix::Identity(n, n) -
                  inv_sqrt.asDiagonal() * out.cosine_affinity * inv_sqrt.asDiagonal();
  out.laplacian = (0.5 * (out.laplacian + out.laplacian.transpose())).eval();
  return out;
}

double geom_loss(const std::vector<Matrix>& latents,
                 const std::vector<Matrix>& anchor_mats,
                 const std::vector<Matrix>& coeff_mats,
                 const std::vector<Matrix>& view_q, const Matrix& cos_laplacian,
                 double gamma, double lambda_c, std::vector<Matrix>* d_latents,
                 std::vector<Matrix>* d_q) {
  const std::size_t num_views = latents.size();
  if (anchor_mats.size() != num_views || coeff_mats.size() != num_views ||
      view_q.size() != num_views) {
    throw ShapeError("geom_loss: per-view sequence length mismatch");
  }
  if (d_latents) d_latents->assign(num_views, Matrix());
  if (d_q) d_q->assign(num_views, Matrix());

  double loss = 0.0;
  for (std::size_t v = 0; v < num_views; ++v) {
    const Matrix& z = latents[v];
    const Matrix reconstruction = (anchor_mats[v] * coeff_mats[v]).transpose();
    if (reconstruction.rows() != z.rows() || reconstruction.cols() != z.cols()) {
      throw ShapeError("geom_loss: anchor reconstruction shape mismatch");
    }
    const Matrix residual = z - reconstruction;
    loss += residual.squaredNorm() + gamma * coeff_mats[v].squaredNorm();
    if (d_latents) (*d_latents)[v] = 2.0 * residual;

    const Matrix& q = view_q[v];
    const double scale =
        lambda_c / (static_cast<double>(q.rows()) * static_cast<double>(q.cols()));
    const Matrix lq = cos_laplacian * q;
    loss += scale * (q.cwiseProduct(lq)).sum();
    if (d_q) (*d_q)[v] = 2.0 * scale * lq;
  }
  return loss;
}

double contrastive_loss(const std::vector<Matrix>& view_q, double tau,
                        std::vector<Matrix>* d_q) {
  if (tau <= 0.0) throw ParameterError("contrastive_loss: tau must be > 0");
  const std::size_t num_views = view_q.size();
  if (d_q) {
    d_q->clear();
    for (const Matrix& q : view_q) d_q->push_back(Matrix::Zero(q.rows(), q.cols()));
  }
  if (num_views < 2) {
    static bool warned = false;
    if (!warned) {
      std::cerr << "warning: contrastive loss undefined for a single view; "
                   "returning 0\n";
      warned = true;
    }
    return 0.0;
  }

  const Index k = view_q.front().cols();
  const double pair_weight =
      1.0 / (static_cast<double>(num_views) * static_cast<double>(num_views - 1));

  double loss = 0.0;
  for (std::size_t v1 = 0; v1 < num_views; ++v1) {
    for (std::size_t v2 = 0; v2 < num_views; ++v2) {
      if (v1 == v2) continue;
      const Matrix& a = view_q[v1];
      const Matrix& b = view_q[v2];
      Vector norm_a(k), norm_b(k);
      for (Index j = 0; j < k; ++j) {
        norm_a(j) = std::max(a.col(j).norm(), kLogFloor);
        norm_b(j) = std::max(b.col(j).norm(), kLogFloor);
      }
      Matrix sim(k, k);
      for (Index j = 0; j < k; ++j)
        for (Index c = 0; c < k; ++c)
          sim(j, c) = a.col(j).dot(b.col(c)) / (norm_a(j) * norm_b(c));

      // Row-wise softmax cross-entropy with the diagonal as the target.
      Matrix d_sim = Matrix::Zero(k, k);
      double pair_loss = 0.0;
      for (Index j = 0; j < k; ++j) {
        const Vector logits = sim.row(j).transpose() / tau;
        const double peak = logits.maxCoeff();
        const Vector ex = (logits.array() - peak).exp();
        const double denom = ex.sum();
        pair_loss += -(logits(j) - (peak + std::log(denom)));
        if (d_q) {
          for (Index c = 0; c < k; ++c) {
            const double soft = ex(c) / denom;
            d_sim(j, c) = (soft - (c == j ? 1.0 : 0.0)) / (static_cast<double>(k) * tau);
          }
        }
      }
      loss += pair_weight * pair_loss / static_cast<double>(k);

      if (d_q) {
        Matrix& da = (*d_q)[v1];
        Matrix& db = (*d_q)[v2];
        for (Index j = 0; j < k; ++j) {
          for (Index c = 0; c < k; ++c) {
            const double g = pair_weight * d_sim(j, c);
            if (g == 0.0) continue;
            da.col(j) += g * (b.col(c) / (norm_a(j) * norm_b(c)) -
                              sim(j, c) * a.col(j) / (norm_a(j) * norm_a(j)));
            db.col(c) += g * (a.col(j) / (norm_a(j) * norm_b(c)) -
                              sim(j, c) * b.col(c) / (norm_b(c) * norm_b(c)));
          }
        }
      }
    }
  }
  return loss;
}

StageLossResult stage_loss(const AutoencoderParams& nets,
                           const std::vector<Matrix>& view_centers,
                           const MultiViewDataset& dataset,
                           const FixedGeometry& geometry, const LossWeights& weights,
                           TrainStage stage) {
  const int num_views = dataset.num_views;
  StageLossResult result;

  std::vector<MlpCache> enc_caches(static_cast<std::size_t>(num_views));
  std::vector<MlpCache> dec_caches(static_cast<std::size_t>(num_views));
  std::vector<StudentTCache> q_caches(static_cast<std::size_t>(num_views));
  std::vector<Matrix> latents(static_cast<std::size_t>(num_views));
  std::vector<Matrix> d_latents(static_cast<std::size_t>(num_views));

  const bool with_assignments = stage != TrainStage::kPretrain;

  // Forward pass and reconstruction backward, one view per thread.
  result.decoder_grads.resize(static_cast<std::size_t>(num_views));
  if (with_assignments) result.view_q.resize(static_cast<std::size_t>(num_views));
  std::vector<double> rec_per_view(static_cast<std::size_t>(num_views), 0.0);
  for_each_view(num_views, [&](int v) {
    const auto vi = static_cast<std::size_t>(v);
    const Matrix& x = dataset.views[vi];
    latents[vi] = mlp_forward(nets.encoders[vi], x, &enc_caches[vi]);
    const Matrix xhat = mlp_forward(nets.decoders[vi], latents[vi], &dec_caches[vi]);
    const Matrix residual = xhat - x;
    rec_per_view[vi] = residual.squaredNorm();

    MlpGrads dec_grads = mlp_zero_grads(nets.decoders[vi]);
    d_latents[vi] = mlp_backward(nets.decoders[vi], dec_caches[vi], 2.0 * residual,
                                 dec_grads);
    result.decoder_grads[vi] = std::move(dec_grads);

    if (with_assignments) {
      result.view_q[vi] = student_t_assign(latents[vi], view_centers[vi],
                                           weights.alpha, &q_caches[vi]);
    }
  });
  for (double value : rec_per_view) result.rec += value;

  result.total = result.rec;
  result.center_grads.assign(static_cast<std::size_t>(num_views), Matrix());
  for (int v = 0; v < num_views; ++v) {
    const auto vi = static_cast<std::size_t>(v);
    if (with_assignments) {
      result.center_grads[vi] =
          Matrix::Zero(view_centers[vi].rows(), view_centers[vi].cols());
    }
  }

  if (with_assignments) {
    std::vector<Matrix> d_q_total(static_cast<std::size_t>(num_views));
    for (int v = 0; v < num_views; ++v) {
      const auto vi = static_cast<std::size_t>(v);
      d_q_total[vi] = Matrix::Zero(result.view_q[vi].rows(), result.view_q[vi].cols());
    }

    std::vector<Matrix> d_latents_geom, d_q_geom;
    result.geom = geom_loss(latents, geometry.anchor_mats, geometry.coeff_mats,
                            result.view_q, geometry.cos_laplacian, weights.gamma,
                            weights.lambda_c, &d_latents_geom, &d_q_geom);
    result.total += weights.lambda1 * result.geom;
    for (int v = 0; v < num_views; ++v) {
      const auto vi = static_cast<std::size_t>(v);
      d_latents[vi] += weights.lambda1 * d_latents_geom[vi];
      d_q_total[vi] += weights.lambda1 * d_q_geom[vi];
    }

    if (stage == TrainStage::kStageOne) {
      std::vector<Matrix> d_q_spec;
      result.spec = spec_loss(geometry.targets, result.view_q, &d_q_spec);
      result.total += weights.lambda2 * result.spec;
      for (int v = 0; v < num_views; ++v) {
        const auto vi = static_cast<std::size_t>(v);
        d_q_total[vi] += weights.lambda2 * d_q_spec[vi];
      }
    } else {
      std::vector<Matrix> d_q_con;
      result.con = contrastive_loss(result.view_q, weights.tau_con, &d_q_con);
      result.total += result.con;
      for (int v = 0; v < num_views; ++v) {
        const auto vi = static_cast<std::size_t>(v);
        d_q_total[vi] += d_q_con[vi];
      }
    }

    for_each_view(num_views, [&](int v) {
      const auto vi = static_cast<std::size_t>(v);
      student_t_backward(q_caches[vi], d_q_total[vi], &d_latents[vi],
                         &result.center_grads[vi]);
    });
  }

  result.encoder_grads.resize(static_cast<std::size_t>(num_views));
  for_each_view(num_views, [&](int v) {
    const auto vi = static_cast<std::size_t>(v);
    MlpGrads enc_grads = mlp_zero_grads(nets.encoders[vi]);
    mlp_backward(nets.encoders[vi], enc_caches[vi], d_latents[vi], enc_grads);
    result.encoder_grads[vi] = std::move(enc_grads);
  });
  return result;
}

namespace {

struct GeometryState {
  Backbone backbone;
  SpectralSignal signal;
  FixedGeometry fixed;
  Matrix shared_centers;
  Matrix shared_q;
  Matrix cosine_affinity;
};

double max_row_sum_error(const Matrix& rows) {
  return (rows.rowwise().sum().array() - 1.0).abs().maxCoeff();
}

}  // namespace

TrainResult train(const MultiViewDataset& dataset, const TrainConfig& config) {
  dataset.validate();
  const int k = config.num_clusters > 0 ? config.num_clusters : dataset.num_clusters;
  if (k < 1) {
    throw ParameterError("train: cluster count unknown (no labels, no override)");
  }
  const int num_views = dataset.num_views;
  const Rng master(config.seed);

  TrainResult result;

  int pretrain_epochs = config.pretrain_epochs;
  int stage1_epochs = config.stage1_epochs;
  int stage2_epochs = config.stage2_epochs;

  AutoencoderParams nets;
  if (config.identity_encoder) {
    nets = make_identity_autoencoders(num_views);
    if (pretrain_epochs + stage1_epochs + stage2_epochs > 0) {
      std::cerr << "warning: identity encoder has no parameters; skipping "
                   "training epochs\n";
      pretrain_epochs = stage1_epochs = stage2_epochs = 0;
    }
  } else {
    std::vector<Index> view_dims;
    for (const Matrix& x : dataset.views) view_dims.push_back(x.cols());
    nets = make_autoencoders(view_dims, config.latent_dim, config.hidden_dims,
                             master.child(1).seed());
  }

  auto check_finite = [](double loss, int stage, int epoch) {
    if (!std::isfinite(loss)) {
      throw DivergenceError("non-finite loss at stage " + std::to_string(stage) +
                            " epoch " + std::to_string(epoch));
    }
  };

  // --- Pretraining on the reconstruction objective ---
  {
    AdamState adam;
    adam.config.learning_rate = config.learning_rate;
    for (int epoch = 1; epoch <= pretrain_epochs; ++epoch) {
      const ReconstructionResult rec = reconstruction_loss(nets, dataset);
      check_finite(rec.loss, 0, epoch);
      std::vector<ParamRef> params;
      std::vector<ConstParamRef> grads;
      for (int v = 0; v < num_views; ++v) {
        const auto vi = static_cast<std::size_t>(v);
        for (ParamRef r : mlp_param_refs(nets.encoders[vi])) params.push_back(r);
        for (ParamRef r : mlp_param_refs(nets.decoders[vi])) params.push_back(r);
        for (ConstParamRef r : mlp_grad_refs(rec.encoder_grads[vi])) grads.push_back(r);
        for (ConstParamRef r : mlp_grad_refs(rec.decoder_grads[vi])) grads.push_back(r);
      }
      adam_step(params, grads, adam);
      result.trace.push_back({epoch, 0, rec.loss, 0.0, 0.0, 0.0, rec.loss});
    }
  }

  auto encode_all = [&]() {
    std::vector<Matrix> latents;
    for (int v = 0; v < num_views; ++v) {
      latents.push_back(
          mlp_forward(nets.encoders[static_cast<std::size_t>(v)],
                      dataset.views[static_cast<std::size_t>(v)]));
    }
    return latents;
  };

  int build_counter = 0;
  auto build_geometry = [&](GeometryState& state) {
    const Rng build_rng = master.child(100 + static_cast<std::uint64_t>(build_counter));
    ++build_counter;
    const std::vector<Matrix> latents = encode_all();
    state.backbone = build_backbone(latents, k, config.geometry,
                                    build_rng.child(0).seed());
    state.signal = build_spectral(state.backbone, k, config.geometry.scheme,
                                  config.geometry, build_rng.child(1).seed());

    const Matrix& u = state.signal.embedding.sample_embedding;
    state.shared_centers =
        kmeans(u, k, build_rng.child(2).seed()).centers;
    state.shared_q = student_t_assign(u, state.shared_centers, config.weights.alpha);

    state.fixed.targets = target_distribution(state.shared_q);
    const SampleLaplacian sample =
        sample_laplacian(state.signal.geometry.adjacency, state.backbone.hypergraph);
    state.fixed.cos_laplacian = sample.laplacian;
    state.cosine_affinity = sample.cosine_affinity;
    state.fixed.anchor_mats = state.backbone.anchors.anchors;
    state.fixed.coeff_mats = state.backbone.coefficients.per_view;

    // Normalization invariants of the freshly built signal.
    result.max_row_sum_error =
        std::max({result.max_row_sum_error, max_row_sum_error(state.shared_q),
                  max_row_sum_error(state.fixed.targets)});
    for (Index i = 0; i < u.rows(); ++i) {
      const double norm = u.row(i).norm();
      if (norm > 0.0) {
        result.max_unit_norm_error =
            std::max(result.max_unit_norm_error, std::abs(norm - 1.0));
      }
    }
  };

  GeometryState geometry;
  const bool needs_training_geometry = stage1_epochs + stage2_epochs > 0;
  if (needs_training_geometry) build_geometry(geometry);

  // Per-view cluster heads, trained jointly with the networks from stage I on.
  std::vector<Matrix> view_centers(static_cast<std::size_t>(num_views));
  if (needs_training_geometry) {
    const std::vector<Matrix> latents = encode_all();
    const Rng head_rng = master.child(7);
    for (int v = 0; v < num_views; ++v) {
      const auto vi = static_cast<std::size_t>(v);
      view_centers[vi] =
          kmeans(latents[vi], k, head_rng.child(static_cast<std::uint64_t>(v)).seed())
              .centers;
    }
  }

  AdamState adam;
  adam.config.learning_rate = config.learning_rate;
  auto run_stage = [&](TrainStage stage, int epochs, int stage_tag) {
    for (int epoch = 1; epoch <= epochs; ++epoch) {
      if (stage == TrainStage::kStageOne && config.refresh_period > 0 && epoch > 1 &&
          (epoch - 1) % config.refresh_period == 0) {
        build_geometry(geometry);
      }
      const StageLossResult losses =
          stage_loss(nets, view_centers, dataset, geometry.fixed, config.weights, stage);
      check_finite(losses.total, stage_tag, epoch);

      std::vector<ParamRef> params;
      std::vector<ConstParamRef> grads;
      for (int v = 0; v < num_views; ++v) {
        const auto vi = static_cast<std::size_t>(v);
        for (ParamRef r : mlp_param_refs(nets.encoders[vi])) params.push_back(r);
        for (ParamRef r : mlp_param_refs(nets.decoders[vi])) params.push_back(r);
        for (ConstParamRef r : mlp_grad_refs(losses.encoder_grads[vi]))
          grads.push_back(r);
        for (ConstParamRef r : mlp_grad_refs(losses.decoder_grads[vi]))
          grads.push_back(r);
        params.push_back({view_centers[vi].data(),
                          static_cast<std::size_t>(view_centers[vi].size())});
        grads.emplace_back(losses.center_grads[vi].data(),
                           static_cast<std::size_t>(losses.center_grads[vi].size()));
      }
      adam_step(params, grads, adam);

      for (const Matrix& q : losses.view_q) {
        result.max_row_sum_error =
            std::max(result.max_row_sum_error, max_row_sum_error(q));
      }
      result.trace.push_back({epoch, stage_tag, losses.rec, losses.geom, losses.spec,
                              losses.con, losses.total});
    }
  };

  run_stage(TrainStage::kStageOne, stage1_epochs, 1);
  run_stage(TrainStage::kStageTwo, stage2_epochs, 2);

  // Final spectral signal from the trained latents; k-means yields labels.
  build_geometry(geometry);
  const Matrix& u = geometry.signal.embedding.sample_embedding;
  const KMeansResult final_km = kmeans(u, k, master.child(999).seed());
  result.labels = final_km.assignments;
  result.embedding = u;
  result.cosine_affinity = std::move(geometry.cosine_affinity);
  result.theta = geometry.signal.phase.theta;
  result.eigenvalues = geometry.signal.embedding.eigenvalues;
  result.params = std::move(nets);
  result.view_centers = std::move(view_centers);
  result.affinity_hash = geometry.backbone.affinity_hash;
  return result;
}

}  // namespace magspec
