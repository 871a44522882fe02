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

#include <doctest.h>

#include <cmath>

#include "magspec/numerics.hpp"
#include "test_util.hpp"

using namespace magspec;

namespace {

Matrix random_row_stochastic(Index n, Index k, Rng& rng) {
  Matrix q = testutil::random_matrix(n, k, rng, 0.05, 1.0);
  for (Index i = 0; i < n; ++i) q.row(i) /= q.row(i).sum();
  return q;
}

}  // namespace

TEST_CASE("student_t_assign: symmetry, direct evaluation, monotonicity") {
  SUBCASE("equidistant point gets the uniform row") {
    Matrix centers(3, 2);
    centers << 1, 0, -0.5, std::sqrt(3.0) / 2.0, -0.5, -std::sqrt(3.0) / 2.0;
    Matrix point = Matrix::Zero(1, 2);
    const Matrix q = student_t_assign(point, centers, 1.0);
    for (Index j = 0; j < 3; ++j) CHECK(q(0, j) == doctest::Approx(1.0 / 3.0));
  }
  SUBCASE("alpha=1 with squared distances (0, 1) gives (2/3, 1/3)") {
    Matrix centers(2, 1);
    centers << 0.0, 1.0;
    Matrix point = Matrix::Zero(1, 1);
    const Matrix q = student_t_assign(point, centers, 1.0);
    CHECK(q(0, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(q(0, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  }
  SUBCASE("a point at a center dominates that column") {
    Matrix centers(3, 2);
    centers << 0, 0, 10, 10, -9, 4;
    Matrix point = Matrix::Zero(1, 2);
    const Matrix q = student_t_assign(point, centers, 1.0);
    CHECK(q(0, 0) > q(0, 1));
    CHECK(q(0, 0) > q(0, 2));
  }
  SUBCASE("rows sum to one") {
    Rng rng(41);
    const Matrix points = testutil::random_matrix(20, 4, rng);
    const Matrix centers = testutil::random_matrix(5, 4, rng);
    const Matrix q = student_t_assign(points, centers, 1.0);
    for (Index i = 0; i < 20; ++i) {
      CHECK(q.row(i).sum() == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("target_distribution: one-hot and uniform fixpoints, formula oracle") {
  Matrix onehot(3, 2);
  onehot << 1, 0, 0, 1, 1, 0;
  CHECK((target_distribution(onehot) - onehot).cwiseAbs().maxCoeff() < 1e-12);

  const Matrix uniform = Matrix::Constant(4, 3, 1.0 / 3.0);
  CHECK((target_distribution(uniform) - uniform).cwiseAbs().maxCoeff() < 1e-12);

  // Direct formula evaluation on a random 4x3 row-stochastic matrix.
  Rng rng(42);
  const Matrix q = random_row_stochastic(4, 3, rng);
  const Matrix p = target_distribution(q);
  for (Index i = 0; i < 4; ++i) {
    double denom = 0.0;
    for (Index j = 0; j < 3; ++j) denom += q(i, j) * q(i, j) / q.col(j).sum();
    for (Index j = 0; j < 3; ++j) {
      const double expected = (q(i, j) * q(i, j) / q.col(j).sum()) / denom;
      CHECK(p(i, j) == doctest::Approx(expected).epsilon(1e-12));
    }
    CHECK(p.row(i).sum() == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("spec_loss: zero on matched inputs, log 2 hand case, nonnegative") {
  Rng rng(43);
  const Matrix p = random_row_stochastic(6, 3, rng);
  CHECK(spec_loss(p, {p, p}) == doctest::Approx(0.0).epsilon(1e-12));

  Matrix target(1, 2);
  target << 1.0, 0.0;
  Matrix q(1, 2);
  q << 0.5, 0.5;
  CHECK(spec_loss(target, {q}) ==
        doctest::Approx(0.6931471805599453).epsilon(1e-12));

  const Matrix other = random_row_stochastic(6, 3, rng);
  CHECK(spec_loss(p, {other}) >= 0.0);
}

TEST_CASE("sample_laplacian: zero phase gives the lifted real affinity") {
  Rng rng(44);
  CoefficientMatrices coeffs;
  coeffs.concatenated = testutil::random_matrix(6, 15, rng, 0.0, 1.0);
  for (Index c = 0; c < 15; ++c) coeffs.concatenated.col(c) /= coeffs.concatenated.col(c).sum();
  const AnchorHypergraph hyper = build_incidence(coeffs, 3);
  const RefinedAffinity refined = anchor_affinity(hyper, hyper.weights);

  const ComplexMatrix adjacency = refined.affinity.cast<std::complex<double>>();
  const SampleLaplacian sample = sample_laplacian(adjacency, hyper);

  const Matrix lift = hyper.degrees.cwiseInverse().asDiagonal() * hyper.incidence.transpose();
  const Matrix expected = lift * refined.affinity * lift.transpose();
  CHECK((sample.cosine_affinity - expected).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(sample.cosine_affinity.minCoeff() >= 0.0);
}

TEST_CASE("sample_laplacian: a pi phase clips to zero") {
  AnchorHypergraph hyper;
  hyper.incidence = Matrix::Identity(2, 2);
  hyper.weights = Vector::Ones(2);
  hyper.degrees = Vector::Ones(2);
  ComplexMatrix adjacency(2, 2);
  adjacency << std::complex<double>(1, 0), std::complex<double>(-0.5, 0.1),
      std::complex<double>(-0.5, -0.1), std::complex<double>(1, 0);
  const SampleLaplacian sample = sample_laplacian(adjacency, hyper);
  CHECK(sample.cosine_affinity(0, 1) == 0.0);  // Re < 0 truncated
  CHECK(sample.cosine_affinity(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("sample_laplacian: symmetric with eigenvalues in [0, 2]") {
  Rng rng(45);
  CoefficientMatrices coeffs;
  coeffs.concatenated = testutil::random_matrix(8, 25, rng, 0.0, 1.0);
  for (Index c = 0; c < 25; ++c) coeffs.concatenated.col(c) /= coeffs.concatenated.col(c).sum();
  const AnchorHypergraph hyper = build_incidence(coeffs, 3);
  const RefinedAffinity refined = anchor_affinity(hyper, hyper.weights);
  const PhaseMatrix phase = random_phase(refined.affinity, 0.5, 3);
  const MagneticGeometry geometry = magnetic_laplacian(refined.affinity, phase.theta);
  const SampleLaplacian sample = sample_laplacian(geometry.adjacency, hyper);

  CHECK((sample.laplacian - sample.laplacian.transpose()).cwiseAbs().maxCoeff() <
        1e-10);
  const SymmetricEigen eig =
      symmetric_eigs(sample.laplacian, static_cast<int>(sample.laplacian.rows()));
  CHECK(eig.eigenvalues.minCoeff() >= -1e-8);
  CHECK(eig.eigenvalues.maxCoeff() <= 2.0 + 1e-8);

  // tr(Q' L Q) >= 0 for row-stochastic Q.
  const Matrix q = random_row_stochastic(25, 3, rng);
  CHECK((q.cwiseProduct(sample.laplacian * q)).sum() >= -1e-8);

  // Columns proportional to D^{1/2} 1 lie in the null space.
  Matrix null_q(25, 2);
  null_q.col(0) = sample.degree.cwiseSqrt();
  null_q.col(1) = 2.0 * sample.degree.cwiseSqrt();
  const double form = (null_q.cwiseProduct(sample.laplacian * null_q)).sum();
  CHECK(std::abs(form) < 1e-8 * sample.degree.sum());
}

TEST_CASE("geom_loss: exact anchor reconstruction with no smoothing is zero") {
  Rng rng(46);
  const Matrix anchors = testutil::random_matrix(3, 4, rng);  // d x m
  const Matrix coeffs = testutil::random_matrix(4, 7, rng);   // m x n
  const Matrix z = (anchors * coeffs).transpose();            // n x d
  const Matrix q = random_row_stochastic(7, 2, rng);
  const double loss = geom_loss({z}, {anchors}, {coeffs}, {q},
                                Matrix::Identity(7, 7), 0.0, 0.0);
  CHECK(loss == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("contrastive_loss: identical views, orthogonal columns, K=1, V<2") {
  SUBCASE("hand value for K=2, tau=0.5") {
    Matrix q(4, 2);
    q << 1, 0, 1, 0, 0, 1, 0, 1;
    const double loss = contrastive_loss({q, q}, 0.5);
    CHECK(loss == doctest::Approx(0.1269280110429726).epsilon(1e-9));
  }
  SUBCASE("K=1 collapses to zero") {
    Matrix q = Matrix::Ones(5, 1);
    CHECK(contrastive_loss({q, q}, 0.5) == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("single view returns zero with a warning") {
    Matrix q = Matrix::Ones(5, 2) * 0.5;
    CHECK(contrastive_loss({q}, 0.5) == 0.0);
  }
  SUBCASE("nonnegative on random inputs") {
    Rng rng(47);
    const Matrix a = random_row_stochastic(10, 3, rng);
    const Matrix b = random_row_stochastic(10, 3, rng);
    CHECK(contrastive_loss({a, b}, 0.5) >= 0.0);
  }
}

namespace {

// Finite-difference check of stage_loss over every trainable scalar.
void check_stage_gradients(TrainStage stage) {
  Rng rng(48);
  const int num_views = 2;
  const Index n = 6;
  MultiViewDataset data;
  data.n = n;
  data.num_views = num_views;
  data.views.push_back(testutil::random_matrix(n, 3, rng));
  data.views.push_back(testutil::random_matrix(n, 2, rng));

  // Tiny nets: (3->3->2) + mirror decoder per view keeps the parameter
  // count under 200.
  AutoencoderParams nets = make_autoencoders({3, 2}, 2, {3}, 51);
  std::vector<Matrix> centers;
  centers.push_back(testutil::random_matrix(2, 2, rng));
  centers.push_back(testutil::random_matrix(2, 2, rng));

  FixedGeometry geometry;
  geometry.anchor_mats = {testutil::random_matrix(2, 3, rng),
                          testutil::random_matrix(2, 3, rng)};
  geometry.coeff_mats = {testutil::random_matrix(3, n, rng, 0.0, 1.0),
                         testutil::random_matrix(3, n, rng, 0.0, 1.0)};
  Matrix p = testutil::random_matrix(n, 2, rng, 0.05, 1.0);
  for (Index i = 0; i < n; ++i) p.row(i) /= p.row(i).sum();
  geometry.targets = p;
  // A PSD Laplacian-like matrix for the smoothing term.
  const Matrix base = testutil::random_matrix(n, n, rng);
  geometry.cos_laplacian = base.transpose() * base / static_cast<double>(n);

  LossWeights weights;
  weights.lambda1 = 0.7;
  weights.lambda2 = 1.3;
  weights.lambda_c = 0.9;
  weights.gamma = 0.1;
  weights.tau_con = 0.5;

  const StageLossResult analytic =
      stage_loss(nets, centers, data, geometry, weights, stage);

  auto loss_at = [&]() {
    return stage_loss(nets, centers, data, geometry, weights, stage).total;
  };
  const double h = 1e-5;
  auto check_tensor = [&](double* values, const double* grads, std::size_t count) {
    for (std::size_t i = 0; i < count; ++i) {
      const double saved = values[i];
      values[i] = saved + h;
      const double up = loss_at();
      values[i] = saved - h;
      const double down = loss_at();
      values[i] = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double scale = std::max({1.0, std::abs(numeric), std::abs(grads[i])});
      CHECK(std::abs(numeric - grads[i]) / scale < 1e-4);
    }
  };

  for (int v = 0; v < num_views; ++v) {
    const auto vi = static_cast<std::size_t>(v);
    const std::vector<ParamRef> enc = mlp_param_refs(nets.encoders[vi]);
    const std::vector<ConstParamRef> enc_g = mlp_grad_refs(analytic.encoder_grads[vi]);
    for (std::size_t t = 0; t < enc.size(); ++t) {
      check_tensor(enc[t].data, enc_g[t].data, enc[t].size);
    }
    const std::vector<ParamRef> dec = mlp_param_refs(nets.decoders[vi]);
    const std::vector<ConstParamRef> dec_g = mlp_grad_refs(analytic.decoder_grads[vi]);
    for (std::size_t t = 0; t < dec.size(); ++t) {
      check_tensor(dec[t].data, dec_g[t].data, dec[t].size);
    }
    check_tensor(centers[vi].data(), analytic.center_grads[vi].data(),
                 static_cast<std::size_t>(centers[vi].size()));
  }
}

}  // namespace

TEST_CASE("stage_loss: stage-one gradients match finite differences") {
  check_stage_gradients(TrainStage::kStageOne);
}

TEST_CASE("stage_loss: stage-two gradients match finite differences") {
  check_stage_gradients(TrainStage::kStageTwo);
}

namespace {

MultiViewDataset blob_dataset(Index n, double conflict, std::uint64_t seed) {
  SyntheticSpec spec;
  spec.n = n;
  spec.num_views = 3;
  spec.num_clusters = 3;
  spec.view_dims = {6, 6, 6};
  spec.cluster_spread = 0.12;
  spec.noise_sigma = 0.02;
  spec.conflict_rate = conflict;
  spec.seed = seed;
  return minmax_normalize(generate_synthetic(spec));
}

}  // namespace

TEST_CASE("train: degenerate schedule equals spectral clustering on initial U") {
  const MultiViewDataset data = blob_dataset(90, 0.0, 3);
  TrainConfig config;
  config.identity_encoder = true;
  config.pretrain_epochs = 0;
  config.stage1_epochs = 0;
  config.stage2_epochs = 0;
  config.geometry.anchors_per_view = 9;
  config.seed = 5;
  const TrainResult result = train(data, config);
  REQUIRE(result.labels.size() == 90);
  CHECK(result.trace.empty());
  // Clean blobs: labels recover the generating partition.
  int agree = 0;
  // Accuracy under the best permutation is checked in evaluation tests; here
  // determinism is the point.
  const TrainResult again = train(data, config);
  CHECK(again.labels == result.labels);
  for (std::size_t i = 0; i < result.labels.size(); ++i) {
    agree += result.labels[i] == again.labels[i] ? 1 : 0;
  }
  CHECK(agree == 90);
}

TEST_CASE("train: pretraining loss is non-increasing at a small rate") {
  const MultiViewDataset data = blob_dataset(40, 0.0, 7);
  TrainConfig config;
  config.pretrain_epochs = 40;
  config.stage1_epochs = 0;
  config.stage2_epochs = 0;
  config.hidden_dims = {16};
  config.latent_dim = 4;
  config.learning_rate = 1e-4;
  config.seed = 9;
  const TrainResult result = train(data, config);
  REQUIRE(result.trace.size() == 40);
  for (std::size_t i = 1; i < result.trace.size(); ++i) {
    CHECK(result.trace[i].rec <= result.trace[i - 1].rec + 1e-9);
  }
}

TEST_CASE("train: same seed twice gives identical labels and traces") {
  const MultiViewDataset data = blob_dataset(60, 0.1, 11);
  TrainConfig config;
  config.pretrain_epochs = 5;
  config.stage1_epochs = 6;
  config.stage2_epochs = 3;
  config.refresh_period = 3;
  config.hidden_dims = {12};
  config.latent_dim = 4;
  config.geometry.anchors_per_view = 8;
  config.seed = 21;
  const TrainResult a = train(data, config);
  const TrainResult b = train(data, config);
  CHECK(a.labels == b.labels);
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    CHECK(a.trace[i].total == b.trace[i].total);
  }
  CHECK(a.affinity_hash == b.affinity_hash);
}

TEST_CASE("train: row-stochastic and unit-norm invariants hold throughout") {
  const MultiViewDataset data = blob_dataset(60, 0.0, 13);
  TrainConfig config;
  config.pretrain_epochs = 4;
  config.stage1_epochs = 8;
  config.stage2_epochs = 4;
  config.refresh_period = 4;
  config.hidden_dims = {12};
  config.latent_dim = 4;
  config.geometry.anchors_per_view = 8;
  config.seed = 23;
  const TrainResult result = train(data, config);
  CHECK(result.max_row_sum_error < 1e-9);
  CHECK(result.max_unit_norm_error < 1e-9);
}
