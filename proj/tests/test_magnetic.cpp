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

#include "magspec/magnetic.hpp"

#include <doctest.h>

#include <cmath>

#include "magspec/dataset.hpp"
#include "magspec/evaluation.hpp"
#include "magspec/numerics.hpp"
#include "magspec/pipeline.hpp"
#include "test_util.hpp"

using namespace magspec;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Two views, two anchors each; sample s has top anchor tops[v][s].
CoefficientMatrices tops_to_coefficients(const std::vector<std::vector<int>>& tops,
                                         int anchors_per_view, AnchorSet& anchors) {
  const int num_views = static_cast<int>(tops.size());
  const auto n = static_cast<Index>(tops.front().size());
  anchors.offsets.clear();
  anchors.anchors.clear();
  anchors.offsets.push_back(0);
  CoefficientMatrices coeffs;
  for (int v = 0; v < num_views; ++v) {
    Matrix c = Matrix::Constant(anchors_per_view, n, 1e-3);
    for (Index s = 0; s < n; ++s) {
      c(tops[static_cast<std::size_t>(v)][static_cast<std::size_t>(s)], s) = 1.0;
    }
    for (Index s = 0; s < n; ++s) c.col(s) /= c.col(s).sum();
    coeffs.per_view.push_back(c);
    anchors.anchors.push_back(Matrix::Zero(2, anchors_per_view));
    anchors.offsets.push_back(anchors.offsets.back() + anchors_per_view);
  }
  const int m = anchors.offsets.back();
  coeffs.concatenated = Matrix::Zero(m, n);
  for (int v = 0; v < num_views; ++v) {
    coeffs.concatenated.middleRows(anchors.offsets[static_cast<std::size_t>(v)],
                                   anchors_per_view) =
        coeffs.per_view[static_cast<std::size_t>(v)];
  }
  return coeffs;
}

}  // namespace

TEST_CASE("flow_matrix: single view has no flow") {
  AnchorSet anchors;
  const CoefficientMatrices coeffs = tops_to_coefficients({{0, 1, 0}}, 2, anchors);
  const FlowMatrices flows = flow_matrix(coeffs, anchors);
  CHECK(flows.flow.cwiseAbs().maxCoeff() == 0.0);
  CHECK(flows.netflow.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("flow_matrix: one sample, two views") {
  AnchorSet anchors;
  const CoefficientMatrices coeffs = tops_to_coefficients({{1}, {0}}, 2, anchors);
  const FlowMatrices flows = flow_matrix(coeffs, anchors);
  // Top anchors: global 1 (view 0) and global 2 (view 1).
  CHECK(flows.flow(1, 2) == 1.0);
  CHECK(flows.flow.sum() == 1.0);
  CHECK(flows.netflow(1, 2) == 1.0);
  CHECK(flows.netflow(2, 1) == -1.0);
}

TEST_CASE("flow_matrix: netflow is antisymmetric; all-pairs mode cancels") {
  Rng rng(33);
  std::vector<std::vector<int>> tops(3, std::vector<int>(20));
  for (auto& view : tops) {
    for (int& t : view) t = static_cast<int>(rng.uniform_index(4));
  }
  AnchorSet anchors;
  const CoefficientMatrices coeffs = tops_to_coefficients(tops, 4, anchors);
  const FlowMatrices flows = flow_matrix(coeffs, anchors);
  CHECK((flows.netflow + flows.netflow.transpose()).cwiseAbs().maxCoeff() == 0.0);

  const FlowMatrices all_pairs = flow_matrix(coeffs, anchors, FlowPairs::kAll);
  CHECK(all_pairs.netflow.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("phase_from_flow: q=0 and zero netflow give the zero phase") {
  Rng rng(34);
  const Matrix affinity = testutil::random_affinity(5, 0.8, rng);
  Matrix netflow = Matrix::Zero(5, 5);
  netflow(0, 1) = 2.0;
  netflow(1, 0) = -2.0;

  CHECK(phase_from_flow(netflow, affinity, 0.0).theta.cwiseAbs().maxCoeff() == 0.0);
  CHECK(phase_from_flow(Matrix::Zero(5, 5), affinity, 0.25).theta.cwiseAbs().maxCoeff() ==
        0.0);
}

TEST_CASE("phase_from_flow: peak entry scales to beta") {
  Matrix affinity = Matrix::Ones(3, 3);
  Matrix netflow = Matrix::Zero(3, 3);
  netflow(0, 1) = 4.0;
  netflow(1, 0) = -4.0;
  const PhaseMatrix phase = phase_from_flow(netflow, affinity, 0.25);
  CHECK(phase.theta(0, 1) == doctest::Approx(0.7853981633972519).epsilon(1e-12));
  CHECK(phase.theta(1, 0) == doctest::Approx(-0.7853981633972519).epsilon(1e-12));
  CHECK(phase.beta == doctest::Approx(kPi * 0.25));
}

TEST_CASE("phase_from_flow: masked to the affinity support") {
  Matrix affinity = Matrix::Zero(3, 3);
  affinity(0, 1) = affinity(1, 0) = 1.0;
  Matrix netflow = Matrix::Zero(3, 3);
  netflow(0, 1) = 1.0;
  netflow(1, 0) = -1.0;
  netflow(0, 2) = 3.0;  // unsupported edge
  netflow(2, 0) = -3.0;
  const PhaseMatrix phase = phase_from_flow(netflow, affinity, 0.5);
  CHECK(phase.theta(0, 2) == 0.0);
  CHECK(phase.theta(2, 0) == 0.0);
  CHECK(phase.theta(0, 1) > 0.0);
  CHECK((phase.theta + phase.theta.transpose()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("shuffled_phase: n=1 equals the netflow phase") {
  AnchorSet anchors;
  const CoefficientMatrices coeffs = tops_to_coefficients({{1}, {0}}, 2, anchors);
  Matrix affinity = Matrix::Ones(4, 4);
  const PhaseMatrix netflow =
      phase_from_flow(flow_matrix(coeffs, anchors).netflow, affinity, 0.25);
  const PhaseMatrix shuffled = shuffled_phase(coeffs, anchors, affinity, 0.25, 7);
  CHECK((netflow.theta - shuffled.theta).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("shuffled_phase: decorrelates from the netflow phase on structure") {
  // Blob-structured tops: cross-view agreement is systematic, so shuffling
  // the correspondence materially changes the phase. The support mask keeps
  // both phases on the co-selection pattern, which puts a floor on the
  // residual correlation; the decorrelation shows up as a clearly reduced
  // cosine, not a sign flip.
  SyntheticSpec spec;
  spec.n = 200;
  spec.num_views = 2;
  spec.num_clusters = 8;
  spec.view_dims = {3, 3};
  spec.cluster_spread = 0.25;
  spec.noise_sigma = 0.0;
  spec.conflict_rate = 0.3;
  spec.seed = 21;
  const MultiViewDataset data = generate_synthetic(spec);
  GeometryOptions options;
  options.anchors_per_view = 50;
  const Backbone backbone = build_backbone(data.views, 8, options, 3);

  const PhaseMatrix netflow = phase_from_flow(
      flow_matrix(backbone.coefficients, backbone.anchors).netflow,
      backbone.refined.affinity, 0.25);
  const PhaseMatrix shuffled = shuffled_phase(
      backbone.coefficients, backbone.anchors, backbone.refined.affinity, 0.25, 99);

  const double dot = (netflow.theta.cwiseProduct(shuffled.theta)).sum();
  const double cosine =
      dot / (netflow.theta.norm() * shuffled.theta.norm() + 1e-12);
  CHECK(cosine < 0.75);
  // Deterministic per seed.
  const PhaseMatrix again = shuffled_phase(
      backbone.coefficients, backbone.anchors, backbone.refined.affinity, 0.25, 99);
  CHECK(again.theta == shuffled.theta);
}

TEST_CASE("random_phase: support, bound and antisymmetry") {
  Rng rng(35);
  const Matrix affinity = testutil::random_affinity(6, 0.6, rng);
  const PhaseMatrix phase = random_phase(affinity, 0.25, 11);
  CHECK((phase.theta + phase.theta.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(phase.theta.cwiseAbs().maxCoeff() <= phase.beta);
  for (Index i = 0; i < 6; ++i) {
    for (Index j = 0; j < 6; ++j) {
      if (affinity(i, j) == 0.0) CHECK(phase.theta(i, j) == 0.0);
    }
  }
  CHECK(random_phase(affinity, 0.0, 11).theta.cwiseAbs().maxCoeff() == 0.0);
  CHECK(random_phase(Matrix::Zero(4, 4), 0.5, 11).theta.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("magnetic_laplacian: zero phase reduces to the real Laplacian") {
  Rng rng(36);
  const Matrix affinity = testutil::random_affinity(7, 0.7, rng);
  const MagneticGeometry geometry =
      magnetic_laplacian(affinity, Matrix::Zero(7, 7));
  CHECK(geometry.laplacian.imag().cwiseAbs().maxCoeff() == 0.0);

  Vector degree = affinity.rowwise().sum();
  Vector inv_sqrt = degree.cwiseSqrt().cwiseInverse();
  const Matrix real_laplacian =
      Matrix::Identity(7, 7) -
      (inv_sqrt.asDiagonal() * affinity * inv_sqrt.asDiagonal());
  CHECK((geometry.laplacian.real() - real_laplacian).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("magnetic_laplacian: two-anchor pi phase") {
  Matrix affinity(2, 2);
  affinity << 0, 1, 1, 0;
  Matrix theta = Matrix::Zero(2, 2);
  theta(0, 1) = kPi;
  theta(1, 0) = -kPi;
  const MagneticGeometry geometry = magnetic_laplacian(affinity, theta);
  const HermitianEigen eig = hermitian_eigs(geometry.laplacian, 2);
  CHECK(eig.eigenvalues(0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(eig.eigenvalues(1) == doctest::Approx(2.0).epsilon(1e-12));
  // The zero eigenvalue is attained by (1, -1)/sqrt(2).
  const ComplexVector ground = eig.eigenvectors.col(0);
  CHECK(std::abs(ground(0) + ground(1)) < 1e-9);
}

TEST_CASE("magnetic_laplacian: Hermitian with eigenvalues in [0, 2]") {
  Rng rng(37);
  for (int trial = 0; trial < 10; ++trial) {
    const Index m = 4 + static_cast<Index>(rng.uniform_index(10));
    const Matrix affinity = testutil::random_affinity(m, 0.5, rng);
    const PhaseMatrix phase = random_phase(affinity, 0.8, trial + 1);
    const MagneticGeometry geometry = magnetic_laplacian(affinity, phase.theta);
    CHECK((geometry.laplacian - geometry.laplacian.adjoint()).cwiseAbs().maxCoeff() <
          1e-12);
    const HermitianEigen eig =
        hermitian_eigs(geometry.laplacian, static_cast<int>(m));
    CHECK(eig.eigenvalues.minCoeff() >= -1e-9);
    CHECK(eig.eigenvalues.maxCoeff() <= 2.0 + 1e-9);
    // |adjacency| equals the affinity entry-wise.
    CHECK((geometry.adjacency.cwiseAbs() - affinity).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("spectral_embedding: identity incidence keeps anchor vectors") {
  const Index m = 5;
  AnchorHypergraph hyper;
  hyper.incidence = Matrix::Identity(m, m);
  hyper.weights = Vector::Ones(m);
  hyper.degrees = Vector::Ones(m);
  Rng rng(38);
  const Matrix affinity = testutil::random_affinity(m, 0.9, rng);
  const MagneticGeometry geometry = magnetic_laplacian(affinity, Matrix::Zero(m, m));
  const SpectralEmbedding embed = spectral_embedding(geometry, hyper, 2);
  CHECK((embed.lift - Matrix::Identity(m, m)).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((embed.sample_embedding_complex - embed.anchor_embedding)
            .cwiseAbs()
            .maxCoeff() < 1e-15);
  // Zero phase: the imaginary half vanishes.
  CHECK(embed.sample_embedding_complex.imag().cwiseAbs().maxCoeff() < 1e-12);
  // Rows have unit norms, lift rows sum to one.
  for (Index i = 0; i < m; ++i) {
    CHECK(embed.sample_embedding.row(i).norm() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(embed.lift.row(i).sum() == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("reduction property: zero-phase magnetic equals classical spectral") {
  SyntheticSpec spec;
  spec.n = 120;
  spec.num_views = 2;
  spec.num_clusters = 3;
  spec.view_dims = {4, 4};
  spec.cluster_spread = 0.1;
  spec.noise_sigma = 0.02;
  spec.seed = 31;
  const MultiViewDataset data = generate_synthetic(spec);
  GeometryOptions options;
  options.anchors_per_view = 10;
  const Backbone backbone = build_backbone(data.views, 3, options, 17);

  GeometryOptions zero_q = options;
  zero_q.q = 0.0;
  const SpectralSignal magnetic =
      build_spectral(backbone, 3, PhaseScheme::kNetflow, zero_q, 5);
  const SpectralSignal real =
      build_spectral(backbone, 3, PhaseScheme::kZero, options, 5);

  CHECK((magnetic.embedding.eigenvalues - real.embedding.eigenvalues)
            .cwiseAbs()
            .maxCoeff() < 1e-8);
  // Top-K eigenspaces agree up to gauge: principal angles are ~0.
  const double distance = subspace_distance(magnetic.embedding.sample_embedding,
                                            real.embedding.sample_embedding);
  CHECK(distance < 1e-6);
}

TEST_CASE("gauge invariance: column phases do not move k-means labels") {
  SyntheticSpec spec;
  spec.n = 90;
  spec.num_views = 2;
  spec.num_clusters = 3;
  spec.view_dims = {3, 3};
  spec.cluster_spread = 0.08;
  spec.noise_sigma = 0.0;
  spec.seed = 8;
  const MultiViewDataset data = generate_synthetic(spec);
  GeometryOptions options;
  options.anchors_per_view = 9;
  const Backbone backbone = build_backbone(data.views, 3, options, 2);
  const SpectralSignal signal =
      build_spectral(backbone, 3, PhaseScheme::kNetflow, options, 2);

  const Labels base =
      kmeans(signal.embedding.sample_embedding, 3, 71).assignments;

  // Multiply each anchor-embedding column by an arbitrary unit phase and
  // rebuild U; pairwise row distances are preserved, so labels must agree.
  SpectralEmbedding rotated = signal.embedding;
  Rng rng(39);
  for (Index c = 0; c < rotated.anchor_embedding.cols(); ++c) {
    const double phi = rng.uniform(0.0, 2.0 * kPi);
    rotated.sample_embedding_complex.col(c) *=
        std::complex<double>(std::cos(phi), std::sin(phi));
  }
  Matrix u(rotated.sample_embedding_complex.rows(),
           2 * rotated.sample_embedding_complex.cols());
  u.leftCols(rotated.sample_embedding_complex.cols()) =
      rotated.sample_embedding_complex.real();
  u.rightCols(rotated.sample_embedding_complex.cols()) =
      rotated.sample_embedding_complex.imag();
  for (Index i = 0; i < u.rows(); ++i) {
    const double norm = u.row(i).norm();
    if (norm > 0.0) u.row(i) /= norm;
  }
  const Labels rotated_labels = kmeans(u, 3, 71).assignments;
  CHECK(rotated_labels == base);

  // Re-running the eigendecomposition reproduces identical labels.
  const SpectralSignal again =
      build_spectral(backbone, 3, PhaseScheme::kNetflow, options, 2);
  CHECK(kmeans(again.embedding.sample_embedding, 3, 71).assignments == base);
}

TEST_CASE("cycle phases: conflicting phase induces a different spectrum") {
  // Total flux separates the schemes at a generic theta: 8 * pi/8 = pi for
  // the consistent assignment versus 0 for the alternating one.
  const double theta = kPi / 8.0;
  Matrix affinity = Matrix::Zero(8, 8);
  Matrix consistent = Matrix::Zero(8, 8);
  Matrix alternating = Matrix::Zero(8, 8);
  for (int i = 0; i < 8; ++i) {
    const int j = (i + 1) % 8;
    affinity(i, j) = affinity(j, i) = 1.0;
    consistent(i, j) = theta;
    consistent(j, i) = -theta;
    const double sign = (i % 2 == 0) ? 1.0 : -1.0;
    alternating(i, j) = sign * theta;
    alternating(j, i) = -sign * theta;
  }
  const HermitianEigen a = hermitian_eigs(
      magnetic_laplacian(affinity, consistent).laplacian, 8);
  const HermitianEigen b = hermitian_eigs(
      magnetic_laplacian(affinity, alternating).laplacian, 8);
  CHECK((a.eigenvalues - b.eigenvalues).cwiseAbs().maxCoeff() > 0.01);
}
