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

#include <benchmark/benchmark.h>

#include "magspec/dataset.hpp"
#include "magspec/evaluation.hpp"
#include "magspec/numerics.hpp"
#include "magspec/rng.hpp"
#include "magspec/training.hpp"

namespace magspec {
namespace {

MultiViewDataset bench_blobs(Index n, int views, std::uint64_t seed) {
  SyntheticSpec spec;
  spec.n = n;
  spec.num_views = views;
  spec.num_clusters = 3;
  spec.view_dims.assign(static_cast<std::size_t>(views), 10);
  spec.cluster_spread = 0.15;
  spec.noise_sigma = 0.02;
  spec.seed = seed;
  return minmax_normalize(generate_synthetic(spec));
}

void BM_KMeans(benchmark::State& state) {
  const Index n = state.range(0);
  Rng rng(7);
  Matrix points(n, 10);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < 10; ++j) points(i, j) = rng.gaussian();
  for (auto _ : state) {
    benchmark::DoNotOptimize(kmeans(points, 8, 3).inertia);
  }
}
BENCHMARK(BM_KMeans)->Arg(200)->Arg(600)->Arg(2000);

void BM_SimplexProjection(benchmark::State& state) {
  Rng rng(11);
  Vector v(state.range(0));
  for (Index i = 0; i < v.size(); ++i) v(i) = rng.uniform(-2.0, 2.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(project_to_simplex(v).sum());
  }
}
BENCHMARK(BM_SimplexProjection)->Arg(8)->Arg(64)->Arg(512);

void BM_AnchorCoefficients(benchmark::State& state) {
  const Index n = state.range(0);
  Rng rng(13);
  Matrix latents(n, 10), anchors(10, 25);
  for (Index i = 0; i < latents.size(); ++i) latents.data()[i] = rng.gaussian();
  for (Index i = 0; i < anchors.size(); ++i) anchors.data()[i] = rng.gaussian();
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_coefficients(latents, anchors, 0.1).sum());
  }
}
BENCHMARK(BM_AnchorCoefficients)->Arg(200)->Arg(600);

void BM_HermitianEigs(benchmark::State& state) {
  const Index m = state.range(0);
  Rng rng(17);
  ComplexMatrix herm(m, m);
  for (Index i = 0; i < m; ++i) {
    herm(i, i) = rng.gaussian();
    for (Index j = i + 1; j < m; ++j) {
      const std::complex<double> z(rng.gaussian(), rng.gaussian());
      herm(i, j) = z;
      herm(j, i) = std::conj(z);
    }
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        hermitian_eigs(herm, static_cast<int>(m)).eigenvalues.sum());
  }
}
BENCHMARK(BM_HermitianEigs)->Arg(25)->Arg(75)->Arg(150);

void BM_RicciFlow(benchmark::State& state) {
  const Index n = state.range(0);
  Rng rng(19);
  CoefficientMatrices coeffs;
  coeffs.concatenated = Matrix(30, n);
  for (Index i = 0; i < coeffs.concatenated.size(); ++i) {
    coeffs.concatenated.data()[i] = rng.uniform(0.0, 1.0);
  }
  for (Index c = 0; c < n; ++c) {
    coeffs.concatenated.col(c) /= coeffs.concatenated.col(c).sum();
  }
  const AnchorHypergraph hyper = build_incidence(coeffs, 3);
  RicciFlowOptions options;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        ricci_flow(hyper.incidence, hyper.weights, options).sum());
  }
}
BENCHMARK(BM_RicciFlow)->Arg(200)->Arg(600);

void BM_BackboneBuild(benchmark::State& state) {
  const MultiViewDataset data = bench_blobs(state.range(0), 3, 23);
  GeometryOptions options;
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_backbone(data.views, 3, options, 5).affinity_hash);
  }
}
BENCHMARK(BM_BackboneBuild)->Arg(300)->Arg(600)->Unit(benchmark::kMillisecond);

void BM_SpectralSignal(benchmark::State& state) {
  const MultiViewDataset data = bench_blobs(600, 3, 29);
  GeometryOptions options;
  const Backbone backbone = build_backbone(data.views, 3, options, 5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        build_spectral(backbone, 3, PhaseScheme::kNetflow, options, 7)
            .embedding.eigenvalues.sum());
  }
}
BENCHMARK(BM_SpectralSignal)->Unit(benchmark::kMillisecond);

void BM_StageEpoch(benchmark::State& state) {
  const MultiViewDataset data = bench_blobs(600, 3, 31);
  AutoencoderParams nets = make_autoencoders({10, 10, 10}, 10, {200}, 3);
  std::vector<Matrix> centers;
  std::vector<Matrix> latents;
  for (int v = 0; v < 3; ++v) {
    latents.push_back(mlp_forward(nets.encoders[static_cast<std::size_t>(v)],
                                  data.views[static_cast<std::size_t>(v)]));
    centers.push_back(kmeans(latents.back(), 3, 11).centers);
  }
  GeometryOptions options;
  const Backbone backbone = build_backbone(latents, 3, options, 5);
  const SpectralSignal signal =
      build_spectral(backbone, 3, PhaseScheme::kNetflow, options, 7);
  FixedGeometry geometry;
  geometry.anchor_mats = backbone.anchors.anchors;
  geometry.coeff_mats = backbone.coefficients.per_view;
  geometry.targets = target_distribution(student_t_assign(
      signal.embedding.sample_embedding,
      kmeans(signal.embedding.sample_embedding, 3, 13).centers, 1.0));
  geometry.cos_laplacian =
      sample_laplacian(signal.geometry.adjacency, backbone.hypergraph).laplacian;
  LossWeights weights;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        stage_loss(nets, centers, data, geometry, weights, TrainStage::kStageOne)
            .total);
  }
}
BENCHMARK(BM_StageEpoch)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace magspec

BENCHMARK_MAIN();
