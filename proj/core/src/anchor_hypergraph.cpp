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

#include "magspec/anchor_hypergraph.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "magspec/numerics.hpp"
#include "magspec/rng.hpp"

namespace magspec {

AnchorSet init_anchors(const std::vector<Matrix>& latents,
                       const std::vector<int>& anchors_per_view,
                       std::uint64_t seed) {
  if (latents.size() != anchors_per_view.size()) {
    throw ShapeError("init_anchors: view count mismatch");
  }
  const Rng master(seed);
  AnchorSet set;
  set.offsets.push_back(0);
  for (std::size_t v = 0; v < latents.size(); ++v) {
    const int m_v = anchors_per_view[v];
    if (m_v < 1 || m_v > latents[v].rows()) {
      throw ParameterError("init_anchors: anchors_per_view[" + std::to_string(v) +
                           "]=" + std::to_string(m_v) + " outside [1, n]");
    }
    const KMeansResult km = kmeans(latents[v], m_v, master.child(v).seed());
    set.anchors.push_back(km.centers.transpose());  // store d x m_v
    set.offsets.push_back(set.offsets.back() + m_v);
  }
  return set;
}

Matrix solve_coefficients(const Matrix& latents, const Matrix& anchors,
                          double gamma) {
  if (anchors.cols() < 1) throw ParameterError("solve_coefficients: no anchors");
  if (gamma < 0.0) throw ParameterError("solve_coefficients: gamma must be >= 0");
  if (latents.cols() != anchors.rows()) {
    throw ShapeError("solve_coefficients: latent dim " + std::to_string(latents.cols()) +
                     " != anchor dim " + std::to_string(anchors.rows()));
  }
  if (!latents.allFinite() || !anchors.allFinite()) {
    throw ParameterError("solve_coefficients: non-finite input");
  }

  const Index n = latents.rows();
  const Index m = anchors.cols();
  Matrix coeffs(m, n);
  if (m == 1) {
    coeffs.setOnes();
    return coeffs;
  }

  // Gradient of ||z - A c||^2 + gamma ||c||^2 is 2 (G c - A'z) with
  // G = A'A + gamma I; the Lipschitz constant is 2 lambda_max(G).
  const Matrix gram = anchors.transpose() * anchors +
                      gamma * Matrix::Identity(m, m);
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram);
  const double lipschitz = 2.0 * std::max(es.eigenvalues().maxCoeff(), 1e-12);
  const double step = 1.0 / lipschitz;

  const Matrix targets = anchors.transpose() * latents.transpose();  // m x n

  constexpr int kMaxIterations = 500;
  constexpr double kTolerance = 1e-8;
  const Vector uniform = Vector::Constant(m, 1.0 / static_cast<double>(m));

  // All columns are independent; iterating them as one matrix turns the
  // gradient step into a single m x m by m x n product per round. Converged
  // columns ride along unchanged (their accelerated step keeps shrinking),
  // and the loop exits once the slowest column has settled.
  Matrix x = uniform.replicate(1, n);
  Matrix y = x;
  double t = 1.0;
  for (int iter = 0; iter < kMaxIterations; ++iter) {
    const Matrix grad = 2.0 * (gram * y - targets);
    Matrix x_next = y - step * grad;
    for (Index col = 0; col < n; ++col) {
      x_next.col(col) = project_to_simplex(x_next.col(col));
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = x_next + ((t - 1.0) / t_next) * (x_next - x);
    const double worst_change =
        (x_next - x).colwise().norm().maxCoeff();
    x = std::move(x_next);
    t = t_next;
    if (worst_change < kTolerance) break;
  }

  // Optimality sanity bound: never worse than the uniform vector.
  const Vector residual_obj =
      (latents.transpose() - anchors * x).colwise().squaredNorm().transpose() +
      gamma * x.colwise().squaredNorm().transpose();
  const Vector uniform_obj =
      (latents.transpose() - (anchors * uniform).replicate(1, n))
          .colwise()
          .squaredNorm()
          .transpose().array() +
      gamma * uniform.squaredNorm();
  for (Index col = 0; col < n; ++col) {
    coeffs.col(col) = residual_obj(col) <= uniform_obj(col) ? x.col(col) : uniform;
  }
  return coeffs;
}

CoefficientMatrices solve_all_coefficients(const std::vector<Matrix>& latents,
                                           const AnchorSet& anchors, double gamma) {
  CoefficientMatrices result;
  Index n = 0;
  for (std::size_t v = 0; v < latents.size(); ++v) {
    result.per_view.push_back(solve_coefficients(latents[v], anchors.anchors[v], gamma));
    n = latents[v].rows();
  }
  result.concatenated = Matrix::Zero(anchors.total(), n);
  for (std::size_t v = 0; v < result.per_view.size(); ++v) {
    result.concatenated.middleRows(anchors.offsets[v], result.per_view[v].rows()) =
        result.per_view[v];
  }
  return result;
}

AnchorHypergraph build_incidence(const CoefficientMatrices& coefficients, int top_r) {
  if (top_r < 1) throw ParameterError("build_incidence: top_r must be >= 1");
  const Matrix& all = coefficients.concatenated;
  const Index m = all.rows();
  const Index n = all.cols();

  AnchorHypergraph hyper;
  hyper.incidence = Matrix::Zero(m, n);
  hyper.weights = Vector::Ones(n);

  std::vector<Index> order(static_cast<std::size_t>(m));
  for (Index col = 0; col < n; ++col) {
    std::iota(order.begin(), order.end(), Index{0});
    const Index keep = std::min<Index>(top_r, m);
    // Ties break toward the lower global anchor index.
    std::partial_sort(order.begin(), order.begin() + keep, order.end(),
                      [&](Index a, Index b) {
                        if (all(a, col) != all(b, col)) return all(a, col) > all(b, col);
                        return a < b;
                      });
    bool any = false;
    for (Index k = 0; k < keep; ++k) {
      const Index row = order[static_cast<std::size_t>(k)];
      if (all(row, col) > 0.0) {
        hyper.incidence(row, col) = all(row, col);
        any = true;
      }
    }
    if (!any) {
      throw ContractError("build_incidence: sample " + std::to_string(col) +
                          " has an all-zero coefficient column");
    }
  }
  hyper.degrees = hyper.incidence.colwise().sum().transpose();
  return hyper;
}

}  // namespace magspec
