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

#include "magspec/curvature.hpp"

#include <cmath>

namespace magspec {

Vector hyperedge_curvature(const Matrix& incidence, const Vector& weights) {
  const Index m = incidence.rows();
  const Index n = incidence.cols();
  if (weights.size() != n) throw ShapeError("hyperedge_curvature: weight length");

  // Weighted anchor degrees over the 0/1 support pattern.
  Vector anchor_degree = Vector::Zero(m);
  for (Index e = 0; e < n; ++e) {
    for (Index a = 0; a < m; ++a) {
      if (incidence(a, e) > 0.0) anchor_degree(a) += weights(e);
    }
  }

  Vector raw(n);
  for (Index e = 0; e < n; ++e) {
    double sum = 0.0;
    Index support = 0;
    for (Index a = 0; a < m; ++a) {
      if (incidence(a, e) > 0.0) {
        sum += anchor_degree(a);
        ++support;
      }
    }
    if (support == 0) {
      throw ContractError("hyperedge_curvature: empty hyperedge " + std::to_string(e));
    }
    raw(e) = 2.0 - sum / static_cast<double>(support);
  }

  const double scale = raw.cwiseAbs().maxCoeff();
  if (scale <= 0.0) return Vector::Zero(n);
  return raw / scale;
}

Vector ricci_flow(const Matrix& incidence, const Vector& initial_weights,
                  const RicciFlowOptions& options,
                  std::vector<RicciTraceRow>* trace) {
  if (options.step <= 0.0 || options.step >= 1.0) {
    throw ParameterError("ricci_flow: step must lie in (0, 1)");
  }
  if (options.iterations < 0) {
    throw ParameterError("ricci_flow: iterations must be >= 0");
  }
  if ((initial_weights.array() <= 0.0).any()) {
    throw ParameterError("ricci_flow: weights must be positive");
  }

  Vector weights = initial_weights;
  const double total = weights.sum();
  if (trace) trace->clear();

  for (int t = 0; t < options.iterations; ++t) {
    Vector kappa = hyperedge_curvature(incidence, weights);
    if (options.flip_sign) kappa = -kappa;
    // |kappa| <= 1 and step < 1 keep every factor strictly positive.
    const Vector factor = (1.0 - options.step * kappa.array()).matrix();
    if ((factor.array() <= 0.0).any()) {
      throw ContractError("ricci_flow: update would zero out a weight");
    }
    weights = weights.cwiseProduct(factor);
    weights *= total / weights.sum();
    weights = weights.cwiseMax(options.weight_floor);
    if (trace) {
      trace->push_back({t + 1, weights.sum(), kappa.minCoeff(), kappa.maxCoeff()});
    }
  }
  return weights;
}

RefinedAffinity anchor_affinity(const AnchorHypergraph& hypergraph,
                                const Vector& refined_weights) {
  const Matrix& h = hypergraph.incidence;
  const Vector& delta = hypergraph.degrees;
  if (refined_weights.size() != h.cols()) {
    throw ShapeError("anchor_affinity: weight length mismatch");
  }
  if ((delta.array() <= 0.0).any()) {
    throw ContractError("anchor_affinity: zero hyperedge degree");
  }
  RefinedAffinity out;
  out.edge_scale = refined_weights.cwiseQuotient(delta);
  out.gram_factor = out.edge_scale.cwiseSqrt().asDiagonal() * h.transpose();
  out.affinity = h * out.edge_scale.asDiagonal() * h.transpose();
  // Exact symmetry for downstream Hermiticity checks.
  out.affinity = 0.5 * (out.affinity + out.affinity.transpose()).eval();
  return out;
}

}  // namespace magspec
