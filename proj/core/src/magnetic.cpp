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

#include <cmath>

#include "magspec/numerics.hpp"
#include "magspec/rng.hpp"

namespace magspec {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

PhaseScheme phase_scheme_from_name(const std::string& name) {
  if (name == "netflow") return PhaseScheme::kNetflow;
  if (name == "zero") return PhaseScheme::kZero;
  if (name == "shuffled") return PhaseScheme::kShuffled;
  if (name == "random") return PhaseScheme::kRandom;
  throw ParameterError("unknown phase scheme '" + name + "'");
}

const char* phase_scheme_name(PhaseScheme scheme) {
  switch (scheme) {
    case PhaseScheme::kNetflow: return "netflow";
    case PhaseScheme::kZero: return "zero";
    case PhaseScheme::kShuffled: return "shuffled";
    case PhaseScheme::kRandom: return "random";
  }
  return "unknown";
}

std::vector<std::vector<int>> top_anchor_indices(const CoefficientMatrices& coefficients,
                                                 const AnchorSet& anchors) {
  std::vector<std::vector<int>> tops;
  for (std::size_t v = 0; v < coefficients.per_view.size(); ++v) {
    const Matrix& c = coefficients.per_view[v];
    std::vector<int> view_tops(static_cast<std::size_t>(c.cols()));
    for (Index s = 0; s < c.cols(); ++s) {
      Index best = 0;
      for (Index a = 1; a < c.rows(); ++a) {
        // Strict comparison keeps the lowest local index on ties.
        if (c(a, s) > c(best, s)) best = a;
      }
      view_tops[static_cast<std::size_t>(s)] =
          anchors.global_index(static_cast<int>(v), static_cast<int>(best));
    }
    tops.push_back(std::move(view_tops));
  }
  return tops;
}

FlowMatrices flow_from_top_anchors(const std::vector<std::vector<int>>& top_anchors,
                                   int num_anchors, FlowPairs pairs) {
  FlowMatrices out;
  out.flow = Matrix::Zero(num_anchors, num_anchors);
  const std::size_t num_views = top_anchors.size();
  const std::size_t n = num_views == 0 ? 0 : top_anchors.front().size();
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t v1 = 0; v1 < num_views; ++v1) {
      for (std::size_t v2 = v1 + 1; v2 < num_views; ++v2) {
        const int a = top_anchors[v1][s];
        const int b = top_anchors[v2][s];
        out.flow(a, b) += 1.0;
        if (pairs == FlowPairs::kAll) out.flow(b, a) += 1.0;
      }
    }
  }
  out.netflow = out.flow - out.flow.transpose();
  return out;
}

FlowMatrices flow_matrix(const CoefficientMatrices& coefficients,
                         const AnchorSet& anchors, FlowPairs pairs) {
  return flow_from_top_anchors(top_anchor_indices(coefficients, anchors),
                               anchors.total(), pairs);
}

PhaseMatrix phase_from_flow(const Matrix& netflow, const Matrix& affinity, double q,
                            double epsilon) {
  if (q < 0.0 || q > 1.0) throw ParameterError("phase_from_flow: q must be in [0,1]");
  if (netflow.rows() != affinity.rows() || netflow.cols() != affinity.cols()) {
    throw ShapeError("phase_from_flow: netflow/affinity shape mismatch");
  }
  PhaseMatrix out;
  out.scheme = PhaseScheme::kNetflow;
  out.q = q;
  out.beta = kPi * q;
  const double peak = netflow.cwiseAbs().maxCoeff();
  Matrix theta = (out.beta / (peak + epsilon)) * netflow;
  theta = theta.cwiseProduct((affinity.array() > 0.0).cast<double>().matrix());
  out.theta = 0.5 * (theta - theta.transpose());
  return out;
}

PhaseMatrix shuffled_phase(const CoefficientMatrices& coefficients,
                           const AnchorSet& anchors, const Matrix& affinity,
                           double q, std::uint64_t seed, FlowPairs pairs) {
  std::vector<std::vector<int>> tops = top_anchor_indices(coefficients, anchors);
  const Rng master(seed);
  for (std::size_t v = 0; v < tops.size(); ++v) {
    Rng view_rng = master.child(v);
    std::vector<std::size_t> perm = view_rng.permutation(tops[v].size());
    std::vector<int> shuffled(tops[v].size());
    for (std::size_t i = 0; i < perm.size(); ++i) shuffled[i] = tops[v][perm[i]];
    tops[v] = std::move(shuffled);
  }
  const FlowMatrices flows = flow_from_top_anchors(tops, anchors.total(), pairs);
  PhaseMatrix out = phase_from_flow(flows.netflow, affinity, q);
  out.scheme = PhaseScheme::kShuffled;
  return out;
}

PhaseMatrix random_phase(const Matrix& affinity, double q, std::uint64_t seed) {
  if (q < 0.0 || q > 1.0) throw ParameterError("random_phase: q must be in [0,1]");
  PhaseMatrix out;
  out.scheme = PhaseScheme::kRandom;
  out.q = q;
  out.beta = kPi * q;
  const Index m = affinity.rows();
  out.theta = Matrix::Zero(m, m);
  Rng rng(seed);
  for (Index i = 0; i < m; ++i) {
    for (Index j = i + 1; j < m; ++j) {
      if (affinity(i, j) > 0.0) {
        const double phi = rng.uniform(-out.beta, out.beta);
        out.theta(i, j) = phi;
        out.theta(j, i) = -phi;
      }
    }
  }
  return out;
}

MagneticGeometry magnetic_laplacian(const Matrix& affinity, const Matrix& theta) {
  const Index m = affinity.rows();
  if (affinity.cols() != m) throw ShapeError("magnetic_laplacian: affinity not square");
  if (theta.rows() != m || theta.cols() != m) {
    throw ShapeError("magnetic_laplacian: theta shape mismatch");
  }
  if ((theta + theta.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
    throw ContractError("magnetic_laplacian: theta is not antisymmetric");
  }

  MagneticGeometry out;
  out.adjacency = ComplexMatrix(m, m);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < m; ++j) {
      out.adjacency(i, j) =
          affinity(i, j) * std::complex<double>(std::cos(theta(i, j)),
                                                std::sin(theta(i, j)));
    }
  }
  // |adjacency| row sums equal the affinity row sums; isolated anchors keep
  // a unit degree so their Laplacian row stays the identity row.
  out.degree = affinity.cwiseAbs().rowwise().sum();
  Vector inv_sqrt(m);
  for (Index i = 0; i < m; ++i) {
    if (out.degree(i) <= 0.0) {
      out.degree(i) = 1.0;
      inv_sqrt(i) = 1.0;
    } else {
      inv_sqrt(i) = 1.0 / std::sqrt(out.degree(i));
    }
  }
  out.laplacian = ComplexMatrix::Identity(m, m) -
                  (inv_sqrt.asDiagonal() * out.adjacency * inv_sqrt.asDiagonal());
  // Force exact Hermiticity against floating-point drift.
  out.laplacian = (0.5 * (out.laplacian + out.laplacian.adjoint())).eval();
  const double herm = (out.laplacian - out.laplacian.adjoint()).cwiseAbs().maxCoeff();
  if (herm > 1e-12) {
    throw ContractError("magnetic_laplacian: Hermiticity violated");
  }
  return out;
}

namespace {

// Shared lift-and-normalize step for both the complex and the real paths.
void lift_to_samples(const AnchorHypergraph& hypergraph, SpectralEmbedding& embed) {
  const Matrix& h = hypergraph.incidence;
  const Vector& delta = hypergraph.degrees;
  const Index n = h.cols();
  embed.lift = delta.cwiseInverse().asDiagonal() * h.transpose();
  embed.sample_embedding_complex = embed.lift * embed.anchor_embedding;

  const Index k = embed.sample_embedding_complex.cols();
  embed.sample_embedding = Matrix(n, 2 * k);
  embed.sample_embedding.leftCols(k) = embed.sample_embedding_complex.real();
  embed.sample_embedding.rightCols(k) = embed.sample_embedding_complex.imag();
  for (Index i = 0; i < n; ++i) {
    const double norm = embed.sample_embedding.row(i).norm();
    if (norm > 0.0) {
      embed.sample_embedding.row(i) /= norm;
    } else {
      embed.zero_rows.push_back(i);
    }
  }
}

}  // namespace

SpectralEmbedding spectral_embedding(const MagneticGeometry& geometry,
                                     const AnchorHypergraph& hypergraph, int k) {
  const Index m = geometry.laplacian.rows();
  if (k < 1 || k > m) {
    throw ParameterError("spectral_embedding: K must lie in [1, m]");
  }
  const HermitianEigen eigen = hermitian_eigs(geometry.laplacian, static_cast<int>(m));
  SpectralEmbedding embed;
  embed.eigenvalues = eigen.eigenvalues;
  embed.anchor_embedding = eigen.eigenvectors.leftCols(k);
  lift_to_samples(hypergraph, embed);
  return embed;
}

SpectralEmbedding real_spectral_embedding(const Matrix& affinity,
                                          const AnchorHypergraph& hypergraph, int k) {
  const Index m = affinity.rows();
  if (k < 1 || k > m) {
    throw ParameterError("real_spectral_embedding: K must lie in [1, m]");
  }
  Vector degree = affinity.cwiseAbs().rowwise().sum();
  Vector inv_sqrt(m);
  for (Index i = 0; i < m; ++i) {
    if (degree(i) <= 0.0) {
      degree(i) = 1.0;
      inv_sqrt(i) = 1.0;
    } else {
      inv_sqrt(i) = 1.0 / std::sqrt(degree(i));
    }
  }
  const Matrix laplacian = Matrix::Identity(m, m) -
                           (inv_sqrt.asDiagonal() * affinity * inv_sqrt.asDiagonal());
  const SymmetricEigen eigen = symmetric_eigs(laplacian, static_cast<int>(m));
  SpectralEmbedding embed;
  embed.eigenvalues = eigen.eigenvalues;
  embed.anchor_embedding = eigen.eigenvectors.leftCols(k).cast<std::complex<double>>();
  lift_to_samples(hypergraph, embed);
  return embed;
}

}  // namespace magspec
