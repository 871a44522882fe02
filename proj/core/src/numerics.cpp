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

#include "magspec/numerics.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>

#include "magspec/rng.hpp"

namespace magspec {

namespace {

constexpr int kMaxLloydIterations = 300;

// Squared distances from every point to one center.
Vector squared_distances(const Matrix& points, const Vector& center) {
  return (points.rowwise() - center.transpose()).rowwise().squaredNorm();
}

// k-means++ seeding: first center uniform, later centers sampled with
// probability proportional to the squared distance to the nearest chosen
// center. Degenerate case (all remaining distances zero) falls back to the
// lowest-index point not yet chosen.
Matrix seed_centers(const Matrix& points, int k, Rng& rng) {
  const Index n = points.rows();
  Matrix centers(k, points.cols());
  std::vector<bool> chosen(static_cast<std::size_t>(n), false);

  const std::size_t first = rng.uniform_index(static_cast<std::size_t>(n));
  centers.row(0) = points.row(static_cast<Index>(first));
  chosen[first] = true;

  Vector nearest = squared_distances(points, centers.row(0).transpose());
  for (int c = 1; c < k; ++c) {
    const double total = nearest.sum();
    Index pick = -1;
    if (total > 0.0) {
      const double u = rng.uniform() * total;
      double cum = 0.0;
      for (Index i = 0; i < n; ++i) {
        cum += nearest(i);
        if (cum > u) {
          pick = i;
          break;
        }
      }
      if (pick < 0) pick = n - 1;  // guard against roundoff at u ~ total
    }
    if (pick < 0 || chosen[static_cast<std::size_t>(pick)]) {
      for (Index i = 0; i < n; ++i) {
        if (!chosen[static_cast<std::size_t>(i)]) {
          pick = i;
          break;
        }
      }
    }
    centers.row(c) = points.row(pick);
    chosen[static_cast<std::size_t>(pick)] = true;
    nearest = nearest.cwiseMin(squared_distances(points, centers.row(c).transpose()));
  }
  return centers;
}

// Assigns each point to its nearest center, lowest index on ties.
void assign_points(const Matrix& points, const Matrix& centers,
                   std::vector<int>& assignments, double& inertia) {
  const Index n = points.rows();
  const Index k = centers.rows();
  inertia = 0.0;
  for (Index i = 0; i < n; ++i) {
    int best = 0;
    double best_d = (points.row(i) - centers.row(0)).squaredNorm();
    for (Index j = 1; j < k; ++j) {
      const double d = (points.row(i) - centers.row(j)).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(j);
      }
    }
    assignments[static_cast<std::size_t>(i)] = best;
    inertia += best_d;
  }
}

}  // namespace

KMeansResult kmeans(const Matrix& points, int k, std::uint64_t seed) {
  const Index n = points.rows();
  if (k < 1) throw ParameterError("kmeans: k must be >= 1");
  if (n < k) {
    throw ParameterError("kmeans: n=" + std::to_string(n) + " < k=" +
                         std::to_string(k));
  }

  Rng rng(seed);
  KMeansResult result;
  result.centers = seed_centers(points, k, rng);
  result.assignments.assign(static_cast<std::size_t>(n), 0);

  double prev_inertia = std::numeric_limits<double>::infinity();
  std::vector<int> prev_assignments;
  for (int iter = 0; iter < kMaxLloydIterations; ++iter) {
    assign_points(points, result.centers, result.assignments, result.inertia);
    result.iterations = iter + 1;
    // Lloyd's steps never increase the objective; tiny slack for roundoff.
    if (result.inertia > prev_inertia + 1e-9 * (1.0 + prev_inertia)) {
      throw ContractError("kmeans: inertia increased across a Lloyd iteration");
    }
    prev_inertia = result.inertia;

    if (result.assignments == prev_assignments) break;
    prev_assignments = result.assignments;

    // Recompute centers.
    Matrix sums = Matrix::Zero(k, points.cols());
    std::vector<Index> counts(static_cast<std::size_t>(k), 0);
    for (Index i = 0; i < n; ++i) {
      const int a = result.assignments[static_cast<std::size_t>(i)];
      sums.row(a) += points.row(i);
      ++counts[static_cast<std::size_t>(a)];
    }
    for (int j = 0; j < k; ++j) {
      if (counts[static_cast<std::size_t>(j)] > 0) {
        result.centers.row(j) =
            sums.row(j) / static_cast<double>(counts[static_cast<std::size_t>(j)]);
      }
    }
    // Empty-cluster repair: move the farthest point of the largest cluster
    // (lowest index on ties, both for the cluster and the point).
    for (int j = 0; j < k; ++j) {
      if (counts[static_cast<std::size_t>(j)] > 0) continue;
      int largest = 0;
      for (int c = 1; c < k; ++c) {
        if (counts[static_cast<std::size_t>(c)] > counts[static_cast<std::size_t>(largest)])
          largest = c;
      }
      Index far_point = -1;
      double far_d = -1.0;
      for (Index i = 0; i < n; ++i) {
        if (result.assignments[static_cast<std::size_t>(i)] != largest) continue;
        const double d = (points.row(i) - result.centers.row(largest)).squaredNorm();
        if (d > far_d) {
          far_d = d;
          far_point = i;
        }
      }
      result.centers.row(j) = points.row(far_point);
      result.assignments[static_cast<std::size_t>(far_point)] = j;
      --counts[static_cast<std::size_t>(largest)];
      ++counts[static_cast<std::size_t>(j)];
    }
  }
  // Final inertia against the final centers.
  assign_points(points, result.centers, result.assignments, result.inertia);
  return result;
}

Vector project_to_simplex(const Vector& v) {
  const Index d = v.size();
  std::vector<double> sorted(v.data(), v.data() + d);
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  double cumsum = 0.0;
  double theta = 0.0;
  int support = 0;
  for (Index j = 0; j < d; ++j) {
    cumsum += sorted[static_cast<std::size_t>(j)];
    const double candidate = (cumsum - 1.0) / static_cast<double>(j + 1);
    if (sorted[static_cast<std::size_t>(j)] - candidate > 0.0) {
      theta = candidate;
      support = static_cast<int>(j + 1);
    }
  }
  (void)support;
  return (v.array() - theta).cwiseMax(0.0).matrix();
}

namespace {

// Multiplies each eigenvector column by a unit complex scalar so that its
// largest-magnitude entry (lowest index on ties) becomes real and positive.
void gauge_fix(ComplexMatrix& vectors) {
  for (Index c = 0; c < vectors.cols(); ++c) {
    Index imax = 0;
    double best = std::abs(vectors(0, c));
    for (Index i = 1; i < vectors.rows(); ++i) {
      const double a = std::abs(vectors(i, c));
      if (a > best) {
        best = a;
        imax = i;
      }
    }
    if (best <= 0.0) continue;
    const std::complex<double> phase = vectors(imax, c) / best;
    vectors.col(c) *= std::conj(phase);
  }
}

void sign_fix(Matrix& vectors) {
  for (Index c = 0; c < vectors.cols(); ++c) {
    Index imax = 0;
    double best = std::abs(vectors(0, c));
    for (Index i = 1; i < vectors.rows(); ++i) {
      const double a = std::abs(vectors(i, c));
      if (a > best) {
        best = a;
        imax = i;
      }
    }
    if (vectors(imax, c) < 0.0) vectors.col(c) = -vectors.col(c);
  }
}

}  // namespace

HermitianEigen hermitian_eigs(const ComplexMatrix& L, int p) {
  if (L.rows() != L.cols()) throw ShapeError("hermitian_eigs: matrix not square");
  if (p < 1 || p > L.rows()) {
    throw ParameterError("hermitian_eigs: p out of range");
  }
  const double asym = (L - L.adjoint()).cwiseAbs().maxCoeff();
  if (asym > 1e-10) {
    throw ContractError("hermitian_eigs: matrix is not Hermitian (max deviation " +
                        std::to_string(asym) + ")");
  }
  const ComplexMatrix sym = 0.5 * (L + L.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw ContractError("hermitian_eigs: eigendecomposition failed");
  }
  HermitianEigen out;
  out.eigenvalues = solver.eigenvalues().head(p);
  out.eigenvectors = solver.eigenvectors().leftCols(p);
  gauge_fix(out.eigenvectors);
  return out;
}

SymmetricEigen symmetric_eigs(const Matrix& L, int p) {
  if (L.rows() != L.cols()) throw ShapeError("symmetric_eigs: matrix not square");
  if (p < 1 || p > L.rows()) {
    throw ParameterError("symmetric_eigs: p out of range");
  }
  const Matrix sym = 0.5 * (L + L.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw ContractError("symmetric_eigs: eigendecomposition failed");
  }
  SymmetricEigen out;
  out.eigenvalues = solver.eigenvalues().head(p);
  out.eigenvectors = solver.eigenvectors().leftCols(p);
  sign_fix(out.eigenvectors);
  return out;
}

namespace {

// Shortest-augmenting-path assignment with potentials, O(k^3). Deterministic:
// column scans ascend and comparisons are strict.
std::vector<int> hungarian_raw(const Matrix& costs) {
  const int k = static_cast<int>(costs.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(static_cast<std::size_t>(k) + 1, 0.0);
  std::vector<double> v(static_cast<std::size_t>(k) + 1, 0.0);
  std::vector<int> match(static_cast<std::size_t>(k) + 1, 0);  // column -> row (1-based)
  std::vector<int> way(static_cast<std::size_t>(k) + 1, 0);

  for (int i = 1; i <= k; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(k) + 1, inf);
    std::vector<bool> used(static_cast<std::size_t>(k) + 1, false);
    do {
      used[static_cast<std::size_t>(j0)] = true;
      const int i0 = match[static_cast<std::size_t>(j0)];
      double delta = inf;
      int j1 = -1;
      for (int j = 1; j <= k; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double cur = costs(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] -
                           v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= k; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(match[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (match[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<std::size_t>(j0)];
      match[static_cast<std::size_t>(j0)] = match[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> perm(static_cast<std::size_t>(k), -1);
  for (int j = 1; j <= k; ++j) {
    perm[static_cast<std::size_t>(match[static_cast<std::size_t>(j)]) - 1] = j - 1;
  }
  return perm;
}

}  // namespace

double assignment_cost(const Matrix& costs, const std::vector<int>& perm) {
  double total = 0.0;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    total += costs(static_cast<Index>(i), perm[i]);
  }
  return total;
}

std::vector<int> hungarian(const Matrix& costs) {
  if (costs.rows() != costs.cols()) {
    throw ShapeError("hungarian: cost matrix must be square");
  }
  if (!costs.allFinite()) throw ParameterError("hungarian: non-finite costs");
  const int k = static_cast<int>(costs.rows());
  if (k == 0) return {};

  const std::vector<int> base = hungarian_raw(costs);
  const double optimum = assignment_cost(costs, base);
  const double eps = 1e-9 * (1.0 + std::abs(optimum));

  // Fix rows in order, picking the smallest column that still admits an
  // optimal completion; this yields the lexicographically smallest optimal
  // permutation.
  std::vector<int> result(static_cast<std::size_t>(k), -1);
  std::vector<int> free_cols(static_cast<std::size_t>(k));
  std::iota(free_cols.begin(), free_cols.end(), 0);
  double prefix = 0.0;
  for (int i = 0; i < k; ++i) {
    const int remaining = k - i;
    for (std::size_t cand = 0; cand < free_cols.size(); ++cand) {
      const int j = free_cols[cand];
      double completion = 0.0;
      if (remaining > 1) {
        Matrix sub(remaining - 1, remaining - 1);
        Index r = 0;
        for (int row = i + 1; row < k; ++row, ++r) {
          Index c = 0;
          for (std::size_t idx = 0; idx < free_cols.size(); ++idx) {
            if (free_cols[idx] == j) continue;
            sub(r, c++) = costs(row, free_cols[idx]);
          }
        }
        completion = assignment_cost(sub, hungarian_raw(sub));
      }
      if (prefix + costs(i, j) + completion <= optimum + eps) {
        result[static_cast<std::size_t>(i)] = j;
        prefix += costs(i, j);
        free_cols.erase(free_cols.begin() + static_cast<std::ptrdiff_t>(cand));
        break;
      }
    }
  }
  return result;
}

}  // namespace magspec
