// Copyright 2026 Secmark Authors
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

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "secmark/errors.hpp"
#include "secmark/rng.hpp"

namespace secmark {

struct ClusterResult {
  std::vector<int> assignment;                 // cluster id per point
  std::vector<std::vector<double>> centroids;  // k centroids
  std::vector<std::array<double, 2>> projection;  // top-2 PCA coords
  double inertia = 0.0;  // sum of squared distances to assigned centroid
};

namespace detail {

inline double sq_dist(const std::vector<double>& a,
                      const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

}  // namespace detail

// Lloyd's algorithm with k-means++ seeding. Ties in assignment go to the
// lower cluster id.
inline ClusterResult kmeans(const std::vector<std::vector<double>>& points,
                            int k, uint64_t seed, int max_iters = 100) {
  const int n = static_cast<int>(points.size());
  if (k < 1) throw ConfigError("cluster count must be positive");
  if (k > n)
    throw DataError("cluster count " + std::to_string(k) +
                    " exceeds point count " + std::to_string(n));
  const size_t dim = points[0].size();
  Rng rng(seed);

  ClusterResult result;
  result.centroids.push_back(points[rng.uniform_below(n)]);
  std::vector<double> d2(n);
  while (static_cast<int>(result.centroids.size()) < k) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : result.centroids)
        best = std::min(best, detail::sq_dist(points[i], c));
      d2[i] = best;
      total += best;
    }
    int pick;
    if (total > 0) {
      pick = static_cast<int>(rng.sample_discrete(d2));
    } else {
      pick = static_cast<int>(rng.uniform_below(n));
    }
    result.centroids.push_back(points[pick]);
  }

  result.assignment.assign(n, 0);
  for (int iter = 0; iter < max_iters; ++iter) {
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double best_d = detail::sq_dist(points[i], result.centroids[0]);
      for (int c = 1; c < k; ++c) {
        const double d = detail::sq_dist(points[i], result.centroids[c]);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (best != result.assignment[i]) {
        result.assignment[i] = best;
        changed = true;
      }
    }
    std::vector<std::vector<double>> sums(k, std::vector<double>(dim, 0.0));
    std::vector<int> counts(k, 0);
    for (int i = 0; i < n; ++i) {
      counts[result.assignment[i]]++;
      for (size_t j = 0; j < dim; ++j)
        sums[result.assignment[i]][j] += points[i][j];
    }
    for (int c = 0; c < k; ++c)
      if (counts[c] > 0)
        for (size_t j = 0; j < dim; ++j)
          result.centroids[c][j] = sums[c][j] / counts[c];
    if (!changed && iter > 0) break;
  }
  result.inertia = 0.0;
  for (int i = 0; i < n; ++i)
    result.inertia +=
        detail::sq_dist(points[i], result.centroids[result.assignment[i]]);
  return result;
}

// Projection onto the top-2 principal components of the centered data,
// ordered by eigenvalue. The sign of each component is fixed so its largest
// absolute loading is positive.
inline std::vector<std::array<double, 2>> pca_top2(
    const std::vector<std::vector<double>>& points) {
  const int n = static_cast<int>(points.size());
  if (n == 0) throw DataError("no points for projection");
  const int dim = static_cast<int>(points[0].size());
  Eigen::MatrixXd x(n, dim);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < dim; ++j) x(i, j) = points[i][j];
  const Eigen::RowVectorXd mean = x.colwise().mean();
  x.rowwise() -= mean;
  const Eigen::MatrixXd cov =
      (x.transpose() * x) / std::max(1, n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success)
    throw NumericError("eigendecomposition failed");
  // Eigenvalues come back ascending; take the last two columns.
  std::vector<std::array<double, 2>> out(n);
  for (int comp = 0; comp < 2; ++comp) {
    const int col = dim - 1 - comp;
    Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
    if (col >= 0) v = solver.eigenvectors().col(col);
    int arg = 0;
    for (int j = 1; j < dim; ++j)
      if (std::fabs(v(j)) > std::fabs(v(arg))) arg = j;
    if (v(arg) < 0) v = -v;
    const Eigen::VectorXd proj = x * v;
    for (int i = 0; i < n; ++i) out[i][comp] = proj(i);
  }
  return out;
}

// k-means over word vectors plus a 2-D view of the same vectors.
inline ClusterResult cluster_embeddings(
    const std::vector<std::vector<double>>& vectors, int k, uint64_t seed) {
  ClusterResult result = kmeans(vectors, k, seed);
  result.projection = pca_top2(vectors);
  return result;
}

}  // namespace secmark
