#pragma once

#include "skewscore/types.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace skewscore {

/// n x n matrix of squared Euclidean distances between rows.
inline Matrix squared_distances(const Eigen::Ref<const Matrix>& x) {
  const Vector sq = x.rowwise().squaredNorm();
  Matrix d2 = (-2.0 * x * x.transpose()).colwise() + sq;
  d2.rowwise() += sq.transpose();
  return d2.cwiseMax(0.0);
}

/// Median pairwise distance over at most `cap` evenly spaced rows; 1.0 when the median is zero.
inline double median_heuristic_bandwidth(const Eigen::Ref<const Matrix>& data, int cap = 1000) {
  const Eigen::Index n = data.rows();
  require(n >= 2, "median_heuristic_bandwidth: need at least 2 rows");
  require(cap >= 2, "median_heuristic_bandwidth: cap must be >= 2");
  const Eigen::Index m = std::min<Eigen::Index>(n, cap);
  Matrix sub(m, data.cols());
  for (Eigen::Index i = 0; i < m; ++i) sub.row(i) = data.row(i * n / m);
  std::vector<double> dist;
  dist.reserve(static_cast<std::size_t>(m * (m - 1) / 2));
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = i + 1; j < m; ++j) dist.push_back((sub.row(i) - sub.row(j)).norm());
  // Lower median for even counts keeps the result an actual pairwise distance.
  const auto mid = dist.begin() + static_cast<std::ptrdiff_t>((dist.size() - 1) / 2);
  std::nth_element(dist.begin(), mid, dist.end());
  const double med = *mid;
  return med > 0 ? med : 1.0;
}

/// exp(-|xi - xj|^2 / (2 h^2)).
inline Matrix rbf_gram(const Eigen::Ref<const Matrix>& x, double bandwidth) {
  require(bandwidth > 0, "rbf_gram: bandwidth must be positive");
  return (squared_distances(x) * (-0.5 / (bandwidth * bandwidth))).array().exp().matrix();
}

/// H K H with H = I - 11'/n.
inline Matrix center_gram(const Eigen::Ref<const Matrix>& k) {
  const Vector row_mean = k.rowwise().mean();
  const Vector col_mean = k.colwise().mean().transpose();
  const double all = k.mean();
  Matrix out = k;
  out.colwise() -= row_mean;
  out.rowwise() -= col_mean.transpose();
  out.array() += all;
  return out;
}

/// Columns shifted to zero mean and scaled to unit sd (constant columns are only centered).
inline Matrix standardize_columns(const Eigen::Ref<const Matrix>& x) {
  Matrix out = x.rowwise() - x.colwise().mean();
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    const double sd = std::sqrt(out.col(j).squaredNorm() / static_cast<double>(out.rows()));
    if (sd > 0) out.col(j) /= sd;
  }
  return out;
}

}  // namespace skewscore
