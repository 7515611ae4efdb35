#pragma once

#include "skewscore/kernel.hpp"
#include "skewscore/types.hpp"

#include <optional>
#include <string>

namespace skewscore {

struct SteinConfig {
  std::optional<double> bandwidth;  // empty: median heuristic
  double bandwidth_scale = 0.35;    // multiplies the median-heuristic value
  std::optional<double> ridge;      // absolute eta; empty: ridge_per_sample * n
  double ridge_per_sample = 1e-4;
  bool standardize = true;  // fit on unit-variance columns, then map scores back by 1/sd
};

inline double stein_bandwidth(const Eigen::Ref<const Matrix>& x, const SteinConfig& cfg) {
  if (cfg.bandwidth) {
    require(*cfg.bandwidth > 0, "SteinConfig: bandwidth must be positive");
    return *cfg.bandwidth;
  }
  require(cfg.bandwidth_scale > 0, "SteinConfig: bandwidth_scale must be positive");
  return cfg.bandwidth_scale * median_heuristic_bandwidth(x);
}

inline double stein_ridge(Eigen::Index n, const SteinConfig& cfg) {
  const double eta = cfg.ridge ? *cfg.ridge : cfg.ridge_per_sample * static_cast<double>(n);
  require(eta > 0, "SteinConfig: ridge must be positive");
  return eta;
}

/// Kernel Stein gradient estimator at the sample points:
///   G = -(K + eta I)^{-1} B,   B_i = sum_j K_ij (x_i - x_j) / h^2.
inline ScoreMatrix estimate_score_stein(const Eigen::Ref<const Matrix>& x, const SteinConfig& cfg = {}) {
  const Eigen::Index n = x.rows();
  require(n >= 2, "estimate_score_stein: need at least 2 rows");
  if (!x.allFinite()) throw DataError("estimate_score_stein: non-finite input");
  if (cfg.standardize) {
    Vector sd(x.cols());
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      const double m = x.col(j).mean();
      const double v = std::sqrt((x.col(j).array() - m).square().sum() / static_cast<double>(n));
      sd(j) = v > 0 ? v : 1.0;
    }
    SteinConfig inner = cfg;
    inner.standardize = false;
    const Matrix z = (x.rowwise() - x.colwise().mean()).array().rowwise() / sd.transpose().array();
    return (estimate_score_stein(z, inner).array().rowwise() / sd.transpose().array()).matrix();
  }
  const double h = stein_bandwidth(x, cfg);
  const double eta = stein_ridge(n, cfg);
  Matrix k = rbf_gram(x, h);
  const Vector row_sum = k.rowwise().sum();
  const Matrix b = (x.array().colwise() * row_sum.array()).matrix() - k * x;
  k.diagonal().array() += eta;
  Eigen::LLT<Matrix> llt(k);
  if (llt.info() != Eigen::Success)
    throw NumericError("estimate_score_stein: Cholesky of K + eta I failed (n=" + std::to_string(n) +
                       ", h=" + std::to_string(h) + ", eta=" + std::to_string(eta) + ")");
  ScoreMatrix g = llt.solve(b / (h * h));
  g *= -1.0;
  if (!g.allFinite()) throw NumericError("estimate_score_stein: solve produced non-finite values");
  return g;
}

}  // namespace skewscore
