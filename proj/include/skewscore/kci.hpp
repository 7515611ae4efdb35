#pragma once

#include "skewscore/kernel.hpp"
#include "skewscore/rng.hpp"
#include "skewscore/types.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace skewscore {

enum class KciNull { Gamma, Permutation };

struct KciConfig {
  double epsilon = 1e-3;  // ridge of the conditional residualizer
  bool standardize = true;
  double bandwidth_scale = 1.0;
  // Fixed bandwidths per block; empty means median heuristic on that block.
  std::optional<double> bandwidth_x, bandwidth_y, bandwidth_z;
  KciNull null = KciNull::Gamma;
  int permutations = 500;
  std::uint64_t seed = 0;
};

struct KciResult {
  double statistic = 0.0;  // trace(Kx Ky) / n on the (residualized) centered Grams
  double p_value = 1.0;
  int n = 0;
  double null_mean = 0.0;
  double null_var = 0.0;
};

namespace detail {

inline double block_bandwidth(const Matrix& block, const std::optional<double>& fixed, double scale) {
  if (fixed) {
    require(*fixed > 0, "KciConfig: bandwidth must be positive");
    return *fixed;
  }
  return scale * median_heuristic_bandwidth(block);
}

/// Upper tail of the gamma law with the given first two moments.
inline double gamma_tail(double stat, double mean, double var) {
  if (!(mean > 0) || !(var > 0)) return 1.0;
  const double shape = mean * mean / var, scale = var / mean;
  if (stat <= 0) return 1.0;
  return std::clamp(boost::math::gamma_q(shape, stat / scale), 0.0, 1.0);
}

inline double permutation_p(const Matrix& kx, const Matrix& ky, double observed, const KciConfig& cfg) {
  require(cfg.permutations >= 1, "KciConfig: permutations must be >= 1");
  Rng rng = make_rng(cfg.seed, 4242);
  const Eigen::Index n = kx.rows();
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Eigen::Index{0});
  int exceed = 0;
  for (int b = 0; b < cfg.permutations; ++b) {
    std::shuffle(perm.begin(), perm.end(), rng);
    double s = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const Eigen::Index pj = perm[static_cast<std::size_t>(j)];
      for (Eigen::Index i = 0; i < n; ++i) s += kx(i, j) * ky(perm[static_cast<std::size_t>(i)], pj);
    }
    if (s >= observed) ++exceed;
  }
  return (exceed + 1.0) / (cfg.permutations + 1.0);
}

}  // namespace detail

/// Kernel (conditional) independence test of x and y given z (z may have zero columns).
inline KciResult kci_test(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& y,
                          const Eigen::Ref<const Matrix>& z, const KciConfig& cfg = {}) {
  const Eigen::Index n = x.size();
  require(y.size() == n, "kci_test: x and y lengths differ");
  require(z.cols() == 0 || z.rows() == n, "kci_test: z has the wrong number of rows");
  require(n >= 2, "kci_test: need at least 2 samples");
  require(z.cols() < n, "kci_test: conditioning set has at least as many columns as samples");
  require(cfg.epsilon > 0, "KciConfig: epsilon must be positive");
  if (!x.allFinite() || !y.allFinite() || !z.allFinite()) throw DataError("kci_test: non-finite input");

  auto prep = [&](const Matrix& m) { return cfg.standardize ? standardize_columns(m) : m; };
  const Matrix xs = prep(x), ys = prep(y);
  const Matrix ky = center_gram(rbf_gram(ys, detail::block_bandwidth(ys, cfg.bandwidth_y, cfg.bandwidth_scale)));

  KciResult r;
  r.n = static_cast<int>(n);
  const double dn = static_cast<double>(n);
  Matrix kx_used, ky_used;
  double stat_raw = 0.0;
  if (z.cols() == 0) {
    kx_used = center_gram(rbf_gram(xs, detail::block_bandwidth(xs, cfg.bandwidth_x, cfg.bandwidth_scale)));
    ky_used = ky;
    stat_raw = kx_used.cwiseProduct(ky_used).sum();
    r.null_mean = kx_used.trace() * ky_used.trace() / dn;
    r.null_var = 2.0 * kx_used.squaredNorm() * ky_used.squaredNorm() / (dn * dn);
  } else {
    const Matrix zs = prep(z);
    Matrix xz(n, 1 + zs.cols());
    xz << xs, zs;
    const Matrix kxz = center_gram(rbf_gram(xz, detail::block_bandwidth(xz, cfg.bandwidth_x, cfg.bandwidth_scale)));
    Matrix kz = center_gram(rbf_gram(zs, detail::block_bandwidth(zs, cfg.bandwidth_z, cfg.bandwidth_scale)));
    kz.diagonal().array() += cfg.epsilon;
    Eigen::LLT<Matrix> llt(kz);
    if (llt.info() != Eigen::Success) throw NumericError("kci_test: residualizer solve failed (Kz + eps I not PD)");
    const Matrix rz = cfg.epsilon * llt.solve(Matrix::Identity(n, n));
    kx_used = rz * kxz * rz;
    ky_used = rz * ky * rz;
    const Matrix had = kx_used.cwiseProduct(ky_used);
    stat_raw = had.sum();
    r.null_mean = kx_used.diagonal().dot(ky_used.diagonal());
    r.null_var = 2.0 * had.squaredNorm();
  }
  if (!std::isfinite(stat_raw) || !std::isfinite(r.null_mean) || !std::isfinite(r.null_var))
    throw NumericError("kci_test: non-finite statistic");
  r.statistic = stat_raw / dn;
  r.p_value = cfg.null == KciNull::Gamma ? detail::gamma_tail(stat_raw, r.null_mean, r.null_var)
                                         : detail::permutation_p(kx_used, ky_used, stat_raw, cfg);
  r.null_mean /= dn;
  r.null_var /= dn * dn;
  return r;
}

inline KciResult kci_test(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& y,
                          const KciConfig& cfg = {}) {
  return kci_test(x, y, Matrix(x.size(), 0), cfg);
}

}  // namespace skewscore
