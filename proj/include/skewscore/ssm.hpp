#pragma once

#include "skewscore/mlp.hpp"
#include "skewscore/rng.hpp"
#include "skewscore/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

namespace skewscore {

enum class JvpMode { Nested, FiniteDifference };

struct SsmConfig {
  std::vector<int> hidden{128, 128, 128};
  Activation activation = Activation::Tanh;
  int epochs = 100;
  int batch_size = 128;
  double learning_rate = 1e-3;
  int projections = 1;
  JvpMode jvp = JvpMode::Nested;
  double fd_step = 1e-4;  // relative to the data scale
  // Share of rows held out to pick the epoch with the lowest held-out loss; 0 keeps the last epoch.
  double validation_fraction = 0.2;
  int validation_projections = 8;
  int patience = 10;  // stop after this many epochs without a held-out improvement; 0 never stops
};

struct SsmFit {
  ScoreMatrix scores;
  std::vector<double> epoch_loss;
  std::vector<double> validation_loss;  // empty without a held-out split
  int best_epoch = 0;                   // 1-based epoch whose weights produced `scores`
};

namespace detail {

inline Matrix rademacher(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Matrix v(rows, cols);
  std::bernoulli_distribution coin(0.5);
  for (Eigen::Index i = 0; i < v.size(); ++i) v.data()[i] = coin(rng) ? 1.0 : -1.0;
  return v;
}

/// Sliced loss on one batch (columns = samples) and its parameter gradient.
inline double ssm_batch(const Mlp& net, const Matrix& x, const Matrix& v, const SsmConfig& cfg, double fd_h,
                        std::vector<Mlp::Layer>& grads) {
  const double inv_b = 1.0 / static_cast<double>(x.cols());
  if (cfg.jvp == JvpMode::Nested) {
    const Mlp::Trace t = net.trace(x, &v);
    const Eigen::RowVectorXd vs = (v.array() * t.out.array()).colwise().sum();
    const Eigen::RowVectorXd vjv = (v.array() * t.dout.array()).colwise().sum();
    const double loss = (vjv.array() + 0.5 * vs.array().square()).sum() * inv_b;
    const Matrix g_out = (v.array().rowwise() * vs.array()).matrix() * inv_b;
    const Matrix g_dout = v * inv_b;
    net.backward(t, g_out, &g_dout, grads);
    return loss;
  }
  // v' J v  ~  v' (s(x + h v) - s(x - h v)) / (2h)
  const Matrix xp = x + fd_h * v, xm = x - fd_h * v;
  const Mlp::Trace t0 = net.trace(x), tp = net.trace(xp), tm = net.trace(xm);
  const Eigen::RowVectorXd vs = (v.array() * t0.out.array()).colwise().sum();
  const Eigen::RowVectorXd vjv = (v.array() * (tp.out - tm.out).array()).colwise().sum() / (2.0 * fd_h);
  const double loss = (vjv.array() + 0.5 * vs.array().square()).sum() * inv_b;
  net.backward(t0, (v.array().rowwise() * vs.array()).matrix() * inv_b, nullptr, grads);
  net.backward(tp, v * (inv_b / (2.0 * fd_h)), nullptr, grads);
  net.backward(tm, v * (-inv_b / (2.0 * fd_h)), nullptr, grads);
  return loss;
}

}  // namespace detail

/// Trains s_theta: R^d -> R^d on the sliced objective E[v' (ds/dx) v + (v's)^2 / 2]
/// and evaluates it at every sample. The empirical objective keeps falling past the population
/// optimum as the network overfits, so the weights with the lowest held-out loss are kept.
inline SsmFit fit_ssm(const Eigen::Ref<const Matrix>& data, const SsmConfig& cfg, Rng& rng) {
  const Eigen::Index n = data.rows();
  const int d = static_cast<int>(data.cols());
  require(cfg.epochs >= 1, "SsmConfig: epochs must be >= 1");
  require(cfg.batch_size >= 1, "SsmConfig: batch_size must be >= 1");
  require(cfg.projections >= 1, "SsmConfig: projections must be >= 1");
  require(cfg.learning_rate > 0, "SsmConfig: learning_rate must be positive");
  require(cfg.jvp != JvpMode::FiniteDifference || cfg.fd_step > 0, "SsmConfig: fd_step must be positive");
  require(cfg.validation_fraction >= 0 && cfg.validation_fraction < 1,
          "SsmConfig: validation_fraction must lie in [0, 1)");
  require(cfg.validation_projections >= 1, "SsmConfig: validation_projections must be >= 1");
  require(cfg.patience >= 0, "SsmConfig: patience must be nonnegative");
  if (!data.allFinite()) throw DataError("estimate_score_ssm: non-finite input");
  const auto n_val = static_cast<Eigen::Index>(std::floor(cfg.validation_fraction * static_cast<double>(n)));
  const Eigen::Index n_train = n - n_val;
  require(n >= cfg.batch_size, "estimate_score_ssm: need at least batch_size rows");

  double scale = 0.0;
  for (int j = 0; j < d; ++j) {
    const Vector c = data.col(j).array() - data.col(j).mean();
    scale = std::max(scale, std::sqrt(c.squaredNorm() / static_cast<double>(n)));
  }
  const double fd_h = cfg.fd_step * (scale > 0 ? scale : 1.0);

  Mlp net(d, cfg.hidden, d, cfg.activation, rng);
  Adam opt(net, cfg.learning_rate);
  const Matrix xt = data.transpose();
  std::vector<Eigen::Index> rows(static_cast<std::size_t>(n));
  std::iota(rows.begin(), rows.end(), Eigen::Index{0});
  std::shuffle(rows.begin(), rows.end(), rng);
  std::vector<Eigen::Index> perm(rows.begin(), rows.begin() + n_train);

  // Fixed held-out batch, replicated once per projection.
  Matrix xv, vv;
  if (n_val > 0) {
    xv.resize(d, n_val * cfg.validation_projections);
    for (int p = 0; p < cfg.validation_projections; ++p)
      for (Eigen::Index c = 0; c < n_val; ++c)
        xv.col(p * n_val + c) = xt.col(rows[static_cast<std::size_t>(n_train + c)]);
    vv = detail::rademacher(d, xv.cols(), rng);
  }

  SsmFit fit;
  Mlp best = net;
  double best_val = std::numeric_limits<double>::infinity();
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(perm.begin(), perm.end(), rng);
    double total = 0.0;
    int batches = 0;
    for (Eigen::Index start = 0; start < n_train; start += cfg.batch_size) {
      const Eigen::Index b = std::min<Eigen::Index>(cfg.batch_size, n_train - start);
      Matrix x(d, b * cfg.projections);
      for (int p = 0; p < cfg.projections; ++p)
        for (Eigen::Index c = 0; c < b; ++c) x.col(p * b + c) = xt.col(perm[static_cast<std::size_t>(start + c)]);
      const Matrix v = detail::rademacher(d, x.cols(), rng);
      auto grads = net.zero_like();
      const double loss = detail::ssm_batch(net, x, v, cfg, fd_h, grads);
      if (!std::isfinite(loss)) {
        const int last = epoch - 1;
        throw TrainingError("estimate_score_ssm: non-finite loss in epoch " + std::to_string(epoch + 1) +
                                (last >= 0 ? "; last finite epoch " + std::to_string(last + 1) : std::string()),
                            last + 1, last >= 0 ? fit.epoch_loss.back() : std::nan(""));
      }
      opt.step(net, grads);
      total += loss;
      ++batches;
    }
    fit.epoch_loss.push_back(total / batches);
    if (n_val > 0) {
      auto scratch = net.zero_like();
      const double val = detail::ssm_batch(net, xv, vv, cfg, fd_h, scratch);
      fit.validation_loss.push_back(val);
      if (val < best_val) {
        best_val = val;
        best = net;
        fit.best_epoch = epoch + 1;
      } else if (cfg.patience > 0 && epoch + 1 - fit.best_epoch >= cfg.patience) {
        break;
      }
    }
  }
  if (n_val == 0 || fit.best_epoch == 0) {
    best = net;
    fit.best_epoch = cfg.epochs;
  }
  fit.scores = best.forward(xt).transpose();
  if (!fit.scores.allFinite()) throw TrainingError("estimate_score_ssm: non-finite scores", cfg.epochs, fit.epoch_loss.back());
  return fit;
}

inline ScoreMatrix estimate_score_ssm(const Eigen::Ref<const Matrix>& data, const SsmConfig& cfg, Rng& rng) {
  return fit_ssm(data, cfg, rng).scores;
}

}  // namespace skewscore
