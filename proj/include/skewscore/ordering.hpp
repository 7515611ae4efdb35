#pragma once

#include "skewscore/analytic.hpp"
#include "skewscore/dag.hpp"
#include "skewscore/datagen.hpp"
#include "skewscore/rng.hpp"
#include "skewscore/ssm.hpp"
#include "skewscore/stein.hpp"
#include "skewscore/types.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace skewscore {

/// Odd, nonlinear test function applied to centered scores.
struct OddTestFunction {
  enum class Kind { Cube, SignedSquare, ScaledTanh };
  Kind kind = Kind::Cube;
  double tau = 1.0;

  double operator()(double s) const {
    switch (kind) {
      case Kind::Cube: return s * s * s;
      case Kind::SignedSquare: return s * std::abs(s);
      case Kind::ScaledTanh: return std::tanh(s / tau);
    }
    return 0.0;
  }

  std::string name() const {
    switch (kind) {
      case Kind::Cube: return "cube";
      case Kind::SignedSquare: return "signed_square";
      case Kind::ScaledTanh: return "tanh";
    }
    return "?";
  }

  static OddTestFunction parse(const std::string& s, double tau = 1.0) {
    require(tau > 0, "OddTestFunction: tau must be positive");
    if (s == "cube") return {Kind::Cube, tau};
    if (s == "signed_square") return {Kind::SignedSquare, tau};
    if (s == "tanh") return {Kind::ScaledTanh, tau};
    throw ParameterError("unknown test function '" + s + "'");
  }
};

/// |mean psi(s_i - mean s)|.
inline double skew_of_score(const Eigen::Ref<const Vector>& column, const OddTestFunction& psi = {}) {
  require(column.size() >= 1, "skew_of_score: empty column");
  if (!column.allFinite()) throw DataError("skew_of_score: non-finite score values");
  const double mean = column.mean();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < column.size(); ++i) acc += psi(column(i) - mean);
  return std::abs(acc / static_cast<double>(column.size()));
}

/// Bootstrap standard error of skew_of_score.
inline double skew_bootstrap_se(const Eigen::Ref<const Vector>& column, const OddTestFunction& psi, int resamples,
                                Rng& rng) {
  require(resamples >= 2, "skew_bootstrap_se: need at least 2 resamples");
  const Eigen::Index n = column.size();
  std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
  Vector draw(n), stats(resamples);
  for (int b = 0; b < resamples; ++b) {
    for (Eigen::Index i = 0; i < n; ++i) draw(i) = column(pick(rng));
    stats(b) = skew_of_score(draw, psi);
  }
  const double m = stats.mean();
  return std::sqrt((stats.array() - m).square().sum() / (resamples - 1));
}

struct SinkChoice {
  int column = 0;
  Vector skews;
};

/// Argmin of the per-column skew; ties go to the lowest column index.
inline SinkChoice find_sink(const Eigen::Ref<const ScoreMatrix>& scores, const OddTestFunction& psi = {}) {
  require(scores.cols() >= 1, "find_sink: no columns");
  SinkChoice out;
  out.skews.resize(scores.cols());
  for (Eigen::Index j = 0; j < scores.cols(); ++j) out.skews(j) = skew_of_score(scores.col(j), psi);
  for (Eigen::Index j = 1; j < scores.cols(); ++j)
    if (out.skews(j) < out.skews(out.column)) out.column = static_cast<int>(j);
  return out;
}

// ---- estimator adapters -------------------------------------------------------------------
// An estimator is any callable (full data, remaining column indices) -> ScoreMatrix whose
// columns follow the given indices.

inline Matrix select_columns(const Eigen::Ref<const Matrix>& data, const std::vector<int>& cols) {
  Matrix out(data.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) out.col(static_cast<Eigen::Index>(c)) = data.col(cols[c]);
  return out;
}

struct SteinEstimator {
  SteinConfig cfg;
  ScoreMatrix operator()(const Eigen::Ref<const Matrix>& data, const std::vector<int>& cols) const {
    return estimate_score_stein(select_columns(data, cols), cfg);
  }
};

/// Each call trains a fresh network from a generator derived from (seed, call count).
struct SsmEstimator {
  SsmConfig cfg;
  std::uint64_t seed = 0;
  mutable std::uint64_t calls = 0;
  ScoreMatrix operator()(const Eigen::Ref<const Matrix>& data, const std::vector<int>& cols) const {
    Rng rng = make_rng(seed, 1000 + calls++);
    return estimate_score_ssm(select_columns(data, cols), cfg, rng);
  }
};

/// Exact scores of the remaining margin; only meaningful while every removed node was a sink.
struct AnalyticEstimator {
  const Scm* scm = nullptr;
  ScoreMatrix operator()(const Eigen::Ref<const Matrix>& data, const std::vector<int>& cols) const {
    return analytic_score_scm(*scm, data, cols);
  }
};

// ---- ordering phase ----------------------------------------------------------------------

struct OrderingConfig {
  OddTestFunction psi;
  int bootstrap_resamples = 200;
  double threshold_se_multiple = 3.0;
  std::optional<double> fixed_threshold;  // overrides the bootstrap threshold
  std::uint64_t seed = 0;
};

struct OrderIteration {
  std::vector<int> remaining;  // original node indices, in score-column order
  Vector skews;                // empty for the final single-node step
  int chosen = -1;             // original index of the removed node
  double threshold = 0.0;
  bool violation = false;
};

struct OrderDiagnostics {
  std::vector<OrderIteration> iterations;
  std::string estimator;

  bool any_violation() const {
    for (const auto& it : iterations)
      if (it.violation) return true;
    return false;
  }
};

class OrderingError : public std::runtime_error {
 public:
  OrderingError(const std::string& what, OrderDiagnostics partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const OrderDiagnostics& partial() const noexcept { return partial_; }

 private:
  OrderDiagnostics partial_;
};

struct OrderResult {
  TopOrder order;
  OrderDiagnostics diagnostics;
};

/// Repeatedly estimates the score on the remaining columns, removes the minimum-skew
/// column as a sink and prepends it to the order.
template <class Estimator>
OrderResult topological_order(const Eigen::Ref<const Matrix>& data, Estimator&& estimator,
                              const OrderingConfig& cfg = {}, std::string estimator_name = "custom") {
  const int d = static_cast<int>(data.cols());
  require(d >= 1, "topological_order: data has no columns");
  require(cfg.threshold_se_multiple > 0, "OrderingConfig: threshold_se_multiple must be positive");
  if (!data.allFinite()) throw DataError("topological_order: non-finite data");
  Rng boot = make_rng(cfg.seed, 77);
  OrderDiagnostics diag;
  diag.estimator = std::move(estimator_name);
  std::vector<int> remaining(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) remaining[static_cast<std::size_t>(j)] = j;
  std::vector<int> reversed;
  while (remaining.size() > 1) {
    OrderIteration it;
    it.remaining = remaining;
    ScoreMatrix scores;
    try {
      scores = estimator(data, remaining);
    } catch (const std::exception& e) {
      throw OrderingError(std::string("topological_order: estimator failed at iteration ") +
                              std::to_string(diag.iterations.size() + 1) + ": " + e.what(),
                          diag);
    }
    require(scores.rows() == data.rows() && scores.cols() == static_cast<Eigen::Index>(remaining.size()),
            "topological_order: estimator returned a matrix of the wrong shape");
    const SinkChoice sink = find_sink(scores, cfg.psi);
    it.skews = sink.skews;
    it.chosen = remaining[static_cast<std::size_t>(sink.column)];
    if (cfg.fixed_threshold) {
      it.threshold = *cfg.fixed_threshold;
    } else {
      it.threshold = cfg.threshold_se_multiple *
                     skew_bootstrap_se(scores.col(sink.column), cfg.psi, cfg.bootstrap_resamples, boot);
    }
    it.violation = sink.skews(sink.column) > it.threshold;
    reversed.push_back(it.chosen);
    remaining.erase(remaining.begin() + sink.column);
    diag.iterations.push_back(std::move(it));
  }
  OrderIteration last;
  last.remaining = remaining;
  last.chosen = remaining.front();
  diag.iterations.push_back(std::move(last));
  reversed.push_back(remaining.front());
  return {TopOrder(std::vector<int>(reversed.rbegin(), reversed.rend())), std::move(diag)};
}

inline nlohmann::json to_json(const OrderDiagnostics& diag) {
  nlohmann::json its = nlohmann::json::array();
  for (const auto& it : diag.iterations) {
    std::vector<double> sk(it.skews.data(), it.skews.data() + it.skews.size());
    its.push_back({{"remaining", it.remaining},
                   {"skews", sk},
                   {"chosen", it.chosen},
                   {"threshold", it.threshold},
                   {"violation", it.violation}});
  }
  return {{"estimator", diag.estimator}, {"iterations", its}, {"any_violation", diag.any_violation()}};
}

}  // namespace skewscore
