#pragma once

#include "skewscore/dag.hpp"
#include "skewscore/kci.hpp"
#include "skewscore/rng.hpp"
#include "skewscore/types.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace skewscore {

struct PruneConfig {
  double alpha = 0.05;
  int subsample_cap = 1000;
  std::uint64_t seed = 0;
  KciConfig kci;
};

struct EdgeTest {
  int from = 0, to = 0;
  std::vector<int> conditioning;
  KciResult result;
  bool kept = false;
};

struct PruneResult {
  Dag graph;
  std::vector<EdgeTest> tests;
  std::vector<int> rows;  // rows used for testing
};

/// Uniform subsample without replacement, returned in increasing order.
inline std::vector<int> subsample_rows(int n, int cap, Rng& rng) {
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  if (cap >= n) return idx;
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(static_cast<std::size_t>(cap));
  std::sort(idx.begin(), idx.end());
  return idx;
}

/// For each pair i < j in the order, keeps pi_i -> pi_j when the dependence of X_{pi_i} and X_{pi_j}
/// given the other predecessors of pi_j is significant.
inline PruneResult prune(const Eigen::Ref<const Matrix>& data, const TopOrder& order, const PruneConfig& cfg = {}) {
  const int d = static_cast<int>(data.cols());
  require(order.size() == d, "prune: order does not cover the data columns");
  require(cfg.alpha > 0 && cfg.alpha < 1, "prune: alpha must lie in (0, 1)");
  require(cfg.subsample_cap >= 2, "prune: subsample_cap must be >= 2");
  Rng rng = make_rng(cfg.seed, 31);
  PruneResult out;
  out.graph = Dag(d);
  out.rows = subsample_rows(static_cast<int>(data.rows()), cfg.subsample_cap, rng);
  const auto m = static_cast<Eigen::Index>(out.rows.size());
  Matrix sub(m, d);
  for (Eigen::Index r = 0; r < m; ++r) sub.row(r) = data.row(out.rows[static_cast<std::size_t>(r)]);

  KciConfig kcfg = cfg.kci;
  for (int j = 1; j < d; ++j) {
    for (int i = 0; i < j; ++i) {
      EdgeTest t;
      t.from = order[i];
      t.to = order[j];
      for (int k = 0; k < j; ++k)
        if (k != i) t.conditioning.push_back(order[k]);
      Matrix z(m, static_cast<Eigen::Index>(t.conditioning.size()));
      for (std::size_t c = 0; c < t.conditioning.size(); ++c)
        z.col(static_cast<Eigen::Index>(c)) = sub.col(t.conditioning[c]);
      kcfg.seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(t.from * d + t.to));
      try {
        t.result = kci_test(sub.col(t.from), sub.col(t.to), z, kcfg);
      } catch (const std::exception& e) {
        throw NumericError("prune: test of edge " + std::to_string(t.from) + "->" + std::to_string(t.to) +
                           " failed: " + e.what());
      }
      t.kept = t.result.p_value < cfg.alpha;
      if (t.kept) out.graph.add_edge(t.from, t.to);
      out.tests.push_back(std::move(t));
    }
  }
  return out;
}

inline nlohmann::json edge_tests_json(const std::vector<EdgeTest>& tests) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& t : tests)
    arr.push_back({{"from", t.from},
                   {"to", t.to},
                   {"conditioning", t.conditioning},
                   {"statistic", t.result.statistic},
                   {"p_value", t.result.p_value},
                   {"n", t.result.n},
                   {"kept", t.kept}});
  return arr;
}

}  // namespace skewscore
