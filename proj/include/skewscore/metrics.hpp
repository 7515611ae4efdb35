#pragma once

#include "skewscore/dag.hpp"
#include "skewscore/types.hpp"

#include <cmath>
#include <vector>

namespace skewscore {

/// Number of true edges u -> v with u placed after v in the order.
inline int order_divergence(const TopOrder& order, const Dag& truth) {
  require(order.size() == truth.size(), "order_divergence: order and graph sizes differ");
  const std::vector<int> pos = order.positions();
  int count = 0;
  for (int u = 0; u < truth.size(); ++u)
    for (int v = 0; v < truth.size(); ++v)
      if (truth.has_edge(u, v) && pos[static_cast<std::size_t>(u)] > pos[static_cast<std::size_t>(v)]) ++count;
  return count;
}

/// Structural Hamming distance; a reversed edge costs 1.
inline int shd(const Dag& a, const Dag& b) {
  require(a.size() == b.size(), "shd: graphs have different sizes");
  int dist = 0;
  for (int i = 0; i < a.size(); ++i)
    for (int j = i + 1; j < a.size(); ++j) {
      const bool a_ij = a.has_edge(i, j), a_ji = a.has_edge(j, i);
      const bool b_ij = b.has_edge(i, j), b_ji = b.has_edge(j, i);
      if (a_ij != b_ij || a_ji != b_ji) ++dist;
    }
  return dist;
}

struct DirectionRun {
  int predicted_cause = 0;
  int true_cause = 0;
};

inline double direction_accuracy(const std::vector<DirectionRun>& runs) {
  require(!runs.empty(), "direction_accuracy: no runs");
  int ok = 0;
  for (const auto& r : runs) ok += r.predicted_cause == r.true_cause;
  return static_cast<double>(ok) / static_cast<double>(runs.size());
}

struct Summary {
  double mean = 0.0;
  double sd = 0.0;  // sample sd, 0 for a single value
  int count = 0;
};

inline Summary summarize(const std::vector<double>& v) {
  Summary s;
  s.count = static_cast<int>(v.size());
  if (v.empty()) return s;
  double acc = 0.0;
  for (double x : v) acc += x;
  s.mean = acc / s.count;
  if (s.count > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.sd = std::sqrt(ss / (s.count - 1));
  }
  return s;
}

}  // namespace skewscore
