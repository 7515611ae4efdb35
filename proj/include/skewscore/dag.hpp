#pragma once

#include "skewscore/types.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace skewscore {

/// Directed graph over d nodes; adjacency(i, j) == 1 means the edge i -> j.
/// Acyclicity is checked on construction from a matrix and on every edge insertion.
class Dag {
 public:
  using Adjacency = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>;

  Dag() = default;
  explicit Dag(int d) : adj_(Adjacency::Zero(d, d)) { require(d >= 0, "Dag: negative node count"); }

  static Dag from_adjacency(const Adjacency& adj) {
    require(adj.rows() == adj.cols(), "Dag: adjacency must be square");
    for (Eigen::Index i = 0; i < adj.rows(); ++i) {
      require(adj(i, i) == 0, "Dag: self loop at node " + std::to_string(i));
      for (Eigen::Index j = 0; j < adj.cols(); ++j)
        require(adj(i, j) == 0 || adj(i, j) == 1, "Dag: adjacency entries must be 0 or 1");
    }
    Dag g;
    g.adj_ = adj;
    require(g.is_acyclic(), "Dag: adjacency contains a cycle");
    return g;
  }

  int size() const noexcept { return static_cast<int>(adj_.rows()); }
  const Adjacency& adjacency() const noexcept { return adj_; }
  bool has_edge(int from, int to) const { return adj_(from, to) != 0; }
  int edge_count() const { return adj_.sum(); }

  void add_edge(int from, int to) {
    require(from != to, "Dag: self loop");
    require(from >= 0 && to >= 0 && from < size() && to < size(), "Dag: node index out of range");
    adj_(from, to) = 1;
    if (!is_acyclic()) {
      adj_(from, to) = 0;
      throw ParameterError("Dag: edge " + std::to_string(from) + "->" + std::to_string(to) + " closes a cycle");
    }
  }

  std::vector<int> parents(int node) const {
    std::vector<int> out;
    for (int k = 0; k < size(); ++k)
      if (adj_(k, node)) out.push_back(k);
    return out;
  }

  std::vector<int> children(int node) const {
    std::vector<int> out;
    for (int k = 0; k < size(); ++k)
      if (adj_(node, k)) out.push_back(k);
    return out;
  }

  /// Kahn's algorithm with a smallest-index-first frontier, so the result is deterministic.
  std::optional<std::vector<int>> topological_order() const {
    const int d = size();
    std::vector<int> indegree(d, 0);
    for (int j = 0; j < d; ++j) indegree[j] = adj_.col(j).sum();
    std::vector<int> order;
    order.reserve(d);
    std::vector<bool> done(d, false);
    for (int step = 0; step < d; ++step) {
      int next = -1;
      for (int j = 0; j < d; ++j)
        if (!done[j] && indegree[j] == 0) {
          next = j;
          break;
        }
      if (next < 0) return std::nullopt;
      done[next] = true;
      order.push_back(next);
      for (int k = 0; k < d; ++k)
        if (adj_(next, k)) --indegree[k];
    }
    return order;
  }

  bool is_acyclic() const { return topological_order().has_value(); }

  friend bool operator==(const Dag& a, const Dag& b) { return a.adj_ == b.adj_; }

 private:
  Adjacency adj_;
};

/// Permutation of node indices, earliest cause first.
class TopOrder {
 public:
  TopOrder() = default;
  explicit TopOrder(std::vector<int> nodes) : nodes_(std::move(nodes)) {
    std::vector<int> sorted = nodes_;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i)
      require(sorted[i] == static_cast<int>(i), "TopOrder: not a permutation of 0..d-1");
  }

  int size() const noexcept { return static_cast<int>(nodes_.size()); }
  const std::vector<int>& nodes() const noexcept { return nodes_; }
  int operator[](int i) const { return nodes_[static_cast<std::size_t>(i)]; }

  /// rank[node] = position of node in the order.
  std::vector<int> positions() const {
    std::vector<int> rank(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) rank[static_cast<std::size_t>(nodes_[i])] = static_cast<int>(i);
    return rank;
  }

  friend bool operator==(const TopOrder& a, const TopOrder& b) { return a.nodes_ == b.nodes_; }

 private:
  std::vector<int> nodes_;
};

}  // namespace skewscore
