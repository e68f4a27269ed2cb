#pragma once

#include <span>
#include <vector>

#include "unics/core/sparse_graph.hpp"
#include "unics/eax/ab_cycle.hpp"

namespace unics {

/// Per directed sparse-graph edge score, aligned with the graph's slots.
/// Each node's out-scores sum to one.
class EdgeScores {
 public:
  EdgeScores() = default;
  EdgeScores(const SparseGraph& graph, std::vector<double> beta);

  int size() const { return n_; }
  int degree() const { return degree_; }
  std::span<const double> row(int i) const {
    return {beta_.data() + static_cast<std::size_t>(i) * degree_, static_cast<std::size_t>(degree_)};
  }
  std::span<const int> targets(int i) const {
    return {targets_.data() + static_cast<std::size_t>(i) * degree_, static_cast<std::size_t>(degree_)};
  }
  const std::vector<double>& values() const { return beta_; }

  /// beta(i -> j), 0 when the edge is not in the sparse graph.
  double directed(int i, int j) const;
  /// Undirected edge score: max of both directions, 0 if neither exists.
  double undirected(int i, int j) const;

 private:
  int n_ = 0;
  int degree_ = 0;
  std::vector<int> targets_;
  std::vector<double> beta_;
};

struct NodePenalties {
  std::vector<double> pi;

  bool empty() const { return pi.empty(); }
  static NodePenalties zeros(int n) { return {std::vector<double>(static_cast<std::size_t>(n), 0.0)}; }
};

/// Up to k neighbours per node by descending score (ties: smaller id).
class CandidateLists {
 public:
  CandidateLists() = default;
  CandidateLists(int n, int k, std::vector<int> ids) : n_(n), k_(k), ids_(std::move(ids)) {}

  int size() const { return n_; }
  int width() const { return k_; }
  std::span<const int> of(int i) const {
    return {ids_.data() + static_cast<std::size_t>(i) * k_, static_cast<std::size_t>(k_)};
  }

 private:
  int n_ = 0;
  int k_ = 0;
  std::vector<int> ids_;
};

/// Weight-free scorer: softmax over i's out-edges of -d(i,k)/tau_i with
/// tau_i the mean out-edge distance of i. Uses unrounded Euclidean lengths,
/// so the scores are exactly invariant to translating or uniformly scaling
/// integer coordinates.
EdgeScores heuristic_scores(const SparseGraph& graph);

CandidateLists candidate_lists(const EdgeScores& scores, int k);

/// Sum of B-edge scores minus sum of A-edge scores (undirected lookup).
double score_ab_cycle(const ABCycle& cycle, const EdgeScores& scores);

}  // namespace unics
