#include "unics/guidance/scores.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace unics {

EdgeScores::EdgeScores(const SparseGraph& graph, std::vector<double> beta)
    : n_(graph.size()), degree_(graph.degree()), targets_(graph.targets()), beta_(std::move(beta)) {
  if (beta_.size() != targets_.size()) throw std::invalid_argument("one score per sparse edge required");
}

double EdgeScores::directed(int i, int j) const {
  auto t = targets(i);
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t[k] == j) return row(i)[k];
  }
  return 0.0;
}

double EdgeScores::undirected(int i, int j) const { return std::max(directed(i, j), directed(j, i)); }

EdgeScores heuristic_scores(const SparseGraph& graph) {
  const int n = graph.size();
  const int k = graph.degree();
  std::vector<double> beta(graph.edge_count());
  std::vector<double> logits(static_cast<std::size_t>(k));
  std::vector<double> rel(static_cast<std::size_t>(k));
  for (int i = 0; i < n; ++i) {
    // Distances relative to the row's longest edge: a ratio of squared
    // lengths is exact under a uniform rescale of integer coordinates, so
    // the logits -d / mean(d) come out bit-identical after scaling.
    auto sq = graph.squared_lengths(i);
    auto dist = graph.distances(i);
    double top = 0.0;
    for (int s = 0; s < k; ++s) {
      rel[static_cast<std::size_t>(s)] =
          sq.empty() ? static_cast<double>(dist[static_cast<std::size_t>(s)]) : sq[static_cast<std::size_t>(s)];
      top = std::max(top, rel[static_cast<std::size_t>(s)]);
    }
    double total = 0.0;
    for (double& r : rel) {
      if (top > 0.0) r = sq.empty() ? r / top : std::sqrt(r / top);
      total += r;
    }
    for (int s = 0; s < k; ++s) {
      logits[static_cast<std::size_t>(s)] =
          total > 0.0 ? -(rel[static_cast<std::size_t>(s)] * k) / total : 0.0;
    }
    const double peak = *std::max_element(logits.begin(), logits.end());
    double z = 0.0;
    for (double& l : logits) {
      l = std::exp(l - peak);
      z += l;
    }
    for (int s = 0; s < k; ++s) beta[graph.slot(i, s)] = logits[static_cast<std::size_t>(s)] / z;
  }
  return EdgeScores(graph, std::move(beta));
}

CandidateLists candidate_lists(const EdgeScores& scores, int k) {
  if (k < 1 || k > scores.degree()) throw std::invalid_argument("candidate width must be in [1, degree]");
  const int n = scores.size();
  std::vector<int> ids(static_cast<std::size_t>(n) * k);
  std::vector<int> order(static_cast<std::size_t>(scores.degree()));
  for (int i = 0; i < n; ++i) {
    auto row = scores.row(i);
    auto targets = scores.targets(i);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (row[a] != row[b]) return row[a] > row[b];
      return targets[a] < targets[b];
    });
    for (int s = 0; s < k; ++s) {
      ids[static_cast<std::size_t>(i) * k + s] = targets[order[static_cast<std::size_t>(s)]];
    }
  }
  return CandidateLists(n, k, std::move(ids));
}

double score_ab_cycle(const ABCycle& cycle, const EdgeScores& scores) {
  double added = 0.0;
  double removed = 0.0;
  for (const CycleEdge& e : cycle.edges) {
    const double b = scores.undirected(e.u, e.v);
    if (e.origin == Origin::kB) {
      added += b;
    } else {
      removed += b;
    }
  }
  return added - removed;
}

}  // namespace unics
