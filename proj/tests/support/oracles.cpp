#include "oracles.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace unics::oracle {

std::int64_t held_karp(const TspInstance& inst) {
  const int n = inst.size();
  if (n > 16) throw std::invalid_argument("held_karp: n too large");
  // dp[mask][j]: shortest path from 0 through `mask` (subset of 1..n-1) ending at j.
  const int m = n - 1;
  const std::size_t states = std::size_t{1} << m;
  constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;
  std::vector<std::int64_t> dp(states * static_cast<std::size_t>(m), kInf);
  for (int j = 0; j < m; ++j) dp[(std::size_t{1} << j) * m + j] = inst.distance(0, j + 1);
  for (std::size_t mask = 1; mask < states; ++mask) {
    for (int j = 0; j < m; ++j) {
      const std::int64_t cur = dp[mask * m + j];
      if (cur >= kInf || !(mask & (std::size_t{1} << j))) continue;
      for (int k = 0; k < m; ++k) {
        if (mask & (std::size_t{1} << k)) continue;
        const std::size_t next = mask | (std::size_t{1} << k);
        dp[next * m + k] = std::min(dp[next * m + k], cur + inst.distance(j + 1, k + 1));
      }
    }
  }
  std::int64_t best = kInf;
  for (int j = 0; j < m; ++j) best = std::min(best, dp[(states - 1) * m + j] + inst.distance(j + 1, 0));
  return best;
}

std::int64_t brute_force(const TspInstance& inst) {
  const int n = inst.size();
  if (n > 10) throw std::invalid_argument("brute_force: n too large");
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  // Node 0 fixed first; every direction visited twice, which is harmless.
  do {
    best = std::min(best, tour_length(inst, order));
  } while (std::next_permutation(order.begin() + 1, order.end()));
  return best;
}

std::vector<std::vector<int>> exact_knn(const TspInstance& inst, int k) {
  const int n = inst.size();
  std::vector<std::vector<int>> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    std::vector<std::pair<double, int>> all;
    for (int j = 0; j < n; ++j) {
      const double dx = inst.point(i).x - inst.point(j).x;
      const double dy = inst.point(i).y - inst.point(j).y;
      if (j != i) all.emplace_back(dx * dx + dy * dy, j);
    }
    std::sort(all.begin(), all.end());
    const int take = std::min<int>(k, n - 1);
    for (int t = 0; t < take; ++t) out[static_cast<std::size_t>(i)].push_back(all[static_cast<std::size_t>(t)].second);
  }
  return out;
}

EdgeBag tour_edges(const std::vector<int>& order) {
  EdgeBag bag;
  const std::size_t n = order.size();
  for (std::size_t i = 0; i < n; ++i) ++bag[make_edge(order[i], order[(i + 1) % n])];
  return bag;
}

EdgeBag adjacency_edges(const std::vector<std::array<int, 2>>& adj) {
  // Each edge appears once from each endpoint.
  EdgeBag twice;
  for (std::size_t v = 0; v < adj.size(); ++v) {
    for (int w : adj[v]) ++twice[make_edge(static_cast<int>(v), w)];
  }
  EdgeBag bag;
  for (const auto& [e, c] : twice) {
    if (c % 2 != 0) throw std::logic_error("adjacency is not symmetric");
    bag[e] = c / 2;
  }
  return bag;
}

EdgeBag symmetric_difference(const EdgeBag& a, const EdgeBag& b) {
  EdgeBag out;
  for (const auto& [e, c] : a) {
    const auto it = b.find(e);
    const int diff = c - (it == b.end() ? 0 : it->second);
    if (diff > 0) out[e] = diff;
  }
  for (const auto& [e, c] : b) {
    const auto it = a.find(e);
    const int diff = c - (it == a.end() ? 0 : it->second);
    if (diff > 0) out[e] = diff;
  }
  return out;
}

EdgeBag cycle_edges(const ABCycle& cycle) {
  EdgeBag bag;
  for (const CycleEdge& e : cycle.edges) ++bag[make_edge(e.u, e.v)];
  return bag;
}

EdgeBag cycle_edges(const ABCycle& cycle, Origin origin) {
  EdgeBag bag;
  for (const CycleEdge& e : cycle.edges) {
    if (e.origin == origin) ++bag[make_edge(e.u, e.v)];
  }
  return bag;
}

EdgeBag intermediate_edges(const EdgeBag& ea, const ABCycle& eset) {
  EdgeBag out = ea;
  for (const auto& [e, c] : cycle_edges(eset, Origin::kA)) {
    auto it = out.find(e);
    if (it == out.end() || it->second < c) throw std::logic_error("E-set A-edge not in E_A");
    it->second -= c;
    if (it->second == 0) out.erase(it);
  }
  for (const auto& [e, c] : cycle_edges(eset, Origin::kB)) out[e] += c;
  return out;
}

bool degree_two(const EdgeBag& edges, int n) {
  std::vector<int> deg(static_cast<std::size_t>(n), 0);
  for (const auto& [e, c] : edges) {
    if (e.first < 0 || e.second >= n) return false;
    deg[static_cast<std::size_t>(e.first)] += c;
    deg[static_cast<std::size_t>(e.second)] += c;
  }
  return std::all_of(deg.begin(), deg.end(), [](int d) { return d == 2; });
}

bool is_hamiltonian(const std::vector<int>& order, int n) {
  if (static_cast<int>(order.size()) != n) return false;
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  for (int v : order) {
    if (v < 0 || v >= n || seen[static_cast<std::size_t>(v)]) return false;
    seen[static_cast<std::size_t>(v)] = 1;
  }
  return true;
}

TspInstance random_instance(int n, std::mt19937_64& rng, double scale) {
  std::uniform_int_distribution<int> coord(0, static_cast<int>(scale) - 1);
  std::vector<Point> pts(static_cast<std::size_t>(n));
  for (Point& p : pts) {
    p.x = coord(rng);
    p.y = coord(rng);
  }
  return TspInstance("random" + std::to_string(n), Metric::kEuc2d, std::move(pts));
}

std::vector<int> random_order(int n, std::mt19937_64& rng) {
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

}  // namespace unics::oracle
