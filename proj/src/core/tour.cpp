#include "unics/core/tour.hpp"

namespace unics {

bool is_permutation_of(std::span<const int> order, int n) {
  if (static_cast<int>(order.size()) != n) return false;
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  for (int v : order) {
    if (v < 0 || v >= n || seen[static_cast<std::size_t>(v)]) return false;
    seen[static_cast<std::size_t>(v)] = 1;
  }
  return true;
}

std::int64_t tour_length(const TspInstance& inst, std::span<const int> order) {
  if (!is_permutation_of(order, inst.size())) {
    throw InvalidPermutation("order is not a permutation of 0.." + std::to_string(inst.size() - 1));
  }
  std::int64_t total = 0;
  for (std::size_t k = 0; k + 1 < order.size(); ++k) total += inst.distance(order[k], order[k + 1]);
  total += inst.distance(order.back(), order.front());
  return total;
}

Tour Tour::from_order(const TspInstance& inst, std::vector<int> order) {
  const std::int64_t len = tour_length(inst, order);
  return Tour(std::move(order), len);
}

std::vector<std::array<int, 2>> Tour::adjacency() const {
  const std::size_t n = order_.size();
  std::vector<std::array<int, 2>> adj(n);
  for (std::size_t k = 0; k < n; ++k) {
    const int v = order_[k];
    adj[static_cast<std::size_t>(v)] = {order_[(k + n - 1) % n], order_[(k + 1) % n]};
  }
  return adj;
}

bool Tour::same_cycle(const Tour& other) const {
  if (order_.size() != other.order_.size()) return false;
  auto a = adjacency();
  auto b = other.adjacency();
  for (std::size_t v = 0; v < a.size(); ++v) {
    const bool same = (a[v][0] == b[v][0] && a[v][1] == b[v][1]) ||
                      (a[v][0] == b[v][1] && a[v][1] == b[v][0]);
    if (!same) return false;
  }
  return true;
}

}  // namespace unics
