#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "unics/core/instance.hpp"

namespace unics {

/// Directed gamma-nearest-neighbour graph. Node i owns the slots
/// [i*degree, (i+1)*degree), sorted by (exact Euclidean length, node id);
/// the rounded distances are therefore non-decreasing along each list.
class SparseGraph {
 public:
  /// Nearest min(gamma, n-1) other nodes per node. Uses a uniform grid;
  /// falls back to an exact scan when the grid search cannot prove a list.
  static SparseGraph build(const TspInstance& inst, int gamma);

  int size() const { return n_; }
  int gamma() const { return gamma_; }
  /// Out-degree actually stored: min(gamma, n-1).
  int degree() const { return degree_; }
  std::size_t edge_count() const { return targets_.size(); }

  std::span<const int> neighbors(int i) const {
    return {targets_.data() + slot(i, 0), static_cast<std::size_t>(degree_)};
  }
  std::span<const std::int64_t> distances(int i) const {
    return {dist_.data() + slot(i, 0), static_cast<std::size_t>(degree_)};
  }
  /// Unrounded squared Euclidean lengths, aligned with neighbors(i). Empty
  /// span if the graph was assembled without them.
  std::span<const double> squared_lengths(int i) const {
    if (sq_.empty()) return {};
    return {sq_.data() + slot(i, 0), static_cast<std::size_t>(degree_)};
  }
  std::size_t slot(int i, int k) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(degree_) + static_cast<std::size_t>(k);
  }
  int target(std::size_t s) const { return targets_[s]; }
  std::int64_t distance(std::size_t s) const { return dist_[s]; }

  /// Slot of the edge i -> j, or -1 if absent.
  long find(int i, int j) const;

  /// For every slot (i -> j), the slot of (j -> i) or -1.
  std::vector<long> reverse_slots() const;

  const std::vector<int>& targets() const { return targets_; }

  SparseGraph(int n, int gamma, int degree, std::vector<int> targets, std::vector<std::int64_t> dist,
              std::vector<double> squared = {});

 private:
  int n_ = 0;
  int gamma_ = 0;
  int degree_ = 0;
  std::vector<int> targets_;
  std::vector<std::int64_t> dist_;
  std::vector<double> sq_;
};

}  // namespace unics
