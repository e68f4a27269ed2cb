#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "unics/core/instance.hpp"

namespace unics {

class InvalidPermutation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

bool is_permutation_of(std::span<const int> order, int n);

/// Sum of consecutive distances plus the closing edge.
/// Throws InvalidPermutation unless order is a permutation of 0..n-1.
std::int64_t tour_length(const TspInstance& inst, std::span<const int> order);

/// A Hamiltonian cycle with its cached integer length.
class Tour {
 public:
  Tour() = default;

  /// Validates the permutation and computes the length.
  static Tour from_order(const TspInstance& inst, std::vector<int> order);

  const std::vector<int>& order() const { return order_; }
  std::int64_t length() const { return length_; }
  int size() const { return static_cast<int>(order_.size()); }
  bool empty() const { return order_.empty(); }

  /// Same undirected cycle, regardless of rotation and direction.
  bool same_cycle(const Tour& other) const;

  /// Per-node (prev, next) along the order.
  std::vector<std::array<int, 2>> adjacency() const;

 private:
  Tour(std::vector<int> order, std::int64_t length) : order_(std::move(order)), length_(length) {}

  std::vector<int> order_;
  std::int64_t length_ = 0;
};

}  // namespace unics
