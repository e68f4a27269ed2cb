#pragma once

#include <cstdint>
#include <vector>

namespace unics {

enum class Origin : std::uint8_t { kA, kB };

struct CycleEdge {
  int u = 0;
  int v = 0;
  Origin origin = Origin::kA;

  friend bool operator==(const CycleEdge&, const CycleEdge&) = default;
};

/// Closed alternating walk in E_A ∪ E_B. Edge k runs from edges[k].u to
/// edges[k].v == edges[k+1].u; origins alternate A, B, A, B, ...
struct ABCycle {
  std::vector<CycleEdge> edges;

  std::size_t size() const { return edges.size(); }
};

/// Checks closure, alternation and even length >= 4.
bool is_valid_ab_cycle(const ABCycle& cycle);

}  // namespace unics
