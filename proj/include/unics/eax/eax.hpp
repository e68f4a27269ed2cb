#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "unics/core/instance.hpp"
#include "unics/core/sparse_graph.hpp"
#include "unics/core/tour.hpp"
#include "unics/core/trace.hpp"
#include "unics/eax/ab_cycle.hpp"
#include "unics/guidance/scores.hpp"

namespace unics {

struct EaxConfig {
  int population_size = 100;
  int n_children = 30;   // offspring (E-sets) per parent pair
  double eta = 0.5;      // probability of a uniformly random E-set pick
  int stage2_no_improve_generations = 50;
  int threads = 1;       // parent pairs crossed concurrently; results do not depend on it

  void validate() const;
};

/// Degree-2 edge set produced by one E-set; possibly several subtours.
struct IntermediateSolution {
  std::vector<std::array<int, 2>> adj;
  std::vector<int> subtour_of;  // subtour id per node, ids 0..subtour_count-1
  int subtour_count = 0;
};

/// `size` tours, each a randomized nearest-neighbour tour improved by one
/// capped 2-opt descent. A seed tour replaces a uniformly random member.
std::vector<Tour> init_population(const TspInstance& inst, const SparseGraph& graph, int size,
                                  const std::optional<Tour>& seed, std::mt19937_64& rng);

/// Partitions E_A xor E_B into AB-cycles by an alternating random walk.
/// Edges shared by both parents are cancelled first.
std::vector<ABCycle> generate_ab_cycles(const Tour& parent_a, const Tour& parent_b, std::mt19937_64& rng);

/// Indices of up to n_children cycles, without replacement. Each pick is
/// the best-scored unused cycle (ties: lower index), or with probability
/// eta a uniformly random unused one.
std::vector<std::size_t> select_by_score(const std::vector<double>& scores, int n_children, double eta,
                                         std::mt19937_64& rng);
std::vector<std::size_t> select_esets(const std::vector<ABCycle>& cycles, const EdgeScores& scores,
                                      const EaxConfig& cfg, std::mt19937_64& rng);

/// Intermediate edge set: parent A's edges minus the E-set's A-edges plus its B-edges.
IntermediateSolution apply_eset(const Tour& parent_a, const ABCycle& eset);
/// Same, starting from a precomputed parent adjacency.
IntermediateSolution apply_eset(const std::vector<std::array<int, 2>>& parent_adj, const ABCycle& eset);

/// For every node j, the nodes i whose neighbour list contains j.
std::vector<std::vector<int>> incoming_lists(const SparseGraph& graph);

/// Optional precomputed data for merging: parent A's edges with their lengths
/// and the graph's incoming lists.
struct KnownEdges {
  const std::vector<std::array<int, 2>>& adj;
  const std::vector<std::array<std::int64_t, 2>>& len;
  const std::vector<std::vector<int>>* incoming = nullptr;
};

/// Repeatedly joins the smallest subtour (ties: smallest node id) to another
/// one by the 2-edge exchange with the least length increase. The search is
/// exact; a graph only speeds it up, except for n > 2000 where just the
/// exchanges introducing a graph edge are scanned (full scan if none exists).
/// Returns the merged tour and the total increase.
struct MergeResult {
  std::vector<std::array<int, 2>> adj;
  std::int64_t added_length = 0;
  int merges = 0;
};
MergeResult merge_subtours_adjacency(IntermediateSolution im, const TspInstance& inst,
                                     const SparseGraph* graph = nullptr, const KnownEdges* known = nullptr);
Tour merge_subtours(IntermediateSolution im, const TspInstance& inst, const SparseGraph* graph = nullptr);

/// Walks a single-cycle adjacency into a visiting order starting at node 0.
std::vector<int> order_from_adjacency(const std::vector<std::array<int, 2>>& adj);

struct GenerationStats {
  int pairs_with_cycles = 0;
  int replacements = 0;
  std::uint64_t offspring = 0;
  bool interrupted = false;
};

/// One generation: parents paired along a random cyclic permutation, each
/// member is p_A once and its successor p_B; per pair up to n_children
/// offspring, the best of which replaces p_A on strict improvement. All
/// pairs read the population as it was at the start of the generation.
/// Ticks the deadline by n per offspring.
GenerationStats eax_generation(std::vector<Tour>& population, const TspInstance& inst, const SparseGraph& graph,
                               const EdgeScores& scores, const EaxConfig& cfg, double eta, std::mt19937_64& rng,
                               Deadline& deadline);

struct EaxResult {
  Tour best;
  ConvergenceTrace trace;
  int generations = 0;
  bool stage2 = false;
  bool converged = false;  // stopped on stagnation or a uniform population
};

/// Generations until the deadline, Stage II stagnation, or convergence.
/// Stage II halves eta once the best stalls for stage2_no_improve_generations.
EaxResult run_eax(std::vector<Tour> population, const TspInstance& inst, const SparseGraph& graph,
                  const EdgeScores& scores, const EaxConfig& cfg, Deadline& deadline, std::mt19937_64& rng,
                  const Stopwatch& clock = Stopwatch());

const Tour& population_best(const std::vector<Tour>& population);

}  // namespace unics
