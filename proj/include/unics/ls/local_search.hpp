#pragma once

#include <cstdint>
#include <random>

#include "unics/core/instance.hpp"
#include "unics/core/sparse_graph.hpp"
#include "unics/core/tour.hpp"
#include "unics/core/trace.hpp"
#include "unics/guidance/scores.hpp"

namespace unics {

struct LsConfig {
  int lambda_depth = 3;            // 2: 2-opt only, 3: adds sequential 3-opt
  int candidates_k = 5;
  bool use_penalties = false;      // pi-adjusted partial gains
  int restart_perturbation = 50;   // max double-bridge segment length, 0 = no kicks
  bool or_opt = true;
  bool check_every_move = false;   // O(n) validity check after each applied move

  void validate() const;
};

struct LsResult {
  Tour best;
  ConvergenceTrace trace;
  bool interrupted = false;  // stopped by the deadline rather than by convergence
  std::uint64_t evaluations = 0;
  std::uint64_t kicks = 0;
};

/// d(i,j) + pi_i + pi_j. Move evaluation only; reported lengths stay raw.
double pi_distance(const TspInstance& inst, const NodePenalties& penalties, int i, int j);

/// Greedy nearest neighbour from node 0 along sparse-graph edges, falling
/// back to the nearest unvisited node when all graph neighbours are used.
Tour initial_tour(const TspInstance& inst, const SparseGraph& graph);

/// Nearest neighbour from a random start, picking uniformly between the two
/// closest unvisited graph neighbours.
Tour randomized_nn_tour(const TspInstance& inst, const SparseGraph& graph, std::mt19937_64& rng);

/// The first k graph neighbours (distance order) as candidate lists.
CandidateLists nearest_candidates(const SparseGraph& graph, int k);

/// Neighbour-list 2-opt with don't-look bits until a local optimum or
/// `max_evaluations` move evaluations.
Tour two_opt(const TspInstance& inst, const CandidateLists& cands, const Tour& start,
             std::uint64_t max_evaluations);

/// Iterated local search: first-improvement 2-opt / sequential 3-opt /
/// Or-opt passes whose new edges come from the candidate lists, don't-look
/// bits, and a double-bridge kick at each local optimum. Ticks the deadline
/// once per move evaluation. The result is never longer than `start`.
/// `penalties` may be empty; it is only read when cfg.use_penalties is set.
LsResult local_search(const TspInstance& inst, const CandidateLists& cands, const NodePenalties& penalties,
                      const Tour& start, Deadline& deadline, std::mt19937_64& rng, const LsConfig& cfg,
                      const Stopwatch& clock = Stopwatch());

}  // namespace unics
