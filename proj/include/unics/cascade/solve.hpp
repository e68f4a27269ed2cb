#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>

#include "unics/core/instance.hpp"
#include "unics/core/tour.hpp"
#include "unics/core/trace.hpp"
#include "unics/eax/eax.hpp"
#include "unics/guidance/weights.hpp"
#include "unics/ls/local_search.hpp"
#include "unics/transition/policy.hpp"

namespace unics {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct CascadeConfig {
  double t_max = 10.0;                      // seconds
  std::optional<double> t_trans_override;   // else predicted by `policy`
  LsConfig ls;
  EaxConfig eax;
  int gamma = 20;
  std::optional<std::filesystem::path> weights;  // unset: weight-free scorer
  LinearPolicy policy;
  std::uint64_t seed = 42;
  /// Deterministic mode: total work ticks instead of wall time, split between
  /// the phases in proportion t_trans / t_max.
  std::optional<std::uint64_t> iter_budget;

  /// Throws ConfigError.
  void validate() const;
};

struct SolveReport {
  double t_trans = 0.0;             // planned switch point
  double switched_at = 0.0;         // wall time when PBS actually started
  std::optional<std::int64_t> ls_best;
  std::optional<std::int64_t> pbs_initial_best;
  int generations = 0;
  std::uint64_t ls_kicks = 0;
  bool used_weights = false;
  double wall_s = 0.0;
};

struct SolveResult {
  Tour best;
  ConvergenceTrace trace;
  SolveReport report;
};

/// Sparse graph, edge scores and t_trans; local search until t_trans; the
/// local-search best seeded into the EAX population, which runs for the
/// rest of the budget. Time or ticks left over by a converged phase go to
/// the next one.
SolveResult solve(const TspInstance& inst, const CascadeConfig& cfg);
/// As above with preloaded weights (nullptr: weight-free scorer).
SolveResult solve(const TspInstance& inst, const CascadeConfig& cfg, const SgnWeights* weights);

/// TraceRunner driving solve() with cfg and the given t_trans override.
TraceRunner cascade_runner(const CascadeConfig& cfg);

}  // namespace unics
