#include "unics/cascade/solve.hpp"

#include <cmath>

#include "unics/core/sparse_graph.hpp"
#include "unics/guidance/sgn.hpp"

namespace unics {

void CascadeConfig::validate() const {
  if (!(t_max > 0.0) || !std::isfinite(t_max)) throw ConfigError("t_max must be positive");
  if (t_trans_override && !(*t_trans_override >= 0.0 && *t_trans_override <= t_max)) {
    throw ConfigError("t_trans must lie in [0, t_max]");
  }
  if (gamma < 1) throw ConfigError("gamma must be >= 1");
  if (iter_budget && *iter_budget == 0) throw ConfigError("iteration budget must be positive");
  try {
    ls.validate();
    eax.validate();
    policy.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

SolveResult solve(const TspInstance& inst, const CascadeConfig& cfg) {
  if (!cfg.weights) return solve(inst, cfg, nullptr);
  const SgnWeights w = load_weights_file(*cfg.weights);
  return solve(inst, cfg, &w);
}

SolveResult solve(const TspInstance& inst, const CascadeConfig& cfg, const SgnWeights* weights) {
  cfg.validate();
  const Stopwatch clock;
  SolveResult result;
  SolveReport& report = result.report;

  const int gamma = weights ? static_cast<int>(weights->gamma) : cfg.gamma;
  const SparseGraph graph = SparseGraph::build(inst, gamma);
  EdgeScores scores;
  NodePenalties penalties;
  if (weights) {
    GuidanceOutput out = sgn_forward(graph, inst, *weights);
    scores = std::move(out.scores);
    penalties = std::move(out.penalties);
    report.used_weights = true;
  } else {
    scores = heuristic_scores(graph);
  }

  const double t_trans = cfg.t_trans_override ? *cfg.t_trans_override
                                              : predict_t_trans(cfg.policy, inst.size(), cfg.t_max);
  report.t_trans = t_trans;
  const auto at = [&](double seconds) {
    return clock.origin() + std::chrono::duration_cast<Stopwatch::Clock::duration>(std::chrono::duration<double>(seconds));
  };

  std::mt19937_64 ls_rng(cfg.seed);
  std::mt19937_64 pbs_rng(cfg.seed ^ 1ull);
  std::uint64_t ticks_left = cfg.iter_budget.value_or(0);

  std::optional<Tour> seed_tour;
  if (t_trans > 0.0) {
    Deadline deadline = cfg.iter_budget
                            ? Deadline::budget(static_cast<std::uint64_t>(std::floor(
                                  static_cast<double>(*cfg.iter_budget) * (t_trans / cfg.t_max))))
                            : Deadline::at(at(t_trans));
    const CandidateLists cands = candidate_lists(scores, std::min(cfg.ls.candidates_k, graph.degree()));
    const Tour start = initial_tour(inst, graph);
    LsResult ls = local_search(inst, cands, penalties, start, deadline, ls_rng, cfg.ls, clock);
    result.trace.merge(ls.trace);
    report.ls_best = ls.best.length();
    report.ls_kicks = ls.kicks;
    if (cfg.iter_budget) ticks_left -= std::min(ticks_left, deadline.used());
    seed_tour = std::move(ls.best);
  }

  if (t_trans < cfg.t_max) {
    report.switched_at = clock.elapsed();
    result.trace.mark_transition(report.switched_at);
    Deadline deadline = cfg.iter_budget ? Deadline::budget(ticks_left) : Deadline::at(at(cfg.t_max));
    std::vector<Tour> population = init_population(inst, graph, cfg.eax.population_size, seed_tour, pbs_rng);
    report.pbs_initial_best = population_best(population).length();
    EaxResult eax = run_eax(std::move(population), inst, graph, scores, cfg.eax, deadline, pbs_rng, clock);
    result.trace.merge(eax.trace);
    report.generations = eax.generations;
    if (!seed_tour || eax.best.length() < seed_tour->length()) {
      result.best = std::move(eax.best);
    } else {
      result.best = std::move(*seed_tour);
    }
  } else {
    report.switched_at = clock.elapsed();
    result.best = std::move(*seed_tour);
  }

  report.wall_s = clock.elapsed();
  result.trace.set_t_end(report.wall_s);
  return result;
}

TraceRunner cascade_runner(const CascadeConfig& cfg) {
  return [cfg](const TspInstance& inst, double t_trans, std::uint64_t seed) {
    CascadeConfig run = cfg;
    run.t_trans_override = t_trans;
    run.seed = seed;
    return solve(inst, run).trace;
  };
}

}  // namespace unics
