#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "unics/eax/eax.hpp"
#include "unics/ls/local_search.hpp"

namespace unics {

void EaxConfig::validate() const {
  if (population_size < 2) throw std::invalid_argument("population_size must be >= 2");
  if (n_children < 1) throw std::invalid_argument("n_children must be >= 1");
  if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("eta must be in [0, 1]");
  if (stage2_no_improve_generations < 1) throw std::invalid_argument("stage2_no_improve_generations must be >= 1");
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
}

const Tour& population_best(const std::vector<Tour>& population) {
  return *std::min_element(population.begin(), population.end(),
                           [](const Tour& a, const Tour& b) { return a.length() < b.length(); });
}

std::vector<Tour> init_population(const TspInstance& inst, const SparseGraph& graph, int size,
                                  const std::optional<Tour>& seed, std::mt19937_64& rng) {
  if (size < 2) throw std::invalid_argument("population size must be >= 2");
  const CandidateLists cands = nearest_candidates(graph, 10);
  const std::uint64_t cap = 50ull * static_cast<std::uint64_t>(inst.size()) * 10ull;
  std::vector<Tour> population;
  population.reserve(static_cast<std::size_t>(size));
  for (int k = 0; k < size; ++k) {
    population.push_back(two_opt(inst, cands, randomized_nn_tour(inst, graph, rng), cap));
  }
  if (seed) {
    if (seed->size() != inst.size()) throw std::invalid_argument("seed tour does not match the instance");
    population[std::uniform_int_distribution<std::size_t>(0, population.size() - 1)(rng)] = *seed;
  }
  return population;
}

namespace {

struct PairOutcome {
  std::optional<Tour> child;
  bool had_cycles = false;
  std::uint64_t offspring = 0;
};

PairOutcome cross_pair(const Tour& pa, const Tour& pb, const TspInstance& inst, const SparseGraph& graph,
                       const std::vector<std::vector<int>>& incoming,
                       const EdgeScores& scores, const EaxConfig& cfg, double eta, std::uint64_t seed,
                       Deadline& deadline) {
  PairOutcome out;
  std::mt19937_64 rng(seed);
  const std::vector<ABCycle> cycles = generate_ab_cycles(pa, pb, rng);
  if (cycles.empty()) return out;
  out.had_cycles = true;
  EaxConfig pick = cfg;
  pick.eta = eta;
  const std::vector<std::size_t> chosen = select_esets(cycles, scores, pick, rng);

  const auto base = pa.adjacency();
  std::vector<std::array<std::int64_t, 2>> base_len(base.size());
  for (std::size_t v = 0; v < base.size(); ++v) {
    base_len[v] = {inst.distance(static_cast<int>(v), base[v][0]), inst.distance(static_cast<int>(v), base[v][1])};
  }
  const KnownEdges known{base, base_len, &incoming};
  std::int64_t best_len = pa.length();
  std::vector<std::array<int, 2>> best_adj;
  for (std::size_t c : chosen) {
    if (deadline.expired()) break;
    const ABCycle& cycle = cycles[c];
    std::int64_t len = pa.length();
    for (const CycleEdge& e : cycle.edges) {
      const std::int64_t de = inst.distance(e.u, e.v);
      len += e.origin == Origin::kB ? de : -de;
    }
    MergeResult merged = merge_subtours_adjacency(apply_eset(base, cycle), inst, &graph, &known);
    len += merged.added_length;
    ++out.offspring;
    deadline.tick(static_cast<std::uint64_t>(inst.size()));
    if (len < best_len) {
      best_len = len;
      best_adj = std::move(merged.adj);
    }
  }
  if (!best_adj.empty()) {
    out.child = Tour::from_order(inst, order_from_adjacency(best_adj));
    if (out.child->length() != best_len) throw std::logic_error("offspring length bookkeeping broke");
  }
  return out;
}

}  // namespace

GenerationStats eax_generation(std::vector<Tour>& population, const TspInstance& inst, const SparseGraph& graph,
                               const EdgeScores& scores, const EaxConfig& cfg, double eta, std::mt19937_64& rng,
                               Deadline& deadline) {
  cfg.validate();
  const std::size_t size = population.size();
  if (size < 2) throw std::invalid_argument("population must hold at least 2 tours");
  std::vector<std::size_t> perm(size);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<std::uint64_t> seeds(size);
  for (auto& s : seeds) s = rng();

  const std::vector<std::vector<int>> incoming = incoming_lists(graph);
  std::vector<PairOutcome> outcomes(size);
  auto run_range = [&](std::size_t lo, std::size_t hi, Deadline& dl) {
    for (std::size_t i = lo; i < hi; ++i) {
      if (dl.expired()) break;
      outcomes[i] = cross_pair(population[perm[i]], population[perm[(i + 1) % size]], inst, graph, incoming,
                               scores, cfg, eta, seeds[i], dl);
    }
  };

  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(cfg.threads), size);
  if (workers <= 1 || deadline.has_budget()) {
    // Tick budgets are consumed in pair order, so they stay sequential.
    run_range(0, size, deadline);
  } else {
    std::vector<std::thread> pool;
    std::vector<Deadline> local(workers, deadline);
    const std::size_t chunk = (size + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back(run_range, w * chunk, std::min(size, (w + 1) * chunk), std::ref(local[w]));
    }
    for (auto& t : pool) t.join();
  }

  GenerationStats stats;
  for (std::size_t i = 0; i < size; ++i) {
    PairOutcome& o = outcomes[i];
    stats.offspring += o.offspring;
    if (o.had_cycles) ++stats.pairs_with_cycles;
    Tour& target = population[perm[i]];
    if (o.child && o.child->length() < target.length()) {
      target = std::move(*o.child);
      ++stats.replacements;
    }
  }
  stats.interrupted = deadline.expired();
  return stats;
}

EaxResult run_eax(std::vector<Tour> population, const TspInstance& inst, const SparseGraph& graph,
                  const EdgeScores& scores, const EaxConfig& cfg, Deadline& deadline, std::mt19937_64& rng,
                  const Stopwatch& clock) {
  cfg.validate();
  EaxResult result;
  result.best = population_best(population);
  result.trace.record(clock.elapsed(), result.best.length(), Phase::kPbs);
  double eta = cfg.eta;
  int stall = 0;
  while (!deadline.expired()) {
    const GenerationStats stats = eax_generation(population, inst, graph, scores, cfg, eta, rng, deadline);
    ++result.generations;
    const Tour& best = population_best(population);
    if (best.length() < result.best.length()) {
      result.best = best;
      result.trace.record(clock.elapsed(), best.length(), Phase::kPbs);
      stall = 0;
    } else {
      ++stall;
    }
    if (stats.interrupted) break;
    if (stats.pairs_with_cycles == 0) {
      result.converged = true;
      break;
    }
    if (stall >= cfg.stage2_no_improve_generations) {
      if (result.stage2) {
        result.converged = true;
        break;
      }
      result.stage2 = true;
      eta = cfg.eta / 2.0;
      stall = 0;
    }
  }
  result.trace.set_t_end(clock.elapsed());
  return result;
}

}  // namespace unics
