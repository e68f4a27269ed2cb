// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance            every criterion except the long cascade trend run
//   acceptance trend      only the cascade trend run (about 30 minutes)
//   acceptance all        everything
//
// Exit status is non-zero if any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "../support/oracles.hpp"
#include "unics/cascade/solve.hpp"
#include "unics/cli/commands.hpp"
#include "unics/core/sparse_graph.hpp"
#include "unics/eax/eax.hpp"
#include "unics/guidance/scores.hpp"
#include "unics/guidance/sgn.hpp"
#include "unics/ls/local_search.hpp"
#include "unics/transition/policy.hpp"

using namespace unics;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string name;
  double time_limit_s;  // wall-clock budget stated for the criterion
  bool slow;
  std::function<Outcome()> run;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

// ---------------------------------------------------------------------------

Outcome exactness() {
  std::mt19937_64 rng(2024);
  int optimal = 0;
  std::string first_miss;
  for (int k = 0; k < 100; ++k) {
    const int n = 6 + k % 5;
    const TspInstance inst = oracle::random_instance(n, rng, 1000);
    CascadeConfig cfg;
    cfg.t_max = 2.0;
    cfg.iter_budget = 1'000'000;
    cfg.seed = 42 + 60 * static_cast<std::uint64_t>(k);
    const std::int64_t got = solve(inst, cfg).best.length();
    const std::int64_t opt = oracle::held_karp(inst);
    if (got == opt) {
      ++optimal;
    } else if (first_miss.empty()) {
      first_miss = fmt(" (first miss: instance %d, n=%d, %lld vs %lld)", k, n, static_cast<long long>(got),
                       static_cast<long long>(opt));
    }
  }
  return {optimal == 100, fmt("%d/100 optimal", optimal) + first_miss};
}

Outcome crossover_validity() {
  std::mt19937_64 rng(7);
  int trials = 0, ok = 0;
  long offspring = 0;
  std::map<std::string, int> failures;
  while (trials < 10000) {
    const int n = 8 + static_cast<int>(rng() % 43);
    const TspInstance inst = oracle::random_instance(n, rng, 10000);
    const SparseGraph g = SparseGraph::build(inst, 20);
    const EdgeScores scores = heuristic_scores(g);
    // Half the pairs are random tours, half locally optimised ones.
    Tour a, b;
    if (trials % 2 == 0) {
      a = Tour::from_order(inst, oracle::random_order(n, rng));
      b = Tour::from_order(inst, oracle::random_order(n, rng));
    } else {
      const auto pop = init_population(inst, g, 2, std::nullopt, rng);
      a = pop[0];
      b = pop[1];
    }
    ++trials;
    bool good = true;
    auto fail = [&](const std::string& why) {
      good = false;
      ++failures[why];
    };
    const auto cycles = generate_ab_cycles(a, b, rng);
    const auto ea = oracle::tour_edges(a.order());
    oracle::EdgeBag all;
    for (const ABCycle& c : cycles) {
      if (!is_valid_ab_cycle(c)) fail("alternation");
      for (const auto& [e, m] : oracle::cycle_edges(c)) all[e] += m;
    }
    if (all != oracle::symmetric_difference(ea, oracle::tour_edges(b.order()))) fail("multiset");
    EaxConfig cfg;
    for (std::size_t idx : select_esets(cycles, scores, cfg, rng)) {
      const ABCycle& eset = cycles[idx];
      const IntermediateSolution im = apply_eset(a, eset);
      const auto ec = oracle::adjacency_edges(im.adj);
      if (ec != oracle::intermediate_edges(ea, eset)) fail("intermediate edge set");
      if (!oracle::degree_two(ec, n)) fail("degree-2");
      const Tour child = merge_subtours(im, inst, &g);
      ++offspring;
      if (!oracle::is_hamiltonian(child.order(), n) || child.length() != tour_length(inst, child.order())) {
        fail("hamiltonian");
      }
    }
    ok += good;
  }
  std::string why;
  for (const auto& [k, v] : failures) why += fmt(" %s:%d", k.c_str(), v);
  return {ok == trials, fmt("%d/%d trials clean, %ld offspring checked", ok, trials, offspring) + why};
}

Outcome ab_cycle_score() {
  std::mt19937_64 rng(11);
  // Antisymmetry on 1,000 cycles from real parent pairs.
  int cycles_seen = 0, antisymmetric = 0;
  while (cycles_seen < 1000) {
    const int n = 10 + static_cast<int>(rng() % 40);
    const TspInstance inst = oracle::random_instance(n, rng);
    const SparseGraph g = SparseGraph::build(inst, 8);
    // Alternate the fallback scorer and random network weights.
    const EdgeScores s = cycles_seen % 2 == 1 ? sgn_forward(g, inst, SgnWeights::random(2, 8, 8, rng)).scores
                                                     : heuristic_scores(g);
    const Tour a = Tour::from_order(inst, oracle::random_order(n, rng));
    const Tour b = Tour::from_order(inst, oracle::random_order(n, rng));
    for (const ABCycle& c : generate_ab_cycles(a, b, rng)) {
      if (cycles_seen == 1000) break;
      ABCycle swapped = c;
      for (CycleEdge& e : swapped.edges) e.origin = e.origin == Origin::kA ? Origin::kB : Origin::kA;
      antisymmetric += score_ab_cycle(swapped, s) == -score_ab_cycle(c, s);
      ++cycles_seen;
    }
  }

  // eta = 0: strictly descending scores (ties by index) over random sets.
  int descending_ok = 0;
  const int descending_trials = 1000;
  for (int t = 0; t < descending_trials; ++t) {
    const int n = 20 + static_cast<int>(rng() % 60);
    const TspInstance inst = oracle::random_instance(n, rng);
    const SparseGraph g = SparseGraph::build(inst, 10);
    const EdgeScores s = heuristic_scores(g);
    const auto cycles = generate_ab_cycles(Tour::from_order(inst, oracle::random_order(n, rng)),
                                           Tour::from_order(inst, oracle::random_order(n, rng)), rng);
    EaxConfig cfg;
    cfg.eta = 0.0;
    cfg.n_children = static_cast<int>(cycles.size()) + 5;
    const auto pick = select_esets(cycles, s, cfg, rng);
    bool ok = pick.size() == cycles.size();
    for (std::size_t i = 1; ok && i < pick.size(); ++i) {
      const double prev = score_ab_cycle(cycles[pick[i - 1]], s), cur = score_ab_cycle(cycles[pick[i]], s);
      ok = prev > cur || (prev == cur && pick[i - 1] < pick[i]);
    }
    descending_ok += ok;
  }

  // eta = 1: each of the 3! orders within 3 sigma of 1/6 over 60,000 trials.
  const TspInstance inst = oracle::random_instance(6, rng);
  const SparseGraph g = SparseGraph::build(inst, 5);
  const EdgeScores s = heuristic_scores(g);
  std::vector<ABCycle> three(3);
  for (int c = 0; c < 3; ++c) {
    three[static_cast<std::size_t>(c)].edges = {{c, c + 1, Origin::kA}, {c + 1, c + 2, Origin::kB},
                                                {c + 2, c + 3, Origin::kA}, {c + 3, c, Origin::kB}};
  }
  EaxConfig cfg;
  cfg.eta = 1.0;
  cfg.n_children = 3;
  std::map<std::vector<std::size_t>, int> counts;
  const int trials = 60000;
  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 trial_rng(static_cast<std::uint64_t>(t) * 0x9E3779B97F4A7C15ull + 1);
    ++counts[select_esets(three, s, cfg, trial_rng)];
  }
  const double p = 1.0 / 6.0;
  const double sigma = std::sqrt(trials * p * (1 - p));
  double worst = 0.0;
  for (const auto& [perm, c] : counts) worst = std::max(worst, std::abs(c - trials * p) / sigma);
  const bool uniform = counts.size() == 6 && worst <= 3.0;

  const bool pass = antisymmetric == 1000 && descending_ok == descending_trials && uniform;
  return {pass, fmt("antisymmetry %d/1000, eta=0 descending %d/%d, eta=1 %zu orders, max |z| = %.2f", antisymmetric,
                    descending_ok, descending_trials, counts.size(), worst)};
}

Outcome sgn_contract() {
  std::mt19937_64 rng(13);
  int sums_ok = 0, bounded = 0, deterministic = 0;
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const int n = 5 + static_cast<int>(rng() % 56);
    const std::uint32_t gamma = 2 + static_cast<std::uint32_t>(rng() % 19);
    const std::uint32_t layers = static_cast<std::uint32_t>(rng() % 4);
    const TspInstance inst = oracle::random_instance(n, rng, 1e6);
    const SparseGraph g = SparseGraph::build(inst, static_cast<int>(gamma));
    const SgnWeights w = SgnWeights::random(layers, 8, gamma, rng);
    const GuidanceOutput a = sgn_forward(g, inst, w);
    const GuidanceOutput b = sgn_forward(g, inst, w);
    bool row_ok = true;
    for (int i = 0; i < n; ++i) {
      double sum = 0.0;
      for (double x : a.scores.row(i)) sum += x;
      worst = std::max(worst, std::abs(sum - 1.0));
      row_ok = row_ok && std::abs(sum - 1.0) <= 1e-5;
    }
    sums_ok += row_ok;
    bounded += std::all_of(a.penalties.pi.begin(), a.penalties.pi.end(), [](double p) { return std::abs(p) <= 10.0; });
    deterministic += a.scores.values() == b.scores.values() && a.penalties.pi == b.penalties.pi;
  }
  int uniform_ok = 0;
  const int uniform_trials = 50;
  for (int t = 0; t < uniform_trials; ++t) {
    const int n = 3 + t;
    const TspInstance inst = oracle::random_instance(n, rng);
    const SparseGraph g = SparseGraph::build(inst, 20);
    const GuidanceOutput out = sgn_forward(g, inst, SgnWeights::zeros(0, 16, 20));
    const double expect = 1.0 / std::min(20, n - 1);
    uniform_ok += std::all_of(out.scores.values().begin(), out.scores.values().end(), [&](double b) { return b == expect; });
  }
  const bool pass = sums_ok == 1000 && bounded == 1000 && deterministic == 1000 && uniform_ok == uniform_trials;
  return {pass, fmt("row sums %d/1000 (max dev %.1e), |pi|<=C %d/1000, bit-identical repeat %d/1000, "
                    "L=0 uniform %d/%d",
                    sums_ok, worst, bounded, deterministic, uniform_ok, uniform_trials)};
}

Outcome gap_metric() {
  ConvergenceTrace late;
  late.record(3.0, 1020, Phase::kLs);
  const auto curve = gap_curve(late, 1000, 4);
  const double example = gap_sum(curve);
  const bool example_ok = curve.size() == 4 && std::abs(example - 0.44) < 1e-12;

  // Constant curve: an optimum-length tour found before t = 1, and a
  // dyadic gap so the sum is exact.
  ConvergenceTrace constant;
  constant.record(0.5, 1250, Phase::kLs);
  const bool constant_ok = gap_sum(gap_curve(constant, 1000, 8)) == 8 * 0.25;

  // Monotone curve: non-increasing after the first event and
  // Gap_sum >= horizon * final gap, with equality iff the final gap is in place by t = 1.
  std::mt19937_64 rng(17);
  int monotone_ok = 0;
  for (int t = 0; t < 1000; ++t) {
    ConvergenceTrace tr;
    double time = std::uniform_real_distribution<double>(0.05, 2.0)(rng);
    std::int64_t len = 4096;
    const int events = 1 + static_cast<int>(rng() % 6);
    for (int e = 0; e < events; ++e) {
      tr.record(time, len, Phase::kPbs);
      len -= 1 + static_cast<std::int64_t>(rng() % 64);
      time += std::uniform_real_distribution<double>(0.1, 3.0)(rng);
    }
    const auto c = gap_curve(tr, 1024, 16);
    bool ok = true;
    const double first_t = tr.events().front().t;
    for (std::size_t k = 1; k < c.size(); ++k) {
      if (static_cast<double>(k) >= first_t) ok = ok && c[k] <= c[k - 1];
    }
    const double sum = gap_sum(c);
    ok = ok && sum >= 16 * c.back();
    ok = ok && ((sum == 16 * c.back()) == (tr.events().back().t <= 1.0));
    monotone_ok += ok;
  }
  return {example_ok && constant_ok && monotone_ok == 1000,
          fmt("example sum %.15g, constant identity %s, monotone identities %d/1000", example,
              constant_ok ? "exact" : "off", monotone_ok)};
}

Outcome transition_policy() {
  const LinearPolicy two = fit_policy({{100, 10}, {200, 20}});
  const bool ols = two.slope == 0.1 && two.intercept == 0.0;

  std::mt19937_64 rng(19);
  std::vector<PolicyInstance> instances;
  for (int n : {30, 60, 90, 120, 150}) instances.push_back({oracle::random_instance(n, rng), std::nullopt});
  const std::vector<double> grid{1, 2, 3, 4, 5, 6, 7, 8};
  auto planted = [](int n) { return 1.0 + static_cast<double>(n / 30 - 1) * 1.5; };  // 1, 2.5, 4, 5.5, 7
  auto nearest_grid = [&](double t) {
    double best = grid.front();
    for (double g : grid) {
      if (std::abs(g - t) < std::abs(best - t)) best = g;
    }
    return best;
  };
  TraceRunner runner = [&](const TspInstance& inst, double t_trans, std::uint64_t) {
    ConvergenceTrace tr;
    tr.record(0.25, 3000, Phase::kLs);
    tr.record(0.5 + 2.0 * std::abs(t_trans - nearest_grid(planted(inst.size()))), 1000, Phase::kPbs);
    return tr;
  };
  const PolicyCollection col = collect_policy_samples(instances, grid, 10, runner, 1, 0.1);
  int recovered = 0;
  for (const PolicySample& s : col.samples) recovered += s.t_trans == nearest_grid(planted(s.n));

  int clamped = 0;
  const int clamp_trials = 100000;
  std::uniform_real_distribution<double> u(-1, 1);
  for (int t = 0; t < clamp_trials; ++t) {
    LinearPolicy p;
    p.slope = u(rng);
    p.intercept = 1000 * u(rng);
    p.clamp_min = 20 * std::abs(u(rng));
    p.clamp_fraction = 0.01 + 0.98 * std::abs(u(rng));
    const double t_max = 0.1 + 2000 * std::abs(u(rng));
    const double got = predict_t_trans(p, 3 + static_cast<int>(rng() % 100000), t_max);
    const double hi = p.clamp_fraction * t_max;
    clamped += got <= hi && got >= std::min(p.clamp_min, hi);
  }
  const bool pass = ols && recovered == 5 && clamped == clamp_trials;
  return {pass, fmt("two-point fit a=%g b=%g, planted argmin %d/5, clamps %d/%d", two.slope, two.intercept, recovered,
                    clamped, clamp_trials)};
}

Outcome ls_monotonicity() {
  std::mt19937_64 rng(23);
  int ok = 0;
  std::string first_failure;
  for (int run = 0; run < 1000; ++run) {
    const int n = 8 + static_cast<int>(rng() % 193);
    const TspInstance inst = oracle::random_instance(n, rng, 1e6);
    const SparseGraph g = SparseGraph::build(inst, 10);
    LsConfig cfg;
    cfg.check_every_move = true;  // throws on any invalid intermediate tour
    cfg.lambda_depth = 2 + run % 2;
    cfg.use_penalties = run % 3 == 0;
    NodePenalties pi;
    if (cfg.use_penalties) {
      pi.pi.resize(static_cast<std::size_t>(n));
      for (double& p : pi.pi) p = std::uniform_real_distribution<double>(-1e4, 1e4)(rng);
    }
    const Tour start = run % 2 ? Tour::from_order(inst, oracle::random_order(n, rng)) : initial_tour(inst, g);
    Deadline d = Deadline::budget(20000);
    std::mt19937_64 run_rng(static_cast<std::uint64_t>(run));
    try {
      const LsResult r = local_search(inst, candidate_lists(heuristic_scores(g), 5), pi, start, d, run_rng, cfg);
      bool good = r.best.length() <= start.length() && r.best.length() == tour_length(inst, r.best.order()) &&
                  r.trace.best() == r.best.length() && r.trace.events().front().length == start.length();
      const auto& ev = r.trace.events();
      for (std::size_t i = 1; i < ev.size(); ++i) good = good && ev[i].length < ev[i - 1].length && ev[i].t > ev[i - 1].t;
      ok += good;
      if (!good && first_failure.empty()) first_failure = fmt(" (run %d: non-monotone or invalid best)", run);
    } catch (const std::exception& e) {
      if (first_failure.empty()) first_failure = fmt(" (run %d: %s)", run, e.what());
    }
  }
  return {ok == 1000, fmt("%d/1000 runs valid after every move with non-increasing best", ok) + first_failure};
}

Outcome cascade_trend() {
  constexpr int kInstances = 10;
  constexpr int kNodes = 1000;
  constexpr double kTmax = 60.0;
  int beats_pbs = 0, beats_ls = 0;
  std::string rows;
  for (int k = 0; k < kInstances; ++k) {
    const TspInstance inst = cli::uniform_instance(kNodes, 1000 + static_cast<std::uint64_t>(k), "trend");
    CascadeConfig base;
    base.t_max = kTmax;
    base.seed = 42;
    std::vector<ConvergenceTrace> traces;
    for (const std::optional<double> t : {std::optional<double>{}, std::optional<double>{0.0}, std::optional<double>{kTmax}}) {
      CascadeConfig cfg = base;
      cfg.t_trans_override = t;
      traces.push_back(solve(inst, cfg).trace);
    }
    std::int64_t ref = *traces[0].best();
    for (const auto& t : traces) ref = std::min(ref, *t.best());
    double sums[3];
    for (int c = 0; c < 3; ++c) sums[c] = gap_sum(gap_curve(traces[static_cast<std::size_t>(c)], ref, kTmax));
    beats_pbs += sums[0] <= sums[1];
    beats_ls += sums[0] <= sums[2];
    rows += fmt("\n    instance %d: Gap_sum cascade %.4f  pure-PBS %.4f  pure-LS %.4f  (final gaps %.3f%% %.3f%% %.3f%%)", k,
                sums[0], sums[1], sums[2], 100.0 * (*traces[0].best() - ref) / ref,
                100.0 * (*traces[1].best() - ref) / ref, 100.0 * (*traces[2].best() - ref) / ref);
    std::fflush(stdout);
  }
  return {beats_pbs >= 7 && beats_ls >= 7,
          fmt("cascade <= pure-PBS on %d/10, cascade <= pure-LS on %d/10", beats_pbs, beats_ls) + rows};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string mode = argc > 1 ? argv[1] : "fast";
  const std::vector<Criterion> criteria{
      {"exactness oracle (100 instances, n in [6,10])", 300, false, exactness},
      {"crossover validity (10,000 crossovers, n in [8,50])", 120, false, crossover_validity},
      {"AB-cycle score properties", 60, false, ab_cycle_score},
      {"SGN contract", 60, false, sgn_contract},
      {"Gap_sum metric", 1, false, gap_metric},
      {"transition policy", 60, false, transition_policy},
      {"LS monotonicity and validity (1,000 runs, n <= 200)", 120, false, ls_monotonicity},
      {"cascade trend (10 instances, n = 1000, t_max = 60 s)", 3600, true, cascade_trend},
  };
  int failed = 0, ran = 0;
  for (const Criterion& c : criteria) {
    const bool selected = mode == "all" || (mode == "trend" ? c.slow : !c.slow);
    if (!selected) continue;
    ++ran;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.time_limit_s;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::printf("%s  %s — %s [%.1f s%s]\n", pass ? "PASS" : "FAIL", c.name.c_str(), o.detail.c_str(), secs,
                in_time ? "" : fmt(", over the %.0f s limit", c.time_limit_s).c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", ran - failed, ran);
  return failed == 0 ? 0 : 1;
}
