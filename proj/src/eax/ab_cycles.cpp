#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "unics/eax/eax.hpp"

namespace unics {

bool is_valid_ab_cycle(const ABCycle& cycle) {
  const std::size_t len = cycle.edges.size();
  if (len < 4 || len % 2 != 0) return false;
  for (std::size_t k = 0; k < len; ++k) {
    const CycleEdge& e = cycle.edges[k];
    const CycleEdge& next = cycle.edges[(k + 1) % len];
    if (e.v != next.u) return false;
    if (e.origin == next.origin) return false;
  }
  return true;
}

namespace {

/// Up to two remaining incident edges per node and origin.
struct Incidence {
  std::array<int, 2> nb{-1, -1};
  int count = 0;

  void add(int v) { nb[static_cast<std::size_t>(count++)] = v; }
  void remove(int v) {
    if (nb[0] == v) {
      nb[0] = nb[1];
    } else if (nb[1] != v) {
      throw std::logic_error("AB-cycle walk removed a missing edge");
    }
    nb[1] = -1;
    --count;
  }
};


}  // namespace

std::vector<ABCycle> generate_ab_cycles(const Tour& parent_a, const Tour& parent_b, std::mt19937_64& rng) {
  const int n = parent_a.size();
  if (parent_b.size() != n) throw std::invalid_argument("parents must have the same size");
  const auto adj_a = parent_a.adjacency();
  const auto adj_b = parent_b.adjacency();

  // inc[origin][v]: edges of that parent at v not shared with the other parent.
  std::array<std::vector<Incidence>, 2> inc{std::vector<Incidence>(static_cast<std::size_t>(n)),
                                            std::vector<Incidence>(static_cast<std::size_t>(n))};
  std::vector<int> active;
  std::vector<int> active_at(static_cast<std::size_t>(n), -1);
  for (int v = 0; v < n; ++v) {
    const auto& a = adj_a[static_cast<std::size_t>(v)];
    const auto& b = adj_b[static_cast<std::size_t>(v)];
    for (int w : a) {
      if (w != b[0] && w != b[1]) inc[0][static_cast<std::size_t>(v)].add(w);
    }
    for (int w : b) {
      if (w != a[0] && w != a[1]) inc[1][static_cast<std::size_t>(v)].add(w);
    }
    if (inc[0][static_cast<std::size_t>(v)].count > 0) {
      active_at[static_cast<std::size_t>(v)] = static_cast<int>(active.size());
      active.push_back(v);
    }
  }

  auto remaining = [&](int v) {
    return inc[0][static_cast<std::size_t>(v)].count + inc[1][static_cast<std::size_t>(v)].count;
  };
  auto deactivate_if_done = [&](int v) {
    if (remaining(v) > 0 || active_at[static_cast<std::size_t>(v)] < 0) return;
    const int at = active_at[static_cast<std::size_t>(v)];
    const int last = active.back();
    active[static_cast<std::size_t>(at)] = last;
    active_at[static_cast<std::size_t>(last)] = at;
    active.pop_back();
    active_at[static_cast<std::size_t>(v)] = -1;
  };
  auto take_edge = [&](int v, Origin o) {
    Incidence& here = inc[static_cast<std::size_t>(o)][static_cast<std::size_t>(v)];
    if (here.count == 0) throw std::logic_error("AB-cycle walk stuck");
    const int pick = here.count == 1 ? 0 : std::uniform_int_distribution<int>(0, here.count - 1)(rng);
    const int w = here.nb[static_cast<std::size_t>(pick)];
    here.remove(w);
    inc[static_cast<std::size_t>(o)][static_cast<std::size_t>(w)].remove(v);
    deactivate_if_done(v);
    deactivate_if_done(w);
    return w;
  };

  // last_pos[2v + phase]: path index where v waits to leave by that origin.
  std::vector<int> last_pos(2 * static_cast<std::size_t>(n), -1);
  auto slot = [](int v, Origin phase) { return 2 * static_cast<std::size_t>(v) + static_cast<std::size_t>(phase); };
  auto phase_at = [](std::size_t index) { return index % 2 == 0 ? Origin::kA : Origin::kB; };

  std::vector<ABCycle> cycles;
  std::vector<int> path;
  while (!active.empty()) {
    const int start = active[static_cast<std::size_t>(std::uniform_int_distribution<int>(
        0, static_cast<int>(active.size()) - 1)(rng))];
    path.assign(1, start);
    last_pos[slot(start, Origin::kA)] = 0;
    while (!path.empty()) {
      const std::size_t here = path.size() - 1;
      const int v = path.back();
      const Origin phase = phase_at(here);
      if (inc[static_cast<std::size_t>(phase)][static_cast<std::size_t>(v)].count == 0) {
        // Only possible for a lone start node whose edges all got used.
        if (here != 0) throw std::logic_error("AB-cycle walk lost alternation balance");
        last_pos[slot(v, phase)] = -1;
        path.clear();
        break;
      }
      const int w = take_edge(v, phase);
      path.push_back(w);
      const std::size_t idx = path.size() - 1;
      const Origin next_phase = phase_at(idx);
      const int seen = last_pos[slot(w, next_phase)];
      if (seen < 0) {
        last_pos[slot(w, next_phase)] = static_cast<int>(idx);
        continue;
      }
      ABCycle cycle;
      const auto p = static_cast<std::size_t>(seen);
      cycle.edges.reserve(idx - p);
      for (std::size_t q = p; q < idx; ++q) {
        cycle.edges.push_back({path[q], path[q + 1], phase_at(q)});
      }
      for (std::size_t q = p + 1; q < idx; ++q) last_pos[slot(path[q], phase_at(q))] = -1;
      path.resize(p + 1);
      cycles.push_back(std::move(cycle));
    }
  }
  return cycles;
}

std::vector<std::size_t> select_by_score(const std::vector<double>& scores, int n_children, double eta,
                                         std::mt19937_64& rng) {
  std::vector<std::size_t> ranked(scores.size());
  std::iota(ranked.begin(), ranked.end(), std::size_t{0});
  std::stable_sort(ranked.begin(), ranked.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  // `unused` holds not-yet-picked cycles in rank order.
  std::vector<std::size_t> unused = ranked;
  std::vector<std::size_t> picked;
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  while (static_cast<int>(picked.size()) < n_children && !unused.empty()) {
    std::size_t at = 0;
    if (eta > 0.0 && coin(rng) < eta) {
      at = std::uniform_int_distribution<std::size_t>(0, unused.size() - 1)(rng);
    }
    picked.push_back(unused[at]);
    unused.erase(unused.begin() + static_cast<std::ptrdiff_t>(at));
  }
  return picked;
}

std::vector<std::size_t> select_esets(const std::vector<ABCycle>& cycles, const EdgeScores& scores,
                                      const EaxConfig& cfg, std::mt19937_64& rng) {
  std::vector<double> values(cycles.size());
  for (std::size_t c = 0; c < cycles.size(); ++c) values[c] = score_ab_cycle(cycles[c], scores);
  return select_by_score(values, cfg.n_children, cfg.eta, rng);
}

}  // namespace unics
