#include <algorithm>
#include <limits>
#include <stdexcept>

#include "unics/eax/eax.hpp"

namespace unics {

namespace {

void replace_neighbor(std::array<int, 2>& a, int from, int to) {
  if (a[0] == from) {
    a[0] = to;
  } else if (a[1] == from) {
    a[1] = to;
  } else {
    throw std::logic_error("edge not present in adjacency");
  }
}

void label_subtours(IntermediateSolution& im) {
  const int n = static_cast<int>(im.adj.size());
  im.subtour_of.assign(static_cast<std::size_t>(n), -1);
  im.subtour_count = 0;
  for (int s = 0; s < n; ++s) {
    if (im.subtour_of[static_cast<std::size_t>(s)] >= 0) continue;
    const int id = im.subtour_count++;
    int prev = -1;
    int cur = s;
    while (im.subtour_of[static_cast<std::size_t>(cur)] < 0) {
      im.subtour_of[static_cast<std::size_t>(cur)] = id;
      const auto& nb = im.adj[static_cast<std::size_t>(cur)];
      const int next = nb[0] != prev ? nb[0] : nb[1];
      prev = cur;
      cur = next;
    }
  }
}

}  // namespace

std::vector<std::vector<int>> incoming_lists(const SparseGraph& graph) {
  std::vector<std::vector<int>> in(static_cast<std::size_t>(graph.size()));
  for (int i = 0; i < graph.size(); ++i) {
    for (int j : graph.neighbors(i)) in[static_cast<std::size_t>(j)].push_back(i);
  }
  return in;
}

IntermediateSolution apply_eset(const std::vector<std::array<int, 2>>& parent_adj, const ABCycle& eset) {
  IntermediateSolution im;
  im.adj = parent_adj;
  // Remove every A-edge first so B-edges always find a free slot.
  for (const CycleEdge& e : eset.edges) {
    if (e.origin != Origin::kA) continue;
    replace_neighbor(im.adj[static_cast<std::size_t>(e.u)], e.v, -1);
    replace_neighbor(im.adj[static_cast<std::size_t>(e.v)], e.u, -1);
  }
  for (const CycleEdge& e : eset.edges) {
    if (e.origin != Origin::kB) continue;
    replace_neighbor(im.adj[static_cast<std::size_t>(e.u)], -1, e.v);
    replace_neighbor(im.adj[static_cast<std::size_t>(e.v)], -1, e.u);
  }
  label_subtours(im);
  return im;
}

IntermediateSolution apply_eset(const Tour& parent_a, const ABCycle& eset) {
  return apply_eset(parent_a.adjacency(), eset);
}

std::vector<int> order_from_adjacency(const std::vector<std::array<int, 2>>& adj) {
  const int n = static_cast<int>(adj.size());
  std::vector<int> order;
  order.reserve(static_cast<std::size_t>(n));
  int prev = -1;
  int cur = 0;
  for (int k = 0; k < n; ++k) {
    order.push_back(cur);
    const auto& nb = adj[static_cast<std::size_t>(cur)];
    const int next = nb[0] != prev ? nb[0] : nb[1];
    prev = cur;
    cur = next;
  }
  if (cur != 0) throw std::logic_error("adjacency is not a single Hamiltonian cycle");
  return order;
}

MergeResult merge_subtours_adjacency(IntermediateSolution im, const TspInstance& inst, const SparseGraph* graph,
                                     const KnownEdges* known) {
  const int n = inst.size();
  MergeResult out;
  std::vector<int> size(static_cast<std::size_t>(im.subtour_count), 0);
  std::vector<int> min_node(static_cast<std::size_t>(im.subtour_count), std::numeric_limits<int>::max());
  for (int v = 0; v < n; ++v) {
    const int s = im.subtour_of[static_cast<std::size_t>(v)];
    ++size[static_cast<std::size_t>(s)];
    min_node[static_cast<std::size_t>(s)] = std::min(min_node[static_cast<std::size_t>(s)], v);
  }
  int alive = im.subtour_count;
  const bool restricted = graph != nullptr && n > 2000;
  std::vector<std::vector<int>> own_incoming;
  const std::vector<std::vector<int>>* incoming_ptr = known != nullptr ? known->incoming : nullptr;
  if (graph != nullptr && !restricted && incoming_ptr == nullptr) {
    own_incoming = incoming_lists(*graph);
    incoming_ptr = &own_incoming;
  }
  static const std::vector<std::vector<int>> kNone;
  const auto& incoming = incoming_ptr != nullptr ? *incoming_ptr : kNone;
  std::vector<int> members;

  auto d = [&](int a, int b) { return inst.distance(a, b); };

  while (alive > 1) {
    int small = -1;
    for (int s = 0; s < im.subtour_count; ++s) {
      if (size[static_cast<std::size_t>(s)] == 0) continue;
      if (small < 0 || size[static_cast<std::size_t>(s)] < size[static_cast<std::size_t>(small)] ||
          (size[static_cast<std::size_t>(s)] == size[static_cast<std::size_t>(small)] &&
           min_node[static_cast<std::size_t>(s)] < min_node[static_cast<std::size_t>(small)])) {
        small = s;
      }
    }
    // Walk the smallest subtour to list its nodes (each edge is (a, next)).
    members.clear();
    {
      const int first = min_node[static_cast<std::size_t>(small)];
      int prev = -1;
      int cur = first;
      do {
        members.push_back(cur);
        const auto& nb = im.adj[static_cast<std::size_t>(cur)];
        const int next = nb[0] != prev ? nb[0] : nb[1];
        prev = cur;
        cur = next;
      } while (cur != first);
    }

    std::int64_t best_delta = std::numeric_limits<std::int64_t>::max();
    int ba = -1, bb = -1, bc = -1, bd = -1;
    auto consider = [&](int a, int b, int c, int dd) {
      // Remove (a,b) and (c,dd); add (a,c) and (b,dd).
      const std::int64_t delta = d(a, c) + d(b, dd) - d(a, b) - d(c, dd);
      if (delta < best_delta) {
        best_delta = delta;
        ba = a;
        bb = b;
        bc = c;
        bd = dd;
      }
    };
    const std::size_t m = members.size();
    if (graph != nullptr) {
      for (std::size_t k = 0; k < m; ++k) {
        const int a = members[k];
        for (int c : graph->neighbors(a)) {
          if (im.subtour_of[static_cast<std::size_t>(c)] == small) continue;
          for (int b : im.adj[static_cast<std::size_t>(a)]) {
            for (int dd : im.adj[static_cast<std::size_t>(c)]) consider(a, b, c, dd);
          }
        }
      }
    }
    if (!restricted && ba >= 0) {
      // Exact search, pruned. delta = [d(a,c) - d(a,b)] + [d(b,dd) - d(c,dd)],
      // so an exchange beating the incumbent U adds an edge less than U/2
      // longer than a removed edge sharing its endpoint. Such an edge lies
      // inside that endpoint's neighbour list whenever the list reaches far
      // enough; otherwise the endpoint is scanned exhaustively.
      const bool complete = graph->degree() >= n - 1;
      auto covers = [&](int v, std::int64_t twice_radius) {
        return complete || twice_radius <= 2 * graph->distances(v).back();
      };
      auto outside = [&](int v) { return im.subtour_of[static_cast<std::size_t>(v)] != small; };
      auto slot_length = [&](int v, int k) {
        const int w = im.adj[static_cast<std::size_t>(v)][static_cast<std::size_t>(k)];
        if (known != nullptr && known->adj[static_cast<std::size_t>(v)][static_cast<std::size_t>(k)] == w) {
          return known->len[static_cast<std::size_t>(v)][static_cast<std::size_t>(k)];
        }
        return d(v, w);
      };
      // New edge (a, c) from the subtour.
      for (int a : members) {
        const auto targets = graph->neighbors(a);
        const auto dists = graph->distances(a);
        for (int b : im.adj[static_cast<std::size_t>(a)]) {
          const std::int64_t dab = d(a, b);
          if (covers(a, 2 * dab + best_delta)) {
            for (std::size_t k = 0; k < targets.size() && 2 * (dists[k] - dab) < best_delta; ++k) {
              const int c = targets[k];
              if (!outside(c)) continue;
              for (int dd : im.adj[static_cast<std::size_t>(c)]) consider(a, b, c, dd);
            }
          } else {
            for (int c = 0; c < n; ++c) {
              if (!outside(c) || 2 * (d(a, c) - dab) >= best_delta) continue;
              for (int dd : im.adj[static_cast<std::size_t>(c)]) consider(a, b, c, dd);
            }
          }
        }
      }
      // New edge (b, dd) into the subtour, listed from dd's side.
      for (int b : members) {
        for (int dd : incoming[static_cast<std::size_t>(b)]) {
          if (!outside(dd)) continue;
          const std::int64_t dbd = d(b, dd);
          for (int k = 0; k < 2; ++k) {
            if (2 * (dbd - slot_length(dd, k)) >= best_delta) continue;
            const int c = im.adj[static_cast<std::size_t>(dd)][static_cast<std::size_t>(k)];
            for (int a : im.adj[static_cast<std::size_t>(b)]) consider(a, b, c, dd);
          }
        }
      }
      for (int dd = 0; dd < n; ++dd) {
        if (!outside(dd)) continue;
        for (int k = 0; k < 2; ++k) {
          const std::int64_t dcd = slot_length(dd, k);
          if (covers(dd, 2 * dcd + best_delta)) continue;
          const int c = im.adj[static_cast<std::size_t>(dd)][static_cast<std::size_t>(k)];
          for (int b : members) {
            if (2 * (d(b, dd) - dcd) >= best_delta) continue;
            for (int a : im.adj[static_cast<std::size_t>(b)]) consider(a, b, c, dd);
          }
        }
      }
    } else if (ba < 0) {
      // Exact scan over every outside edge.
      for (std::size_t k = 0; k < m; ++k) {
        const int a = members[k];
        const int b = members[(k + 1) % m];
        for (int c = 0; c < n; ++c) {
          if (im.subtour_of[static_cast<std::size_t>(c)] == small) continue;
          for (int dd : im.adj[static_cast<std::size_t>(c)]) {
            if (c > dd) continue;  // each undirected edge once
            consider(a, b, c, dd);
            consider(a, b, dd, c);
          }
        }
      }
    }

    replace_neighbor(im.adj[static_cast<std::size_t>(ba)], bb, bc);
    replace_neighbor(im.adj[static_cast<std::size_t>(bb)], ba, bd);
    replace_neighbor(im.adj[static_cast<std::size_t>(bc)], bd, ba);
    replace_neighbor(im.adj[static_cast<std::size_t>(bd)], bc, bb);
    out.added_length += best_delta;
    ++out.merges;

    const int into = im.subtour_of[static_cast<std::size_t>(bc)];
    for (int v : members) im.subtour_of[static_cast<std::size_t>(v)] = into;
    size[static_cast<std::size_t>(into)] += size[static_cast<std::size_t>(small)];
    size[static_cast<std::size_t>(small)] = 0;
    min_node[static_cast<std::size_t>(into)] =
        std::min(min_node[static_cast<std::size_t>(into)], min_node[static_cast<std::size_t>(small)]);
    --alive;
  }
  out.adj = std::move(im.adj);
  return out;
}

Tour merge_subtours(IntermediateSolution im, const TspInstance& inst, const SparseGraph* graph) {
  MergeResult merged = merge_subtours_adjacency(std::move(im), inst, graph);
  return Tour::from_order(inst, order_from_adjacency(merged.adj));
}

}  // namespace unics
