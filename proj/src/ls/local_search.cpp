#include "unics/ls/local_search.hpp"

#include <algorithm>
#include <stdexcept>

namespace unics {

void LsConfig::validate() const {
  if (lambda_depth != 2 && lambda_depth != 3) throw std::invalid_argument("lambda_depth must be 2 or 3");
  if (candidates_k < 1) throw std::invalid_argument("candidates_k must be >= 1");
  if (restart_perturbation < 0) throw std::invalid_argument("restart_perturbation must be >= 0");
}

double pi_distance(const TspInstance& inst, const NodePenalties& penalties, int i, int j) {
  const double d = static_cast<double>(inst.distance(i, j));
  if (penalties.empty()) return d;
  return d + penalties.pi[static_cast<std::size_t>(i)] + penalties.pi[static_cast<std::size_t>(j)];
}

namespace {

/// Unvisited set with O(1) removal, scanned for the nearest-node fallback.
class Unvisited {
 public:
  explicit Unvisited(int n) : items_(static_cast<std::size_t>(n)), where_(static_cast<std::size_t>(n)) {
    for (int i = 0; i < n; ++i) items_[static_cast<std::size_t>(i)] = where_[static_cast<std::size_t>(i)] = i;
  }
  bool contains(int v) const { return where_[static_cast<std::size_t>(v)] >= 0; }
  bool empty() const { return items_.empty(); }
  void erase(int v) {
    const int at = where_[static_cast<std::size_t>(v)];
    const int last = items_.back();
    items_[static_cast<std::size_t>(at)] = last;
    where_[static_cast<std::size_t>(last)] = at;
    items_.pop_back();
    where_[static_cast<std::size_t>(v)] = -1;
  }
  int nearest(const TspInstance& inst, int from) const {
    int best = -1;
    std::int64_t best_d = 0;
    for (int v : items_) {
      const std::int64_t d = inst.distance(from, v);
      if (best < 0 || d < best_d || (d == best_d && v < best)) {
        best = v;
        best_d = d;
      }
    }
    return best;
  }

 private:
  std::vector<int> items_;
  std::vector<int> where_;
};

template <class Pick>
Tour nn_tour(const TspInstance& inst, const SparseGraph& graph, int start, Pick&& pick) {
  const int n = inst.size();
  Unvisited left(n);
  std::vector<int> order;
  order.reserve(static_cast<std::size_t>(n));
  int cur = start;
  left.erase(cur);
  order.push_back(cur);
  int options[2];
  while (!left.empty()) {
    int found = 0;
    for (int j : graph.neighbors(cur)) {
      if (left.contains(j)) {
        options[found++] = j;
        if (found == 2) break;
      }
    }
    cur = found == 0 ? left.nearest(inst, cur) : pick(options, found);
    left.erase(cur);
    order.push_back(cur);
  }
  return Tour::from_order(inst, std::move(order));
}

/// Array tour with position index; all moves are reversals or block moves.
class Engine {
 public:
  Engine(const TspInstance& inst, const CandidateLists& cands, const NodePenalties& penalties, const LsConfig& cfg,
         Deadline& deadline)
      : inst_(inst),
        cands_(cands),
        pi_(cfg.use_penalties && !penalties.empty() ? penalties.pi.data() : nullptr),
        cfg_(cfg),
        deadline_(deadline),
        n_(inst.size()),
        pos_(static_cast<std::size_t>(n_)),
        queued_(static_cast<std::size_t>(n_), 0) {}

  void load(const std::vector<int>& order, std::int64_t length) {
    order_ = order;
    for (int k = 0; k < n_; ++k) pos_[static_cast<std::size_t>(order_[static_cast<std::size_t>(k)])] = k;
    length_ = length;
  }
  const std::vector<int>& order() const { return order_; }
  std::int64_t length() const { return length_; }
  std::uint64_t evaluations() const { return evaluations_; }

  void queue_all() {
    for (int v : order_) push(v);
  }

  /// Processes queued nodes until none can be improved. Returns false if
  /// the deadline stopped it first.
  bool descend() {
    while (head_ < queue_.size()) {
      if (deadline_.expired()) return false;
      const int t1 = queue_[head_++];
      queued_[static_cast<std::size_t>(t1)] = 0;
      if (head_ > 4096 && head_ * 2 > queue_.size()) {
        queue_.erase(queue_.begin(), queue_.begin() + static_cast<std::ptrdiff_t>(head_));
        head_ = 0;
      }
      if (improve(t1)) push(t1);
    }
    queue_.clear();
    head_ = 0;
    return true;
  }

  /// Swaps two adjacent random blocks of length <= max_len.
  void kick(std::mt19937_64& rng, int max_len) {
    const int cap = std::max(1, std::min(max_len, (n_ - 2) / 2));
    std::uniform_int_distribution<int> len(1, cap);
    std::uniform_int_distribution<int> at(0, n_ - 1);
    const int l1 = len(rng);
    const int l2 = len(rng);
    const int p = at(rng);
    auto node = [&](int k) { return order_[static_cast<std::size_t>(wrap(p + k))]; };
    const int prev = node(-1), b1 = node(0), b2 = node(l1 - 1), c1 = node(l1), c2 = node(l1 + l2 - 1),
              next = node(l1 + l2);
    length_ += dist(prev, c1) + dist(c2, b1) + dist(b2, next) - dist(prev, b1) - dist(b2, c1) - dist(c2, next);
    buffer_.clear();
    for (int k = l1; k < l1 + l2; ++k) buffer_.push_back(node(k));
    for (int k = 0; k < l1; ++k) buffer_.push_back(node(k));
    write_block(p, buffer_);
    for (int v : {prev, b1, b2, c1, c2, next}) push(v);
    after_move();
  }

 private:
  std::int64_t dist(int a, int b) const { return inst_.distance(a, b); }
  double pdist(int a, int b) const {
    const double d = static_cast<double>(inst_.distance(a, b));
    return pi_ ? d + pi_[a] + pi_[b] : d;
  }
  int wrap(int k) const { return ((k % n_) + n_) % n_; }
  int at(int k) const { return order_[static_cast<std::size_t>(wrap(k))]; }
  int pos(int v) const { return pos_[static_cast<std::size_t>(v)]; }
  int succ(int v) const { return at(pos(v) + 1); }
  int pred(int v) const { return at(pos(v) - 1); }
  /// True if x lies on the forward path from a to b (inclusive).
  bool between(int a, int x, int b) const { return wrap(pos(x) - pos(a)) <= wrap(pos(b) - pos(a)); }

  void push(int v) {
    if (!queued_[static_cast<std::size_t>(v)]) {
      queued_[static_cast<std::size_t>(v)] = 1;
      queue_.push_back(v);
    }
  }

  bool tick() {
    ++evaluations_;
    deadline_.tick();
    return true;
  }

  void write_block(int start, const std::vector<int>& nodes) {
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      const int p = wrap(start + static_cast<int>(k));
      order_[static_cast<std::size_t>(p)] = nodes[k];
      pos_[static_cast<std::size_t>(nodes[k])] = p;
    }
  }

  /// Reverses the forward path a..b, or its complement when that is shorter
  /// (same cycle, opposite orientation).
  void reverse_path(int a, int b) {
    int len = wrap(pos(b) - pos(a)) + 1;
    if (2 * len > n_) {
      const int na = succ(b);
      const int nb = pred(a);
      a = na;
      b = nb;
      len = n_ - len;
    }
    int i = pos(a);
    int j = pos(b);
    for (int s = 0; s < len / 2; ++s) {
      const int vi = order_[static_cast<std::size_t>(i)];
      const int vj = order_[static_cast<std::size_t>(j)];
      order_[static_cast<std::size_t>(i)] = vj;
      order_[static_cast<std::size_t>(j)] = vi;
      pos_[static_cast<std::size_t>(vj)] = i;
      pos_[static_cast<std::size_t>(vi)] = j;
      i = i + 1 == n_ ? 0 : i + 1;
      j = j == 0 ? n_ - 1 : j - 1;
    }
  }

  /// Replaces (t1,t2), (t3,t4) by (t2,t3), (t4,t1), where t2 neighbours t1
  /// and t4 is the neighbour of t3 that keeps a single cycle. Returns t4.
  int apply_2opt(int t1, int t2, int t3) {
    if (t2 == succ(t1)) {
      const int t4 = pred(t3);
      reverse_path(t2, t4);
      return t4;
    }
    const int t4 = succ(t3);
    reverse_path(t4, t2);
    return t4;
  }

  void after_move() {
    if (!cfg_.check_every_move) return;
    if (!is_permutation_of(order_, n_)) throw std::logic_error("local search produced an invalid tour");
    if (tour_length(inst_, order_) != length_) throw std::logic_error("local search length bookkeeping broke");
  }

  bool improve(int t1) {
    if (n_ < 4) return false;
    if (try_chain(t1, succ(t1)) || try_chain(t1, pred(t1))) return true;
    return cfg_.or_opt && try_or_opt(t1);
  }

  bool try_chain(int t1, int t2) {
    const bool forward = t2 == succ(t1);
    const std::int64_t g0 = dist(t1, t2);
    const double p0 = pdist(t1, t2);
    for (int t3 : cands_.of(t2)) {
      if (t3 == t1 || t3 == succ(t2) || t3 == pred(t2)) continue;
      const std::int64_t g1 = g0 - dist(t2, t3);
      const double p1 = p0 - pdist(t2, t3);
      if (p1 <= 0) continue;
      const int t4 = forward ? pred(t3) : succ(t3);
      tick();
      const std::int64_t gain = g1 + dist(t3, t4) - dist(t4, t1);
      if (gain > 0) {
        apply_2opt(t1, t2, t3);
        length_ -= gain;
        for (int v : {t1, t2, t3, t4}) push(v);
        after_move();
        return true;
      }
      if (cfg_.lambda_depth < 3 || n_ < 6) continue;

      // Second step on the tour as it would look after the first exchange;
      // t4 then neighbours t1 and (t1, t4) is the edge to break.
      const std::int64_t partial = g1 + dist(t3, t4);
      const double ppartial = p1 + pdist(t3, t4);
      const int t4_other = forward ? pred(t4) : succ(t4);
      for (int t5 : cands_.of(t4)) {
        if (t5 == t1 || t5 == t3 || t5 == t4_other) continue;
        const std::int64_t g2 = partial - dist(t4, t5);
        const double p2 = ppartial - pdist(t4, t5);
        if (p2 <= 0) continue;
        int t6;
        if (forward) {
          // Reversed segment t2..t4: inside it the new pred is the old succ.
          t6 = between(t2, t5, t4) ? succ(t5) : pred(t5);
        } else {
          t6 = between(t4, t5, t2) ? pred(t5) : succ(t5);
        }
        if (t6 == t1) continue;
        tick();
        const std::int64_t gain2 = g2 + dist(t5, t6) - dist(t6, t1);
        if (gain2 > 0) {
          apply_2opt(t1, t2, t3);
          const int got = apply_2opt(t1, t4, t5);
          if (got != t6) throw std::logic_error("3-opt reconnection mismatch");
          length_ -= gain2;
          for (int v : {t1, t2, t3, t4, t5, t6}) push(v);
          after_move();
          return true;
        }
      }
    }
    return false;
  }

  bool try_or_opt(int s1) {
    for (int m = 1; m <= 3; ++m) {
      if (n_ < m + 3) break;
      const int s2 = at(pos(s1) + m - 1);
      const int p = pred(s1);
      const int nx = succ(s2);
      const std::int64_t removed = dist(p, s1) + dist(s2, nx) - dist(p, nx);
      const double premoved = pdist(p, s1) + pdist(s2, nx) - pdist(p, nx);
      if (premoved <= 0) continue;
      auto in_segment = [&](int v) { return between(s1, v, s2); };
      for (int end : {s1, s2}) {
        for (int c : cands_.of(end)) {
          if (in_segment(c)) continue;
          if (premoved - pdist(end, c) <= 0) continue;
          for (int side = 0; side < 2; ++side) {
            const int x = side == 0 ? pred(c) : c;
            const int y = side == 0 ? c : succ(c);
            if (in_segment(x) || in_segment(y)) continue;
            // end sits next to c: first in the block when c == x, last when c == y.
            const bool reversed = (c == x) ? (end == s2) : (end == s1);
            const int first = reversed ? s2 : s1;
            const int last = reversed ? s1 : s2;
            tick();
            const std::int64_t gain = removed - (dist(x, first) + dist(last, y) - dist(x, y));
            if (gain > 0) {
              move_block(s1, m, p, nx, x, y, reversed);
              length_ -= gain;
              for (int v : {p, nx, s1, s2, x, y}) push(v);
              after_move();
              return true;
            }
          }
        }
      }
    }
    return false;
  }

  /// Moves the m-node block starting at s1 between x and y = succ(x).
  void move_block(int s1, int m, int p, int nx, int x, int y, bool reversed) {
    const int block_start = pos(s1);
    std::vector<int> block(static_cast<std::size_t>(m));
    for (int k = 0; k < m; ++k) block[static_cast<std::size_t>(k)] = at(block_start + k);
    if (reversed) std::reverse(block.begin(), block.end());
    const int fwd = wrap(pos(x) - pos(nx)) + 1;
    const int back = wrap(pos(p) - pos(y)) + 1;
    buffer_.clear();
    if (fwd <= back) {
      for (int k = 0; k < fwd; ++k) buffer_.push_back(at(pos(nx) + k));
      buffer_.insert(buffer_.end(), block.begin(), block.end());
      write_block(block_start, buffer_);
    } else {
      const int start = pos(y);
      buffer_.insert(buffer_.end(), block.begin(), block.end());
      for (int k = 0; k < back; ++k) buffer_.push_back(at(start + k));
      write_block(start, buffer_);
    }
  }

  const TspInstance& inst_;
  const CandidateLists& cands_;
  const double* pi_;
  const LsConfig& cfg_;
  Deadline& deadline_;
  int n_;
  std::vector<int> order_;
  std::vector<int> pos_;
  std::int64_t length_ = 0;
  std::vector<int> queue_;
  std::size_t head_ = 0;
  std::vector<char> queued_;
  std::vector<int> buffer_;
  std::uint64_t evaluations_ = 0;
};

}  // namespace

Tour initial_tour(const TspInstance& inst, const SparseGraph& graph) {
  return nn_tour(inst, graph, 0, [](const int* options, int) { return options[0]; });
}

Tour randomized_nn_tour(const TspInstance& inst, const SparseGraph& graph, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> start(0, inst.size() - 1);
  return nn_tour(inst, graph, start(rng), [&](const int* options, int found) {
    if (found == 1) return options[0];
    return options[std::uniform_int_distribution<int>(0, 1)(rng)];
  });
}

CandidateLists nearest_candidates(const SparseGraph& graph, int k) {
  k = std::clamp(k, 1, graph.degree());
  std::vector<int> ids(static_cast<std::size_t>(graph.size()) * k);
  for (int i = 0; i < graph.size(); ++i) {
    auto nb = graph.neighbors(i);
    std::copy(nb.begin(), nb.begin() + k, ids.begin() + static_cast<std::ptrdiff_t>(i) * k);
  }
  return CandidateLists(graph.size(), k, std::move(ids));
}

Tour two_opt(const TspInstance& inst, const CandidateLists& cands, const Tour& start,
             std::uint64_t max_evaluations) {
  LsConfig cfg;
  cfg.lambda_depth = 2;
  cfg.or_opt = false;
  cfg.restart_perturbation = 0;
  Deadline budget = Deadline::budget(max_evaluations);
  const NodePenalties none;
  Engine engine(inst, cands, none, cfg, budget);
  engine.load(start.order(), start.length());
  engine.queue_all();
  engine.descend();
  return Tour::from_order(inst, engine.order());
}

LsResult local_search(const TspInstance& inst, const CandidateLists& cands, const NodePenalties& penalties,
                      const Tour& start, Deadline& deadline, std::mt19937_64& rng, const LsConfig& cfg,
                      const Stopwatch& clock) {
  cfg.validate();
  if (cands.size() != inst.size()) throw std::invalid_argument("candidate lists do not match the instance");
  if (cfg.use_penalties && !penalties.empty() && static_cast<int>(penalties.pi.size()) != inst.size()) {
    throw std::invalid_argument("penalty vector does not match the instance");
  }
  LsResult result;
  result.best = start;
  result.trace.record(clock.elapsed(), start.length(), Phase::kLs);
  if (deadline.expired()) {
    result.interrupted = true;
    return result;
  }

  Engine engine(inst, cands, penalties, cfg, deadline);
  engine.load(start.order(), start.length());
  engine.queue_all();
  bool finished = engine.descend();
  std::vector<int> best_order = engine.order();
  std::int64_t best_len = engine.length();
  if (best_len < start.length()) result.trace.record(clock.elapsed(), best_len, Phase::kLs);

  const bool can_kick = cfg.restart_perturbation > 0 && inst.size() >= 8;
  while (finished && can_kick && !deadline.expired()) {
    engine.kick(rng, cfg.restart_perturbation);
    ++result.kicks;
    finished = engine.descend();
    if (engine.length() < best_len) {
      best_len = engine.length();
      best_order = engine.order();
      result.trace.record(clock.elapsed(), best_len, Phase::kLs);
    } else if (engine.length() > best_len) {
      engine.load(best_order, best_len);
    }
    // A kick interrupted mid-descent may leave a worse tour; best_order is kept.
    if (!finished) break;
  }

  result.interrupted = deadline.expired();
  result.evaluations = engine.evaluations();
  if (best_len < start.length()) result.best = Tour::from_order(inst, std::move(best_order));
  result.trace.set_t_end(clock.elapsed());
  return result;
}

}  // namespace unics
