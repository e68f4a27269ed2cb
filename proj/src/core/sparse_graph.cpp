#include "unics/core/sparse_graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace unics {

SparseGraph::SparseGraph(int n, int gamma, int degree, std::vector<int> targets,
                         std::vector<std::int64_t> dist, std::vector<double> squared)
    : n_(n),
      gamma_(gamma),
      degree_(degree),
      targets_(std::move(targets)),
      dist_(std::move(dist)),
      sq_(std::move(squared)) {}

long SparseGraph::find(int i, int j) const {
  auto nb = neighbors(i);
  for (int k = 0; k < degree_; ++k) {
    if (nb[static_cast<std::size_t>(k)] == j) return static_cast<long>(slot(i, k));
  }
  return -1;
}

std::vector<long> SparseGraph::reverse_slots() const {
  std::vector<long> rev(targets_.size(), -1);
  for (int i = 0; i < n_; ++i) {
    for (int k = 0; k < degree_; ++k) {
      const std::size_t s = slot(i, k);
      rev[s] = find(targets_[s], i);
    }
  }
  return rev;
}

namespace {

// Ordered by exact squared length, then id. Rounding is monotone, so the
// rounded distances come out non-decreasing as well, and the order does not
// change when integer coordinates are scaled uniformly.
struct Candidate {
  double sq;
  int id;
  bool operator<(const Candidate& o) const { return sq != o.sq ? sq < o.sq : id < o.id; }
};

double squared_length(const TspInstance& inst, int i, int j) {
  const Point& a = inst.point(i);
  const Point& b = inst.point(j);
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

class Grid {
 public:
  explicit Grid(const TspInstance& inst) : inst_(inst) {
    const auto& pts = inst.coords();
    min_x_ = max_x_ = pts[0].x;
    min_y_ = max_y_ = pts[0].y;
    for (const Point& p : pts) {
      min_x_ = std::min(min_x_, p.x);
      max_x_ = std::max(max_x_, p.x);
      min_y_ = std::min(min_y_, p.y);
      max_y_ = std::max(max_y_, p.y);
    }
    const double w = max_x_ - min_x_;
    const double h = max_y_ - min_y_;
    // About two points per cell.
    const double cells = std::max(1.0, static_cast<double>(pts.size()) / 2.0);
    // The lower bound on the side keeps the cell count O(n) for skewed boxes.
    double side = std::max(std::sqrt(w * h / cells), std::max(w, h) / (2.0 * cells));
    if (!(side > 0.0) || !std::isfinite(side)) side = 1.0;
    cell_ = side;
    cols_ = static_cast<int>(w / cell_) + 1;
    rows_ = static_cast<int>(h / cell_) + 1;
    start_.assign(static_cast<std::size_t>(cols_) * rows_ + 1, 0);
    std::vector<int> cell_of(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      cell_of[i] = cell_index(pts[i]);
      ++start_[static_cast<std::size_t>(cell_of[i]) + 1];
    }
    for (std::size_t c = 1; c < start_.size(); ++c) start_[c] += start_[c - 1];
    items_.resize(pts.size());
    std::vector<int> fill(start_.begin(), start_.end() - 1);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      items_[static_cast<std::size_t>(fill[static_cast<std::size_t>(cell_of[i])]++)] = static_cast<int>(i);
    }
  }

  int col(double x) const { return std::clamp(static_cast<int>((x - min_x_) / cell_), 0, cols_ - 1); }
  int row(double y) const { return std::clamp(static_cast<int>((y - min_y_) / cell_), 0, rows_ - 1); }
  int cell_index(const Point& p) const { return row(p.y) * cols_ + col(p.x); }

  /// k nearest of node i by (squared length, id). Returns false if the
  /// ring search could not certify the answer.
  bool query(int i, int k, std::vector<Candidate>& best) const {
    best.clear();
    const Point& p = inst_.point(i);
    const int c0 = col(p.x);
    const int r0 = row(p.y);
    const int max_ring = std::max(cols_, rows_);
    const int scan_limit = std::max(4 * k, inst_.size() / 4);
    int examined = 0;
    auto worse_than_kth = [&](const Candidate& c) {
      return static_cast<int>(best.size()) == k && !(c < best.back());
    };
    for (int ring = 0; ring <= max_ring; ++ring) {
      for (int r = r0 - ring; r <= r0 + ring; ++r) {
        if (r < 0 || r >= rows_) continue;
        const bool edge_row = (r == r0 - ring || r == r0 + ring);
        for (int c = c0 - ring; c <= c0 + ring; c += (edge_row ? 1 : 2 * ring)) {
          if (c >= 0 && c < cols_) {
            const std::size_t cell = static_cast<std::size_t>(r) * cols_ + c;
            for (int s = start_[cell]; s < start_[cell + 1]; ++s) {
              const int j = items_[static_cast<std::size_t>(s)];
              if (j == i) continue;
              ++examined;
              Candidate cand{squared_length(inst_, i, j), j};
              if (worse_than_kth(cand)) continue;
              auto at = std::upper_bound(best.begin(), best.end(), cand);
              best.insert(at, cand);
              if (static_cast<int>(best.size()) > k) best.pop_back();
            }
          }
          if (ring == 0) break;
        }
      }
      if (static_cast<int>(best.size()) == k) {
        // Every unvisited point lies beyond this Euclidean radius.
        const double gx = std::min(p.x - (min_x_ + (c0 - ring) * cell_),
                                   (min_x_ + (c0 + ring + 1) * cell_) - p.x);
        const double gy = std::min(p.y - (min_y_ + (r0 - ring) * cell_),
                                   (min_y_ + (r0 + ring + 1) * cell_) - p.y);
        const double radius = std::max(0.0, std::min(gx, gy));
        // Slightly conservative so floating error in the radius cannot
        // certify a list that a point just outside the rings would change.
        if (std::sqrt(best.back().sq) < radius * (1.0 - 1e-9)) return true;
      }
      if (examined > scan_limit) return false;
    }
    // The last ring covered the whole grid.
    return static_cast<int>(best.size()) == k;
  }

 private:
  const TspInstance& inst_;
  double min_x_, max_x_, min_y_, max_y_;
  double cell_ = 1.0;
  int cols_ = 1;
  int rows_ = 1;
  std::vector<int> start_;
  std::vector<int> items_;
};

void exact_scan(const TspInstance& inst, int i, int k, std::vector<Candidate>& best) {
  best.clear();
  best.reserve(static_cast<std::size_t>(inst.size()));
  for (int j = 0; j < inst.size(); ++j) {
    if (j != i) best.push_back({squared_length(inst, i, j), j});
  }
  std::partial_sort(best.begin(), best.begin() + k, best.end());
  best.resize(static_cast<std::size_t>(k));
}

}  // namespace

SparseGraph SparseGraph::build(const TspInstance& inst, int gamma) {
  if (gamma < 1) throw std::invalid_argument("gamma must be >= 1");
  const int n = inst.size();
  const int degree = std::min(gamma, n - 1);
  std::vector<int> targets(static_cast<std::size_t>(n) * degree);
  std::vector<std::int64_t> dist(targets.size());
  std::vector<double> squared(targets.size());
  Grid grid(inst);
  std::vector<Candidate> best;
  for (int i = 0; i < n; ++i) {
    if (!grid.query(i, degree, best)) exact_scan(inst, i, degree, best);
    for (int k = 0; k < degree; ++k) {
      const std::size_t s = static_cast<std::size_t>(i) * degree + k;
      targets[s] = best[static_cast<std::size_t>(k)].id;
      dist[s] = inst.distance(i, targets[s]);
      squared[s] = best[static_cast<std::size_t>(k)].sq;
    }
  }
  return SparseGraph(n, gamma, degree, std::move(targets), std::move(dist), std::move(squared));
}

}  // namespace unics
