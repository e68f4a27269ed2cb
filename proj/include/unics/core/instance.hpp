#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace unics {

enum class Metric { kEuc2d, kCeil2d };

std::string_view metric_name(Metric metric);

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// EDGE_WEIGHT_TYPE other than EUC_2D / CEIL_2D.
class UnsupportedMetric : public ParseError {
 public:
  using ParseError::ParseError;
};

/// Missing sections, bad numbers, coordinate count mismatch, unreadable file.
class MalformedFile : public ParseError {
 public:
  using ParseError::ParseError;
};

/// Immutable symmetric 2D instance. Distances are computed on demand with
/// TSPLIB rounding; no distance matrix is ever stored.
class TspInstance {
 public:
  TspInstance(std::string name, Metric metric, std::vector<Point> coords);

  const std::string& name() const { return name_; }
  Metric metric() const { return metric_; }
  int size() const { return static_cast<int>(coords_.size()); }
  const std::vector<Point>& coords() const { return coords_; }
  const Point& point(int i) const { return coords_[static_cast<std::size_t>(i)]; }

  double euclidean(int i, int j) const {
    const Point& a = point(i);
    const Point& b = point(j);
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy);
  }

  /// EUC_2D: nearest integer (half up). CEIL_2D: ceiling.
  std::int64_t distance(int i, int j) const { return round_distance(euclidean(i, j)); }

  /// The metric's rounding applied to a raw Euclidean length. Monotone.
  std::int64_t round_distance(double euclid) const {
    if (metric_ == Metric::kCeil2d) return static_cast<std::int64_t>(std::ceil(euclid));
    return static_cast<std::int64_t>(euclid + 0.5);
  }

  friend bool operator==(const TspInstance&, const TspInstance&) = default;

 private:
  std::string name_;
  Metric metric_;
  std::vector<Point> coords_;
};

TspInstance parse_tsplib(std::string_view text);
TspInstance load_tsplib(const std::filesystem::path& path);

/// TSPLIB text that parse_tsplib reads back to an identical instance.
std::string to_tsplib(const TspInstance& inst);

}  // namespace unics
