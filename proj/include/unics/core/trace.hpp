#pragma once

#include <chrono>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace unics {

enum class Phase { kLs, kPbs };

struct TraceEvent {
  double t = 0.0;  // seconds since the run started
  std::int64_t length = 0;
  Phase phase = Phase::kLs;
};

/// Best-so-far history. Only strict improvements are kept, so lengths are
/// strictly decreasing and times strictly increasing.
class ConvergenceTrace {
 public:
  /// Returns true if the event was a strict improvement and got recorded.
  bool record(double t, std::int64_t length, Phase phase);

  const std::vector<TraceEvent>& events() const { return events_; }
  bool empty() const { return events_.empty(); }
  std::optional<std::int64_t> best() const;
  /// Best length at or before time t.
  std::optional<std::int64_t> best_at(double t) const;

  double t_end() const { return t_end_; }
  void set_t_end(double t) { t_end_ = t; }

  /// When the run switched from local search to the population phase.
  std::optional<double> transition() const { return transition_; }
  void mark_transition(double t) { transition_ = t; }

  /// Appends another trace's events (already on this trace's clock).
  void merge(const ConvergenceTrace& other);

  /// One `{"t":..,"len":..,"phase":".."}` object per line, plus a
  /// `{"t":..,"event":"transition"}` line in time order when marked.
  std::string to_jsonl() const;

 private:
  std::vector<TraceEvent> events_;
  double t_end_ = 0.0;
  std::optional<double> transition_;
};

/// Elapsed wall time from a fixed origin.
class Stopwatch {
 public:
  using Clock = std::chrono::steady_clock;

  Stopwatch() : origin_(Clock::now()) {}
  explicit Stopwatch(Clock::time_point origin) : origin_(origin) {}

  double elapsed() const { return std::chrono::duration<double>(Clock::now() - origin_).count(); }
  Clock::time_point origin() const { return origin_; }

 private:
  Clock::time_point origin_;
};

/// Stop condition: a wall-clock instant, a work budget (deterministic), or both.
class Deadline {
 public:
  using Clock = std::chrono::steady_clock;

  static Deadline never() { return Deadline(); }
  static Deadline after(double seconds);
  static Deadline at(Clock::time_point when);
  static Deadline budget(std::uint64_t ticks);

  void tick(std::uint64_t n = 1) { used_ += n; }
  std::uint64_t used() const { return used_; }
  std::optional<std::uint64_t> remaining_ticks() const;
  bool has_budget() const { return budget_ != kUnlimited; }

  bool expired() const {
    if (used_ >= budget_) return true;
    return has_time_ && Clock::now() >= when_;
  }

 private:
  static constexpr std::uint64_t kUnlimited = std::numeric_limits<std::uint64_t>::max();

  bool has_time_ = false;
  Clock::time_point when_{};
  std::uint64_t budget_ = kUnlimited;
  std::uint64_t used_ = 0;
};

}  // namespace unics
