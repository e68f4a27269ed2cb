#include "unics/core/trace.hpp"

#include <cmath>
#include <cstdio>
#include <algorithm>

namespace unics {

bool ConvergenceTrace::record(double t, std::int64_t length, Phase phase) {
  if (!events_.empty()) {
    if (length >= events_.back().length) return false;
    if (!(t > events_.back().t)) t = std::nextafter(events_.back().t, HUGE_VAL);
  }
  events_.push_back({t, length, phase});
  if (t > t_end_) t_end_ = t;
  return true;
}

std::optional<std::int64_t> ConvergenceTrace::best() const {
  if (events_.empty()) return std::nullopt;
  return events_.back().length;
}

std::optional<std::int64_t> ConvergenceTrace::best_at(double t) const {
  std::optional<std::int64_t> out;
  for (const TraceEvent& e : events_) {
    if (e.t > t) break;
    out = e.length;
  }
  return out;
}

void ConvergenceTrace::merge(const ConvergenceTrace& other) {
  for (const TraceEvent& e : other.events_) record(e.t, e.length, e.phase);
  if (other.t_end_ > t_end_) t_end_ = other.t_end_;
  if (!transition_) transition_ = other.transition_;
}

std::string ConvergenceTrace::to_jsonl() const {
  std::string out;
  char buf[128];
  bool marked = !transition_.has_value();
  auto mark = [&] {
    std::snprintf(buf, sizeof buf, "{\"t\": %.6f, \"event\": \"transition\"}\n", *transition_);
    out += buf;
    marked = true;
  };
  for (const TraceEvent& e : events_) {
    if (!marked && e.t > *transition_) mark();
    std::snprintf(buf, sizeof buf, "{\"t\": %.6f, \"len\": %lld, \"phase\": \"%s\"}\n", e.t,
                  static_cast<long long>(e.length), e.phase == Phase::kLs ? "ls" : "pbs");
    out += buf;
  }
  if (!marked) mark();
  return out;
}

Deadline Deadline::after(double seconds) {
  Deadline d;
  d.has_time_ = true;
  d.when_ = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                               std::chrono::duration<double>(std::max(0.0, seconds)));
  return d;
}

Deadline Deadline::at(Clock::time_point when) {
  Deadline d;
  d.has_time_ = true;
  d.when_ = when;
  return d;
}

Deadline Deadline::budget(std::uint64_t ticks) {
  Deadline d;
  d.budget_ = ticks;
  return d;
}

std::optional<std::uint64_t> Deadline::remaining_ticks() const {
  if (!has_budget()) return std::nullopt;
  return used_ >= budget_ ? 0 : budget_ - used_;
}

}  // namespace unics
