#include <cmath>
#include <numeric>

#include "unics/transition/policy.hpp"

namespace unics {

std::vector<double> gap_curve(const ConvergenceTrace& trace, std::int64_t reference, double horizon,
                              double interval) {
  if (trace.empty()) throw EmptyTrace("no solution was ever produced");
  if (reference <= 0) throw std::invalid_argument("reference length must be positive");
  if (!(interval > 0.0) || !(horizon >= interval)) throw std::invalid_argument("need horizon >= interval > 0");
  const auto& events = trace.events();
  const double ref = static_cast<double>(reference);
  auto gap_of = [&](std::int64_t len) { return (static_cast<double>(len) - ref) / ref; };
  const double penalty = 10.0 * gap_of(events.front().length);

  const auto samples = static_cast<std::size_t>(std::llround(horizon / interval));
  std::vector<double> curve(samples);
  std::size_t next = 0;
  std::optional<std::int64_t> best;
  for (std::size_t k = 0; k < samples; ++k) {
    const double t = static_cast<double>(k + 1) * interval;
    while (next < events.size() && events[next].t <= t) best = events[next++].length;
    curve[k] = best ? gap_of(*best) : penalty;
  }
  return curve;
}

double gap_sum(const std::vector<double>& curve) {
  if (curve.empty()) throw std::invalid_argument("empty gap curve");
  return std::accumulate(curve.begin(), curve.end(), 0.0);
}

}  // namespace unics
