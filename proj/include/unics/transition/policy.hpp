#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "unics/core/instance.hpp"
#include "unics/core/trace.hpp"

namespace unics {

class EmptyTrace : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DegenerateSamples : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Relative gap to `reference` sampled at interval, 2*interval, ...,
/// horizon. Samples before the first event get 10x the first event's gap.
std::vector<double> gap_curve(const ConvergenceTrace& trace, std::int64_t reference, double horizon,
                              double interval = 1.0);

double gap_sum(const std::vector<double>& curve);

/// t_trans = clamp(slope * n + intercept, clamp_min, clamp_fraction * t_max).
struct LinearPolicy {
  double slope = 0.01;  // seconds per node
  double intercept = 0.0;
  double clamp_min = 1.0;
  double clamp_fraction = 0.8;

  void validate() const;

  /// `a=<f> b=<f> clamp_min=<f> clamp_fraction=<f>`
  std::string to_text() const;
  static LinearPolicy parse(const std::string& text);
  static LinearPolicy load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;
};

struct PolicySample {
  int n = 0;
  double t_trans = 0.0;
};

/// Ordinary least squares for t = a*n + b; keeps the default clamps.
LinearPolicy fit_policy(const std::vector<PolicySample>& samples);

double predict_t_trans(const LinearPolicy& policy, int n, double t_max);

struct PolicyInstance {
  TspInstance instance;
  std::optional<std::int64_t> bks;
};

/// Runs the solver once with the given transition time and returns its trace.
using TraceRunner = std::function<ConvergenceTrace(const TspInstance&, double t_trans, std::uint64_t seed)>;

struct PolicyCollection {
  std::vector<PolicySample> samples;
  std::vector<std::string> failures;  // "<instance>: <reason>"
};

/// For each instance, runs every grid point and keeps the one with the
/// smallest Gap_sum over [0, budget] (ties: smaller t_trans). The reference
/// is the BKS when known, else the best length found across the grid.
PolicyCollection collect_policy_samples(const std::vector<PolicyInstance>& instances,
                                        const std::vector<double>& t_grid, double budget,
                                        const TraceRunner& runner, std::uint64_t seed,
                                        double interval = 1.0);

}  // namespace unics
