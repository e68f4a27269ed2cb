#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>

#include "unics/transition/policy.hpp"

namespace unics {

void LinearPolicy::validate() const {
  if (!std::isfinite(slope) || !std::isfinite(intercept)) throw std::invalid_argument("policy coefficients must be finite");
  if (!(clamp_min >= 0.0)) throw std::invalid_argument("clamp_min must be >= 0");
  if (!(clamp_fraction > 0.0 && clamp_fraction < 1.0)) throw std::invalid_argument("clamp_fraction must be in (0, 1)");
}

std::string LinearPolicy::to_text() const {
  std::ostringstream out;
  out.precision(17);
  out << "a=" << slope << " b=" << intercept << " clamp_min=" << clamp_min << " clamp_fraction=" << clamp_fraction
      << '\n';
  return out.str();
}

LinearPolicy LinearPolicy::parse(const std::string& text) {
  LinearPolicy p;
  std::map<std::string, double*> fields{
      {"a", &p.slope}, {"b", &p.intercept}, {"clamp_min", &p.clamp_min}, {"clamp_fraction", &p.clamp_fraction}};
  std::istringstream in(text);
  std::string token;
  int seen = 0;
  while (in >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("policy token without '=': " + token);
    auto it = fields.find(token.substr(0, eq));
    if (it == fields.end()) throw std::invalid_argument("unknown policy key: " + token.substr(0, eq));
    std::size_t used = 0;
    const std::string value = token.substr(eq + 1);
    try {
      *it->second = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != value.size() || value.empty()) throw std::invalid_argument("bad policy value: " + token);
    ++seen;
  }
  if (seen != 4) throw std::invalid_argument("policy needs a, b, clamp_min and clamp_fraction");
  p.validate();
  return p;
}

LinearPolicy LinearPolicy::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read policy file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

void LinearPolicy::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write policy file " + path.string());
  out << to_text();
}

LinearPolicy fit_policy(const std::vector<PolicySample>& samples) {
  if (samples.size() < 2) throw DegenerateSamples("need at least two samples");
  const double count = static_cast<double>(samples.size());
  double mean_n = 0.0, mean_t = 0.0;
  for (const auto& s : samples) {
    mean_n += s.n;
    mean_t += s.t_trans;
  }
  mean_n /= count;
  mean_t /= count;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& s : samples) {
    const double dx = s.n - mean_n;
    sxx += dx * dx;
    sxy += dx * (s.t_trans - mean_t);
  }
  if (sxx == 0.0) throw DegenerateSamples("all samples have the same node count");
  LinearPolicy p;
  p.slope = sxy / sxx;
  p.intercept = mean_t - p.slope * mean_n;
  return p;
}

double predict_t_trans(const LinearPolicy& policy, int n, double t_max) {
  if (!(t_max > 0.0)) throw std::invalid_argument("t_max must be positive");
  const double hi = policy.clamp_fraction * t_max;
  const double lo = std::min(policy.clamp_min, hi);
  return std::clamp(policy.slope * n + policy.intercept, lo, hi);
}

PolicyCollection collect_policy_samples(const std::vector<PolicyInstance>& instances,
                                        const std::vector<double>& t_grid, double budget,
                                        const TraceRunner& runner, std::uint64_t seed, double interval) {
  if (t_grid.empty()) throw std::invalid_argument("transition grid is empty");
  for (double t : t_grid) {
    if (!(t >= 0.0 && t < budget)) throw std::invalid_argument("grid points must lie in [0, budget)");
  }
  std::vector<double> grid = t_grid;
  std::sort(grid.begin(), grid.end());

  PolicyCollection out;
  for (const PolicyInstance& item : instances) {
    try {
      std::vector<ConvergenceTrace> traces;
      traces.reserve(grid.size());
      std::int64_t reference = std::numeric_limits<std::int64_t>::max();
      for (double t : grid) {
        traces.push_back(runner(item.instance, t, seed));
        if (traces.back().empty()) throw EmptyTrace("run with t_trans=" + std::to_string(t) + " produced no tour");
        reference = std::min(reference, *traces.back().best());
      }
      if (item.bks) reference = *item.bks;
      double best_sum = std::numeric_limits<double>::infinity();
      double best_t = grid.front();
      for (std::size_t g = 0; g < grid.size(); ++g) {
        const double s = gap_sum(gap_curve(traces[g], reference, budget, interval));
        if (s < best_sum) {
          best_sum = s;
          best_t = grid[g];
        }
      }
      out.samples.push_back({item.instance.size(), best_t});
    } catch (const std::exception& e) {
      out.failures.push_back(item.instance.name() + ": " + e.what());
      std::cerr << "policy sample skipped for " << item.instance.name() << ": " << e.what() << '\n';
    }
  }
  return out;
}

}  // namespace unics
