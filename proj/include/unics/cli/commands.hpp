#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "unics/cascade/solve.hpp"
#include "unics/transition/policy.hpp"

namespace unics::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kParseError = 2,
  kConfigError = 3,
  kDegenerateSamples = 4,
};

/// Entry point shared by the `unics` binary and the tests. args excludes argv[0].
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct ManifestEntry {
  std::filesystem::path path;
  std::optional<std::int64_t> bks;
  std::string group;
};

/// JSON list of {"path": str, "bks"?: int, "group"?: str}; relative paths
/// resolve against the manifest's directory.
std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path);

struct BenchOptions {
  CascadeConfig cascade;
  int runs = 10;
  std::uint64_t seed_base = 42;
  std::uint64_t seed_step = 60;
  std::filesystem::path out_dir = "bench_out";
  bool curves = false;
  double curve_interval = 1.0;
  int threads = 1;
};

struct BenchRow {
  std::string instance;
  std::string group;
  int n = 0;
  int run = 0;
  std::uint64_t seed = 0;
  std::int64_t length = 0;
  std::optional<std::int64_t> bks;
  std::optional<double> gap;
  bool new_best = false;
  double t_trans = 0.0;
  double wall_s = 0.0;
  std::string error;  // non-empty when the run failed
};

struct BenchAggregate {
  std::string name;  // instance name or group name
  int runs = 0;
  std::optional<double> best_gap;
  std::optional<double> avg_gap;
};

struct BenchReport {
  std::vector<BenchRow> rows;  // (instance, run) order
  std::vector<BenchAggregate> per_instance;
  std::vector<BenchAggregate> per_group;
  int failed = 0;
};

inline constexpr const char* kRunsCsvHeader = "instance,n,run,seed,length,bks,gap,t_trans,wall_s";

/// runs x instances solves with seeds seed_base + seed_step * run; writes
/// runs.csv, summary.csv, report.json, traces/ (and curves.csv) to out_dir.
BenchReport run_bench(const std::vector<ManifestEntry>& manifest, const BenchOptions& opts);

/// Writes `count` uniform instances (coordinates in [0, 1e6], integral).
std::vector<std::filesystem::path> generate_uniform(int n, int count, std::uint64_t seed,
                                                    const std::filesystem::path& out_dir);
TspInstance uniform_instance(int n, std::uint64_t seed, const std::string& name);

/// collect_policy_samples + fit_policy; writes the policy file.
struct FitOutcome {
  PolicyCollection collection;
  LinearPolicy policy;
};
FitOutcome fit_policy_from_manifest(const std::vector<ManifestEntry>& manifest, const std::vector<double>& grid,
                                    double budget, const TraceRunner& runner, std::uint64_t seed, double interval,
                                    const std::filesystem::path& policy_out);

}  // namespace unics::cli
