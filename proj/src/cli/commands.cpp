#include "unics/cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "unics/core/bks.hpp"

namespace unics::cli {

using nlohmann::json;
namespace fs = std::filesystem;

std::vector<ManifestEntry> load_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw MalformedFile("cannot read manifest " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw MalformedFile("manifest " + path.string() + ": " + e.what());
  }
  if (!doc.is_array()) throw MalformedFile("manifest must be a JSON list");
  std::vector<ManifestEntry> entries;
  for (const json& item : doc) {
    if (!item.is_object() || !item.contains("path") || !item["path"].is_string()) {
      throw MalformedFile("manifest entries need a string 'path'");
    }
    ManifestEntry e;
    e.path = item["path"].get<std::string>();
    if (e.path.is_relative()) e.path = path.parent_path() / e.path;
    if (item.contains("bks") && !item["bks"].is_null()) {
      if (!item["bks"].is_number_integer() || item["bks"].get<std::int64_t>() <= 0) {
        throw MalformedFile("manifest 'bks' must be a positive integer");
      }
      e.bks = item["bks"].get<std::int64_t>();
    }
    if (item.contains("group")) e.group = item["group"].get<std::string>();
    entries.push_back(std::move(e));
  }
  return entries;
}

TspInstance uniform_instance(int n, std::uint64_t seed, const std::string& name) {
  if (n < 3) throw ConfigError("n must be >= 3");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Point> coords(static_cast<std::size_t>(n));
  for (Point& p : coords) {
    p.x = std::round(unit(rng) * 1e6);
    p.y = std::round(unit(rng) * 1e6);
  }
  return TspInstance(name, Metric::kEuc2d, std::move(coords));
}

std::vector<fs::path> generate_uniform(int n, int count, std::uint64_t seed, const fs::path& out_dir) {
  if (count < 1) throw ConfigError("count must be >= 1");
  fs::create_directories(out_dir);
  std::vector<fs::path> paths;
  std::mt19937_64 seeder(seed);
  for (int k = 0; k < count; ++k) {
    const std::string name = "uniform" + std::to_string(n) + "_s" + std::to_string(seed) + "_" + std::to_string(k);
    const TspInstance inst = uniform_instance(n, seeder(), name);
    const fs::path file = out_dir / (name + ".tsp");
    std::ofstream out(file, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + file.string());
    out << to_tsplib(inst);
    paths.push_back(file);
  }
  return paths;
}

namespace {

std::string fmt_double(double v, int precision = 9) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, v);
  return buf;
}

std::optional<double> mean(const std::vector<double>& xs) {
  if (xs.empty()) return std::nullopt;
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

std::string sanitize(std::string s) {
  for (char& c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_' && c != '.') c = '_';
  }
  return s;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

}  // namespace

BenchReport run_bench(const std::vector<ManifestEntry>& manifest, const BenchOptions& opts) {
  if (opts.runs < 1) throw ConfigError("runs must be >= 1");
  opts.cascade.validate();
  fs::create_directories(opts.out_dir / "traces");

  // Instances load once; a load failure marks all of its runs failed.
  struct Loaded {
    std::optional<TspInstance> inst;
    std::string error;
  };
  std::vector<Loaded> loaded(manifest.size());
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    try {
      loaded[i].inst = load_tsplib(manifest[i].path);
    } catch (const std::exception& e) {
      loaded[i].error = e.what();
    }
  }
  std::optional<SgnWeights> weights;
  if (opts.cascade.weights) weights = load_weights_file(*opts.cascade.weights);

  const std::size_t jobs = manifest.size() * static_cast<std::size_t>(opts.runs);
  BenchReport report;
  report.rows.resize(jobs);
  std::vector<ConvergenceTrace> traces(jobs);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t j = next++; j < jobs; j = next++) {
      const std::size_t i = j / static_cast<std::size_t>(opts.runs);
      const int run = static_cast<int>(j % static_cast<std::size_t>(opts.runs));
      BenchRow& row = report.rows[j];
      row.instance = loaded[i].inst ? loaded[i].inst->name() : manifest[i].path.stem().string();
      row.group = manifest[i].group;
      row.run = run;
      row.seed = opts.seed_base + opts.seed_step * static_cast<std::uint64_t>(run);
      row.bks = manifest[i].bks;
      if (!loaded[i].inst) {
        row.error = loaded[i].error;
        continue;
      }
      try {
        CascadeConfig cfg = opts.cascade;
        cfg.seed = row.seed;
        SolveResult res = solve(*loaded[i].inst, cfg, weights ? &*weights : nullptr);
        row.n = loaded[i].inst->size();
        row.length = res.best.length();
        row.t_trans = res.report.t_trans;
        row.wall_s = res.report.wall_s;
        if (row.bks) {
          row.gap = static_cast<double>(row.length - *row.bks) / static_cast<double>(*row.bks);
          row.new_best = row.length < *row.bks;
        }
        traces[j] = std::move(res.trace);
      } catch (const std::exception& e) {
        row.error = e.what();
      }
    }
  };
  const int threads = std::max(1, std::min<int>(opts.threads, static_cast<int>(jobs)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  // Aggregates, per instance then per group (mean of per-instance values).
  std::map<std::string, std::vector<const BenchAggregate*>> groups;
  std::vector<std::string> group_order;
  report.per_instance.reserve(manifest.size());
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    BenchAggregate agg;
    std::vector<double> gaps;
    for (int r = 0; r < opts.runs; ++r) {
      const BenchRow& row = report.rows[i * static_cast<std::size_t>(opts.runs) + static_cast<std::size_t>(r)];
      agg.name = row.instance;
      if (!row.error.empty()) {
        ++report.failed;
        continue;
      }
      ++agg.runs;
      if (row.gap) gaps.push_back(*row.gap);
    }
    if (!gaps.empty()) agg.best_gap = *std::min_element(gaps.begin(), gaps.end());
    agg.avg_gap = mean(gaps);
    report.per_instance.push_back(agg);
  }
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    const std::string g = manifest[i].group.empty() ? "all" : manifest[i].group;
    if (!groups.count(g)) group_order.push_back(g);
    groups[g].push_back(&report.per_instance[i]);
  }
  for (const std::string& g : group_order) {
    BenchAggregate agg;
    agg.name = g;
    std::vector<double> best, avg;
    for (const BenchAggregate* a : groups[g]) {
      agg.runs += a->runs;
      if (a->best_gap) best.push_back(*a->best_gap);
      if (a->avg_gap) avg.push_back(*a->avg_gap);
    }
    agg.best_gap = mean(best);
    agg.avg_gap = mean(avg);
    report.per_group.push_back(agg);
  }

  // Files.
  std::ostringstream runs_csv;
  runs_csv << kRunsCsvHeader << '\n';
  json rows = json::array();
  for (std::size_t j = 0; j < jobs; ++j) {
    const BenchRow& row = report.rows[j];
    json jr{{"instance", row.instance}, {"group", row.group}, {"run", row.run}, {"seed", row.seed}};
    if (!row.error.empty()) {
      jr["error"] = row.error;
      rows.push_back(jr);
      continue;
    }
    runs_csv << row.instance << ',' << row.n << ',' << row.run << ',' << row.seed << ',' << row.length << ','
             << (row.bks ? std::to_string(*row.bks) : "") << ',' << (row.gap ? fmt_double(*row.gap, 12) : "")
             << ',' << fmt_double(row.t_trans) << ',' << fmt_double(row.wall_s) << '\n';
    jr.update({{"n", row.n}, {"length", row.length}, {"t_trans", row.t_trans}, {"wall_s", row.wall_s},
               {"new_best", row.new_best}});
    if (row.bks) jr["bks"] = *row.bks;
    if (row.gap) jr["gap"] = *row.gap;
    const std::string trace_name = sanitize(row.instance) + "_run" + std::to_string(row.run) + ".jsonl";
    write_file(opts.out_dir / "traces" / trace_name, traces[j].to_jsonl());
    jr["trace"] = (fs::path("traces") / trace_name).string();
    rows.push_back(jr);
  }
  write_file(opts.out_dir / "runs.csv", runs_csv.str());

  auto agg_json = [](const BenchAggregate& a) {
    json j{{"name", a.name}, {"runs", a.runs}};
    j["best_gap"] = a.best_gap ? json(*a.best_gap) : json(nullptr);
    j["avg_gap"] = a.avg_gap ? json(*a.avg_gap) : json(nullptr);
    return j;
  };
  std::ostringstream summary;
  summary << "kind,name,runs,best_gap_pct,avg_gap_pct\n";
  json instances = json::array();
  json group_list = json::array();
  auto pct = [](const std::optional<double>& g) { return g ? fmt_double(*g * 100.0, 6) : std::string(); };
  for (const auto& a : report.per_instance) {
    summary << "instance," << a.name << ',' << a.runs << ',' << pct(a.best_gap) << ',' << pct(a.avg_gap) << '\n';
    instances.push_back(agg_json(a));
  }
  for (const auto& a : report.per_group) {
    summary << "group," << a.name << ',' << a.runs << ',' << pct(a.best_gap) << ',' << pct(a.avg_gap) << '\n';
    group_list.push_back(agg_json(a));
  }
  write_file(opts.out_dir / "summary.csv", summary.str());
  json doc{{"runs", rows}, {"instances", instances}, {"groups", group_list}, {"failed", report.failed}};
  write_file(opts.out_dir / "report.json", doc.dump(2) + "\n");

  if (opts.curves) {
    std::ostringstream curves;
    curves << "instance,run,t,gap\n";
    for (std::size_t i = 0; i < manifest.size(); ++i) {
      std::optional<std::int64_t> ref = manifest[i].bks;
      if (!ref) {
        for (int r = 0; r < opts.runs; ++r) {
          const BenchRow& row = report.rows[i * static_cast<std::size_t>(opts.runs) + static_cast<std::size_t>(r)];
          if (row.error.empty() && (!ref || row.length < *ref)) ref = row.length;
        }
      }
      if (!ref) continue;
      for (int r = 0; r < opts.runs; ++r) {
        const std::size_t j = i * static_cast<std::size_t>(opts.runs) + static_cast<std::size_t>(r);
        if (!report.rows[j].error.empty() || traces[j].empty()) continue;
        const auto curve = gap_curve(traces[j], *ref, opts.cascade.t_max, opts.curve_interval);
        for (std::size_t k = 0; k < curve.size(); ++k) {
          curves << report.rows[j].instance << ',' << r << ','
                 << fmt_double(static_cast<double>(k + 1) * opts.curve_interval) << ',' << fmt_double(curve[k], 12)
                 << '\n';
        }
      }
    }
    write_file(opts.out_dir / "curves.csv", curves.str());
  }
  return report;
}

FitOutcome fit_policy_from_manifest(const std::vector<ManifestEntry>& manifest, const std::vector<double>& grid,
                                    double budget, const TraceRunner& runner, std::uint64_t seed, double interval,
                                    const fs::path& policy_out) {
  std::vector<PolicyInstance> instances;
  for (const ManifestEntry& e : manifest) instances.push_back({load_tsplib(e.path), e.bks});
  FitOutcome outcome;
  outcome.collection = collect_policy_samples(instances, grid, budget, runner, seed, interval);
  outcome.policy = fit_policy(outcome.collection.samples);
  outcome.policy.save(policy_out);
  return outcome;
}

namespace {

struct SharedFlags {
  double t_max = 10.0;
  std::optional<double> t_trans;
  int gamma = 20;
  double eta = 0.5;
  int pop = 100;
  int nch = 30;
  std::string weights;
  std::string policy;
  std::uint64_t seed = 42;
  std::optional<std::uint64_t> iter_budget;
  int candidates = 5;
  int lambda = 3;
  bool penalties = false;

  void attach(CLI::App* app, bool with_seed) {
    app->add_option("--t-max", t_max, "Total time budget in seconds");
    app->add_option("--t-trans", t_trans, "Fixed transition time (seconds); default: policy prediction");
    app->add_option("--gamma", gamma, "Sparse graph out-degree");
    app->add_option("--eta", eta, "Random AB-cycle pick probability");
    app->add_option("--pop", pop, "EAX population size");
    app->add_option("--nch", nch, "Offspring per parent pair");
    app->add_option("--weights", weights, "UNGW weight file (default: weight-free scorer)");
    app->add_option("--policy", policy, "Transition policy file");
    if (with_seed) app->add_option("--seed", seed, "Random seed");
    app->add_option("--iter-budget", iter_budget, "Deterministic work budget instead of wall time");
    app->add_option("--candidates", candidates, "Local-search candidate list width");
    app->add_option("--lambda", lambda, "Local-search depth (2 or 3)");
    app->add_flag("--penalties", penalties, "Use node penalties in local-search gains");
  }

  CascadeConfig to_config() const {
    CascadeConfig cfg;
    cfg.t_max = t_max;
    cfg.t_trans_override = t_trans;
    cfg.gamma = gamma;
    cfg.eax.eta = eta;
    cfg.eax.population_size = pop;
    cfg.eax.n_children = nch;
    if (!weights.empty()) cfg.weights = weights;
    if (!policy.empty()) cfg.policy = LinearPolicy::load(policy);
    cfg.seed = seed;
    cfg.iter_budget = iter_budget;
    cfg.ls.candidates_k = candidates;
    cfg.ls.lambda_depth = lambda;
    cfg.ls.use_penalties = penalties;
    cfg.validate();
    return cfg;
  }
};

int worker_threads() {
  int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("UNICS_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) threads = std::min(threads, cap);
  }
  return threads;
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      grid.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError("bad grid value: " + item);
    }
  }
  if (grid.empty()) throw ConfigError("empty grid");
  return grid;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cascaded large-scale TSP solver"};
  app.require_subcommand(1);

  SharedFlags solve_flags;
  std::string solve_path, bks_path, trace_path;
  CLI::App* solve_cmd = app.add_subcommand("solve", "Solve one TSPLIB instance");
  solve_cmd->add_option("instance", solve_path, "TSPLIB file")->required();
  solve_cmd->add_option("--bks", bks_path, "BKS registry file (name length per line)");
  solve_cmd->add_option("--trace", trace_path, "Write the convergence trace as JSON lines");
  solve_flags.attach(solve_cmd, true);

  SharedFlags bench_flags;
  std::string manifest_path, out_dir = "bench_out";
  int runs = 10;
  std::uint64_t seed_step = 60;
  bool curves = false;
  double curve_interval = 1.0;
  CLI::App* bench_cmd = app.add_subcommand("bench", "Benchmark a manifest of instances");
  bench_cmd->add_option("manifest", manifest_path, "JSON manifest")->required();
  bench_cmd->add_option("--runs", runs, "Runs per instance");
  bench_cmd->add_option("--out", out_dir, "Output directory");
  bench_cmd->add_option("--seed-step", seed_step, "Seed increment between runs");
  bench_cmd->add_flag("--curves", curves, "Also write per-interval gap curves");
  bench_cmd->add_option("--curve-interval", curve_interval, "Gap curve sampling interval (s)");
  bench_flags.attach(bench_cmd, true);

  int gen_n = 0, gen_count = 1;
  std::uint64_t gen_seed = 1;
  std::string gen_out = ".";
  CLI::App* gen_cmd = app.add_subcommand("gen", "Generate uniform random instances");
  gen_cmd->add_option("--n", gen_n, "Nodes per instance")->required();
  gen_cmd->add_option("--count", gen_count, "Number of instances");
  gen_cmd->add_option("--seed", gen_seed, "Random seed");
  gen_cmd->add_option("--out", gen_out, "Output directory");

  SharedFlags fit_flags;
  std::string fit_manifest, grid_text = "50,100,150,200,250,300,350,400,450,500,550,600,650",
                            policy_out = "policy.txt";
  double interval = 1.0;
  CLI::App* fit_cmd = app.add_subcommand("fit-policy", "Fit the size -> transition-time policy");
  fit_cmd->add_option("manifest", fit_manifest, "JSON manifest")->required();
  fit_cmd->add_option("--grid", grid_text, "Comma-separated transition times (s)");
  fit_cmd->add_option("--out", policy_out, "Policy file to write");
  fit_cmd->add_option("--interval", interval, "Gap sampling interval (s)");
  fit_flags.attach(fit_cmd, true);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kConfigError;
  }

  try {
    if (*solve_cmd) {
      CascadeConfig cfg;
      try {
        cfg = solve_flags.to_config();
      } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
      }
      TspInstance inst = [&] {
        try {
          return load_tsplib(solve_path);
        } catch (const ParseError& e) {
          throw;
        }
      }();
      SolveResult res = solve(inst, cfg);
      json j{{"name", inst.name()}, {"n", inst.size()}, {"length", res.best.length()},
             {"t_trans", res.report.t_trans}, {"seed", cfg.seed}, {"wall_s", res.report.wall_s}};
      if (!bks_path.empty()) {
        if (auto bks = BksRegistry::load(bks_path).find(inst.name())) {
          j["bks"] = *bks;
          j["gap"] = static_cast<double>(res.best.length() - *bks) / static_cast<double>(*bks);
        }
      }
      if (!trace_path.empty()) write_file(trace_path, res.trace.to_jsonl());
      out << j.dump() << '\n';
      return kOk;
    }
    if (*bench_cmd) {
      BenchOptions opts;
      try {
        opts.cascade = bench_flags.to_config();
      } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
      }
      opts.runs = runs;
      opts.seed_base = bench_flags.seed;
      opts.seed_step = seed_step;
      opts.out_dir = out_dir;
      opts.curves = curves;
      opts.curve_interval = curve_interval;
      opts.threads = worker_threads();
      const auto manifest = load_manifest(manifest_path);
      BenchReport report = run_bench(manifest, opts);
      for (const auto& a : report.per_group) {
        out << a.name << ": runs=" << a.runs << " best_gap=" << (a.best_gap ? fmt_double(*a.best_gap * 100) : "-")
            << "% avg_gap=" << (a.avg_gap ? fmt_double(*a.avg_gap * 100) : "-") << "%\n";
      }
      for (const auto& row : report.rows) {
        if (!row.error.empty()) err << row.instance << " run " << row.run << ": " << row.error << '\n';
      }
      return report.failed == static_cast<int>(report.rows.size()) && !report.rows.empty() ? kFailure : kOk;
    }
    if (*gen_cmd) {
      if (gen_n < 3 || gen_count < 1) {
        err << "config error: need --n >= 3 and --count >= 1\n";
        return kConfigError;
      }
      for (const auto& p : generate_uniform(gen_n, gen_count, gen_seed, gen_out)) out << p.string() << '\n';
      return kOk;
    }
    if (*fit_cmd) {
      CascadeConfig cfg;
      std::vector<double> grid;
      try {
        cfg = fit_flags.to_config();
        grid = parse_grid(grid_text);
      } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
      }
      const auto manifest = load_manifest(fit_manifest);
      FitOutcome fit;
      try {
        fit = fit_policy_from_manifest(manifest, grid, cfg.t_max, cascade_runner(cfg), cfg.seed, interval,
                                       policy_out);
      } catch (const DegenerateSamples& e) {
        err << "cannot fit policy: " << e.what() << '\n';
        return kDegenerateSamples;
      }
      for (const auto& s : fit.collection.samples) out << "sample n=" << s.n << " t_trans=" << s.t_trans << '\n';
      out << "a=" << fmt_double(fit.policy.slope, 12) << " b=" << fmt_double(fit.policy.intercept, 12) << '\n';
      return kOk;
    }
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kParseError;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}

}  // namespace unics::cli
