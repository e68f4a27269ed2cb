#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "../support/oracles.hpp"
#include "unics/cli/commands.hpp"

using namespace unics;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("unics_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.push_back("");
    rows.push_back(cells);
  }
  return rows;
}

const char* kTriangle =
    "NAME : tri3\nTYPE : TSP\nDIMENSION : 3\nEDGE_WEIGHT_TYPE : EUC_2D\nNODE_COORD_SECTION\n1 0 0\n2 3 0\n3 0 4\nEOF\n";

}  // namespace

TEST_CASE("solve") {
  const fs::path dir = scratch("solve");
  write(dir / "tri3.tsp", kTriangle);
  const Run ok = invoke({"solve", (dir / "tri3.tsp").string(), "--t-max", "1", "--seed", "42"});
  REQUIRE(ok.code == 0);
  const auto j = nlohmann::json::parse(ok.out);
  CHECK(j["length"] == 12);
  CHECK(j["name"] == "tri3");
  CHECK(j["n"] == 3);
  CHECK(j["seed"] == 42);
  CHECK(j.contains("t_trans"));

  write(dir / "bks.txt", "tri3 12\n");
  const Run gap = invoke({"solve", (dir / "tri3.tsp").string(), "--t-max", "0.2", "--bks", (dir / "bks.txt").string(),
                       "--trace", (dir / "t.jsonl").string()});
  REQUIRE(gap.code == 0);
  CHECK(nlohmann::json::parse(gap.out)["gap"] == 0.0);
  CHECK(slurp(dir / "t.jsonl").find("\"len\": 12") != std::string::npos);

  const Run missing = invoke({"solve", (dir / "nope.tsp").string()});
  CHECK(missing.code == 2);
  CHECK_FALSE(missing.err.empty());
  const Run bad = invoke({"solve", (dir / "tri3.tsp").string(), "--t-trans", "0.5", "--t-max", "0.2"});
  CHECK(bad.code == 3);
  CHECK(invoke({"solve"}).code == 3);
  CHECK(invoke({"solve", (dir / "tri3.tsp").string(), "--pop", "1"}).code == 3);
}

TEST_CASE("gen") {
  const fs::path dir = scratch("gen");
  const Run a = invoke({"gen", "--n", "500", "--count", "2", "--seed", "7", "--out", (dir / "a").string()});
  const Run b = invoke({"gen", "--n", "500", "--count", "2", "--seed", "7", "--out", (dir / "b").string()});
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir / "a")) files.push_back(e.path());
  REQUIRE(files.size() == 2);
  for (const fs::path& f : files) {
    const TspInstance inst = load_tsplib(f);
    CHECK(inst.size() == 500);
    CHECK(slurp(f) == slurp(dir / "b" / f.filename()));
    for (const Point& p : inst.coords()) {
      CHECK(p.x == std::round(p.x));
      CHECK((p.x >= 0 && p.x <= 1e6 && p.y >= 0 && p.y <= 1e6));
    }
  }
  CHECK(invoke({"gen", "--n", "2"}).code == 3);

  const TspInstance big = cli::uniform_instance(10000, 3, "big");
  double mx = 0, my = 0;
  for (const Point& p : big.coords()) mx += p.x, my += p.y;
  mx /= 10000, my /= 10000;
  const double sigma = 1e6 / std::sqrt(12.0 * 10000);
  CHECK(std::abs(mx - 5e5) < 3 * sigma);
  CHECK(std::abs(my - 5e5) < 3 * sigma);
}

TEST_CASE("bench") {
  const fs::path dir = scratch("bench");
  const TspInstance inst = cli::uniform_instance(60, 1, "u60");
  write(dir / "u60.tsp", to_tsplib(inst));
  write(dir / "tri3.tsp", kTriangle);
  // tri3's BKS is set above the true optimum so every run beats it.
  write(dir / "manifest.json",
        R"([{"path": "u60.tsp", "bks": 5000000, "group": "uniform"}, {"path": "tri3.tsp", "bks": 13, "group": "tiny"}])");
  auto bench = [&](const std::string& out) {
    return invoke({"bench", (dir / "manifest.json").string(), "--runs", "3", "--t-max", "2", "--iter-budget", "50000",
                "--out", (dir / out).string(), "--curves"});
  };
  const Run r = bench("out1");
  REQUIRE(r.code == 0);
  const auto rows = read_csv(dir / "out1" / "runs.csv");
  REQUIRE(rows.size() == 7);
  CHECK(slurp(dir / "out1" / "runs.csv").rfind("instance,n,run,seed,length,bks,gap,t_trans,wall_s\n", 0) == 0);
  CHECK(rows[1][3] == "42");
  CHECK(rows[2][3] == "102");
  CHECK(rows[3][3] == "162");

  const auto report = nlohmann::json::parse(slurp(dir / "out1" / "report.json"));
  double sum = 0;
  for (int k = 0; k < 3; ++k) {
    const auto& run = report["runs"][static_cast<std::size_t>(k)];
    sum += run["gap"].get<double>();
    CHECK(run["gap"].get<double>() == doctest::Approx((run["length"].get<double>() - 5e6) / 5e6));
  }
  CHECK(report["instances"][0]["avg_gap"].get<double>() == doctest::Approx(sum / 3).epsilon(1e-12));
  for (int k = 3; k < 6; ++k) {
    const auto& run = report["runs"][static_cast<std::size_t>(k)];
    CHECK(run["new_best"] == true);
    CHECK(run["gap"].get<double>() < 0);
  }
  CHECK(report["runs"][0]["new_best"] == false);
  CHECK(report["groups"].size() == 2);
  CHECK(fs::exists(dir / "out1" / "summary.csv"));
  CHECK(fs::exists(dir / "out1" / "curves.csv"));
  CHECK(fs::exists(dir / "out1" / "traces" / "u60_run0.jsonl"));

  // Iteration-budget reruns reproduce lengths exactly.
  REQUIRE(bench("out2").code == 0);
  const auto rows2 = read_csv(dir / "out2" / "runs.csv");
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows2[i][4] == rows[i][4]);

  // Per-instance failures are recorded; all failing is an error.
  write(dir / "broken.json", R"([{"path": "missing.tsp"}, {"path": "tri3.tsp"}])");
  const Run partial = invoke({"bench", (dir / "broken.json").string(), "--runs", "1", "--t-max", "0.1", "--out",
                           (dir / "out3").string()});
  CHECK(partial.code == 0);
  CHECK(partial.err.find("missing") != std::string::npos);
  write(dir / "dead.json", R"([{"path": "missing.tsp"}])");
  CHECK(invoke({"bench", (dir / "dead.json").string(), "--runs", "1", "--t-max", "0.1", "--out", (dir / "out4").string()})
            .code == 1);
}

TEST_CASE("fit-policy") {
  const fs::path dir = scratch("fit");
  std::vector<cli::ManifestEntry> manifest;
  for (int n : {100, 200, 300}) {
    const std::string name = "u" + std::to_string(n);
    write(dir / (name + ".tsp"), to_tsplib(cli::uniform_instance(n, static_cast<std::uint64_t>(n), name)));
    manifest.push_back({dir / (name + ".tsp"), std::nullopt, ""});
  }
  // Planted argmins on t = 0.01 n + 1.
  TraceRunner planted = [](const TspInstance& inst, double t_trans, std::uint64_t) {
    ConvergenceTrace t;
    t.record(0.1, 2000, Phase::kLs);
    t.record(0.2 + std::abs(t_trans - (0.01 * inst.size() + 1)), 1000, Phase::kPbs);
    return t;
  };
  const cli::FitOutcome fit =
      cli::fit_policy_from_manifest(manifest, {1, 2, 3, 4, 5}, 8, planted, 1, 0.1, dir / "policy.txt");
  CHECK(std::abs(fit.policy.slope - 0.01) < 1e-6);
  CHECK(std::abs(fit.policy.intercept - 1) < 1e-6);
  CHECK(LinearPolicy::load(dir / "policy.txt").slope == fit.policy.slope);

  write(dir / "one.json", R"([{"path": "u100.tsp"}, {"path": "u100.tsp"}])");
  const Run degenerate = invoke({"fit-policy", (dir / "one.json").string(), "--grid", "1,2", "--t-max", "3",
                              "--iter-budget", "20000", "--out", (dir / "p1.txt").string()});
  CHECK(degenerate.code == 4);

  write(dir / "desk.json", R"([{"path": "u100.tsp"}, {"path": "u200.tsp"}, {"path": "u300.tsp"}])");
  const Run desk = invoke({"fit-policy", (dir / "desk.json").string(), "--grid", "2,5,10", "--t-max", "12",
                        "--iter-budget", "60000", "--interval", "0.5", "--out", (dir / "p2.txt").string()});
  CHECK(desk.code == 0);
  CHECK(fs::exists(dir / "p2.txt"));
  MESSAGE("desk policy: " << desk.out);
}
