#include "unics/core/instance.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

namespace unics {

std::string_view metric_name(Metric metric) {
  switch (metric) {
    case Metric::kEuc2d:
      return "EUC_2D";
    case Metric::kCeil2d:
      return "CEIL_2D";
  }
  return "?";
}

TspInstance::TspInstance(std::string name, Metric metric, std::vector<Point> coords)
    : name_(std::move(name)), metric_(metric), coords_(std::move(coords)) {
  if (coords_.size() < 3) {
    throw std::invalid_argument("instance needs at least 3 nodes");
  }
  for (const Point& p : coords_) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw std::invalid_argument("non-finite coordinate");
    }
  }
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::optional<double> to_double(std::string_view token) {
  // std::from_chars for double is available in libstdc++ 11.
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) return std::nullopt;
  return value;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace

TspInstance parse_tsplib(std::string_view text) {
  std::string name = "unnamed";
  std::optional<long> dimension;
  std::optional<Metric> metric;
  std::vector<Point> coords;
  bool in_coords = false;
  bool saw_coord_section = false;

  std::istringstream lines{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(lines, raw)) {
    ++line_no;
    std::string_view line = trim(raw);
    if (line.empty()) continue;

    if (in_coords) {
      auto tokens = split_ws(line);
      if (tokens.size() == 3) {
        auto id = to_double(tokens[0]);
        auto x = to_double(tokens[1]);
        auto y = to_double(tokens[2]);
        if (!id || !x || !y) {
          throw MalformedFile("line " + std::to_string(line_no) + ": bad coordinate");
        }
        coords.push_back({*x, *y});
        continue;
      }
      // A keyword (or EOF) ends the coordinates.
      if (!std::isalpha(static_cast<unsigned char>(tokens[0][0]))) {
        throw MalformedFile("line " + std::to_string(line_no) + ": expected 'id x y'");
      }
      in_coords = false;
    }

    const std::string line_upper = upper(line);
    if (line_upper == "EOF") break;
    if (line_upper.rfind("NODE_COORD_SECTION", 0) == 0) {
      in_coords = true;
      saw_coord_section = true;
      continue;
    }

    std::string_view key = line;
    std::string_view value;
    if (auto colon = line.find(':'); colon != std::string_view::npos) {
      key = trim(line.substr(0, colon));
      value = trim(line.substr(colon + 1));
    } else if (auto sp = line.find_first_of(" \t"); sp != std::string_view::npos) {
      key = trim(line.substr(0, sp));
      value = trim(line.substr(sp + 1));
    }
    const std::string k = upper(key);
    if (k == "NAME") {
      name = std::string(value);
    } else if (k == "TYPE") {
      if (upper(value) != "TSP") {
        throw MalformedFile("unsupported problem TYPE: " + std::string(value));
      }
    } else if (k == "DIMENSION") {
      auto d = to_double(value);
      if (!d || *d < 3 || *d != std::floor(*d)) {
        throw MalformedFile("bad DIMENSION: " + std::string(value));
      }
      dimension = static_cast<long>(*d);
    } else if (k == "EDGE_WEIGHT_TYPE") {
      const std::string v = upper(value);
      if (v == "EUC_2D") {
        metric = Metric::kEuc2d;
      } else if (v == "CEIL_2D") {
        metric = Metric::kCeil2d;
      } else {
        throw UnsupportedMetric("unsupported EDGE_WEIGHT_TYPE: " + std::string(value));
      }
    } else if (k.ends_with("_SECTION")) {
      throw MalformedFile("unsupported section: " + std::string(key));
    }
    // COMMENT and other header keys are ignored.
  }

  if (!dimension) throw MalformedFile("missing DIMENSION");
  if (!metric) throw MalformedFile("missing EDGE_WEIGHT_TYPE");
  if (!saw_coord_section) throw MalformedFile("missing NODE_COORD_SECTION");
  if (static_cast<long>(coords.size()) != *dimension) {
    throw MalformedFile("DIMENSION " + std::to_string(*dimension) + " but " +
                        std::to_string(coords.size()) + " coordinates");
  }
  return TspInstance(std::move(name), *metric, std::move(coords));
}

TspInstance load_tsplib(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MalformedFile("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_tsplib(buf.str());
}

std::string to_tsplib(const TspInstance& inst) {
  std::ostringstream out;
  out << "NAME : " << inst.name() << '\n'
      << "TYPE : TSP\n"
      << "DIMENSION : " << inst.size() << '\n'
      << "EDGE_WEIGHT_TYPE : " << metric_name(inst.metric()) << '\n'
      << "NODE_COORD_SECTION\n";
  char buf[64];
  for (int i = 0; i < inst.size(); ++i) {
    const Point& p = inst.point(i);
    std::snprintf(buf, sizeof buf, "%.17g", p.x);
    out << (i + 1) << ' ' << buf;
    std::snprintf(buf, sizeof buf, "%.17g", p.y);
    out << ' ' << buf << '\n';
  }
  out << "EOF\n";
  return out.str();
}

}  // namespace unics
