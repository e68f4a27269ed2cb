#include "unics/core/bks.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace unics {

BksRegistry BksRegistry::parse(std::string_view text) {
  BksRegistry reg;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream fields(line);
    std::string name;
    if (!(fields >> name)) continue;
    long long length = 0;
    std::string extra;
    if (!(fields >> length) || (fields >> extra)) {
      throw std::invalid_argument("BKS line " + std::to_string(line_no) + ": expected 'name length'");
    }
    reg.set(name, length);
  }
  return reg;
}

BksRegistry BksRegistry::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read BKS file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

void BksRegistry::set(const std::string& name, std::int64_t length) {
  if (length <= 0) throw std::invalid_argument("BKS for " + name + " must be positive");
  entries_[name] = length;
}

std::optional<std::int64_t> BksRegistry::find(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

}  // namespace unics
