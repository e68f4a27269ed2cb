#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace unics {

/// Best-known tour lengths by instance name. Text format: one
/// `name length` pair per line, `#` starts a comment.
class BksRegistry {
 public:
  static BksRegistry parse(std::string_view text);
  static BksRegistry load(const std::filesystem::path& path);

  void set(const std::string& name, std::int64_t length);
  std::optional<std::int64_t> find(const std::string& name) const;
  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::string, std::int64_t, std::less<>> entries_;
};

}  // namespace unics
