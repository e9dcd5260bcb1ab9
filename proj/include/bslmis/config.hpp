#pragma once

#include "bslmis/common.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace bslmis {

// Flat key = value configuration. Lines starting with '#' and blank lines
// are ignored; a trailing "# ..." after a value is a comment. Keys are
// [A-Za-z0-9_.-]+.
class Config {
 public:
  static Config parse(std::string_view text);
  static Config load(const std::string& path);

  void set(const std::string& key, const std::string& value);
  // "key=value"; throws ConfigError on a missing '='.
  void apply_override(std::string_view assignment);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  const std::string& get(const std::string& key) const;
  double get_double(const std::string& key) const;
  std::int64_t get_int(const std::string& key) const;
  std::size_t get_size(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  // Comma-separated list of numbers.
  std::vector<double> get_doubles(const std::string& key) const;
  std::vector<std::size_t> get_sizes(const std::string& key) const;

  // Fills keys missing here from defaults; any key not present in defaults
  // is unknown and throws ConfigError naming it.
  void resolve(const std::map<std::string, std::string>& defaults);
  // Throws ConfigError when key is absent.
  void require(const std::string& key) const;

  // Sorted "key = value" lines; parse(serialize()) == *this.
  std::string serialize() const;
  // FNV-1a 64 of serialize().
  std::uint64_t hash() const;

  const std::map<std::string, std::string>& entries() const { return values_; }
  bool operator==(const Config& other) const { return values_ == other.values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace bslmis
