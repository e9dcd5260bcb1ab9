#include "bslmis/config.hpp"

#include "bslmis/rng.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace bslmis {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

bool valid_key(std::string_view k) {
  if (k.empty()) return false;
  for (char c : k) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '_' || c == '.' || c == '-';
    if (!ok) return false;
  }
  return true;
}

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = s.find(',', start);
    out.push_back(trim(s.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                        : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <class T>
bool parse_whole(std::string_view s, T& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

}  // namespace

Config Config::parse(std::string_view text) {
  Config c;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("config line " + std::to_string(line_no) + " has no '='", line_no);
    }
    const std::string_view key = trim(line.substr(0, eq));
    if (!valid_key(key)) {
      throw ParseError("config line " + std::to_string(line_no) + " has an invalid key",
                       line_no);
    }
    c.values_[std::string(key)] = std::string(trim(line.substr(eq + 1)));
  }
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open config file " + path, "config");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse(ss.str());
}

void Config::set(const std::string& key, const std::string& value) {
  if (!valid_key(key)) throw ConfigError("invalid config key '" + key + "'", key);
  values_[key] = std::string(trim(value));
}

void Config::apply_override(std::string_view assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError("override '" + std::string(assignment) + "' is not key=value",
                      std::string(assignment));
  }
  set(std::string(trim(assignment.substr(0, eq))), std::string(assignment.substr(eq + 1)));
}

const std::string& Config::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing config key '" + key + "'", key);
  return it->second;
}

double Config::get_double(const std::string& key) const {
  double v = 0.0;
  if (!parse_whole(std::string_view(get(key)), v) || !std::isfinite(v)) {
    throw ConfigError("config key '" + key + "' is not a finite number", key);
  }
  return v;
}

std::int64_t Config::get_int(const std::string& key) const {
  std::int64_t v = 0;
  if (!parse_whole(std::string_view(get(key)), v)) {
    throw ConfigError("config key '" + key + "' is not an integer", key);
  }
  return v;
}

std::size_t Config::get_size(const std::string& key) const {
  std::size_t v = 0;
  if (!parse_whole(std::string_view(get(key)), v)) {
    throw ConfigError("config key '" + key + "' is not a non-negative integer", key);
  }
  return v;
}

std::uint64_t Config::get_u64(const std::string& key) const {
  std::uint64_t v = 0;
  if (!parse_whole(std::string_view(get(key)), v)) {
    throw ConfigError("config key '" + key + "' is not an unsigned integer", key);
  }
  return v;
}

bool Config::get_bool(const std::string& key) const {
  const std::string& v = get(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config key '" + key + "' is not a boolean", key);
}

std::vector<double> Config::get_doubles(const std::string& key) const {
  std::vector<double> out;
  for (std::string_view f : split_list(get(key))) {
    double v = 0.0;
    if (!parse_whole(f, v) || !std::isfinite(v)) {
      throw ConfigError("config key '" + key + "' is not a list of numbers", key);
    }
    out.push_back(v);
  }
  return out;
}

std::vector<std::size_t> Config::get_sizes(const std::string& key) const {
  std::vector<std::size_t> out;
  for (std::string_view f : split_list(get(key))) {
    std::size_t v = 0;
    if (!parse_whole(f, v)) {
      throw ConfigError("config key '" + key + "' is not a list of counts", key);
    }
    out.push_back(v);
  }
  return out;
}

void Config::resolve(const std::map<std::string, std::string>& defaults) {
  for (const auto& [k, v] : values_) {
    if (defaults.count(k) == 0) throw ConfigError("unknown config key '" + k + "'", k);
  }
  for (const auto& [k, v] : defaults) values_.emplace(k, v);
}

void Config::require(const std::string& key) const {
  if (!has(key) || get(key).empty()) {
    throw ConfigError("config key '" + key + "' is required", key);
  }
}

std::string Config::serialize() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
  return out;
}

std::uint64_t Config::hash() const { return fnv1a64(serialize()); }

}  // namespace bslmis
