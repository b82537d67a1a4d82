#include "geoaug/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace geoaug::cli {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

std::optional<double> to_double(const std::string& s) {
  const std::string t = trim(s);
  if (t.empty()) return std::nullopt;
  const char* b = t.data();
  if (*b == '+') ++b;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(b, t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size()) return std::nullopt;
  return v;
}

std::optional<std::uint64_t> to_u64(const std::string& s) {
  const std::string t = trim(s);
  if (t.empty()) return std::nullopt;
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size()) return std::nullopt;
  return v;
}

}  // namespace

Config::Config(std::string command, std::vector<KeySpec> keys)
    : command_(std::move(command)), keys_(std::move(keys)) {
  for (const auto& k : keys_) values_[k.key] = k.default_value;
}

const KeySpec& Config::spec(const std::string& key) const {
  const auto it = std::find_if(keys_.begin(), keys_.end(), [&](const KeySpec& k) { return k.key == key; });
  if (it == keys_.end()) throw UsageError("unknown config key '" + key + "' for " + command_);
  return *it;
}

void Config::bad(const std::string& key, const std::string& why) const {
  throw UsageError("config key '" + key + "': " + why + " (got '" + values_.at(key) + "')");
}

void Config::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path.string());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw UsageError(path.string() + ":" + std::to_string(lineno) + ": expected key = value");
    }
    set(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
}

void Config::set(const std::string& key, const std::string& value) {
  spec(key);
  values_[key] = value;
}

bool Config::has(const std::string& key) const {
  return std::any_of(keys_.begin(), keys_.end(), [&](const KeySpec& k) { return k.key == key; });
}

std::string Config::get_string(const std::string& key) const {
  spec(key);
  return values_.at(key);
}

double Config::get_double(const std::string& key) const {
  const auto v = to_double(get_string(key));
  if (!v || !std::isfinite(*v)) bad(key, "expected a finite number");
  return *v;
}

double Config::get_nonnegative(const std::string& key) const {
  const double v = get_double(key);
  if (v < 0.0) bad(key, "must be >= 0");
  return v;
}

double Config::get_positive(const std::string& key) const {
  const double v = get_double(key);
  if (!(v > 0.0)) bad(key, "must be > 0");
  return v;
}

std::size_t Config::get_count(const std::string& key) const {
  const auto v = to_u64(get_string(key));
  if (!v) bad(key, "expected a nonnegative integer");
  return static_cast<std::size_t>(*v);
}

std::uint64_t Config::get_u64(const std::string& key) const {
  const auto v = to_u64(get_string(key));
  if (!v) bad(key, "expected a nonnegative integer");
  return *v;
}

bool Config::get_bool(const std::string& key) const {
  const std::string v = get_string(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad(key, "expected true or false");
}

std::vector<double> Config::get_doubles(const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : split_list(get_string(key))) {
    const auto v = to_double(item);
    if (!v || !std::isfinite(*v)) bad(key, "expected a comma-separated list of numbers");
    out.push_back(*v);
  }
  if (out.empty()) bad(key, "list is empty");
  return out;
}

std::vector<std::size_t> Config::get_counts(const std::string& key) const {
  std::vector<std::size_t> out;
  for (const auto& item : split_list(get_string(key))) {
    const auto v = to_u64(item);
    if (!v) bad(key, "expected a comma-separated list of nonnegative integers");
    out.push_back(static_cast<std::size_t>(*v));
  }
  if (out.empty()) bad(key, "list is empty");
  return out;
}

std::vector<std::string> Config::echo() const {
  std::vector<std::string> lines{"geoaug " + command_};
  for (const auto& k : keys_) lines.push_back(k.key + " = " + values_.at(k.key));
  return lines;
}

}  // namespace geoaug::cli
