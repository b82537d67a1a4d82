#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace geoaug::cli {

// Bad command line or configuration; the message names the offending key.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A verification command found a result outside its tolerance.
class CheckFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct KeySpec {
  std::string key;
  std::string default_value;
  std::string help;
};

// Flat key=value configuration for one command. Values come from the defaults, then
// the config file, then command-line flags.
class Config {
 public:
  Config(std::string command, std::vector<KeySpec> keys);

  const std::string& command() const noexcept { return command_; }
  const std::vector<KeySpec>& keys() const noexcept { return keys_; }

  // '#' starts a comment line; every other non-blank line is `key = value`.
  void load_file(const std::filesystem::path& path);
  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;

  std::string get_string(const std::string& key) const;
  double get_double(const std::string& key) const;
  double get_nonnegative(const std::string& key) const;
  double get_positive(const std::string& key) const;
  std::size_t get_count(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::vector<double> get_doubles(const std::string& key) const;
  std::vector<std::size_t> get_counts(const std::string& key) const;

  // One "key = value" line per key in declaration order, headed by the command name.
  std::vector<std::string> echo() const;

 private:
  const KeySpec& spec(const std::string& key) const;
  [[noreturn]] void bad(const std::string& key, const std::string& why) const;

  std::string command_;
  std::vector<KeySpec> keys_;
  std::map<std::string, std::string> values_;
};

}  // namespace geoaug::cli
