#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

// INI-style key-value configuration: [section] headers, key = value lines,
// '#' comments. The parser keeps line numbers so diagnostics can point at the
// offending entry, and tracks key consumption so unknown keys are reported.
namespace starcoex::config {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class Config {
 public:
  static Config parse_file(const std::string& path);
  static Config parse(std::istream& is, const std::string& name);

  bool has(const std::string& section, const std::string& key) const;

  // Getters mark the key consumed. The no-default forms throw ConfigError
  // naming the missing key.
  std::string get_string(const std::string& section,
                         const std::string& key) const;
  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key) const;
  double get_double(const std::string& section, const std::string& key,
                    double fallback) const;
  std::size_t get_size(const std::string& section, const std::string& key,
                       std::size_t fallback) const;
  std::uint64_t get_u64(const std::string& section, const std::string& key,
                        std::uint64_t fallback) const;
  bool get_bool(const std::string& section, const std::string& key,
                bool fallback) const;
  std::vector<double> get_double_list(const std::string& section,
                                      const std::string& key) const;
  std::vector<std::string> get_string_list(const std::string& section,
                                           const std::string& key) const;

  // Throws listing every key that no getter ever consumed, with line numbers.
  void reject_unknown_keys() const;

  const std::string& name() const { return name_; }

 private:
  struct Entry {
    std::string value;
    int line = 0;
  };
  const Entry* find(const std::string& section, const std::string& key) const;
  const Entry& require(const std::string& section,
                       const std::string& key) const;

  std::string name_;
  std::map<std::string, std::map<std::string, Entry>> sections_;
  mutable std::set<std::pair<std::string, std::string>> consumed_;
};

}  // namespace starcoex::config
