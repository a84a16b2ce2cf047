#include "starcoex/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace starcoex::config {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

Config Config::parse_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file: " + path);
  return parse(is, path);
}

Config Config::parse(std::istream& is, const std::string& name) {
  Config cfg;
  cfg.name_ = name;
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(name + ":" + std::to_string(lineno) +
                          ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw ConfigError(name + ":" + std::to_string(lineno) +
                          ": empty section name");
      cfg.sections_[section];
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(name + ":" + std::to_string(lineno) +
                        ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty())
      throw ConfigError(name + ":" + std::to_string(lineno) + ": empty key");
    if (section.empty())
      throw ConfigError(name + ":" + std::to_string(lineno) +
                        ": key outside any [section]");
    Entry& e = cfg.sections_[section][key];
    e.value = trim(line.substr(eq + 1));
    e.line = lineno;
  }
  return cfg;
}

const Config::Entry* Config::find(const std::string& section,
                                  const std::string& key) const {
  auto sit = sections_.find(section);
  if (sit == sections_.end()) return nullptr;
  auto kit = sit->second.find(key);
  if (kit == sit->second.end()) return nullptr;
  consumed_.insert({section, key});
  return &kit->second;
}

const Config::Entry& Config::require(const std::string& section,
                                     const std::string& key) const {
  const Entry* e = find(section, key);
  if (!e)
    throw ConfigError(name_ + ": missing required key [" + section + "] " +
                      key);
  return *e;
}

bool Config::has(const std::string& section, const std::string& key) const {
  return find(section, key) != nullptr;
}

std::string Config::get_string(const std::string& section,
                               const std::string& key) const {
  return require(section, key).value;
}

std::string Config::get_string(const std::string& section,
                               const std::string& key,
                               const std::string& fallback) const {
  const Entry* e = find(section, key);
  return e ? e->value : fallback;
}

double Config::get_double(const std::string& section,
                          const std::string& key) const {
  const Entry& e = require(section, key);
  try {
    std::size_t pos = 0;
    const double v = std::stod(e.value, &pos);
    if (pos != e.value.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(name_ + ":" + std::to_string(e.line) + ": key [" +
                      section + "] " + key + " is not a number: '" + e.value +
                      "'");
  }
}

double Config::get_double(const std::string& section, const std::string& key,
                          double fallback) const {
  return find(section, key) ? get_double(section, key) : fallback;
}

std::size_t Config::get_size(const std::string& section,
                             const std::string& key,
                             std::size_t fallback) const {
  if (!find(section, key)) return fallback;
  const double v = get_double(section, key);
  if (v < 0.0 || v != static_cast<double>(static_cast<std::size_t>(v)))
    throw ConfigError(name_ + ": key [" + section + "] " + key +
                      " must be a nonnegative integer");
  return static_cast<std::size_t>(v);
}

std::uint64_t Config::get_u64(const std::string& section,
                              const std::string& key,
                              std::uint64_t fallback) const {
  const Entry* e = find(section, key);
  if (!e) return fallback;
  try {
    return std::stoull(e->value);
  } catch (const std::exception&) {
    throw ConfigError(name_ + ":" + std::to_string(e->line) + ": key [" +
                      section + "] " + key + " is not an integer");
  }
}

bool Config::get_bool(const std::string& section, const std::string& key,
                      bool fallback) const {
  const Entry* e = find(section, key);
  if (!e) return fallback;
  std::string v = e->value;
  std::transform(v.begin(), v.end(), v.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(name_ + ":" + std::to_string(e->line) + ": key [" +
                    section + "] " + key + " is not a boolean");
}

std::vector<double> Config::get_double_list(const std::string& section,
                                            const std::string& key) const {
  const Entry& e = require(section, key);
  std::vector<double> out;
  for (const std::string& item : split_list(e.value)) {
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ConfigError(name_ + ":" + std::to_string(e.line) + ": key [" +
                        section + "] " + key + " has a non-numeric item '" +
                        item + "'");
    }
  }
  if (out.empty())
    throw ConfigError(name_ + ":" + std::to_string(e.line) + ": key [" +
                      section + "] " + key + " is an empty list");
  return out;
}

std::vector<std::string> Config::get_string_list(const std::string& section,
                                                 const std::string& key) const {
  return split_list(require(section, key).value);
}

void Config::reject_unknown_keys() const {
  std::string msg;
  for (const auto& [section, entries] : sections_) {
    for (const auto& [key, entry] : entries) {
      if (!consumed_.count({section, key})) {
        msg += "\n  " + name_ + ":" + std::to_string(entry.line) +
               ": unknown key [" + section + "] " + key;
      }
    }
  }
  if (!msg.empty()) throw ConfigError("config contains unknown keys:" + msg);
}

}  // namespace starcoex::config
