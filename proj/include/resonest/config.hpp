#ifndef RESONEST_CONFIG_HPP
#define RESONEST_CONFIG_HPP

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>

namespace resonest {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Flat `key = value` text with '#' comments.  Unknown keys are errors, so a
/// typo in a control constant cannot pass silently.
class KeyValueConfig {
 public:
  static KeyValueConfig parse_text(const std::string& text) {
    KeyValueConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      auto trim = [](std::string s) {
        auto b = s.find_first_not_of(" \t\r");
        auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
      };
      std::string t = trim(line);
      if (t.empty()) continue;
      auto eq = t.find('=');
      if (eq == std::string::npos)
        throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
      std::string key = trim(t.substr(0, eq)), val = trim(t.substr(eq + 1));
      if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
      if (!cfg.values_.emplace(key, val).second)
        throw ConfigError("config: duplicate key '" + key + "'");
    }
    return cfg;
  }

  static KeyValueConfig parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_text(ss.str());
  }

  bool has(const std::string& key) const {
    used_.insert(key);
    return values_.count(key) > 0;
  }

  std::string get_string(const std::string& key, const std::string& def) const {
    used_.insert(key);
    auto it = values_.find(key);
    return it == values_.end() ? def : it->second;
  }

  double get_double(const std::string& key, double def) const {
    used_.insert(key);
    auto it = values_.find(key);
    if (it == values_.end()) return def;
    try {
      std::size_t pos;
      std::string v = it->second;
      if (v == "inf") return std::numeric_limits<double>::infinity();
      double d = std::stod(v, &pos);
      if (pos != v.size()) throw std::invalid_argument(v);
      return d;
    } catch (const std::exception&) {
      throw ConfigError("config: key '" + key + "' is not a number: " + it->second);
    }
  }

  int get_int(const std::string& key, int def) const {
    used_.insert(key);
    auto it = values_.find(key);
    if (it == values_.end()) return def;
    try {
      std::size_t pos;
      int v = std::stoi(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument(it->second);
      return v;
    } catch (const std::exception&) {
      throw ConfigError("config: key '" + key + "' is not an integer: " + it->second);
    }
  }

  /// Must be called after all gets: any key never asked for is unknown.
  void reject_unknown_keys() const {
    for (const auto& [k, v] : values_)
      if (!used_.count(k)) throw ConfigError("config: unknown key '" + k + "'");
  }

  const std::map<std::string, std::string>& raw() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
  mutable std::set<std::string> used_;
};

}  // namespace resonest

#endif
