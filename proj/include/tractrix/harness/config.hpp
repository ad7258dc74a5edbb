#pragma once

#include "tractrix/errors.hpp"
#include "tractrix/point.hpp"
#include "tractrix/trajectory.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace tractrix::harness {

// Flat key = value configuration. Blank lines and lines starting with '#'
// are ignored; later assignments win, so command-line overrides are applied
// with set() after loading.
class Config {
 public:
  static const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys{
        "experiment", "backend",   "dim",        "radius",   "curve",      "curve_a",   "curve_b",
        "r",          "delta",     "deltas",     "start",    "p",          "pipeline",  "k",
        "k_length",   "k_direction", "k_file",   "mesh",     "samples",    "close_fraction",
        "separation", "seed",      "tolerance_scale", "samples_scale", "out", "family", "center",
        "shift",      "start_b",   "corrupt",    "witnesses", "lambda",   "t_end",     "bins",
        "bootstrap",  "relax",     "refine"};
    return keys;
  }

  static Config parse(std::istream& in, const std::string& origin = "<config>") {
    Config c;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const auto eq = line.find('=');
      if (trim(line).empty()) continue;
      if (eq == std::string::npos)
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
      c.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return c;
  }

  static Config load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    return parse(in, path);
  }

  void set(const std::string& key, const std::string& value) {
    if (!known_keys().count(key)) throw ConfigError("unknown config key '" + key + "'");
    values_[key] = value;
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string str(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  double num(const std::string& key, double fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    return to_double(key, it->second);
  }

  std::uint64_t integer(const std::string& key, std::uint64_t fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
      if (it->second.find('-') != std::string::npos) throw std::invalid_argument("negative");
      std::size_t used = 0;
      const auto v = std::stoull(it->second, &used);
      if (used != it->second.size()) throw std::invalid_argument("trailing characters");
      return v;
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "': expected a nonnegative integer, got '" + it->second + "'");
    }
  }

  bool flag(const std::string& key, bool fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    if (it->second == "true" || it->second == "1" || it->second == "yes") return true;
    if (it->second == "false" || it->second == "0" || it->second == "no") return false;
    throw ConfigError("config key '" + key + "': expected true or false");
  }

  // Comma-separated numbers.
  std::vector<double> list(const std::string& key, std::vector<double> fallback = {}) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<double> out;
    std::stringstream ss(it->second);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_double(key, trim(item)));
    return out;
  }

  Vector vec(const std::string& key, const Vector& fallback) const {
    if (!has(key)) return fallback;
    const auto l = list(key);
    return Eigen::Map<const Vector>(l.data(), static_cast<Eigen::Index>(l.size()));
  }

  // Canonical text (sorted keys), used for hashing. The output directory
  // is not part of the experiment and is left out.
  std::string canonical() const {
    std::string out;
    for (const auto& [k, v] : values_)
      if (k != "out") out += k + "=" + v + "\n";
    return out;
  }

  const std::map<std::string, std::string>& values() const noexcept { return values_; }

 private:
  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }

  static double to_double(const std::string& key, const std::string& v) {
    // A few symbolic constants keep configs readable.
    if (v == "pi") return kPi;
    if (v == "pi/2") return 0.5 * kPi;
    if (v == "pi/4") return 0.25 * kPi;
    const auto slash = v.find('/');
    if (v.rfind("pi/", 0) == 0 && slash != std::string::npos) return kPi / to_double(key, v.substr(slash + 1));
    try {
      std::size_t used = 0;
      const double d = std::stod(v, &used);
      if (used != v.size()) throw std::invalid_argument("trailing characters");
      return d;
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "': expected a number, got '" + v + "'");
    }
  }

  std::map<std::string, std::string> values_;
};

// 64-bit FNV-1a.
inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace tractrix::harness
