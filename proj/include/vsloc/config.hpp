#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "vsloc/errors.hpp"
#include "vsloc/sim.hpp"

namespace vsloc {

/// Scenario plus the sweep_deltas list, which is not part of a single run.
struct ParsedConfig {
  ScenarioConfig scenario;
  std::vector<double> sweep_deltas;
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& v, const std::string& key,
                           int line) {
  double out;
  auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
    throw ConfigError("line " + std::to_string(line) + ": key '" + key +
                      "' needs a number, got '" + v + "'");
  return out;
}

inline long long parse_int(const std::string& v, const std::string& key,
                           int line) {
  long long out;
  auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
    throw ConfigError("line " + std::to_string(line) + ": key '" + key +
                      "' needs an integer, got '" + v + "'");
  return out;
}

}  // namespace detail

/// Comma-separated doubles, e.g. a sweep list "1,2,5.5".
inline std::vector<double> parse_delta_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = detail::trim(item);
    if (item.empty())
      throw ConfigError("empty entry in delta list '" + text + "'");
    double v;
    auto res = std::from_chars(item.data(), item.data() + item.size(), v);
    if (res.ec != std::errc{} || res.ptr != item.data() + item.size())
      throw ConfigError("bad delta value '" + item + "'");
    out.push_back(v);
  }
  if (out.empty() && !detail::trim(text).empty())
    throw ConfigError("bad delta list '" + text + "'");
  return out;
}

/// Flat key = value text, '#' starts a comment.  Unknown and duplicate keys
/// are rejected; every error names the offending key and line.
inline ParsedConfig parse_config_text(std::istream& in) {
  ParsedConfig parsed;
  ScenarioConfig& sc = parsed.scenario;
  std::set<std::string> seen;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw.substr(0, raw.find('#'));
    s = detail::trim(s);
    if (s.empty()) continue;
    std::size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line) +
                        ": expected key = value, got '" + s + "'");
    std::string key = detail::trim(s.substr(0, eq));
    std::string val = detail::trim(s.substr(eq + 1));
    if (key.empty() || val.empty())
      throw ConfigError("line " + std::to_string(line) +
                        ": expected key = value, got '" + s + "'");
    if (!seen.insert(key).second)
      throw ConfigError("line " + std::to_string(line) + ": duplicate key '" +
                        key + "'");

    if (key == "area_m") {
      sc.area_m = detail::parse_double(val, key, line);
    } else if (key == "n_anchors") {
      sc.n_anchors = static_cast<int>(detail::parse_int(val, key, line));
    } else if (key == "n_malicious") {
      sc.n_malicious = static_cast<int>(detail::parse_int(val, key, line));
    } else if (key == "attack") {
      if (val == "none")
        sc.attack_kind = AttackKind::none;
      else if (val == "uncoordinated")
        sc.attack_kind = AttackKind::uncoordinated;
      else if (val == "coordinated")
        sc.attack_kind = AttackKind::coordinated;
      else
        throw ConfigError("line " + std::to_string(line) +
                          ": attack must be none, uncoordinated, or "
                          "coordinated, got '" +
                          val + "'");
    } else if (key == "delta") {
      // dB for uncoordinated attacks; metres of fake-target offset for
      // coordinated ones.
      sc.delta = detail::parse_double(val, key, line);
    } else if (key == "sigma_db") {
      sc.channel.sigma_db = detail::parse_double(val, key, line);
    } else if (key == "k_samples") {
      sc.k_samples = static_cast<int>(detail::parse_int(val, key, line));
    } else if (key == "n_deployments") {
      sc.n_deployments = static_cast<int>(detail::parse_int(val, key, line));
    } else if (key == "n_attacker_draws") {
      sc.n_attacker_draws =
          static_cast<int>(detail::parse_int(val, key, line));
    } else if (key == "seed") {
      long long v = detail::parse_int(val, key, line);
      if (v < 0)
        throw ConfigError("line " + std::to_string(line) +
                          ": seed must be non-negative");
      sc.seed = static_cast<std::uint64_t>(v);
    } else if (key == "p0_dbm") {
      sc.channel.p0_dbm = detail::parse_double(val, key, line);
    } else if (key == "gamma") {
      sc.channel.gamma = detail::parse_double(val, key, line);
    } else if (key == "d0_m") {
      sc.channel.d0_m = detail::parse_double(val, key, line);
    } else if (key == "vote_weighting") {
      if (val == "as-printed")
        sc.vote_weighting = VoteWeighting::as_printed;
      else if (val == "inverse-proximity")
        sc.vote_weighting = VoteWeighting::inverse_proximity;
      else
        throw ConfigError("line " + std::to_string(line) +
                          ": vote_weighting must be as-printed or "
                          "inverse-proximity, got '" +
                          val + "'");
    } else if (key == "sweep_deltas") {
      parsed.sweep_deltas = parse_delta_list(val);
    } else {
      throw ConfigError("line " + std::to_string(line) + ": unknown key '" +
                        key + "'");
    }
  }

  for (const char* k : {"n_anchors", "attack", "sigma_db"})
    if (!seen.count(k))
      throw ConfigError(std::string("missing required key '") + k + "'");
  if (sc.attack_kind != AttackKind::none)
    for (const char* k : {"n_malicious", "delta"})
      if (!seen.count(k))
        throw ConfigError(std::string("missing required key '") + k +
                          "' (required unless attack = none)");
  if (sc.attack_kind == AttackKind::none) {
    if (!seen.count("n_malicious")) sc.n_malicious = 0;
    if (!seen.count("delta")) sc.delta = 0.0;
  }

  sc.validate();
  return parsed;
}

inline ParsedConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path.string() + "'");
  try {
    return parse_config_text(in);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace vsloc
