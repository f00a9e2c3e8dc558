#pragma once

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "vsloc/config.hpp"
#include "vsloc/csv.hpp"
#include "vsloc/detector.hpp"
#include "vsloc/errors.hpp"
#include "vsloc/model.hpp"
#include "vsloc/votes.hpp"

namespace vsloc {

/// Measurement dump from a real or simulated network: channel constants,
/// one row of RSS samples per anchor, optionally the true target.
///
///   p0_dbm = 15        # channel header, all keys optional
///   anchor 1 2.0 3.0 -12.1 -11.9 ...   # id, x, y, K samples (dBm)
///   target 12.0 7.5                    # optional ground truth
struct Trace {
  ChannelParams channel;
  std::vector<Anchor> anchors;
  MeasurementSet meas;
  std::optional<Vec2> truth;
  int k_samples = 0;
};

namespace detail {

inline double parse_trace_num(const std::string& tok, int line) {
  double v;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
    throw ConfigError("line " + std::to_string(line) + ": bad number '" +
                      tok + "'");
  if (!std::isfinite(v))
    throw ConfigError("line " + std::to_string(line) +
                      ": value must be finite, got '" + tok + "'");
  return v;
}

}  // namespace detail

inline Trace parse_trace_text(std::istream& in) {
  Trace tr;
  tr.channel.sigma_db = 0.0;  // unused downstream; the detector estimates it
  std::set<int> ids;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw.substr(0, raw.find('#'));
    s = detail::trim(s);
    if (s.empty()) continue;

    std::stringstream ss(s);
    std::string head;
    ss >> head;
    if (head == "anchor") {
      std::vector<std::string> toks;
      std::string t;
      while (ss >> t) toks.push_back(t);
      if (toks.size() < 4)
        throw ConfigError("line " + std::to_string(line) +
                          ": anchor row needs id, x, y and at least one "
                          "sample");
      int id = static_cast<int>(detail::parse_trace_num(toks[0], line));
      if (!ids.insert(id).second)
        throw ConfigError("line " + std::to_string(line) +
                          ": duplicate anchor id " + std::to_string(id));
      Vec2 pos{detail::parse_trace_num(toks[1], line),
               detail::parse_trace_num(toks[2], line)};
      AnchorMeasurement m;
      m.anchor_id = id;
      for (std::size_t k = 3; k < toks.size(); ++k)
        m.samples_dbm.push_back(detail::parse_trace_num(toks[k], line));
      int k_here = static_cast<int>(m.samples_dbm.size());
      if (tr.k_samples == 0)
        tr.k_samples = k_here;
      else if (k_here != tr.k_samples)
        throw ConfigError("line " + std::to_string(line) + ": expected " +
                          std::to_string(tr.k_samples) + " samples, got " +
                          std::to_string(k_here));
      tr.anchors.push_back({id, pos});
      tr.meas.push_back(std::move(m));
    } else if (head == "target") {
      if (tr.truth)
        throw ConfigError("line " + std::to_string(line) +
                          ": duplicate target row");
      std::string xs, ys, extra;
      if (!(ss >> xs >> ys) || (ss >> extra))
        throw ConfigError("line " + std::to_string(line) +
                          ": target row needs exactly x and y");
      tr.truth = Vec2{detail::parse_trace_num(xs, line),
                      detail::parse_trace_num(ys, line)};
    } else if (s.find('=') != std::string::npos) {
      std::size_t eq = s.find('=');
      std::string key = detail::trim(s.substr(0, eq));
      std::string val = detail::trim(s.substr(eq + 1));
      if (key == "p0_dbm")
        tr.channel.p0_dbm = detail::parse_trace_num(val, line);
      else if (key == "gamma")
        tr.channel.gamma = detail::parse_trace_num(val, line);
      else if (key == "d0_m")
        tr.channel.d0_m = detail::parse_trace_num(val, line);
      else
        throw ConfigError("line " + std::to_string(line) +
                          ": unknown trace key '" + key + "'");
    } else {
      throw ConfigError("line " + std::to_string(line) +
                        ": expected channel key, anchor row, or target row; "
                        "got '" + s + "'");
    }
  }

  if (tr.anchors.size() < 3)
    throw ConfigError("trace needs at least 3 anchors, found " +
                      std::to_string(tr.anchors.size()));
  try {
    tr.channel.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("trace channel header: ") + e.what());
  }
  for (auto& m : tr.meas) {
    m.median_dbm = median_of(m.samples_dbm);
    m.dist_est_m = estimate_distance(m.median_dbm, tr.channel);
  }
  return tr;
}

inline Trace parse_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trace file '" + path.string() + "'");
  try {
    return parse_trace_text(in);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

/// Localization plus (when K >= 2) detection over one trace.
struct TraceReport {
  Vec2 estimate;
  std::optional<double> le_m;  // present when the trace carries ground truth
  std::vector<double> delta_hat_db;  // anchor row order
  double sigma_hat_db = 0.0;
  std::set<int> flagged;
  bool detection_available = false;
};

inline TraceReport analyze_trace(const Trace& tr,
                                 VoteWeighting weighting =
                                     VoteWeighting::as_printed) {
  TraceReport rep;
  LocalizationResult loc = localize(tr.anchors, tr.meas, weighting);
  rep.estimate = loc.estimate;
  if (tr.truth) rep.le_m = distance(*tr.truth, rep.estimate);

  if (tr.k_samples >= 2) {
    DetectionReport det =
        detect(rep.estimate, tr.anchors, tr.meas, tr.channel);
    rep.delta_hat_db = det.delta_hat_db;
    rep.sigma_hat_db = det.sigma_hat_db;
    rep.flagged = det.malicious;
    rep.detection_available = true;
  } else {
    for (std::size_t i = 0; i < tr.anchors.size(); ++i)
      rep.delta_hat_db.push_back(estimate_attack_intensity(
          rep.estimate, tr.anchors[i], tr.meas[i].samples_dbm, tr.channel));
  }
  return rep;
}

/// Writes a trace (round-trips through parse_trace).
inline void write_trace(std::ostream& out, const ChannelParams& ch,
                        std::span<const Anchor> anchors,
                        const MeasurementSet& meas,
                        std::optional<Vec2> truth) {
  out << "p0_dbm = " << format_double(ch.p0_dbm) << "\n";
  out << "gamma = " << format_double(ch.gamma) << "\n";
  out << "d0_m = " << format_double(ch.d0_m) << "\n";
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    out << "anchor " << anchors[i].id << " " << format_double(anchors[i].pos.x)
        << " " << format_double(anchors[i].pos.y);
    for (double s : meas[i].samples_dbm) out << " " << format_double(s);
    out << "\n";
  }
  if (truth)
    out << "target " << format_double(truth->x) << " "
        << format_double(truth->y) << "\n";
}

}  // namespace vsloc
