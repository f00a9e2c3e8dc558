#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "vsloc/detector.hpp"
#include "vsloc/errors.hpp"
#include "vsloc/model.hpp"
#include "vsloc/rng.hpp"
#include "vsloc/votes.hpp"

namespace vsloc {

struct ScenarioConfig {
  double area_m = 25.0;
  int n_anchors = 7;
  int n_malicious = 2;
  AttackKind attack_kind = AttackKind::uncoordinated;
  // Attack intensity: dB offset for uncoordinated attacks, metres of fake
  // target displacement for coordinated ones.
  double delta = 5.0;
  int k_samples = 10;
  int n_deployments = 100;
  int n_attacker_draws = 10;
  std::uint64_t seed = 1;
  ChannelParams channel;  // sigma_db lives here
  VoteWeighting vote_weighting = VoteWeighting::as_printed;

  double sigma_db() const { return channel.sigma_db; }

  void validate() const {
    auto bad = [](const std::string& what) { throw ConfigError(what); };
    if (!(area_m > 0.0) || !std::isfinite(area_m))
      bad("area_m must be positive");
    if (n_anchors < 3) bad("n_anchors must be at least 3");
    if (n_malicious < 0) bad("n_malicious must be non-negative");
    if (n_malicious >= n_anchors) bad("n_malicious must be below n_anchors");
    if (k_samples < 1) bad("k_samples must be at least 1");
    if (n_deployments < 1) bad("n_deployments must be at least 1");
    if (n_attacker_draws < 1) bad("n_attacker_draws must be at least 1");
    if (!std::isfinite(delta)) bad("delta must be finite");
    if (attack_kind == AttackKind::coordinated && delta < 0.0)
      bad("delta must be non-negative for a coordinated attack");
    try {
      channel.validate();
    } catch (const std::exception& e) {
      bad(e.what());
    }
  }
};

struct NetworkLayout {
  std::vector<Anchor> anchors;
  Vec2 target;
};

/// One Monte Carlo run: a (deployment, attacker draw) pair.
struct RunRecord {
  int deployment = 0;
  int draw = 0;
  bool ok = false;
  std::string error;

  Vec2 target;
  Vec2 estimate;
  double le_m = 0.0;

  std::set<int> true_malicious;
  std::set<int> flagged;
  std::vector<double> delta_true_db;  // per anchor, id order
  std::vector<double> delta_hat_db;
  double sigma_hat_db = std::numeric_limits<double>::quiet_NaN();
  bool detection_available = false;

  double wall_ms = 0.0;
};

namespace detail {
// Top-level stream labels under the campaign seed.
constexpr std::uint64_t kDeployKey = 1;
constexpr std::uint64_t kAttackKey = 2;
constexpr std::uint64_t kNoiseKey = 3;

constexpr double kMinTargetAnchorDist = 0.1;  // keeps the log finite
}  // namespace detail

/// Uniform deployment over the square, deterministic per (seed, index).
/// The target is re-drawn until it clears every anchor by 0.1 m.
inline NetworkLayout deploy(const ScenarioConfig& config,
                            int deployment_index) {
  RngStream s = RngStream(config.seed)
                    .derive(detail::kDeployKey)
                    .derive(static_cast<std::uint64_t>(deployment_index));
  NetworkLayout layout;
  layout.anchors.reserve(config.n_anchors);
  for (int i = 0; i < config.n_anchors; ++i) {
    Vec2 p{s.uniform(0.0, config.area_m), s.uniform(0.0, config.area_m)};
    layout.anchors.push_back({i + 1, p});
  }
  for (;;) {
    Vec2 t{s.uniform(0.0, config.area_m), s.uniform(0.0, config.area_m)};
    bool clear = true;
    for (const auto& a : layout.anchors)
      clear = clear && distance(t, a.pos) >= detail::kMinTargetAnchorDist;
    if (clear) {
      layout.target = t;
      return layout;
    }
  }
}

/// Attack instance for one record: n_malicious distinct anchors, plus the
/// fake-target direction for coordinated attacks.
inline AttackSpec draw_attack(const ScenarioConfig& config,
                              const NetworkLayout& layout, RngStream s) {
  if (config.attack_kind == AttackKind::none || config.n_malicious == 0)
    return AttackSpec::none();

  std::vector<int> ids(layout.anchors.size());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = layout.anchors[i].id;
  std::set<int> chosen;
  for (int t = 0; t < config.n_malicious; ++t) {
    int r = t + s.uniform_int(static_cast<int>(ids.size()) - t);
    std::swap(ids[t], ids[r]);
    chosen.insert(ids[t]);
  }

  if (config.attack_kind == AttackKind::uncoordinated)
    return AttackSpec::uncoordinated(std::move(chosen), config.delta);
  double theta = s.uniform(0.0, 2.0 * std::numbers::pi);
  return AttackSpec::coordinated(
      std::move(chosen),
      coordinated_attack_point(layout.target, config.delta, theta));
}

/// True per-anchor dB offsets implied by an attack (what the detector's
/// delta_hat is trying to recover).
inline std::vector<double> true_offsets(const NetworkLayout& layout,
                                        const AttackSpec& attack,
                                        const ChannelParams& ch) {
  std::vector<double> out(layout.anchors.size(), 0.0);
  for (std::size_t i = 0; i < layout.anchors.size(); ++i) {
    const Anchor& a = layout.anchors[i];
    if (attack.kind == AttackKind::none || !attack.malicious_ids.count(a.id))
      continue;
    out[i] = attack.kind == AttackKind::uncoordinated
                 ? attack.offset_db
                 : equivalent_offset_db(layout.target, attack.fake_target, a,
                                        ch);
  }
  return out;
}

/// Executes one record end to end.  Failures are captured in the record
/// rather than thrown; a campaign never dies on one bad draw.
inline RunRecord run_record(const ScenarioConfig& config,
                            const NetworkLayout& layout, int deployment,
                            int draw) {
  RunRecord rec;
  rec.deployment = deployment;
  rec.draw = draw;
  rec.target = layout.target;
  try {
    RngStream root(config.seed);
    AttackSpec attack =
        draw_attack(config, layout,
                    root.derive(detail::kAttackKey)
                        .derive(static_cast<std::uint64_t>(deployment))
                        .derive(static_cast<std::uint64_t>(draw)));
    rec.true_malicious = attack.malicious_ids;
    rec.delta_true_db = true_offsets(layout, attack, config.channel);

    MeasurementSet meas = generate_measurements(
        layout.target, layout.anchors, config.channel, attack,
        config.k_samples,
        root.derive(detail::kNoiseKey)
            .derive(static_cast<std::uint64_t>(deployment))
            .derive(static_cast<std::uint64_t>(draw)));

    auto t0 = std::chrono::steady_clock::now();
    LocalizationResult loc =
        localize(layout.anchors, meas, config.vote_weighting);
    rec.estimate = loc.estimate;
    rec.le_m = distance(layout.target, rec.estimate);

    if (config.k_samples >= 2) {
      DetectionReport rep =
          detect(rec.estimate, layout.anchors, meas, config.channel);
      rec.flagged = rep.malicious;
      rec.delta_hat_db = rep.delta_hat_db;
      rec.sigma_hat_db = rep.sigma_hat_db;
      rec.detection_available = true;
    } else {
      // A single sample still pins down the mean offsets, just not sigma.
      for (std::size_t i = 0; i < layout.anchors.size(); ++i)
        rec.delta_hat_db.push_back(estimate_attack_intensity(
            rec.estimate, layout.anchors[i], meas[i].samples_dbm,
            config.channel));
    }
    auto t1 = std::chrono::steady_clock::now();
    rec.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    rec.ok = true;
  } catch (const std::exception& e) {
    rec.ok = false;
    rec.error = e.what();
  }
  return rec;
}

/// Full Monte Carlo campaign: n_deployments layouts x n_attacker_draws
/// attack instances.  Every record's randomness is keyed by (seed,
/// deployment, draw), so the result is identical for any worker count.
inline std::vector<RunRecord> run_campaign(const ScenarioConfig& config,
                                           int n_threads = 1) {
  config.validate();
  int total = config.n_deployments * config.n_attacker_draws;
  std::vector<RunRecord> records(total);

  int workers = std::clamp(n_threads, 1, total);
  auto work = [&](int tid) {
    for (int r = tid; r < total; r += workers) {
      int d = r / config.n_attacker_draws;
      int a = r % config.n_attacker_draws;
      NetworkLayout layout = deploy(config, d);
      records[r] = run_record(config, layout, d, a);
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }
  return records;
}

inline std::size_t count_ok(std::span<const RunRecord> records) {
  std::size_t n = 0;
  for (const auto& r : records) n += r.ok ? 1 : 0;
  return n;
}

/// Root mean squared localization error pooled over all successful records.
inline double rmse(std::span<const RunRecord> records) {
  double ss = 0.0;
  std::size_t n = 0;
  for (const auto& r : records) {
    if (!r.ok) continue;
    ss += r.le_m * r.le_m;
    ++n;
  }
  if (n == 0) throw std::invalid_argument("rmse: no successful records");
  return std::sqrt(ss / static_cast<double>(n));
}

struct DetectionRates {
  std::optional<double> cdr;  // absent when no record had a true attacker
  double far = 0.0;
};

inline DetectionRates detection_rates(std::span<const RunRecord> records) {
  std::size_t hit = 0, mal = 0, false_alarm = 0, honest = 0;
  std::size_t considered = 0;
  for (const auto& r : records) {
    if (!r.ok || !r.detection_available) continue;
    ++considered;
    for (int id : r.flagged)
      (r.true_malicious.count(id) ? hit : false_alarm) += 1;
    mal += r.true_malicious.size();
    honest += r.delta_true_db.size() - r.true_malicious.size();
  }
  if (considered == 0)
    throw std::invalid_argument("detection_rates: no detection-capable records");
  DetectionRates out;
  if (mal > 0) out.cdr = static_cast<double>(hit) / static_cast<double>(mal);
  out.far = honest > 0
                ? static_cast<double>(false_alarm) / static_cast<double>(honest)
                : 0.0;
  return out;
}

/// Empirical CDF of localization error: (sorted LE, k/M) pairs.
inline std::vector<std::pair<double, double>> le_cdf(
    std::span<const RunRecord> records) {
  std::vector<double> les;
  for (const auto& r : records)
    if (r.ok) les.push_back(r.le_m);
  if (les.empty()) throw std::invalid_argument("le_cdf: no successful records");
  std::sort(les.begin(), les.end());
  std::vector<std::pair<double, double>> out;
  out.reserve(les.size());
  for (std::size_t k = 0; k < les.size(); ++k)
    out.emplace_back(les[k], static_cast<double>(k + 1) /
                                 static_cast<double>(les.size()));
  return out;
}

/// Mean over records of the per-record RMSE between estimated and true
/// per-anchor attack offsets.
inline double armse_delta(std::span<const RunRecord> records) {
  double acc = 0.0;
  std::size_t n = 0;
  for (const auto& r : records) {
    if (!r.ok || r.delta_hat_db.size() != r.delta_true_db.size() ||
        r.delta_true_db.empty())
      continue;
    double ss = 0.0;
    for (std::size_t i = 0; i < r.delta_true_db.size(); ++i) {
      double e = r.delta_hat_db[i] - r.delta_true_db[i];
      ss += e * e;
    }
    acc += std::sqrt(ss / static_cast<double>(r.delta_true_db.size()));
    ++n;
  }
  if (n == 0) throw std::invalid_argument("armse_delta: no usable records");
  return acc / static_cast<double>(n);
}

}  // namespace vsloc
