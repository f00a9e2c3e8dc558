#pragma once

#include <algorithm>
#include <cmath>
#include <set>
#include <span>
#include <stdexcept>
#include <vector>

#include "vsloc/rng.hpp"
#include "vsloc/vec2.hpp"

namespace vsloc {

/// Log-distance path-loss channel.
struct ChannelParams {
  double p0_dbm = 15.0;   // received power at the reference distance
  double gamma = 3.0;     // path-loss exponent
  double d0_m = 1.0;      // reference distance
  double sigma_db = 1.0;  // shadowing standard deviation

  void validate() const {
    if (!(gamma > 0.0) || !std::isfinite(gamma))
      throw std::invalid_argument("gamma must be positive");
    if (!(d0_m > 0.0) || !std::isfinite(d0_m))
      throw std::invalid_argument("d0_m must be positive");
    if (!(sigma_db >= 0.0) || !std::isfinite(sigma_db))
      throw std::invalid_argument("sigma_db must be non-negative");
    if (!std::isfinite(p0_dbm))
      throw std::invalid_argument("p0_dbm must be finite");
  }
};

struct Anchor {
  int id = 0;
  Vec2 pos;
};

enum class AttackKind { none, uncoordinated, coordinated };

/// Which anchors lie and how.  Uncoordinated attackers add a fixed dB offset
/// to every report; coordinated attackers all report power as if the target
/// sat at a common fake position.
struct AttackSpec {
  AttackKind kind = AttackKind::none;
  std::set<int> malicious_ids;
  double offset_db = 0.0;  // uncoordinated only
  Vec2 fake_target;        // coordinated only

  static AttackSpec none() { return {}; }

  static AttackSpec uncoordinated(std::set<int> ids, double offset_db) {
    AttackSpec a;
    a.kind = AttackKind::uncoordinated;
    a.malicious_ids = std::move(ids);
    a.offset_db = offset_db;
    return a;
  }

  static AttackSpec coordinated(std::set<int> ids, Vec2 fake_target) {
    AttackSpec a;
    a.kind = AttackKind::coordinated;
    a.malicious_ids = std::move(ids);
    a.fake_target = fake_target;
    return a;
  }
};

/// One anchor's view of the target: raw samples plus the statistics the
/// rest of the pipeline consumes.
struct AnchorMeasurement {
  int anchor_id = 0;
  std::vector<double> samples_dbm;
  double median_dbm = 0.0;
  double dist_est_m = 0.0;
};

using MeasurementSet = std::vector<AnchorMeasurement>;

/// Median with the even-count convention: mean of the two middle values.
inline double median_of(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median of empty set");
  std::sort(v.begin(), v.end());
  std::size_t m = v.size() / 2;
  if (v.size() % 2 == 1) return v[m];
  return 0.5 * (v[m - 1] + v[m]);
}

/// Mean received power at anchor `a` from a transmitter at `x`.
inline double noiseless_rss(Vec2 x, const Anchor& a, const ChannelParams& ch) {
  double d = distance(x, a.pos);
  if (d <= 0.0)
    throw std::invalid_argument("transmitter coincides with anchor");
  return ch.p0_dbm - 10.0 * ch.gamma * std::log10(d / ch.d0_m);
}

/// Inverts the path-loss law: distance implied by a median power reading.
inline double estimate_distance(double median_dbm, const ChannelParams& ch) {
  return ch.d0_m * std::pow(10.0, (ch.p0_dbm - median_dbm) / (10.0 * ch.gamma));
}

/// Fake position a coordinated attacker advertises: the true target pushed
/// `offset_m` metres along direction `theta_rad`.
inline Vec2 coordinated_attack_point(Vec2 x, double offset_m,
                                     double theta_rad) {
  return {x.x + offset_m * std::cos(theta_rad),
          x.y + offset_m * std::sin(theta_rad)};
}

/// dB offset that makes an uncoordinated report identical to a coordinated
/// one: the power gap between the true and fake positions as seen by `a`.
inline double equivalent_offset_db(Vec2 x, Vec2 fake, const Anchor& a,
                                   const ChannelParams& ch) {
  return 10.0 * ch.gamma *
         std::log10(distance(x, a.pos) / distance(fake, a.pos));
}

inline void validate_anchors(std::span<const Anchor> anchors) {
  if (anchors.empty()) throw std::invalid_argument("no anchors");
  std::set<int> ids;
  for (const auto& a : anchors) ids.insert(a.id);
  if (ids.size() != anchors.size())
    throw std::invalid_argument("anchor ids must be unique");
}

/// Draws `k_samples` RSS readings per anchor and reduces them to a median
/// and a distance estimate.  Noise is keyed per (anchor index, sample), so
/// the same `noise` stream yields the same honest noise regardless of the
/// attack applied on top.
inline MeasurementSet generate_measurements(Vec2 x,
                                            std::span<const Anchor> anchors,
                                            const ChannelParams& ch,
                                            const AttackSpec& attack,
                                            int k_samples,
                                            const RngStream& noise) {
  ch.validate();
  validate_anchors(anchors);
  if (k_samples < 1)
    throw std::invalid_argument("k_samples must be at least 1");

  MeasurementSet out;
  out.reserve(anchors.size());
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    const Anchor& a = anchors[i];
    bool lying = attack.kind != AttackKind::none &&
                 attack.malicious_ids.count(a.id) > 0;
    double mean_dbm;
    if (lying && attack.kind == AttackKind::coordinated) {
      mean_dbm = noiseless_rss(attack.fake_target, a, ch);
    } else {
      mean_dbm = noiseless_rss(x, a, ch);
      if (lying) mean_dbm += attack.offset_db;
    }

    AnchorMeasurement m;
    m.anchor_id = a.id;
    m.samples_dbm.reserve(k_samples);
    RngStream link = noise.derive(i);
    for (int k = 0; k < k_samples; ++k)
      m.samples_dbm.push_back(mean_dbm +
                              ch.sigma_db * link.derive(k).normal());
    m.median_dbm = median_of(m.samples_dbm);
    m.dist_est_m = estimate_distance(m.median_dbm, ch);
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace vsloc
