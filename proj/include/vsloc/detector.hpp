#pragma once

#include <cmath>
#include <set>
#include <span>
#include <stdexcept>
#include <vector>

#include "vsloc/model.hpp"
#include "vsloc/vec2.hpp"

namespace vsloc {

struct DetectionReport {
  std::vector<double> delta_hat_db;  // per anchor, span order
  std::vector<double> p_hat_dbm;     // expected genuine RSS per anchor
  double sigma_hat_db = 0.0;
  std::set<int> malicious;
  std::set<int> honest;
};

/// Per-sample residual against the path-loss law anchored at x_hat:
/// alpha = P - P0 + 10*gamma*log10(|x_hat - a|/d0).  Honest samples have
/// zero-mean alpha; a lying anchor's alpha centres on its dB offset.
inline double rss_residual(double sample_dbm, Vec2 x_hat, const Anchor& a,
                           const ChannelParams& ch) {
  return sample_dbm - noiseless_rss(x_hat, a, ch);
}

/// Mean residual over an anchor's samples: its estimated attack intensity.
inline double estimate_attack_intensity(Vec2 x_hat, const Anchor& a,
                                        std::span<const double> samples,
                                        const ChannelParams& ch) {
  if (samples.empty()) throw std::invalid_argument("no samples");
  double sum = 0.0;
  for (double p : samples) sum += rss_residual(p, x_hat, a, ch);
  return sum / static_cast<double>(samples.size());
}

/// Noise level implied by the spread of residuals about each anchor's own
/// mean: per-anchor sample std (divisor K-1), averaged across anchors.
/// Centering on delta_hat makes this blind to any constant per-anchor
/// offset, honest or not.
inline double estimate_noise_std(Vec2 x_hat, std::span<const Anchor> anchors,
                                 const MeasurementSet& meas,
                                 std::span<const double> delta_hat,
                                 const ChannelParams& ch) {
  if (meas.size() != anchors.size() || delta_hat.size() != anchors.size())
    throw std::invalid_argument("anchors, measurements, offsets mismatched");
  if (anchors.empty()) throw std::invalid_argument("no anchors");

  double acc = 0.0;
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    const auto& samples = meas[i].samples_dbm;
    std::size_t k = samples.size();
    if (k < 2)
      throw std::invalid_argument("noise estimation needs at least 2 samples");
    double ss = 0.0;
    for (double p : samples) {
      double dev = rss_residual(p, x_hat, anchors[i], ch) - delta_hat[i];
      ss += dev * dev;
    }
    acc += std::sqrt(ss / static_cast<double>(k - 1));
  }
  return acc / static_cast<double>(anchors.size());
}

/// Power an honest anchor should report if the target really sits at x_hat.
inline double expected_rss(Vec2 x_hat, const Anchor& a,
                           const ChannelParams& ch) {
  return noiseless_rss(x_hat, a, ch);
}

/// Labels an anchor malicious when its median report falls strictly outside
/// the one-sigma band around its expected RSS.  Boundary values count as
/// honest.  Runs after localization and never feeds back into it.
inline DetectionReport detect(Vec2 x_hat, std::span<const Anchor> anchors,
                              const MeasurementSet& meas,
                              const ChannelParams& ch) {
  if (meas.size() != anchors.size())
    throw std::invalid_argument("measurement set does not cover anchors");

  DetectionReport rep;
  rep.delta_hat_db.reserve(anchors.size());
  for (std::size_t i = 0; i < anchors.size(); ++i)
    rep.delta_hat_db.push_back(estimate_attack_intensity(
        x_hat, anchors[i], meas[i].samples_dbm, ch));
  rep.sigma_hat_db =
      estimate_noise_std(x_hat, anchors, meas, rep.delta_hat_db, ch);

  rep.p_hat_dbm.reserve(anchors.size());
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    double p_hat = expected_rss(x_hat, anchors[i], ch);
    rep.p_hat_dbm.push_back(p_hat);
    double p_med = meas[i].median_dbm;
    bool outside = p_med < p_hat - rep.sigma_hat_db ||
                   p_med > p_hat + rep.sigma_hat_db;
    (outside ? rep.malicious : rep.honest).insert(anchors[i].id);
  }
  return rep;
}

}  // namespace vsloc
