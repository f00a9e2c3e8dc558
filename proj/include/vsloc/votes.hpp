#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "vsloc/geometry.hpp"
#include "vsloc/model.hpp"
#include "vsloc/vec2.hpp"

namespace vsloc {

/// The printed vote rule shares a pair's weight proportionally to each
/// cluster point's distance FROM the separating line; inverse_proximity is
/// the alternative reading (more share to points closer to the line).
enum class VoteWeighting { as_printed, inverse_proximity };

struct VoteLedger {
  std::vector<double> votes;  // same index space as InterestPointSet
};

struct LocalizationResult {
  Vec2 estimate;
  std::vector<int> top_indices;   // into the InterestPointSet
  std::vector<Vec2> top_points;   // the N-1 highest-voted points
  std::vector<double> weights;    // normalized, sum to 1
  bool degenerate = false;        // true when the top votes were all zero
};

/// Picks the target_size points that sit closest together: every point
/// seeds a candidate set of itself plus its target_size-1 nearest
/// neighbours, candidates are scored by total pairwise distance, lowest
/// score wins (ties: lowest seed index).  Exact on well-separated data,
/// deterministic always.
inline std::vector<int> cluster_halfspace(std::span<const Vec2> points,
                                          int target_size) {
  if (target_size < 1)
    throw std::invalid_argument("target_size must be at least 1");
  int m = static_cast<int>(points.size());
  std::vector<int> all(m);
  std::iota(all.begin(), all.end(), 0);
  if (m <= target_size) return all;

  std::vector<std::pair<double, int>> by_dist(m);
  std::vector<int> best, candidate;
  double best_score = 0.0;
  for (int seed = 0; seed < m; ++seed) {
    for (int k = 0; k < m; ++k)
      by_dist[k] = {distance(points[seed], points[k]), k};
    std::sort(by_dist.begin(), by_dist.end());

    candidate.clear();
    for (int k = 0; k < target_size; ++k) candidate.push_back(by_dist[k].second);
    double score = 0.0;
    for (std::size_t a = 0; a < candidate.size(); ++a)
      for (std::size_t b = a + 1; b < candidate.size(); ++b)
        score += distance(points[candidate[a]], points[candidate[b]]);

    if (best.empty() || score < best_score) {
      best_score = score;
      best = candidate;
      std::sort(best.begin(), best.end());
    }
  }
  return best;
}

/// Adds one anchor pair's vote contribution to `votes`.  The pair hands out
/// weight w_u = d_j/(d_i+d_j) in the half space on anchor i's side and the
/// complement on the other side (the side whose anchor looks closer gets
/// more), split within each side's cluster by the chosen weighting rule.
/// Coincident anchors contribute nothing.
inline void add_pair_votes(const InterestPointSet& ips, Vec2 a_i, Vec2 a_j,
                           double d_i, double d_j, VoteWeighting weighting,
                           std::vector<double>& votes) {
  if (votes.size() != ips.points.size())
    throw std::invalid_argument("vote ledger size mismatch");
  if (distance(a_i, a_j) <= 0.0) return;
  Hyperplane h = hyperplane(a_i, a_j);

  std::vector<int> upper, lower;
  for (std::size_t g = 0; g < ips.points.size(); ++g) {
    Halfspace side = halfspace_of(ips.points[g].pos, h);
    // Boundary points join the upper side.
    (side == Halfspace::lower ? lower : upper).push_back(static_cast<int>(g));
  }

  double w_upper = d_j / (d_i + d_j);
  auto distribute = [&](const std::vector<int>& members, double w) {
    if (members.empty()) return;
    std::vector<Vec2> pos(members.size());
    for (std::size_t k = 0; k < members.size(); ++k)
      pos[k] = ips.points[members[k]].pos;
    std::vector<int> cluster = cluster_halfspace(pos, ips.n_anchors - 1);

    std::vector<double> proj(cluster.size());
    double total = 0.0;
    for (std::size_t k = 0; k < cluster.size(); ++k) {
      proj[k] = distance_to_hyperplane(pos[cluster[k]], h);
      if (weighting == VoteWeighting::inverse_proximity)
        proj[k] = 1.0 / (1e-9 + proj[k]);
      total += proj[k];
    }
    for (std::size_t k = 0; k < cluster.size(); ++k) {
      double share = total > 0.0 ? proj[k] / total
                                 : 1.0 / static_cast<double>(cluster.size());
      votes[members[cluster[k]]] += w * share;
    }
  };
  distribute(upper, w_upper);
  distribute(lower, 1.0 - w_upper);
}

/// Full vote pass: every anchor pair splits one unit of vote mass over the
/// interest points (halved when one of its half spaces is empty).
inline VoteLedger compute_votes(const InterestPointSet& ips,
                                std::span<const Anchor> anchors,
                                const MeasurementSet& meas,
                                VoteWeighting weighting =
                                    VoteWeighting::as_printed) {
  std::size_t n = anchors.size();
  if (meas.size() != n)
    throw std::invalid_argument("measurement set does not cover anchors");
  if (ips.n_anchors != static_cast<int>(n) ||
      ips.points.size() != n * (n - 1))
    throw std::invalid_argument("interest points not built from these anchors");

  VoteLedger ledger;
  ledger.votes.assign(ips.points.size(), 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      add_pair_votes(ips, anchors[i].pos, anchors[j].pos, meas[i].dist_est_m,
                     meas[j].dist_est_m, weighting, ledger.votes);
  return ledger;
}

/// Weighted centroid of the N-1 highest-voted interest points.  A zero
/// top-vote total (degenerate scene) falls back to the plain centroid of
/// all points and flags the result.
inline LocalizationResult wcm_estimate(const InterestPointSet& ips,
                                       const VoteLedger& ledger,
                                       int n_anchors) {
  if (n_anchors < 3) throw std::invalid_argument("need at least 3 anchors");
  if (ledger.votes.empty() || ledger.votes.size() != ips.points.size())
    throw std::invalid_argument("vote ledger does not match interest points");

  std::vector<int> order(ledger.votes.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (ledger.votes[a] != ledger.votes[b])
      return ledger.votes[a] > ledger.votes[b];
    return a < b;
  });

  LocalizationResult res;
  std::size_t top_n = static_cast<std::size_t>(n_anchors - 1);
  double total = 0.0;
  for (std::size_t h = 0; h < top_n; ++h) {
    res.top_indices.push_back(order[h]);
    res.top_points.push_back(ips.points[order[h]].pos);
    total += ledger.votes[order[h]];
  }

  if (total > 0.0) {
    for (std::size_t h = 0; h < top_n; ++h) {
      double w = ledger.votes[res.top_indices[h]] / total;
      res.weights.push_back(w);
      res.estimate += res.top_points[h] * w;
    }
  } else {
    res.degenerate = true;
    for (const auto& p : ips.points)
      res.estimate += p.pos / static_cast<double>(ips.points.size());
    res.weights.assign(top_n, 1.0 / static_cast<double>(top_n));
  }
  return res;
}

/// End-to-end estimator: interest points -> votes -> weighted centroid.
inline LocalizationResult localize(std::span<const Anchor> anchors,
                                   const MeasurementSet& meas,
                                   VoteWeighting weighting =
                                       VoteWeighting::as_printed) {
  InterestPointSet ips = interest_points(anchors, meas);
  VoteLedger ledger = compute_votes(ips, anchors, meas, weighting);
  return wcm_estimate(ips, ledger, static_cast<int>(anchors.size()));
}

}  // namespace vsloc
