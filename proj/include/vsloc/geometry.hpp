#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "vsloc/model.hpp"
#include "vsloc/vec2.hpp"

namespace vsloc {

/// Perpendicular bisector-like separating line for an anchor pair: passes
/// through the pair midpoint a0 with unit normal b_hat pointing from a_j
/// toward a_i.  The "upper" half space is the side anchor i lies on.
struct Hyperplane {
  Vec2 b_hat;
  Vec2 a0;
};

enum class Halfspace { upper, lower, on };

enum class Branch { plus, minus };

struct InterestPoint {
  Vec2 pos;
  int i = 0;  // anchor ids, i < j
  int j = 0;
  bool forged = false;
  Branch branch = Branch::plus;
};

/// All 2*C(N,2) candidate points, pair-major: points[2p] is the plus branch
/// of pair p, points[2p+1] the minus branch.
struct InterestPointSet {
  std::vector<InterestPoint> points;
  int n_anchors = 0;
};

/// Intersection of circles (a_i, d_i) and (a_j, d_j).  Empty when the
/// circles do not meet; tangency yields two coincident points.
inline std::optional<std::pair<Vec2, Vec2>> circle_intersection(Vec2 a_i,
                                                                double d_i,
                                                                Vec2 a_j,
                                                                double d_j) {
  if (!(d_i > 0.0) || !(d_j > 0.0))
    throw std::invalid_argument("circle radii must be positive");
  Vec2 diff = a_j - a_i;
  double dd = norm2(diff);
  if (dd <= 0.0) throw std::invalid_argument("coincident circle centers");

  double u = ((d_i + d_j) * (d_i + d_j) - dd) * (dd - (d_j - d_i) * (d_j - d_i));
  if (u < 0.0) return std::nullopt;

  Vec2 q0 = diff * ((d_i * d_i - d_j * d_j) / (2.0 * dd)) + (a_i + a_j) * 0.5;
  Vec2 t = perp(diff) * (std::sqrt(u) / (2.0 * dd));
  return std::make_pair(q0 + t, q0 - t);
}

/// Stand-in points for a non-intersecting pair: cut the line through both
/// centers with each circle (roots ordered along b_hat = (a_i - a_j)/|.|),
/// then average the + roots together and the - roots together.  Both
/// outputs lie on the line through the anchors.
inline std::pair<Vec2, Vec2> forge_intersections(Vec2 a_i, double d_i,
                                                 Vec2 a_j, double d_j) {
  if (!(d_i > 0.0) || !(d_j > 0.0))
    throw std::invalid_argument("circle radii must be positive");
  Vec2 diff = a_i - a_j;
  double len = norm(diff);
  if (len <= 0.0) throw std::invalid_argument("coincident circle centers");
  Vec2 b_hat = diff / len;
  Vec2 a0 = (a_i + a_j) * 0.5;

  // Roots of |a0 + s*b_hat - c|^2 = r^2 for circle (c, r).  The line passes
  // through both centers, so the discriminant is r^2 up to rounding; clamp
  // so a tiny radius cannot go negative under cancellation.
  auto roots = [&](Vec2 c, double r) {
    Vec2 w = a0 - c;
    double h = dot(b_hat, w);
    double disc = h * h - norm2(w) + r * r;
    double s = std::sqrt(std::max(disc, 0.0));
    return std::make_pair(-h + s, -h - s);
  };
  auto [pi, mi] = roots(a_i, d_i);
  auto [pj, mj] = roots(a_j, d_j);
  Vec2 q_plus = a0 + b_hat * (0.5 * (pi + pj));
  Vec2 q_minus = a0 + b_hat * (0.5 * (mi + mj));
  return {q_plus, q_minus};
}

inline Hyperplane hyperplane(Vec2 a_i, Vec2 a_j) {
  Vec2 diff = a_i - a_j;
  double len = norm(diff);
  if (len <= 0.0) throw std::invalid_argument("coincident anchors");
  return {diff / len, (a_i + a_j) * 0.5};
}

/// Strict-side classification with an absolute-plus-relative tie band.
inline Halfspace halfspace_of(Vec2 p, const Hyperplane& h) {
  double s = dot(h.b_hat, p - h.a0);
  double tol = 1e-12 * (1.0 + norm(p));
  if (std::abs(s) <= tol) return Halfspace::on;
  return s > 0.0 ? Halfspace::upper : Halfspace::lower;
}

/// Distance from p to the line, written as the residual against the
/// rank-one projector along e = perp(b_hat).  Algebraically equal to
/// |b_hat . (p - a0)|.
inline double distance_to_hyperplane(Vec2 p, const Hyperplane& h) {
  Vec2 e = perp(h.b_hat);
  Vec2 foot = e * dot(e, p) + (h.a0 - e * dot(e, h.a0));
  return norm(p - foot);
}

/// Two candidate points per anchor pair: the circle intersections where the
/// distance circles meet, forged substitutes where they do not.  A
/// coincident anchor pair (zero-measure under random deployment) fills its
/// two slots with the shared midpoint, flagged forged.
inline InterestPointSet interest_points(std::span<const Anchor> anchors,
                                        const MeasurementSet& meas) {
  validate_anchors(anchors);
  if (anchors.size() < 3)
    throw std::invalid_argument("voting needs at least 3 anchors");
  std::size_t n = anchors.size();
  if (meas.size() != n)
    throw std::invalid_argument("measurement set does not cover anchors");
  for (std::size_t i = 0; i < n; ++i)
    if (meas[i].anchor_id != anchors[i].id)
      throw std::invalid_argument("measurements not aligned with anchors");

  InterestPointSet out;
  out.n_anchors = static_cast<int>(n);
  out.points.reserve(n * (n - 1));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      int lo = anchors[i].id, hi = anchors[j].id;
      if (lo > hi) std::swap(lo, hi);
      Vec2 pi = anchors[i].pos, pj = anchors[j].pos;
      double di = meas[i].dist_est_m, dj = meas[j].dist_est_m;

      Vec2 q_plus, q_minus;
      bool forged;
      if (distance(pi, pj) <= 0.0) {
        q_plus = q_minus = (pi + pj) * 0.5;
        forged = true;
      } else if (auto real = circle_intersection(pi, di, pj, dj)) {
        std::tie(q_plus, q_minus) = *real;
        forged = false;
      } else {
        std::tie(q_plus, q_minus) = forge_intersections(pi, di, pj, dj);
        forged = true;
      }
      out.points.push_back({q_plus, lo, hi, forged, Branch::plus});
      out.points.push_back({q_minus, lo, hi, forged, Branch::minus});
    }
  }
  return out;
}

}  // namespace vsloc
