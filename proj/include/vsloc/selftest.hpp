#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "vsloc/csv.hpp"
#include "vsloc/geometry.hpp"
#include "vsloc/model.hpp"
#include "vsloc/rng.hpp"
#include "vsloc/sim.hpp"
#include "vsloc/votes.hpp"

namespace vsloc {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Fast invariant suite (a few seconds) exercising the numerical core on
/// randomized inputs.  Returns one result per check.
inline std::vector<CheckResult> run_selftest(std::uint64_t seed = 1) {
  std::vector<CheckResult> out;
  auto run = [&](const std::string& name, auto&& body) {
    CheckResult r;
    r.name = name;
    try {
      body(r);
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = std::string("exception: ") + e.what();
    }
    out.push_back(r);
  };

  ChannelParams ch;  // defaults: P0 = 15 dBm, gamma = 3, d0 = 1 m

  run("distance round-trip", [&](CheckResult& r) {
    RngStream s = RngStream(seed).derive(1);
    double worst = 0.0;
    for (int t = 0; t < 10000; ++t) {
      Anchor a{1, {s.uniform(0.0, 25.0), s.uniform(0.0, 25.0)}};
      Vec2 x{s.uniform(0.0, 25.0), s.uniform(0.0, 25.0)};
      double d = distance(x, a.pos);
      if (d < 1e-3) continue;
      double back = estimate_distance(noiseless_rss(x, a, ch), ch);
      worst = std::max(worst, std::abs(back - d) / d);
    }
    r.pass = worst < 1e-9;
    r.detail = "worst relative error " + format_double(worst);
  });

  run("circle intersection residuals", [&](CheckResult& r) {
    RngStream s = RngStream(seed).derive(2);
    double worst = 0.0;
    int hits = 0;
    for (int t = 0; t < 10000; ++t) {
      Vec2 ai{s.uniform(0.0, 25.0), s.uniform(0.0, 25.0)};
      Vec2 aj{s.uniform(0.0, 25.0), s.uniform(0.0, 25.0)};
      if (distance(ai, aj) < 1e-6) continue;
      double di = s.uniform(0.1, 20.0), dj = s.uniform(0.1, 20.0);
      auto q = circle_intersection(ai, di, aj, dj);
      if (!q) continue;
      ++hits;
      double scale = std::max(di, dj);
      for (Vec2 p : {q->first, q->second}) {
        worst = std::max(worst, std::abs(distance(p, ai) - di) / scale);
        worst = std::max(worst, std::abs(distance(p, aj) - dj) / scale);
      }
    }
    r.pass = hits > 1000 && worst < 1e-9;
    r.detail = std::to_string(hits) + " intersecting pairs, worst residual " +
               format_double(worst);
  });

  run("forged points collinear", [&](CheckResult& r) {
    RngStream s = RngStream(seed).derive(3);
    double worst = 0.0;
    int cases = 0;
    for (int t = 0; t < 10000; ++t) {
      Vec2 ai{s.uniform(0.0, 25.0), s.uniform(0.0, 25.0)};
      Vec2 aj{s.uniform(0.0, 25.0), s.uniform(0.0, 25.0)};
      if (distance(ai, aj) < 1e-6) continue;
      double di = s.uniform(0.1, 20.0), dj = s.uniform(0.1, 20.0);
      if (circle_intersection(ai, di, aj, dj)) continue;
      ++cases;
      auto [qp, qm] = forge_intersections(ai, di, aj, dj);
      Hyperplane line{perp(hyperplane(ai, aj).b_hat), (ai + aj) * 0.5};
      worst = std::max(worst, distance_to_hyperplane(qp, line));
      worst = std::max(worst, distance_to_hyperplane(qm, line));
    }
    r.pass = cases > 100 && worst < 1e-9;
    r.detail = std::to_string(cases) + " forged pairs, worst offset " +
               format_double(worst) + " m";
  });

  run("projection forms agree", [&](CheckResult& r) {
    RngStream s = RngStream(seed).derive(4);
    double worst = 0.0;
    for (int t = 0; t < 10000; ++t) {
      Vec2 ai{s.uniform(0.0, 25.0), s.uniform(0.0, 25.0)};
      Vec2 aj{s.uniform(0.0, 25.0), s.uniform(0.0, 25.0)};
      if (distance(ai, aj) < 1e-6) continue;
      Hyperplane h = hyperplane(ai, aj);
      Vec2 p{s.uniform(-10.0, 35.0), s.uniform(-10.0, 35.0)};
      double scalar = std::abs(dot(h.b_hat, p - h.a0));
      worst = std::max(worst, std::abs(distance_to_hyperplane(p, h) - scalar));
    }
    r.pass = worst < 1e-12;
    r.detail = "worst gap " + format_double(worst) + " m";
  });

  run("vote mass conservation", [&](CheckResult& r) {
    double worst = 0.0;
    for (int scene = 0; scene < 50; ++scene) {
      ScenarioConfig cfg;
      cfg.seed = seed + scene;
      cfg.n_anchors = 4 + scene % 4;
      cfg.n_malicious = scene % 2;
      cfg.delta = 6.0;
      NetworkLayout lay = deploy(cfg, 0);
      RngStream root(cfg.seed);
      AttackSpec atk = draw_attack(cfg, lay, root.derive(2));
      MeasurementSet meas =
          generate_measurements(lay.target, lay.anchors, cfg.channel, atk,
                                cfg.k_samples, root.derive(3));
      InterestPointSet ips = interest_points(lay.anchors, meas);
      std::size_t n = lay.anchors.size();
      double total = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
          std::vector<double> votes(ips.points.size(), 0.0);
          add_pair_votes(ips, lay.anchors[i].pos, lay.anchors[j].pos,
                         meas[i].dist_est_m, meas[j].dist_est_m,
                         VoteWeighting::as_printed, votes);
          double mass = 0.0;
          for (double v : votes) mass += v;
          bool upper = false, lower = false;
          Hyperplane h = hyperplane(lay.anchors[i].pos, lay.anchors[j].pos);
          for (const auto& pt : ips.points) {
            if (halfspace_of(pt.pos, h) == Halfspace::lower)
              lower = true;
            else
              upper = true;
          }
          double w_u = meas[j].dist_est_m /
                       (meas[i].dist_est_m + meas[j].dist_est_m);
          double expect = (upper ? w_u : 0.0) + (lower ? 1.0 - w_u : 0.0);
          worst = std::max(worst, std::abs(mass - expect));
          total += mass;
        }
      }
      double bound = static_cast<double>(n * (n - 1)) / 2.0;
      if (total > bound + 1e-9) worst = std::max(worst, total - bound);
    }
    r.pass = worst < 1e-12;
    r.detail = "worst mass error " + format_double(worst);
  });

  run("measurement determinism", [&](CheckResult& r) {
    ScenarioConfig cfg;
    cfg.seed = seed;
    NetworkLayout lay = deploy(cfg, 0);
    RngStream root(cfg.seed);
    AttackSpec atk = draw_attack(cfg, lay, root.derive(2));
    auto a = generate_measurements(lay.target, lay.anchors, cfg.channel, atk,
                                   10, root.derive(3));
    auto b = generate_measurements(lay.target, lay.anchors, cfg.channel, atk,
                                   10, root.derive(3));
    bool same = a.size() == b.size();
    for (std::size_t i = 0; same && i < a.size(); ++i)
      same = a[i].samples_dbm == b[i].samples_dbm &&
             a[i].median_dbm == b[i].median_dbm &&
             a[i].dist_est_m == b[i].dist_est_m;
    r.pass = same;
    r.detail = same ? "bit-identical" : "mismatch";
  });

  run("translation equivariance", [&](CheckResult& r) {
    double worst = 0.0;
    for (int scene = 0; scene < 20; ++scene) {
      ScenarioConfig cfg;
      cfg.seed = seed + 100 + scene;
      cfg.n_anchors = 6;
      NetworkLayout lay = deploy(cfg, 0);
      RngStream root(cfg.seed);
      AttackSpec atk = draw_attack(cfg, lay, root.derive(2));
      MeasurementSet meas =
          generate_measurements(lay.target, lay.anchors, cfg.channel, atk,
                                cfg.k_samples, root.derive(3));
      Vec2 shift{101.25, -47.5};
      std::vector<Anchor> moved = lay.anchors;
      for (auto& a : moved) a.pos += shift;
      MeasurementSet meas2 = meas;  // same readings, shifted frame
      for (std::size_t i = 0; i < meas2.size(); ++i)
        meas2[i].anchor_id = moved[i].id;
      Vec2 e1 = localize(lay.anchors, meas).estimate + shift;
      Vec2 e2 = localize(moved, meas2).estimate;
      worst = std::max(worst, distance(e1, e2));
    }
    r.pass = worst < 1e-9;
    r.detail = "worst displacement " + format_double(worst) + " m";
  });

  return out;
}

}  // namespace vsloc
