#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vsloc/csv.hpp"
#include "vsloc/errors.hpp"
#include "vsloc/sim.hpp"

namespace vsloc {

struct SweepPoint {
  double delta = 0.0;
  std::size_t n_ok = 0;
  std::size_t n_total = 0;
  double rmse_m = 0.0;
  double median_le_m = 0.0;
  std::optional<double> cdr;
  std::optional<double> far;
  std::optional<double> armse_delta_db;
};

struct SweepResult {
  std::vector<SweepPoint> points;
  std::vector<std::filesystem::path> files;
};

namespace detail {

inline std::ofstream open_csv(const std::filesystem::path& p,
                              std::vector<std::filesystem::path>& files) {
  std::ofstream out(p, std::ios::binary);  // binary: fixed \n line ends
  if (!out) throw IoError("cannot write '" + p.string() + "'");
  files.push_back(p);
  return out;
}

inline std::string join_ids(const std::set<int>& ids) {
  std::string out;
  for (int id : ids) {
    if (!out.empty()) out += ';';
    out += std::to_string(id);
  }
  return out;
}

}  // namespace detail

/// Runs one campaign per delta and emits plot-ready CSVs into out_dir:
/// rmse_vs_delta.csv, detection_vs_delta.csv, armse_delta_vs_delta.csv,
/// le_cdf_<delta>.csv per point, and records_<delta>.csv when dump_records
/// is set.  Output depends only on config and seed, never on thread count.
inline SweepResult run_sweep(const ScenarioConfig& base,
                             std::span<const double> deltas,
                             const std::filesystem::path& out_dir,
                             int n_threads = 1, bool dump_records = false) {
  base.validate();
  if (deltas.empty())
    throw ConfigError(
        "sweep needs at least one delta (set sweep_deltas or --deltas)");
  std::string offenders;
  for (double d : deltas) {
    bool ok = std::isfinite(d) &&
              (base.attack_kind != AttackKind::coordinated || d >= 0.0);
    if (!ok) offenders += (offenders.empty() ? "" : ", ") + format_double(d);
  }
  if (!offenders.empty())
    throw ConfigError("invalid sweep delta values: " + offenders);

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec)
    throw IoError("cannot create output directory '" + out_dir.string() +
                  "': " + ec.message());

  SweepResult result;
  auto rmse_csv = detail::open_csv(out_dir / "rmse_vs_delta.csv", result.files);
  rmse_csv << "delta,rmse,n_records\n";
  auto det_csv =
      detail::open_csv(out_dir / "detection_vs_delta.csv", result.files);
  det_csv << "delta,cdr,far\n";
  auto armse_csv =
      detail::open_csv(out_dir / "armse_delta_vs_delta.csv", result.files);
  armse_csv << "delta,armse_delta\n";

  for (double d : deltas) {
    ScenarioConfig config = base;
    config.delta = d;
    std::vector<RunRecord> records = run_campaign(config, n_threads);

    SweepPoint pt;
    pt.delta = d;
    pt.n_total = records.size();
    pt.n_ok = count_ok(records);
    pt.rmse_m = rmse(records);
    rmse_csv << format_double(d) << "," << format_double(pt.rmse_m) << ","
             << pt.n_ok << "\n";

    auto cdf = le_cdf(records);
    pt.median_le_m = cdf[(cdf.size() - 1) / 2].first;
    auto cdf_csv = detail::open_csv(
        out_dir / ("le_cdf_" + format_double(d) + ".csv"), result.files);
    cdf_csv << "le,fraction\n";
    for (const auto& [le, frac] : cdf)
      cdf_csv << format_double(le) << "," << format_double(frac) << "\n";

    try {
      DetectionRates rates = detection_rates(records);
      pt.cdr = rates.cdr;
      pt.far = rates.far;
      det_csv << format_double(d) << ","
              << (rates.cdr ? format_double(*rates.cdr) : "") << ","
              << format_double(rates.far) << "\n";
    } catch (const std::invalid_argument&) {
      // No detection-capable records (k_samples = 1): leave the row out.
    }
    try {
      pt.armse_delta_db = armse_delta(records);
      armse_csv << format_double(d) << "," << format_double(*pt.armse_delta_db)
                << "\n";
    } catch (const std::invalid_argument&) {
    }

    if (dump_records) {
      auto rec_csv = detail::open_csv(
          out_dir / ("records_" + format_double(d) + ".csv"), result.files);
      rec_csv << "deployment,draw,ok,error,target_x,target_y,est_x,est_y,le,"
                 "true_malicious,flagged,sigma_hat";
      for (int i = 1; i <= base.n_anchors; ++i)
        rec_csv << ",delta_true_" << i;
      for (int i = 1; i <= base.n_anchors; ++i)
        rec_csv << ",delta_hat_" << i;
      rec_csv << "\n";
      for (const auto& r : records) {
        rec_csv << r.deployment << "," << r.draw << "," << (r.ok ? 1 : 0)
                << "," << csv_field(r.error) << ","
                << format_double(r.target.x) << "," << format_double(r.target.y)
                << "," << format_double(r.estimate.x) << ","
                << format_double(r.estimate.y) << "," << format_double(r.le_m)
                << "," << detail::join_ids(r.true_malicious) << ","
                << detail::join_ids(r.flagged) << ","
                << (r.detection_available ? format_double(r.sigma_hat_db)
                                          : std::string());
        for (std::size_t i = 0; i < static_cast<std::size_t>(base.n_anchors);
             ++i)
          rec_csv << ","
                  << (i < r.delta_true_db.size()
                          ? format_double(r.delta_true_db[i])
                          : std::string());
        for (std::size_t i = 0; i < static_cast<std::size_t>(base.n_anchors);
             ++i)
          rec_csv << ","
                  << (i < r.delta_hat_db.size()
                          ? format_double(r.delta_hat_db[i])
                          : std::string());
        rec_csv << "\n";
      }
    }
    result.points.push_back(pt);
  }
  return result;
}

}  // namespace vsloc
