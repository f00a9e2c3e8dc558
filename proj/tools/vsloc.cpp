#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vsloc/vsloc.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;
constexpr int kExitNumeric = 4;

struct SweepArgs {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  bool dump_records = false;
  std::string deltas_override;
};

int do_sweep(const SweepArgs& args) {
  vsloc::ParsedConfig parsed = vsloc::parse_config(args.config_path);
  if (args.seed) parsed.scenario.seed = *args.seed;
  std::vector<double> deltas = parsed.sweep_deltas;
  if (!args.deltas_override.empty())
    deltas = vsloc::parse_delta_list(args.deltas_override);

  vsloc::SweepResult result = vsloc::run_sweep(
      parsed.scenario, deltas, args.out_dir, args.threads, args.dump_records);

  std::cout << "sweep over " << result.points.size() << " delta value(s), "
            << (parsed.scenario.attack_kind == vsloc::AttackKind::coordinated
                    ? "coordinated"
                : parsed.scenario.attack_kind == vsloc::AttackKind::uncoordinated
                    ? "uncoordinated"
                    : "no")
            << " attack, seed " << parsed.scenario.seed << "\n";
  std::cout << "delta\tn_ok/n\trmse\tmedian_le\tcdr\tfar\tarmse_delta\n";
  for (const auto& pt : result.points) {
    std::cout << vsloc::format_double(pt.delta) << "\t" << pt.n_ok << "/"
              << pt.n_total << "\t" << vsloc::format_double(pt.rmse_m) << "\t"
              << vsloc::format_double(pt.median_le_m) << "\t"
              << (pt.cdr ? vsloc::format_double(*pt.cdr) : "-") << "\t"
              << (pt.far ? vsloc::format_double(*pt.far) : "-") << "\t"
              << (pt.armse_delta_db ? vsloc::format_double(*pt.armse_delta_db)
                                    : "-")
              << "\n";
  }
  std::cout << result.files.size() << " file(s) written to " << args.out_dir
            << "\n";
  return 0;
}

int do_localize(const std::string& trace_path, const std::string& out_csv,
                const std::string& weighting_name) {
  vsloc::VoteWeighting weighting =
      weighting_name == "inverse-proximity"
          ? vsloc::VoteWeighting::inverse_proximity
          : vsloc::VoteWeighting::as_printed;
  vsloc::Trace trace = vsloc::parse_trace(trace_path);
  vsloc::TraceReport rep = vsloc::analyze_trace(trace, weighting);

  std::cout << "anchors: " << trace.anchors.size()
            << ", samples per anchor: " << trace.k_samples << "\n";
  std::cout << "estimate: (" << vsloc::format_double(rep.estimate.x) << ", "
            << vsloc::format_double(rep.estimate.y) << ") m\n";
  if (rep.le_m)
    std::cout << "localization error: " << vsloc::format_double(*rep.le_m)
              << " m\n";
  if (rep.detection_available) {
    std::cout << "sigma_hat: " << vsloc::format_double(rep.sigma_hat_db)
              << " dB\n";
  } else {
    std::cout << "detector unavailable (needs at least 2 samples per "
                 "anchor); reporting offsets only\n";
  }
  std::cout << "anchor\tdelta_hat_db\tflagged\n";
  for (std::size_t i = 0; i < trace.anchors.size(); ++i) {
    int id = trace.anchors[i].id;
    std::cout << id << "\t" << vsloc::format_double(rep.delta_hat_db[i])
              << "\t" << (rep.flagged.count(id) ? "yes" : "no") << "\n";
  }

  if (!out_csv.empty()) {
    std::ofstream out(out_csv, std::ios::binary);
    if (!out) throw vsloc::IoError("cannot write '" + out_csv + "'");
    out << "anchor,x,y,median_dbm,dist_est_m,delta_hat_db,flagged\n";
    for (std::size_t i = 0; i < trace.anchors.size(); ++i) {
      const auto& a = trace.anchors[i];
      out << a.id << "," << vsloc::format_double(a.pos.x) << ","
          << vsloc::format_double(a.pos.y) << ","
          << vsloc::format_double(trace.meas[i].median_dbm) << ","
          << vsloc::format_double(trace.meas[i].dist_est_m) << ","
          << vsloc::format_double(rep.delta_hat_db[i]) << ","
          << (rep.flagged.count(a.id) ? 1 : 0) << "\n";
    }
    std::cout << "per-anchor report written to " << out_csv << "\n";
  }
  return 0;
}

int do_selftest(std::uint64_t seed) {
  auto results = vsloc::run_selftest(seed);
  bool all = true;
  for (const auto& r : results) {
    std::cout << (r.pass ? "PASS" : "FAIL") << "  " << r.name << " ("
              << r.detail << ")\n";
    all = all && r.pass;
  }
  std::cout << (all ? "selftest passed" : "selftest FAILED") << "\n";
  return all ? 0 : kExitNumeric;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "RSS target localization hardened against spoofing anchors: "
      "vote-based estimator, attacker detector, Monte Carlo experiments"};
  app.require_subcommand(1);

  SweepArgs sweep_args;
  auto* sweep = app.add_subcommand(
      "sweep", "Run Monte Carlo campaigns over attack intensities, emit CSVs");
  sweep->add_option("--config", sweep_args.config_path, "scenario config file")
      ->required();
  sweep->add_option("--out", sweep_args.out_dir, "output directory for CSVs")
      ->required();
  sweep->add_option("--seed", sweep_args.seed, "override the config seed");
  sweep->add_option("--threads", sweep_args.threads, "worker threads")
      ->check(CLI::PositiveNumber);
  sweep->add_flag("--dump-records", sweep_args.dump_records,
                  "also write per-record CSVs (records_<delta>.csv)");
  sweep->add_option("--deltas", sweep_args.deltas_override,
                    "comma-separated delta list, overrides sweep_deltas");

  std::string trace_path, localize_out, weighting_name = "as-printed";
  auto* loc = app.add_subcommand(
      "localize", "Localize and run detection on a measurement trace file");
  loc->add_option("trace", trace_path, "trace file path")->required();
  loc->add_option("--out", localize_out, "also write a per-anchor CSV report");
  loc->add_option("--weighting", weighting_name, "vote weighting rule")
      ->check(CLI::IsMember({"as-printed", "inverse-proximity"}));

  std::uint64_t selftest_seed = 1;
  auto* self =
      app.add_subcommand("selftest", "Run the built-in invariant suite");
  self->add_option("--seed", selftest_seed, "selftest RNG seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (sweep->parsed()) return do_sweep(sweep_args);
    if (loc->parsed()) return do_localize(trace_path, localize_out,
                                          weighting_name);
    return do_selftest(selftest_seed);
  } catch (const vsloc::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const vsloc::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitNumeric;
  }
}
