#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "vsloc/config.hpp"
#include "vsloc/csv.hpp"
#include "vsloc/errors.hpp"
#include "vsloc/rng.hpp"
#include "vsloc/sweep.hpp"
#include "vsloc/trace.hpp"

using namespace vsloc;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
  fs::path p = fs::temp_directory_path() / ("vsloc_test_" + tag);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("doubles round-trip through their shortest form") {
  REQUIRE(format_double(0.1) == "0.1");
  REQUIRE(format_double(1.0) == "1");
  REQUIRE(format_double(-2.5) == "-2.5");
  REQUIRE(format_double(0.0) == "0");

  RngStream s(11);
  for (int t = 0; t < 2000; ++t) {
    double v = (s.uniform() - 0.5) * std::pow(10.0, s.uniform(-12.0, 12.0));
    std::string text = format_double(v);
    REQUIRE(std::strtod(text.c_str(), nullptr) == v);
  }
}

TEST_CASE("csv fields quote separators and quotes") {
  REQUIRE(csv_field("plain") == "plain");
  REQUIRE(csv_field("") == "");
  REQUIRE(csv_field("a,b") == "\"a,b\"");
  REQUIRE(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  REQUIRE(csv_field("two\nlines") == "\"two\nlines\"");
}

TEST_CASE("delta lists parse comma-separated numbers") {
  REQUIRE(parse_delta_list("1,2,5.5") == std::vector<double>{1.0, 2.0, 5.5});
  REQUIRE(parse_delta_list(" 3 , 4 ") == std::vector<double>{3.0, 4.0});
  REQUIRE(parse_delta_list("").empty());
  REQUIRE_THROWS_AS(parse_delta_list("1,,2"), ConfigError);
  REQUIRE_THROWS_AS(parse_delta_list("1,abc"), ConfigError);
}

TEST_CASE("minimal config fills in the defaults") {
  std::stringstream in(
      "n_anchors = 7\n"
      "attack = none\n"
      "sigma_db = 1\n");
  auto parsed = parse_config_text(in);
  const auto& sc = parsed.scenario;
  REQUIRE(sc.n_anchors == 7);
  REQUIRE(sc.attack_kind == AttackKind::none);
  REQUIRE(sc.n_malicious == 0);
  REQUIRE(sc.delta == 0.0);
  REQUIRE(sc.area_m == 25.0);
  REQUIRE(sc.k_samples == 10);
  REQUIRE(sc.n_deployments == 100);
  REQUIRE(sc.n_attacker_draws == 10);
  REQUIRE(sc.seed == 1);
  REQUIRE(sc.channel.p0_dbm == 15.0);
  REQUIRE(sc.channel.gamma == 3.0);
  REQUIRE(sc.channel.d0_m == 1.0);
  REQUIRE(sc.sigma_db() == 1.0);
  REQUIRE(sc.vote_weighting == VoteWeighting::as_printed);
  REQUIRE(parsed.sweep_deltas.empty());
}

TEST_CASE("full config parses every key, comments included") {
  std::stringstream in(
      "# scenario\n"
      "area_m = 30\n"
      "n_anchors = 9   # nine anchors\n"
      "n_malicious = 3\n"
      "attack = coordinated\n"
      "delta = 4.5\n"
      "sigma_db = 2\n"
      "k_samples = 5\n"
      "n_deployments = 11\n"
      "n_attacker_draws = 12\n"
      "seed = 42\n"
      "p0_dbm = 20\n"
      "gamma = 2.5\n"
      "d0_m = 2\n"
      "vote_weighting = inverse-proximity\n"
      "sweep_deltas = 1,2,8\n");
  auto parsed = parse_config_text(in);
  const auto& sc = parsed.scenario;
  REQUIRE(sc.area_m == 30.0);
  REQUIRE(sc.n_anchors == 9);
  REQUIRE(sc.n_malicious == 3);
  REQUIRE(sc.attack_kind == AttackKind::coordinated);
  REQUIRE(sc.delta == 4.5);
  REQUIRE(sc.channel.sigma_db == 2.0);
  REQUIRE(sc.k_samples == 5);
  REQUIRE(sc.n_deployments == 11);
  REQUIRE(sc.n_attacker_draws == 12);
  REQUIRE(sc.seed == 42);
  REQUIRE(sc.channel.p0_dbm == 20.0);
  REQUIRE(sc.channel.gamma == 2.5);
  REQUIRE(sc.channel.d0_m == 2.0);
  REQUIRE(sc.vote_weighting == VoteWeighting::inverse_proximity);
  REQUIRE(parsed.sweep_deltas == std::vector<double>{1.0, 2.0, 8.0});
}

namespace {

void expect_config_error(const std::string& text, const std::string& needle) {
  std::stringstream in(text);
  try {
    parse_config_text(in);
    FAIL("expected a config error mentioning '" << needle << "'");
  } catch (const ConfigError& e) {
    REQUIRE_THAT(e.what(), Catch::Matchers::ContainsSubstring(needle));
  }
}

}  // namespace

TEST_CASE("config errors name the key and the line") {
  std::string base = "n_anchors = 7\nattack = none\nsigma_db = 1\n";
  expect_config_error(base + "wibble = 3\n", "unknown key 'wibble'");
  expect_config_error(base + "wibble = 3\n", "line 4");
  expect_config_error(base + "n_anchors = 8\n", "duplicate key 'n_anchors'");
  expect_config_error(base + "n_anchors\n", "expected key = value");
  expect_config_error(base + "k_samples = 2.5\n", "needs an integer");
  expect_config_error(base + "area_m = wide\n", "needs a number");
  expect_config_error(base + "seed = -4\n", "seed must be non-negative");
  expect_config_error("attack = sneaky\nn_anchors = 5\nsigma_db = 1\n",
                      "attack must be none, uncoordinated, or coordinated");
  expect_config_error(base + "vote_weighting = best\n",
                      "vote_weighting must be as-printed or inverse-proximity");
  expect_config_error("attack = none\nsigma_db = 1\n",
                      "missing required key 'n_anchors'");
  expect_config_error("n_anchors = 5\nsigma_db = 1\n",
                      "missing required key 'attack'");
  expect_config_error("n_anchors = 5\nattack = none\n",
                      "missing required key 'sigma_db'");
  expect_config_error(
      "n_anchors = 5\nattack = uncoordinated\nsigma_db = 1\ndelta = 5\n",
      "missing required key 'n_malicious'");
  expect_config_error(
      "n_anchors = 5\nattack = uncoordinated\nsigma_db = 1\nn_malicious = 1\n",
      "missing required key 'delta'");
  // Structural validation still runs after parsing.
  expect_config_error("n_anchors = 2\nattack = none\nsigma_db = 1\n",
                      "n_anchors");
  expect_config_error(
      "n_anchors = 5\nattack = uncoordinated\nsigma_db = 1\n"
      "n_malicious = 5\ndelta = 3\n",
      "n_malicious");
}

TEST_CASE("config files: missing path is an io error, errors cite the path") {
  REQUIRE_THROWS_AS(parse_config("/nonexistent/vsloc.conf"), IoError);

  fs::path dir = fresh_dir("config");
  fs::create_directories(dir);
  fs::path file = dir / "bad.conf";
  std::ofstream(file) << "junk\n";
  try {
    parse_config(file);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    REQUIRE_THAT(e.what(),
                 Catch::Matchers::ContainsSubstring(file.string()));
  }
  fs::remove_all(dir);
}

TEST_CASE("traces parse channel keys, anchor rows, and the target") {
  std::stringstream in(
      "# capture\n"
      "p0_dbm = 20\n"
      "gamma = 2\n"
      "anchor 1 0 0 -10 -12\n"
      "anchor 2 10 0 -20 -18\n"
      "anchor 3 0 10 -15 -15\n"
      "target 4 5\n");
  auto tr = parse_trace_text(in);
  REQUIRE(tr.channel.p0_dbm == 20.0);
  REQUIRE(tr.channel.gamma == 2.0);
  REQUIRE(tr.channel.d0_m == 1.0);
  REQUIRE(tr.k_samples == 2);
  REQUIRE(tr.anchors.size() == 3);
  REQUIRE(tr.anchors[1].pos == Vec2{10.0, 0.0});
  REQUIRE(tr.truth == Vec2{4.0, 5.0});
  REQUIRE(tr.meas[0].median_dbm == -11.0);
  // -11 = 20 - 10*2*log10(d) -> d = 10^(31/20)
  REQUIRE_THAT(tr.meas[0].dist_est_m,
               Catch::Matchers::WithinRel(std::pow(10.0, 31.0 / 20.0), 1e-12));
}

namespace {

void expect_trace_error(const std::string& text, const std::string& needle) {
  std::stringstream in(text);
  try {
    parse_trace_text(in);
    FAIL("expected a trace error mentioning '" << needle << "'");
  } catch (const ConfigError& e) {
    REQUIRE_THAT(e.what(), Catch::Matchers::ContainsSubstring(needle));
  }
}

}  // namespace

TEST_CASE("trace errors carry line numbers") {
  std::string three =
      "anchor 1 0 0 -10\nanchor 2 10 0 -20\nanchor 3 0 10 -15\n";
  expect_trace_error("anchor 1 0 0\n" + three, "at least one sample");
  expect_trace_error(three + "anchor 3 1 1 -9\n", "duplicate anchor id 3");
  expect_trace_error(three + "anchor 4 1 1 -9 -8\n", "expected 1 samples");
  expect_trace_error(three + "target 1 2\ntarget 3 4\n",
                     "duplicate target row");
  expect_trace_error(three + "target 1\n", "exactly x and y");
  expect_trace_error(three + "target 1 2 3\n", "exactly x and y");
  expect_trace_error(three + "blorp = 3\n", "unknown trace key 'blorp'");
  expect_trace_error(three + "anchor 5 2 nan -9\n", "line 4");
  expect_trace_error(three + "what even\n", "expected channel key");
  expect_trace_error("anchor 1 0 0 -10\nanchor 2 10 0 -20\n",
                     "at least 3 anchors");
  expect_trace_error(three + "gamma = 0\n", "trace channel header");
}

TEST_CASE("written traces parse back to the same analysis") {
  std::vector<Anchor> anchors{{1, {2.0, 3.0}},  {2, {21.0, 2.5}},
                              {3, {23.0, 20.0}}, {4, {3.5, 22.0}},
                              {5, {12.0, 1.0}},  {6, {11.5, 24.0}}};
  Vec2 x{13.0, 9.5};
  ChannelParams ch;
  auto meas = generate_measurements(x, anchors, ch,
                                    AttackSpec::uncoordinated({4}, 9.0), 10,
                                    RngStream(23));

  std::stringstream buf;
  write_trace(buf, ch, anchors, meas, x);
  auto tr = parse_trace_text(buf);

  REQUIRE(tr.k_samples == 10);
  REQUIRE(tr.truth == x);
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    REQUIRE(tr.anchors[i].pos == anchors[i].pos);
    REQUIRE(tr.meas[i].samples_dbm == meas[i].samples_dbm);
    REQUIRE(tr.meas[i].median_dbm == meas[i].median_dbm);
  }

  auto direct = localize(anchors, meas);
  auto rep = analyze_trace(tr);
  REQUIRE(rep.estimate == direct.estimate);
  REQUIRE(rep.le_m.has_value());
  REQUIRE(*rep.le_m == distance(x, direct.estimate));
  REQUIRE(rep.detection_available);
  REQUIRE(rep.flagged.count(4) == 1);
}

TEST_CASE("single-sample traces skip the detection verdict") {
  std::stringstream in(
      "anchor 1 0 0 -10\n"
      "anchor 2 10 0 -20\n"
      "anchor 3 0 10 -15\n"
      "anchor 4 10 10 -21\n");
  auto tr = parse_trace_text(in);
  auto rep = analyze_trace(tr);
  REQUIRE_FALSE(rep.detection_available);
  REQUIRE_FALSE(rep.le_m.has_value());
  REQUIRE(rep.flagged.empty());
  REQUIRE(rep.delta_hat_db.size() == 4);
}

namespace {

ScenarioConfig small_scenario() {
  ScenarioConfig cfg;
  cfg.n_anchors = 6;
  cfg.n_malicious = 2;
  cfg.n_deployments = 8;
  cfg.n_attacker_draws = 3;
  return cfg;
}

}  // namespace

TEST_CASE("sweeps emit the full csv family") {
  fs::path dir = fresh_dir("sweep");
  std::vector<double> deltas{0.0, 5.0};
  auto result = run_sweep(small_scenario(), deltas, dir, 2, true);

  REQUIRE(result.points.size() == 2);
  REQUIRE(result.points[0].delta == 0.0);
  REQUIRE(result.points[1].delta == 5.0);
  REQUIRE(result.points[0].n_total == 24);
  REQUIRE(result.points[0].n_ok == 24);

  for (const char* name :
       {"rmse_vs_delta.csv", "detection_vs_delta.csv",
        "armse_delta_vs_delta.csv", "le_cdf_0.csv", "le_cdf_5.csv",
        "records_0.csv", "records_5.csv"}) {
    CAPTURE(name);
    REQUIRE(fs::exists(dir / name));
  }
  REQUIRE(result.files.size() == 7);

  std::string rmse_text = slurp(dir / "rmse_vs_delta.csv");
  std::stringstream rs(rmse_text);
  std::string header, row0, row1;
  REQUIRE(std::getline(rs, header));
  REQUIRE(header == "delta,rmse,n_records");
  REQUIRE(std::getline(rs, row0));
  REQUIRE(std::getline(rs, row1));
  REQUIRE(row0 == "0," + format_double(result.points[0].rmse_m) + ",24");
  REQUIRE(row1 == "5," + format_double(result.points[1].rmse_m) + ",24");

  std::string cdf_text = slurp(dir / "le_cdf_5.csv");
  std::stringstream cs(cdf_text);
  REQUIRE(std::getline(cs, header));
  REQUIRE(header == "le,fraction");
  int rows = 0;
  double prev_le = -1.0, prev_frac = 0.0;
  std::string line;
  while (std::getline(cs, line)) {
    auto comma = line.find(',');
    REQUIRE(comma != std::string::npos);
    double le = std::strtod(line.substr(0, comma).c_str(), nullptr);
    double frac = std::strtod(line.substr(comma + 1).c_str(), nullptr);
    REQUIRE(le >= prev_le);
    REQUIRE(frac > prev_frac);
    prev_le = le;
    prev_frac = frac;
    ++rows;
  }
  REQUIRE(rows == 24);
  REQUIRE(prev_frac == 1.0);

  std::string rec_text = slurp(dir / "records_5.csv");
  std::stringstream recs(rec_text);
  REQUIRE(std::getline(recs, header));
  REQUIRE_THAT(header, Catch::Matchers::StartsWith(
                           "deployment,draw,ok,error,target_x,target_y,"
                           "est_x,est_y,le,true_malicious,flagged,sigma_hat"));
  REQUIRE_THAT(header, Catch::Matchers::ContainsSubstring("delta_true_6"));
  REQUIRE_THAT(header, Catch::Matchers::ContainsSubstring("delta_hat_6"));
  rows = 0;
  while (std::getline(recs, line)) ++rows;
  REQUIRE(rows == 24);

  fs::remove_all(dir);
}

TEST_CASE("sweep rejects bad delta lists before touching the disk") {
  fs::path dir = fresh_dir("sweep_bad");
  std::vector<double> empty;
  REQUIRE_THROWS_AS(run_sweep(small_scenario(), empty, dir), ConfigError);
  REQUIRE_FALSE(fs::exists(dir));

  std::vector<double> with_nan{1.0, std::nan("")};
  REQUIRE_THROWS_AS(run_sweep(small_scenario(), with_nan, dir), ConfigError);
  REQUIRE_FALSE(fs::exists(dir));

  ScenarioConfig coord = small_scenario();
  coord.attack_kind = AttackKind::coordinated;
  std::vector<double> negative{-2.0};
  try {
    run_sweep(coord, negative, dir);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    REQUIRE_THAT(e.what(), Catch::Matchers::ContainsSubstring("-2"));
  }
  REQUIRE_FALSE(fs::exists(dir));
}

TEST_CASE("sweep output is byte-identical for any worker count") {
  fs::path d1 = fresh_dir("sweep_t1");
  fs::path d3 = fresh_dir("sweep_t3");
  std::vector<double> deltas{2.0, 9.0};
  auto r1 = run_sweep(small_scenario(), deltas, d1, 1, true);
  auto r3 = run_sweep(small_scenario(), deltas, d3, 3, true);
  REQUIRE(r1.files.size() == r3.files.size());
  for (std::size_t i = 0; i < r1.files.size(); ++i) {
    CAPTURE(r1.files[i].string());
    REQUIRE(slurp(r1.files[i]) == slurp(r3.files[i]));
  }
  fs::remove_all(d1);
  fs::remove_all(d3);
}
