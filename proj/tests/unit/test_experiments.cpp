#include <doctest.h>

#include <cmath>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "crs/error.hpp"
#include "crs/experiments.hpp"

using namespace crs;

namespace {

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> row;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) row.push_back(field);
    if (!line.empty() && line.back() == ',') row.push_back("");
    rows.push_back(row);
  }
  return rows;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  FAIL("missing column " << name);
  return 0;
}

double number(const std::string& s) { return std::stod(s); }

}  // namespace

TEST_CASE("analysis of the reference scenario") {
  const AnalysisSummary a = analyze_experiment(shipped_config("paper"));
  CHECK(a.gains.placement.d_sr_star == doctest::Approx(1.086).epsilon(5e-4));
  std::ostringstream table;
  print_analysis(table, a);
  CHECK(table.str().find("D_SR* = 1.086 km") != std::string::npos);
  CHECK(table.str().find("unstable") != std::string::npos);  // BL cannot carry 0.2

  std::ostringstream csv;
  write_analysis_csv(csv, a);
  const auto rows = parse_csv(csv.str());
  REQUIRE(rows.size() == 4);
  const std::size_t delay = column(rows[0], "delay"), stable = column(rows[0], "stable");
  CHECK(rows[1][0] == "BL");
  CHECK(rows[1][delay].empty());
  CHECK(rows[1][stable] == "false");
  CHECK(number(rows[3][delay]) == doctest::Approx(6.0031).epsilon(1e-4));
}

TEST_CASE("no PUs puts every link in the power-limited regime") {
  ExperimentConfig c = shipped_config("paper");
  c.scenario.rho = 0.0;
  const AnalysisSummary a = analyze_experiment(c);
  CHECK(a.rates.sd.regime == PowerRegime::PowerLimited);
  CHECK(a.rates.sr.regime == PowerRegime::PowerLimited);
  CHECK(a.rates.rd.regime == PowerRegime::PowerLimited);
  CHECK(a.rates.clamped);
  std::ostringstream csv;
  write_analysis_csv(csv, a);
  CHECK(csv.str().find(";clamped") != std::string::npos);
}

TEST_CASE("rate overrides take precedence over the scenario") {
  ExperimentConfig c = shipped_config("paper");
  c.sim.p_SD = 0.9;
  const ScenarioRates r = experiment_rates(c, 0.1);
  CHECK(r.rates.p_SD == 0.9);
  CHECK(r.rates.p_SR == doctest::Approx(0.5296).epsilon(1e-3));
}

TEST_CASE("simulate CSV has a row per replication and an aggregate") {
  ExperimentConfig c = shipped_config("paper");
  c.sim.horizon = 20'000;
  c.sim.replications = 3;
  const SimReport r = run(make_sim_config(c, c.protocol, c.sim.lambda));
  std::ostringstream out;
  write_sim_csv(out, r, 6.0, "asymptotically-exact");
  const auto rows = parse_csv(out.str());
  REQUIRE(rows.size() == 5);
  CHECK(rows[4][0] == "aggregate");
  const std::size_t ci = column(rows[0], "ci95_delay_packets");
  CHECK(rows[1][ci].empty());
  CHECK_FALSE(rows[4][ci].empty());
  for (const auto& row : rows) CHECK(row.size() == rows[0].size());
}

TEST_CASE("relay-position sweep") {
  ExperimentConfig c = shipped_config("fig3");
  c.sweep->steps = 201;
  c.sweep->lo = 0.01;
  c.sweep->hi = 1.99;
  std::ostringstream out;
  run_sweep(out, c, Figure::RelayPosition);
  const auto rows = parse_csv(out.str());
  REQUIRE(rows.size() == 202);
  const std::size_t g = column(rows[0], "delta_TP");
  std::size_t best = 1;
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (number(rows[i][g]) > number(rows[best][g])) best = i;
  CHECK(number(rows[best][0]) == doctest::Approx(1.14).epsilon(0.01));
  CHECK(rows[1][column(rows[0], "provenance")] == "exact");
}

TEST_CASE("pu-density sweep: delays increase, BDF lowest") {
  ExperimentConfig c = shipped_config("fig5");
  c.sweep->simulate = false;
  std::ostringstream out;
  run_sweep(out, c, Figure::PuDensity);
  const auto rows = parse_csv(out.str());
  REQUIRE(rows.size() == 10);
  const std::size_t bl = column(rows[0], "bl_delay"), sdf = column(rows[0], "sdf_delay"),
                    bdf = column(rows[0], "bdf_delay");
  CHECK(rows[1][column(rows[0], "sdf_provenance")] == "approx-upper-stability/lower-delay");
  CHECK(rows[1][column(rows[0], "bdf_sim_delay")].empty());
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(number(rows[i][bdf]) < number(rows[i][sdf]));
    CHECK(number(rows[i][sdf]) < number(rows[i][bl]));
    if (i > 1)
      for (std::size_t col : {bl, sdf, bdf}) CHECK(number(rows[i][col]) > number(rows[i - 1][col]));
  }
}

TEST_CASE("pu-activity sweep: buffer gain falls as PUs go quiet") {
  std::ostringstream out;
  run_sweep(out, shipped_config("fig4"), Figure::PuActivity);
  const auto rows = parse_csv(out.str());
  const std::size_t dl = column(rows[0], "delta_lambda_star"), dw = column(rows[0], "delta_W");
  for (std::size_t i = 2; i < rows.size(); ++i) {
    CHECK(number(rows[i][dl]) < number(rows[i - 1][dl]));
    CHECK(number(rows[i][dw]) < number(rows[i - 1][dw]));
  }
}

TEST_CASE("simulated sweep points fill the simulation columns") {
  ExperimentConfig c = shipped_config("arrival-rate");
  c.sim.horizon = 20'000;
  c.sim.replications = 2;
  std::ostringstream a, b;
  run_sweep(a, c, Figure::ArrivalRate, {1});
  run_sweep(b, c, Figure::ArrivalRate, {3});
  CHECK(a.str() == b.str());
  const auto rows = parse_csv(a.str());
  const std::size_t sdf_sim = column(rows[0], "sdf_sim_delay"), sdf = column(rows[0], "sdf_delay");
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i][sdf_sim].empty() == rows[i][sdf].empty());
  CHECK(rows.back()[sdf].empty());  // 0.34 is outside the SDF region
  CHECK_FALSE(rows.back()[column(rows[0], "bdf_delay")].empty());
}

TEST_CASE("sweep must match the figure") {
  CHECK_THROWS_AS(run_sweep(std::cout, shipped_config("fig5"), Figure::PuActivity), ConfigError);
  CHECK_THROWS_AS(run_sweep(std::cout, shipped_config("paper"), Figure::PuActivity), ConfigError);
  CHECK_THROWS_AS(parse_figure("fig9"), ConfigError);
}
