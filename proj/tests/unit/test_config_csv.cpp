#include <doctest.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "crs/config.hpp"
#include "crs/csv.hpp"
#include "crs/error.hpp"
#include "crs/experiments.hpp"
#include "oracles.hpp"

using namespace crs;

namespace {

std::string config_error(const std::string& text) {
  try {
    parse_config_string(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("shortest round-trip number formatting") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(1e-7) == "1e-07");
  CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "");
  CHECK(format_double(INFINITY) == "inf");
  oracle::Gen gen(41);
  for (int i = 0; i < 2000; ++i) {
    const double x = std::exp(gen.uniform(-40, 40)) * (gen.uniform() < 0.5 ? -1 : 1);
    const std::string s = format_double(x);
    double back = 0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    CHECK(back == x);
  }
}

TEST_CASE("csv writer") {
  std::ostringstream out;
  CsvWriter w(out, {"a", "b", "c"});
  w.row({cell(1.5), cell(std::optional<double>{}), cell("x,y")});
  w.row({cell(std::uint64_t{7}), cell(true), cell("say \"hi\"")});
  CHECK(out.str() == "a,b,c\n1.5,,\"x,y\"\n7,true,\"say \"\"hi\"\"\"\n");
  CHECK_THROWS(w.row({"1"}));
}

TEST_CASE("config parsing") {
  const ExperimentConfig c = parse_config_string(
      "[scenario]\nrho = 3\nD_SR = optimal\n[protocol]\nkind = GENERAL_L\nL = 4\n"
      "[sim]\nlambda = 0.1\nhorizon = 1e5\nseed = 9\np_SD = 0.5\n[sweep]\nvariable = rho\nlo = 1\nhi = 2\nsteps = 3\n");
  CHECK(c.scenario.rho == 3.0);
  CHECK(c.d_sr_optimal);
  CHECK(c.resolved_scenario().D_SR == doctest::Approx(1.0864272).epsilon(1e-7));
  CHECK(c.protocol == ProtocolSpec::general(4));
  CHECK(c.sim.horizon == 100000);
  CHECK(c.sim.seed == 9);
  CHECK(c.sim.p_SD == 0.5);
  REQUIRE(c.sweep.has_value());
  CHECK(c.sweep->variable == SweepVariable::Rho);
  CHECK(c.sweep->point(1) == 1.5);
}

TEST_CASE("config errors name the offending field") {
  CHECK(config_error("[sim]\nlamda = 0.1\n").find("sim.lamda") != std::string::npos);
  CHECK(config_error("[simulation]\nlambda = 0.1\n").find("simulation") != std::string::npos);
  CHECK(config_error("[scenario]\nrho = abc\n").find("scenario.rho") != std::string::npos);
  CHECK(config_error("[scenario]\npi0 = 1.5\n").find("pi0") != std::string::npos);
  CHECK(config_error("[sim]\nlambda = 1.0\n").find("sim.lambda") != std::string::npos);
  CHECK(config_error("[protocol]\nkind = XDF\n").find("protocol.kind") != std::string::npos);
  CHECK(config_error("[protocol]\nkind = GENERAL_L\n").find("protocol.L") != std::string::npos);
  CHECK(config_error("[sweep]\nvariable = pi0\nlo = 0.5\nhi = 1.5\n").find("sweep") != std::string::npos);
  CHECK(config_error("[scenario]\nrho 2\n").find("line 2") != std::string::npos);
  CHECK(config_error("[sim]\nseed = 1\nseed = 2\n") != "");
}

TEST_CASE("property: config round-trip") {
  oracle::Gen gen(42);
  for (int i = 0; i < 200; ++i) {
    ExperimentConfig c;
    c.scenario.rho = gen.uniform(0, 10);
    c.scenario.pi0 = gen.uniform(0, 1);
    c.scenario.alpha = gen.uniform(2, 6);
    c.scenario.theta = gen.uniform(0.01, 6.28);
    c.scenario.D_SR = gen.uniform(0.1, 1.9);
    if (gen.uniform() < 0.3) c.scenario.D_RD = gen.uniform(0.1, 3.0);
    c.d_sr_optimal = gen.uniform() < 0.5;
    c.protocol = gen.uniform() < 0.5 ? ProtocolSpec::general(1 + static_cast<std::size_t>(gen.uniform(0, 50)))
                                     : ProtocolSpec::sdf();
    c.sim.lambda = gen.uniform(0, 0.9);
    c.sim.seed = static_cast<std::uint64_t>(gen.uniform(0, 1e18));
    c.sim.mode = gen.uniform() < 0.5 ? SimMode::Link : SimMode::Spatial;
    if (gen.uniform() < 0.5) c.sim.p_RD = gen.uniform();
    if (gen.uniform() < 0.5) c.sim.workers = 3;
    if (gen.uniform() < 0.5) {
      SweepSpec w;
      w.variable = SweepVariable::Lambda;
      w.lo = 0.01;
      w.hi = gen.uniform(0.02, 0.9);
      w.steps = 5;
      w.simulate = true;
      c.sweep = w;
    }
    const std::string text = serialize(c);
    const ExperimentConfig back = parse_config_string(text);
    CHECK(serialize(back) == text);
    CHECK(back.scenario.theta == c.scenario.theta);
    CHECK(back.sim.seed == c.sim.seed);
    CHECK(back.protocol == c.protocol);
  }
}

TEST_CASE("shipped config files match their built-in definitions") {
  for (const std::string& name : shipped_config_names()) {
    CAPTURE(name);
    const ExperimentConfig file = load_config(std::string(CRS_SOURCE_DIR) + "/configs/" + name + ".ini");
    CHECK(serialize(file) == serialize(shipped_config(name)));
  }
}

TEST_CASE("each figure's default config sweeps that figure's variable") {
  for (Figure f : {Figure::RelayPosition, Figure::PuDensity, Figure::PuActivity, Figure::ArrivalRate}) {
    CAPTURE(to_string(f));
    const ExperimentConfig c = shipped_config(default_config_name(f));
    REQUIRE(c.sweep);
    CHECK(c.sweep->variable == sweep_variable(f));
  }
}
