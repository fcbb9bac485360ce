#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <string_view>

#include "crs/queueing.hpp"
#include "crs/scenario.hpp"
#include "crs/simulator.hpp"
#include "crs/spatial.hpp"

namespace crs {

enum class SweepVariable { D_SR, Rho, Pi0, Lambda };

std::string_view to_string(SweepVariable v);
SweepVariable parse_sweep_variable(std::string_view name);

struct SweepSpec {
  SweepVariable variable = SweepVariable::Lambda;
  double lo = 0.0;
  double hi = 0.0;
  unsigned steps = 2;  // grid points, both ends included
  bool simulate = false;

  double point(unsigned i) const;
};

struct SimSettings {
  SimMode mode = SimMode::Link;
  CountModel count_model = CountModel::Poisson;
  std::uint64_t horizon = 1'000'000;
  std::optional<std::uint64_t> warmup;
  std::uint64_t seed = 42;
  unsigned replications = 1;
  std::optional<unsigned> workers;
  std::size_t queue_cap = std::size_t{1} << 20;
  double lambda = 0.05;
  // Link success probabilities; derived from the scenario when absent.
  std::optional<double> p_SD, p_SR, p_RD;
};

// One experiment file:
//
//   [scenario]  Scenario fields; D_SR = optimal places the relay at D_SR*
//   [protocol]  kind = BL | SDF | BDF | GENERAL_L, L = <n>
//   [sim]       SimSettings fields
//   [sweep]     variable = D_SR | rho | pi0 | lambda, lo, hi, steps, simulate
//
// Unknown sections or keys are errors.
struct ExperimentConfig {
  Scenario scenario;
  bool d_sr_optimal = false;
  ProtocolSpec protocol = ProtocolSpec::bdf();
  SimSettings sim;
  std::optional<SweepSpec> sweep;

  // Scenario with the relay moved to D_SR* when requested.
  Scenario resolved_scenario() const;
};

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_string(const std::string& text);
ExperimentConfig load_config(const std::string& path);

std::string serialize(const ExperimentConfig& c);

void validate(const ExperimentConfig& c);

}  // namespace crs
