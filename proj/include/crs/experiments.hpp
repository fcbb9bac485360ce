#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "crs/config.hpp"
#include "crs/gains.hpp"
#include "crs/link_model.hpp"
#include "crs/queueing.hpp"
#include "crs/simulator.hpp"

namespace crs {

// Optimized per-hop powers and success probabilities of a scenario.
struct ScenarioRates {
  LinkRates rates;
  PowerChoice sd, sr, rd;
  bool clamped = false;  // some hop is power-limited
};

ScenarioRates scenario_rates(const Scenario& s, double lambda);

// Rates of an experiment: [sim] overrides first, scenario optimum otherwise.
ScenarioRates experiment_rates(const ExperimentConfig& c, double lambda);

// "exact", "asymptotically-exact;clamped", ...
std::string provenance_flag(Provenance p, bool clamped);

// ---- analyze ----

struct ProtocolSummary {
  ProtocolSpec protocol;
  double lambda_star = 0.0;
  std::optional<double> delay;  // empty when unstable
  std::optional<double> qS0, qR0, mean_QS, mean_QR;
  Provenance provenance = Provenance::Exact;
};

// Protocols covered by tables and sweeps: BL, SDF, BDF and the configured
// GENERAL_L protocol if any.
std::vector<ProtocolSpec> reported_protocols(const ExperimentConfig& c);

ProtocolSummary summarize(const ProtocolSpec& p, const LinkRates& r);

struct AnalysisSummary {
  Scenario scenario;
  DerivedConstants constants;
  ScenarioRates rates;
  std::vector<ProtocolSummary> protocols;
  GainReport gains;
};

AnalysisSummary analyze_experiment(const ExperimentConfig& c);
void print_analysis(std::ostream& out, const AnalysisSummary& a);
void write_analysis_csv(std::ostream& out, const AnalysisSummary& a);

// ---- simulate ----

SimConfig make_sim_config(const ExperimentConfig& c, const ProtocolSpec& p, double lambda);

void print_sim_report(std::ostream& out, const SimReport& r, const std::optional<double>& analytic_delay);
void write_sim_csv(std::ostream& out, const SimReport& r, const std::optional<double>& analytic_delay,
                   const std::string& provenance);

// ---- sweeps ----

enum class Figure { RelayPosition, PuDensity, PuActivity, ArrivalRate };

std::string_view to_string(Figure f);
Figure parse_figure(std::string_view name);
SweepVariable sweep_variable(Figure f);

// Configurations shipped under configs/: "paper", "fig3", "fig4", "fig5",
// "fig6" and "arrival-rate".
ExperimentConfig shipped_config(std::string_view name);
std::vector<std::string> shipped_config_names();
// Shipped config used by `sweep` when no config file is given.
std::string_view default_config_name(Figure f);

struct SweepOptions {
  unsigned workers = 1;
};

// Writes the sweep CSV; rows follow sweep-point order.
void run_sweep(std::ostream& out, const ExperimentConfig& c, Figure f, const SweepOptions& opts = {});

}  // namespace crs
