// crsim: analysis, simulation, sweeps and the validation suite.

#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "crs/config.hpp"
#include "crs/error.hpp"
#include "crs/experiments.hpp"
#include "crs/parallel.hpp"
#include "crs/simulator.hpp"
#include "crs/validation.hpp"

namespace {

enum Exit { kOk = 0, kValidationFailed = 1, kConfigError = 2, kNumericError = 3 };

struct Overrides {
  std::optional<std::uint64_t> seed, slots;
  std::optional<unsigned> replications, workers;

  void apply(crs::ExperimentConfig& c) const {
    if (seed) c.sim.seed = *seed;
    if (slots) {
      c.sim.horizon = *slots;
      if (c.sim.warmup && *c.sim.warmup >= *slots) c.sim.warmup.reset();
    }
    if (replications) c.sim.replications = *replications;
    if (workers) c.sim.workers = *workers;
  }
  unsigned worker_count(const crs::ExperimentConfig& c) const {
    return c.sim.workers ? *c.sim.workers : crs::default_workers();
  }
};

// Output file, or stdout when no path is given.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (path.empty()) return;
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file_) throw crs::ConfigError("cannot write '" + path + "'");
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }
  bool is_file() const { return file_ != nullptr; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

crs::ExperimentConfig load(const std::string& path, const Overrides& o, std::string_view fallback = "paper") {
  crs::ExperimentConfig c = path.empty() ? crs::shipped_config(fallback) : crs::load_config(path);
  o.apply(c);
  crs::validate(c);
  return c;
}

int cmd_analyze(const std::string& config, const Overrides& o, const std::string& out) {
  const crs::AnalysisSummary a = crs::analyze_experiment(load(config, o));
  crs::print_analysis(std::cout, a);
  if (!out.empty()) {
    Sink sink(out);
    crs::write_analysis_csv(sink.stream(), a);
  }
  return kOk;
}

int cmd_simulate(const std::string& config, const Overrides& o, const std::string& out, bool trace) {
  const crs::ExperimentConfig c = load(config, o);
  crs::SimConfig sim = crs::make_sim_config(c, c.protocol, c.sim.lambda);
  sim.workers = o.worker_count(c);

  std::unique_ptr<std::ofstream> trace_file;
  if (trace) {
    const std::string path = out.empty() ? "trace.csv" : out + ".trace.csv";
    trace_file = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*trace_file) throw crs::ConfigError("cannot write '" + path + "'");
    sim.observer = crs::make_trace_writer(*trace_file);
  }

  const crs::ScenarioRates rates = crs::experiment_rates(c, c.sim.lambda);
  const crs::ProtocolSummary analytic = crs::summarize(c.protocol, rates.rates);
  const crs::SimReport report = crs::run(sim);

  Sink sink(out);
  if (sink.is_file()) crs::print_sim_report(std::cout, report, analytic.delay);
  crs::write_sim_csv(sink.stream(), report, analytic.delay, crs::provenance_flag(analytic.provenance, rates.clamped));
  return kOk;
}

int cmd_sweep(const std::string& config, const Overrides& o, const std::string& out, const std::string& figure) {
  const crs::Figure f = crs::parse_figure(figure);
  const crs::ExperimentConfig c = load(config, o, crs::default_config_name(f));
  Sink sink(out);
  crs::run_sweep(sink.stream(), c, f, {o.worker_count(c)});
  return kOk;
}

int cmd_validate(const crs::ValidationOptions& opts, const std::vector<int>& ids) {
  bool all = true;
  for (const crs::CriterionInfo& info : crs::criteria()) {
    if (!ids.empty() && std::find(ids.begin(), ids.end(), info.id) == ids.end()) continue;
    const crs::CriterionResult r = crs::run_criterion(info.id, opts);
    std::cout << crs::format_result(r) << std::endl;
    all = all && r.passed();
  }
  return all ? kOk : kValidationFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"crsim: buffered cognitive relay analysis and simulation"};
  app.require_subcommand(1);

  std::string config, out, figure;
  bool trace = false;
  Overrides o;
  std::vector<int> ids;
  crs::ValidationOptions vopts;
  std::string mutation = "none";

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "experiment config (INI); default: the reference set, or the figure's shipped config for sweep")
        ->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "master seed");
    sub->add_option("--slots", o.slots, "simulation horizon in slots");
    sub->add_option("--replications", o.replications, "independent replications");
    sub->add_option("--workers", o.workers, "worker threads (default: CRS_WORKERS or hardware threads)");
    sub->add_option("--out", out, "CSV output path");
  };

  CLI::App* analyze = app.add_subcommand("analyze", "closed-form analysis table");
  common(analyze);
  CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo simulation of the configured protocol");
  common(simulate);
  simulate->add_flag("--trace", trace, "write a per-slot trace of replication 0 (<out>.trace.csv or trace.csv)");
  CLI::App* sweep = app.add_subcommand("sweep", "parameter sweep behind one figure");
  common(sweep);
  sweep->add_option("--figure", figure, "relay-position | pu-density | pu-activity | arrival-rate")->required();
  CLI::App* validate = app.add_subcommand("validate", "run the acceptance criteria");
  validate->add_option("--seed", vopts.seed, "master seed");
  validate->add_option("--workers", vopts.workers, "worker threads");
  validate->add_option("--criterion", ids, "run only these criteria (1-10)");
#ifndef NDEBUG
  validate->add_option("--mutate", mutation, "perturb one closed form (debug builds only)");
#endif

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*analyze) return cmd_analyze(config, o, out);
    if (*simulate) return cmd_simulate(config, o, out, trace);
    if (*sweep) return cmd_sweep(config, o, out, figure);
    vopts.mutation = crs::parse_mutation(mutation);
    if (vopts.workers == 0) vopts.workers = 1;
    return cmd_validate(vopts, ids);
  } catch (const crs::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const crs::ParameterError& e) {
    std::cerr << "parameter error: " << e.what() << '\n';
    return kConfigError;
  } catch (const crs::DomainError& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return kConfigError;
  } catch (const crs::Error& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kNumericError;
  }
}
