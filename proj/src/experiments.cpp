#include "crs/experiments.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "crs/csv.hpp"
#include "crs/error.hpp"
#include "crs/parallel.hpp"

namespace crs {

namespace {

bool limited(const PowerChoice& c) { return c.regime == PowerRegime::PowerLimited; }

// Value fixed for printing in tables; NaN and missing print as "-".
std::string fixed(std::optional<double> x, int digits = 4) {
  if (!x || std::isnan(*x)) return "-";
  if (std::isinf(*x)) return *x > 0 ? "inf" : "-inf";
  std::ostringstream o;
  o << std::fixed << std::setprecision(digits) << *x;
  return o.str();
}

std::string lower(std::string_view s) {
  std::string u(s);
  std::transform(u.begin(), u.end(), u.begin(), [](unsigned char c) { return std::tolower(c); });
  return u;
}

ExperimentConfig at_point(const ExperimentConfig& c, SweepVariable v, double x) {
  ExperimentConfig p = c;
  switch (v) {
    case SweepVariable::D_SR:
      p.d_sr_optimal = false;
      p.scenario.D_SR = x;
      p.scenario.D_RD.reset();
      break;
    case SweepVariable::Rho: p.scenario.rho = x; break;
    case SweepVariable::Pi0: p.scenario.pi0 = x; break;
    case SweepVariable::Lambda: p.sim.lambda = x; break;
  }
  return p;
}

void relay_position_sweep(std::ostream& out, const ExperimentConfig& c) {
  CsvWriter csv(out, {"D_SR", "D_RD", "P_SD", "P_SR", "P_RD", "p_SD", "p_SR", "p_RD", "T_BL", "T_SDF", "delta_T",
                      "delta_P", "delta_TP", "provenance"});
  const SweepSpec& w = *c.sweep;
  for (unsigned i = 0; i < w.steps; ++i) {
    const double x = w.point(i);
    const Scenario s = at_point(c, SweepVariable::D_SR, x).resolved_scenario();
    const PathLossGain g = throughput_per_watt(s, x);
    csv.row({cell(x), cell(s.d_rd()), cell(g.power_sd), cell(g.power_sr), cell(g.power_rd), cell(g.p_sd),
             cell(g.p_sr), cell(g.p_rd), cell(g.t_bl), cell(g.t_sdf), cell(g.delta_t), cell(g.delta_p),
             cell(g.delta_tp), provenance_flag(Provenance::Exact, g.clamped)});
  }
}

struct PointResult {
  ScenarioRates rates;
  std::vector<ProtocolSummary> analytic;
  std::vector<std::optional<SimReport>> sim;
  double zeta = 0.0;
  double delta_lambda_star = 0.0;
  std::optional<double> delta_w;
  bool gains_clamped = false;
};

void protocol_sweep(std::ostream& out, const ExperimentConfig& c, SweepVariable v, const SweepOptions& opts) {
  const SweepSpec& w = *c.sweep;
  const std::vector<ProtocolSpec> protocols = reported_protocols(c);

  std::vector<std::string> header = {std::string(to_string(v)), "lambda", "p_SD", "p_SR", "p_RD"};
  for (const ProtocolSpec& p : protocols) {
    const std::string n = lower(to_string(p.kind));
    header.insert(header.end(), {n + "_lambda_star", n + "_delay", n + "_provenance", n + "_sim_delay",
                                 n + "_sim_ci95", n + "_sim_verdict"});
  }
  header.insert(header.end(), {"zeta", "delta_lambda_star", "delta_W"});

  std::vector<PointResult> points(w.steps);
  std::vector<ExperimentConfig> configs;
  for (unsigned i = 0; i < w.steps; ++i) {
    configs.push_back(at_point(c, v, w.point(i)));
    PointResult& pr = points[i];
    const ExperimentConfig& pc = configs.back();
    pr.rates = experiment_rates(pc, pc.sim.lambda);
    for (const ProtocolSpec& p : protocols) pr.analytic.push_back(summarize(p, pr.rates.rates));
    pr.sim.resize(protocols.size());
    const Scenario s = pc.resolved_scenario();
    pr.zeta = balanced_hop_success(s);
    pr.delta_lambda_star = stability_gain(pr.zeta);
    if (pc.sim.lambda > 0.0 && pc.sim.lambda < pr.zeta / 2.0) pr.delta_w = buffer_gain(pr.zeta, pc.sim.lambda).delta_w;
    pr.gains_clamped = throughput_per_watt(s, optimal_relay_position(s).d_sr_star).clamped;
  }

  if (w.simulate) {
    // One job per (point, protocol) with a stable analytic value.
    std::vector<std::pair<unsigned, std::size_t>> jobs;
    for (unsigned i = 0; i < w.steps; ++i)
      for (std::size_t j = 0; j < protocols.size(); ++j)
        if (points[i].analytic[j].delay && configs[i].sim.lambda > 0.0) jobs.emplace_back(i, j);
    parallel_for(jobs.size(), opts.workers, [&](std::size_t n) {
      const auto [i, j] = jobs[n];
      SimConfig sc = make_sim_config(configs[i], protocols[j], configs[i].sim.lambda);
      sc.workers = 1;
      points[i].sim[j] = run(sc);
    });
  }

  CsvWriter csv(out, header);
  for (unsigned i = 0; i < w.steps; ++i) {
    const PointResult& pr = points[i];
    const LinkRates& r = pr.rates.rates;
    std::vector<std::string> row = {cell(w.point(i)), cell(r.lambda), cell(r.p_SD), cell(r.p_SR), cell(r.p_RD)};
    for (std::size_t j = 0; j < protocols.size(); ++j) {
      const ProtocolSummary& a = pr.analytic[j];
      const auto& s = pr.sim[j];
      row.insert(row.end(), {cell(a.lambda_star), cell(a.delay), provenance_flag(a.provenance, pr.rates.clamped),
                             s ? cell(s->delay_packets) : "", s ? cell(s->ci_delay_packets) : "",
                             s ? std::string(to_string(s->verdict)) : ""});
    }
    row.insert(row.end(), {cell(pr.zeta), cell(pr.delta_lambda_star), cell(pr.delta_w)});
    csv.row(row);
  }
}

}  // namespace

ScenarioRates scenario_rates(const Scenario& s, double lambda) {
  const DerivedConstants k = derive_constants(s);
  ScenarioRates out;
  const Link sd = make_link(s, LinkKind::SD);
  const Link sr = make_link(s, LinkKind::SR);
  const Link rd = make_link(s, LinkKind::RD);
  out.sd = optimal_power(sd, k, s.Pmax);
  out.sr = optimal_power(sr, k, s.Pmax);
  out.rd = optimal_power(rd, k, s.Pmax);
  out.rates.p_SD = success_prob(sd, out.sd.watts, k, s.Pmax);
  out.rates.p_SR = success_prob(sr, out.sr.watts, k, s.Pmax);
  out.rates.p_RD = success_prob(rd, out.rd.watts, k, s.Pmax);
  out.rates.lambda = lambda;
  out.clamped = limited(out.sd) || limited(out.sr) || limited(out.rd);
  return out;
}

ScenarioRates experiment_rates(const ExperimentConfig& c, double lambda) {
  ScenarioRates r = scenario_rates(c.resolved_scenario(), lambda);
  if (c.sim.p_SD) r.rates.p_SD = *c.sim.p_SD;
  if (c.sim.p_SR) r.rates.p_SR = *c.sim.p_SR;
  if (c.sim.p_RD) r.rates.p_RD = *c.sim.p_RD;
  return r;
}

std::string provenance_flag(Provenance p, bool clamped) {
  std::string s(to_string(p));
  if (clamped) s += ";clamped";
  return s;
}

std::vector<ProtocolSpec> reported_protocols(const ExperimentConfig& c) {
  std::vector<ProtocolSpec> v = {ProtocolSpec::bl(), ProtocolSpec::sdf(), ProtocolSpec::bdf()};
  if (c.protocol.kind == ProtocolKind::GeneralL) v.push_back(c.protocol);
  return v;
}

ProtocolSummary summarize(const ProtocolSpec& p, const LinkRates& r) {
  ProtocolSummary s;
  s.protocol = p;
  s.lambda_star = stability_region(p, r);
  try {
    const ProtocolAnalysis a = analyze(p, r);
    s.provenance = a.provenance;
    s.delay = a.delay;
    s.qS0 = a.steady.qS0();
    s.mean_QS = a.steady.mean_QS();
    if (p.uses_relay()) {
      s.qR0 = a.steady.qR0();
      s.mean_QR = a.steady.mean_QR();
    }
  } catch (const InstabilityError&) {
    LinkRates zero = r;
    zero.lambda = 0.0;
    s.provenance = analyze(p, zero).provenance;
  }
  return s;
}

AnalysisSummary analyze_experiment(const ExperimentConfig& c) {
  AnalysisSummary a;
  a.scenario = c.resolved_scenario();
  a.constants = derive_constants(a.scenario);
  a.rates = experiment_rates(c, c.sim.lambda);
  for (const ProtocolSpec& p : reported_protocols(c)) a.protocols.push_back(summarize(p, a.rates.rates));
  a.gains = gain_report(a.scenario, c.sim.lambda);
  return a;
}

void print_analysis(std::ostream& out, const AnalysisSummary& a) {
  const Scenario& s = a.scenario;
  const DerivedConstants& k = a.constants;
  out << "constants: C0 = " << fixed(k.c0, 5) << "  C1 = " << fixed(k.c1, 5) << "  C2(SD) = "
      << fixed(k.c2(s.D_SD), 5) << "  C3 = " << fixed(k.c3, 5) << "  C4 = " << fixed(k.c4, 5) << '\n';
  out << "geometry:  D_SD = " << fixed(s.D_SD, 3) << " km  D_SR = " << fixed(s.D_SR, 3)
      << " km  D_RD = " << fixed(s.d_rd(), 3) << " km\n\n";

  out << "link  distance  power(W)    regime                p_succ\n";
  const auto link_row = [&](std::string_view name, double d, const PowerChoice& c, double p) {
    out << std::left << std::setw(6) << name << std::setw(10) << fixed(d, 3) << std::setw(12) << fixed(c.watts, 3)
        << std::setw(22) << to_string(c.regime) << fixed(p, 6) << '\n';
  };
  link_row("SD", s.D_SD, a.rates.sd, a.rates.rates.p_SD);
  link_row("SR", s.D_SR, a.rates.sr, a.rates.rates.p_SR);
  link_row("RD", s.d_rd(), a.rates.rd, a.rates.rates.p_RD);

  out << "\nlambda = " << format_double(a.rates.rates.lambda) << "\n";
  out << "protocol    lambda*   delay(slots)  provenance\n";
  for (const ProtocolSummary& p : a.protocols) {
    std::string name(to_string(p.protocol.kind));
    if (p.protocol.buffer) name += "(L=" + std::to_string(*p.protocol.buffer) + ")";
    out << std::left << std::setw(12) << name << std::setw(10) << fixed(p.lambda_star) << std::setw(14)
        << (p.delay ? fixed(p.delay) : std::string("unstable")) << provenance_flag(p.provenance, a.rates.clamped)
        << '\n';
  }

  const GainReport& g = a.gains;
  out << "\nplacement: D_SR* = " << fixed(g.placement.d_sr_star, 3) << " km  D_RD* = " << fixed(g.placement.d_rd_star, 3)
      << " km  power balanced: " << (g.placement.power_balanced ? "yes" : "no") << '\n';
  out << "path-loss gain at D_SR*: delta_TP = " << fixed(g.path_loss.delta_tp) << "  (closed form "
      << fixed(g.peak.delta_tp_star) << ")" << (g.clamped ? "  [clamped]" : "") << '\n';
  out << "buffer gain: zeta = " << fixed(g.zeta) << "  delta_lambda* = " << fixed(g.delta_lambda_star)
      << "  delta_W = " << (g.delta_w ? fixed(g.delta_w) : std::string("-")) << '\n';
}

void write_analysis_csv(std::ostream& out, const AnalysisSummary& a) {
  CsvWriter csv(out, {"protocol", "L", "lambda", "p_SD", "p_SR", "p_RD", "lambda_star", "delay", "stable", "qS0",
                      "qR0", "mean_QS", "mean_QR", "D_SR", "D_SR_star", "zeta", "delta_lambda_star", "delta_W",
                      "provenance"});
  const LinkRates& r = a.rates.rates;
  for (const ProtocolSummary& p : a.protocols) {
    csv.row({std::string(to_string(p.protocol.kind)),
             p.protocol.buffer ? std::to_string(*p.protocol.buffer) : std::string(), cell(r.lambda), cell(r.p_SD),
             cell(r.p_SR), cell(r.p_RD), cell(p.lambda_star), cell(p.delay), cell(p.delay.has_value()), cell(p.qS0),
             cell(p.qR0), cell(p.mean_QS), cell(p.mean_QR), cell(a.scenario.D_SR), cell(a.gains.placement.d_sr_star),
             cell(a.gains.zeta), cell(a.gains.delta_lambda_star), cell(a.gains.delta_w),
             provenance_flag(p.provenance, a.rates.clamped)});
  }
}

SimConfig make_sim_config(const ExperimentConfig& c, const ProtocolSpec& p, double lambda) {
  SimConfig s;
  s.protocol = p;
  s.rates = experiment_rates(c, lambda).rates;
  s.mode = c.sim.mode;
  if (s.mode == SimMode::Spatial) s.scenario = c.resolved_scenario();
  s.count_model = c.sim.count_model;
  s.horizon = c.sim.horizon;
  s.warmup = c.sim.warmup;
  s.seed = c.sim.seed;
  s.replications = c.sim.replications;
  s.workers = c.sim.workers ? *c.sim.workers : default_workers();
  s.queue_cap = c.sim.queue_cap;
  return s;
}

void print_sim_report(std::ostream& out, const SimReport& r, const std::optional<double>& analytic_delay) {
  std::string name(to_string(r.protocol.kind));
  if (r.protocol.buffer) name += "(L=" + std::to_string(*r.protocol.buffer) + ")";
  out << name << "  lambda = " << format_double(r.lambda) << "  seed = " << r.seed << "  slots = " << r.slots_simulated
      << "  replications = " << r.replications.size() << '\n';
  out << "  mean Q_S        " << fixed(r.mean_qs) << " +- " << fixed(r.ci_qs) << '\n';
  out << "  mean Q_R        " << fixed(r.mean_qr) << " +- " << fixed(r.ci_qr) << '\n';
  out << "  delay (packets) " << fixed(r.delay_packets) << " +- " << fixed(r.ci_delay_packets) << '\n';
  out << "  delay (Little)  " << fixed(r.delay_little) << " +- " << fixed(r.ci_delay_little) << '\n';
  out << "  analytic delay  " << (analytic_delay ? fixed(analytic_delay) : std::string("unstable")) << '\n';
  out << "  throughput      " << fixed(r.throughput, 5) << " +- " << fixed(r.ci_throughput, 5) << '\n';
  out << "  verdict         " << to_string(r.verdict) << '\n';
}

void write_sim_csv(std::ostream& out, const SimReport& r, const std::optional<double>& analytic_delay,
                   const std::string& provenance) {
  CsvWriter csv(out, {"row", "protocol", "L", "lambda", "seed", "slots", "mean_QS", "mean_QR", "delay_packets",
                      "delay_little", "throughput", "ci95_QS", "ci95_QR", "ci95_delay_packets", "ci95_delay_little",
                      "ci95_throughput", "success_SD", "success_SR", "success_RD", "verdict", "analytic_delay",
                      "provenance"});
  const std::string kind(to_string(r.protocol.kind));
  const std::string L = r.protocol.buffer ? std::to_string(*r.protocol.buffer) : std::string();
  for (std::size_t i = 0; i < r.replications.size(); ++i) {
    const ReplicationResult& x = r.replications[i];
    csv.row({std::to_string(i), kind, L, cell(r.lambda), cell(x.seed), cell(x.slots_simulated), cell(x.mean_qs),
             cell(x.mean_qr), cell(x.delay_packets), cell(x.delay_little), cell(x.throughput), "", "", "", "", "",
             cell(x.success_sd), cell(x.success_sr), cell(x.success_rd), std::string(to_string(x.verdict)),
             cell(analytic_delay), provenance});
  }
  csv.row({"aggregate", kind, L, cell(r.lambda), cell(r.seed), cell(r.slots_simulated), cell(r.mean_qs),
           cell(r.mean_qr), cell(r.delay_packets), cell(r.delay_little), cell(r.throughput), cell(r.ci_qs),
           cell(r.ci_qr), cell(r.ci_delay_packets), cell(r.ci_delay_little), cell(r.ci_throughput), cell(r.success_sd),
           cell(r.success_sr), cell(r.success_rd), std::string(to_string(r.verdict)), cell(analytic_delay),
           provenance});
}

std::string_view to_string(Figure f) {
  switch (f) {
    case Figure::RelayPosition: return "relay-position";
    case Figure::PuDensity: return "pu-density";
    case Figure::PuActivity: return "pu-activity";
    case Figure::ArrivalRate: return "arrival-rate";
  }
  return "?";
}

Figure parse_figure(std::string_view name) {
  for (Figure f : {Figure::RelayPosition, Figure::PuDensity, Figure::PuActivity, Figure::ArrivalRate})
    if (to_string(f) == name) return f;
  throw ConfigError("unknown figure '" + std::string(name) +
                    "' (expected relay-position, pu-density, pu-activity or arrival-rate)");
}

SweepVariable sweep_variable(Figure f) {
  switch (f) {
    case Figure::RelayPosition: return SweepVariable::D_SR;
    case Figure::PuDensity: return SweepVariable::Rho;
    case Figure::PuActivity: return SweepVariable::Pi0;
    case Figure::ArrivalRate: return SweepVariable::Lambda;
  }
  return SweepVariable::Lambda;
}

std::string_view default_config_name(Figure f) {
  switch (f) {
    case Figure::RelayPosition: return "fig3";
    case Figure::PuDensity: return "fig5";
    case Figure::PuActivity: return "fig6";
    case Figure::ArrivalRate: return "arrival-rate";
  }
  return "paper";
}

std::vector<std::string> shipped_config_names() {
  return {"paper", "fig3", "fig4", "fig5", "fig6", "arrival-rate"};
}

ExperimentConfig shipped_config(std::string_view name) {
  ExperimentConfig c;
  c.d_sr_optimal = true;
  c.protocol = ProtocolSpec::bdf();
  if (name == "paper") {
    c.sim.lambda = 0.2;
    c.sim.replications = 8;
    return c;
  }
  c.sim.horizon = 200'000;
  c.sim.replications = 4;
  SweepSpec w;
  if (name == "fig3") {
    // 2000 interior points of the source-destination segment.
    w.variable = SweepVariable::D_SR;
    w.lo = c.scenario.D_SD / 2001.0;
    w.hi = 2000.0 * c.scenario.D_SD / 2001.0;
    w.steps = 2000;
  } else if (name == "fig4") {
    c.sim.lambda = 0.05;
    w.variable = SweepVariable::Pi0;
    w.lo = 0.5;
    w.hi = 0.95;
    w.steps = 10;
  } else if (name == "fig5") {
    c.sim.lambda = 0.01;
    w.variable = SweepVariable::Rho;
    w.lo = 1.0;
    w.hi = 5.0;
    w.steps = 9;
    w.simulate = true;
  } else if (name == "fig6") {
    c.sim.lambda = 0.01;
    w.variable = SweepVariable::Pi0;
    w.lo = 0.5;
    w.hi = 0.9;
    w.steps = 9;
    w.simulate = true;
  } else if (name == "arrival-rate") {
    w.variable = SweepVariable::Lambda;
    w.lo = 0.02;
    w.hi = 0.34;
    w.steps = 17;
    w.simulate = true;
  } else {
    throw ConfigError("no shipped config named '" + std::string(name) + "'");
  }
  c.sweep = w;
  return c;
}

void run_sweep(std::ostream& out, const ExperimentConfig& c, Figure f, const SweepOptions& opts) {
  if (!c.sweep) throw ConfigError("sweep: the config has no [sweep] section");
  if (c.sweep->variable != sweep_variable(f))
    throw ConfigError("sweep.variable: figure " + std::string(to_string(f)) + " sweeps " +
                      std::string(to_string(sweep_variable(f))) + ", config sweeps " +
                      std::string(to_string(c.sweep->variable)));
  if (f == Figure::RelayPosition)
    relay_position_sweep(out, c);
  else
    protocol_sweep(out, c, sweep_variable(f), opts);
}

}  // namespace crs
