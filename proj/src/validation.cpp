#include "crs/validation.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

#include "crs/error.hpp"
#include "crs/experiments.hpp"
#include "crs/gains.hpp"
#include "crs/link_model.hpp"
#include "crs/queueing.hpp"
#include "crs/rng.hpp"
#include "crs/simulator.hpp"
#include "crs/spatial.hpp"

namespace crs {

namespace {

// Collects the worst deviation per check and the first failure message.
class Checks {
 public:
  void expect(bool ok, const std::string& what) {
    ++count_;
    if (!ok && failure_.empty()) failure_ = what;
  }
  void note(const std::string& s) { notes_ += (notes_.empty() ? "" : "; ") + s; }
  bool ok() const { return failure_.empty(); }
  std::string detail() const {
    std::string d = std::to_string(count_) + " checks";
    if (!notes_.empty()) d += "; " + notes_;
    if (!failure_.empty()) d += "; FAILED: " + failure_;
    return d;
  }

 private:
  std::size_t count_ = 0;
  std::string notes_;
  std::string failure_;
};

std::string num(double x, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

double perturb(const ValidationOptions& o, Mutation target, double v, double factor) {
  return o.mutation == target ? v * factor : v;
}

// ---- 1 ----
CriterionResult optimal_power_oracle(const ValidationOptions& o) {
  Checks c;
  double worst_power = 0.0, worst_prob = 0.0;
  for (double alpha : {2.0, 3.0, 4.0})
    for (double d : {0.5, 1.0, 2.0})
      for (double rho : {0.5, 2.0, 5.0})
        for (double pi0 : {0.5, 0.8, 0.95})
          for (double gr : {1.0, 2.0, 4.0}) {
            Scenario s;
            s.alpha = alpha;
            s.rho = rho;
            s.pi0 = pi0;
            s.Gr = gr;
            const DerivedConstants k = derive_constants(s);
            for (const Link link : {Link{LinkKind::SD, d, 1.0}, Link{LinkKind::SR, d, gr}}) {
              const double closed = perturb(o, Mutation::OptimalPower, unconstrained_optimal_power(link, k), 1.0001);
              const auto f = [&](double u) { return -log_success_prob(link, std::exp(u), k); };
              const auto [u, fu] = boost::math::tools::brent_find_minima(f, -40.0, 40.0, 40);
              (void)fu;
              const double e_power = rel_err(closed, std::exp(u));
              const double via_power = std::exp(log_success_prob(link, unconstrained_optimal_power(link, k), k));
              const double e_prob = rel_err(closed_form_max_success_prob(link, k), via_power);
              worst_power = std::max(worst_power, e_power);
              worst_prob = std::max(worst_prob, e_prob);
              const std::string at = "alpha=" + num(alpha) + " D=" + num(d) + " rho=" + num(rho) +
                                     " pi0=" + num(pi0) + " Gr=" + num(gr) + " " + std::string(to_string(link.kind));
              c.expect(e_power <= 1e-6, "power rel err " + num(e_power) + " at " + at);
              c.expect(e_prob <= 1e-10, "max-success rel err " + num(e_prob) + " at " + at);
            }
          }
  c.note("worst power rel err " + num(worst_power, 3));
  c.note("worst max-success rel err " + num(worst_prob, 3));
  return {{}, c.ok(), 0.0, c.detail()};
}

// ---- 2 ----
CriterionResult relay_placement(const ValidationOptions& o) {
  Checks c;
  Scenario s;
  const double d_star = perturb(o, Mutation::RelayPlacement, balanced_relay_distance(s), 1.01);
  const double rounded = std::round(d_star * 1000.0) / 1000.0;
  c.note("D_SR* = " + num(d_star, 7));
  c.expect(rounded == 1.086, "D_SR* rounds to " + num(rounded) + ", expected 1.086");

  const unsigned points = 2000;
  const double step = s.D_SD / (points + 1);
  double best_x = 0.0, best = -INFINITY;
  for (unsigned i = 1; i <= points; ++i) {
    const double x = step * i;
    const double g = throughput_per_watt(s, x).delta_tp;
    if (g > best) {
      best = g;
      best_x = x;
    }
  }
  c.note("sweep peak at D_SR = " + num(best_x, 6) + " (delta_TP = " + num(best, 5) + ", step " + num(step, 4) + ")");
  c.expect(std::abs(best_x - d_star) <= step,
           "delta_TP peaks at " + num(best_x, 6) + ", " + num(std::abs(best_x - d_star) / step, 3) +
               " grid steps from D_SR*");
  return {{}, c.ok(), 0.0, c.detail()};
}

// ---- 3 ----
CriterionResult closed_form_consistency(const ValidationOptions& o) {
  Checks c;
  Rng rng(substream_seed(o.seed, 3));
  double worst_little = 0.0, worst_l1 = 0.0, worst_l64 = 0.0;
  for (int n = 0; n < 100; ++n) {
    LinkRates r;
    r.p_SR = 0.3 + 0.7 * rng.uniform();
    r.p_RD = 0.3 + 0.7 * rng.uniform();
    r.p_SD = r.p_SR;
    r.lambda = (0.01 + 0.94 * rng.uniform()) * sdf_stability_region(r);
    const std::string at = "p_SR=" + num(r.p_SR) + " p_RD=" + num(r.p_RD) + " lambda=" + num(r.lambda);

    for (const ProtocolAnalysis& a : {bl_analysis(r), sdf_analysis(r), bdf_analysis(r)}) {
      const double closed = perturb(o, Mutation::DelayFormula, a.delay, 1.0 + 1e-6);
      const double e = rel_err(little_delay(a), closed);
      worst_little = std::max(worst_little, e);
      c.expect(e <= 1e-9, std::string(to_string(a.protocol.kind)) + " Little rel err " + num(e) + " at " + at);
    }

    const ProtocolAnalysis sdf = sdf_analysis(r);
    const ProtocolAnalysis l1 = general_l_analysis(r, 1);
    const double e1 = std::max({rel_err(l1.delay, perturb(o, Mutation::DelayFormula, sdf.delay, 1.0 + 1e-6)),
                                std::abs(l1.steady.qS0() - sdf.steady.qS0()),
                                std::abs(l1.steady.qR0() - sdf.steady.qR0()), rel_err(l1.lambda_star, sdf.lambda_star)});
    worst_l1 = std::max(worst_l1, e1);
    c.expect(e1 <= 1e-10, "L=1 vs SDF deviation " + num(e1) + " at " + at);

    const ProtocolAnalysis bdf = bdf_analysis(r);
    const ProtocolAnalysis l64 = general_l_analysis(r, 64);
    const double e64 = std::max({rel_err(l64.delay, perturb(o, Mutation::DelayFormula, bdf.delay, 1.0 + 1e-5)),
                                 std::abs(l64.steady.qS0() - bdf.steady.qS0()),
                                 std::abs(l64.steady.qR0() - bdf.steady.qR0())});
    worst_l64 = std::max(worst_l64, e64);
    c.expect(e64 <= 1e-6, "L=64 vs BDF deviation " + num(e64) + " at " + at);
  }
  c.note("worst Little " + num(worst_little, 3));
  c.note("worst L=1 " + num(worst_l1, 3));
  c.note("worst L=64 " + num(worst_l64, 3));
  return {{}, c.ok(), 0.0, c.detail()};
}

// ---- 4 ----
CriterionResult buffer_gain_identities(const ValidationOptions& o) {
  Checks c;
  double worst = 0.0;
  for (int zi = 0; zi <= 13; ++zi) {
    const double zeta = 0.3 + 0.05 * zi;
    for (int li = 1; li <= 19; ++li) {
      const double lambda = zeta / 2.0 * li / 20.0;
      const BufferGain closed = buffer_gain(zeta, lambda);
      const BufferGain direct = buffer_gain_direct(zeta, lambda);
      const double dl = std::abs(closed.delta_lambda_star - direct.delta_lambda_star);
      const double dw = std::abs(perturb(o, Mutation::BufferGain, closed.delta_w, 1.0 + 1e-9) - direct.delta_w);
      worst = std::max({worst, dl, dw});
      const std::string at = "zeta=" + num(zeta) + " lambda=" + num(lambda);
      c.expect(dl <= 1e-12, "delta_lambda* differs by " + num(dl) + " at " + at);
      c.expect(dw <= 1e-12, "delta_W differs by " + num(dw) + " at " + at);
    }
  }
  const double spot_closed = perturb(o, Mutation::BufferGain, buffer_gain(0.8, 0.3).delta_w, 1.0 + 1e-9);
  const double spot_direct = buffer_gain_direct(0.8, 0.3).delta_w;
  c.expect(std::abs(spot_closed - 0.13846) < 5e-6, "spot delta_W = " + num(spot_closed, 8));
  c.expect(std::abs(spot_direct - 0.13846) < 5e-6, "spot delta_W (direct) = " + num(spot_direct, 8));
  c.note("worst deviation " + num(worst, 3));
  c.note("spot delta_W " + num(spot_closed, 7));
  return {{}, c.ok(), 0.0, c.detail()};
}

// Paper scenario with the relay at the balanced position.
LinkRates paper_rates(double lambda) { return scenario_rates(reference_scenario(), lambda).rates; }

SimConfig sim_config(const ValidationOptions& o, const ProtocolSpec& p, const LinkRates& r, std::uint64_t horizon,
                     unsigned reps, std::uint64_t stream) {
  SimConfig s;
  s.protocol = p;
  s.rates = r;
  s.horizon = horizon;
  s.replications = reps;
  s.workers = o.workers;
  s.seed = substream_seed(o.seed, stream);
  return s;
}

// ---- 5 ----
CriterionResult bl_simulation(const ValidationOptions& o) {
  Checks c;
  const LinkRates base = paper_rates(0.0);
  const double star = bl_stability_region(base);
  for (double f : {0.25, 0.5, 0.75}) {
    LinkRates r = base;
    r.lambda = f * star;
    const double analytic = perturb(o, Mutation::BlDelay, bl_analysis(r).delay, 1.05);
    const SimReport rep = run(sim_config(o, ProtocolSpec::bl(), r, 1'000'000, 8, 500 + static_cast<int>(f * 100)));
    const double e = rel_err(rep.delay_packets, analytic);
    c.note(num(f, 2) + "*lambda*: sim " + num(rep.delay_packets, 5) + " vs " + num(analytic, 5));
    c.expect(e <= 0.03, "BL delay off by " + num(100 * e, 3) + "% at lambda=" + num(r.lambda));
  }
  return {{}, c.ok(), 0.0, c.detail()};
}

std::vector<double> grid(double lo, double hi, double step) {
  std::vector<double> g;
  for (int i = 0; lo + i * step <= hi + 1e-12; ++i) g.push_back(std::round((lo + i * step) * 1e6) / 1e6);
  return g;
}

std::string bracket_text(const StabilityScan& s) {
  return "[" + (s.largest_stable ? num(*s.largest_stable, 4) : std::string("-")) + ", " +
         (s.smallest_unstable ? num(*s.smallest_unstable, 4) : std::string("-")) + "]";
}

// ---- 6 ----
CriterionResult bdf_simulation(const ValidationOptions& o) {
  Checks c;
  const LinkRates base = paper_rates(0.0);
  const double star = perturb(o, Mutation::BdfDelay, bdf_stability_region(base), 1.1);
  for (double f : {0.25, 0.5, 0.75, 0.8}) {
    LinkRates r = base;
    r.lambda = f * bdf_stability_region(base);
    const double analytic = perturb(o, Mutation::BdfDelay, bdf_analysis(r).delay, 1.08);
    const SimReport rep = run(sim_config(o, ProtocolSpec::bdf(), r, 1'000'000, 8, 600 + static_cast<int>(f * 100)));
    const double e = rel_err(rep.delay_packets, analytic);
    c.note(num(f, 2) + "*lambda*: sim " + num(rep.delay_packets, 5) + " vs " + num(analytic, 5));
    c.expect(e <= 0.05, "BDF delay off by " + num(100 * e, 3) + "% at lambda=" + num(r.lambda));
  }
  const StabilityScan scan = estimate_stability(sim_config(o, ProtocolSpec::bdf(), base, 1'000'000, 4, 690),
                                                grid(0.28, 0.42, 0.01));
  c.note("lambda* = " + num(star, 5) + ", bracket " + bracket_text(scan));
  c.expect(!scan.one_sided() && scan.contains(star), "bracket " + bracket_text(scan) + " misses " + num(star, 5));
  c.expect(!scan.one_sided() && *scan.smallest_unstable - *scan.largest_stable <= 0.02 + 1e-9,
           "bracket " + bracket_text(scan) + " wider than two grid steps");
  return {{}, c.ok(), 0.0, c.detail()};
}

// ---- 7 ----
CriterionResult sdf_bounds(const ValidationOptions& o) {
  Checks c;
  const LinkRates base = paper_rates(0.0);
  const double star = sdf_stability_region(base);
  for (double f : {0.25, 0.5, 0.75, 0.9}) {
    LinkRates r = base;
    r.lambda = f * star;
    const double analytic = perturb(o, Mutation::SdfDelay, sdf_analysis(r).delay, 1.2);
    const SimReport rep = run(sim_config(o, ProtocolSpec::sdf(), r, 1'000'000, 8, 700 + static_cast<int>(f * 100)));
    c.note(num(f, 2) + "*lambda*: sim " + num(rep.delay_packets, 5) + " +- " + num(rep.ci_delay_packets, 2) +
           " vs bound " + num(analytic, 5));
    c.expect(rep.delay_packets >= analytic - rep.ci_delay_packets,
             "SDF delay " + num(rep.delay_packets) + " below bound " + num(analytic) + " at lambda=" + num(r.lambda));
  }
  const StabilityScan scan =
      estimate_stability(sim_config(o, ProtocolSpec::sdf(), base, 1'000'000, 4, 790), grid(0.18, 0.34, 0.01));
  c.note("bound " + num(star, 5) + ", bracket " + bracket_text(scan));
  const double bound = perturb(o, Mutation::SdfDelay, star, 0.8);
  c.expect(scan.largest_stable.has_value(), "no stable grid point");
  c.expect(!scan.largest_stable || *scan.largest_stable <= bound + 0.01,
           "largest stable lambda " + num(scan.largest_stable.value_or(0)) + " above " + num(bound) + " + 0.01");
  return {{}, c.ok(), 0.0, c.detail()};
}

// ---- 8 ----
CriterionResult spatial_blocking(const ValidationOptions& o) {
  Checks c;
  const Scenario s = reference_scenario();
  const DerivedConstants k = derive_constants(s);
  const Link sd = make_link(s, LinkKind::SD);
  const double power = optimal_power(sd, k, s.Pmax).watts;
  const std::uint64_t slots = 100'000;

  const auto check = [&](CountModel model, double oracle, std::string_view label) {
    oracle = perturb(o, Mutation::ClearProb, oracle, 1.02);
    const ProbabilityEstimate e = empirical_clear_prob(s, sd, power, slots, model, substream_seed(o.seed, 800));
    const double sigma = std::sqrt(oracle * (1.0 - oracle) / static_cast<double>(slots));
    const double z = (e.estimate - oracle) / sigma;
    c.note(std::string(label) + " " + num(e.estimate, 5) + " vs " + num(oracle, 5) + " (z = " + num(z, 3) + ")");
    c.expect(std::abs(z) <= 3.0, std::string(label) + " off by " + num(z, 3) + " sigma");
  };
  check(CountModel::Poisson, poisson_clear_prob(s, power), "poisson");
  check(CountModel::DeterministicCount, clear_prob(power, k), "deterministic");
  return {{}, c.ok(), 0.0, c.detail()};
}

// ---- 9 ----
std::vector<ExperimentConfig> sweep_points(const ExperimentConfig& c) {
  std::vector<ExperimentConfig> v;
  for (unsigned i = 0; i < c.sweep->steps; ++i) {
    ExperimentConfig p = c;
    const double x = c.sweep->point(i);
    switch (c.sweep->variable) {
      case SweepVariable::Rho: p.scenario.rho = x; break;
      case SweepVariable::Pi0: p.scenario.pi0 = x; break;
      case SweepVariable::Lambda: p.sim.lambda = x; break;
      case SweepVariable::D_SR:
        p.d_sr_optimal = false;
        p.scenario.D_SR = x;
        break;
    }
    v.push_back(p);
  }
  return v;
}

CriterionResult trend_reproduction(const ValidationOptions& o) {
  Checks c;

  // Buffer gains grow as the PUs become more active.
  const ExperimentConfig fig4 = shipped_config("fig4");
  double prev_dl = INFINITY, prev_dw = INFINITY;
  for (const ExperimentConfig& p : sweep_points(fig4)) {
    const double zeta = balanced_hop_success(p.resolved_scenario());
    const double z = o.mutation == Mutation::GainTrend ? 1.0 - zeta : zeta;
    const double dl = stability_gain(z);
    const double dw = buffer_gain(z, p.sim.lambda).delta_w;
    const std::string at = "pi0=" + num(p.scenario.pi0);
    c.expect(dl < prev_dl, "delta_lambda* not increasing as pi0 decreases at " + at);
    c.expect(dw < prev_dw, "delta_W not increasing as pi0 decreases at " + at);
    prev_dl = dl;
    prev_dw = dw;
  }

  // Delays grow with PU density over [0.5, 5].
  {
    ExperimentConfig dense = shipped_config("fig5");
    dense.sweep->lo = 0.5;
    dense.sweep->hi = 5.0;
    dense.sweep->steps = 46;
    std::vector<double> last(3, -INFINITY);
    for (const ExperimentConfig& p : sweep_points(dense)) {
      const LinkRates r = experiment_rates(p, p.sim.lambda).rates;
      const std::vector<double> now = {bl_analysis(r).delay, sdf_analysis(r).delay, bdf_analysis(r).delay};
      for (int i = 0; i < 3; ++i)
        c.expect(now[i] > last[i], "delay not increasing in rho at rho=" + num(p.scenario.rho));
      last = now;
    }
  }

  // BDF < SDF < BL at every point of the shipped figure 5 and 6 sweeps.
  for (const char* name : {"fig5", "fig6"}) {
    for (const ExperimentConfig& p : sweep_points(shipped_config(name))) {
      const LinkRates r = experiment_rates(p, p.sim.lambda).rates;
      const double x = p.sweep->variable == SweepVariable::Rho ? p.scenario.rho : p.scenario.pi0;
      const double bl = bl_analysis(r).delay, sdf = sdf_analysis(r).delay, bdf = bdf_analysis(r).delay;
      c.expect(bdf < sdf && sdf < bl, "ordering BDF < SDF < BL broken in " + std::string(name) + " at " +
                                          std::string(to_string(p.sweep->variable)) + "=" + num(x));
    }
  }
  return {{}, c.ok(), 0.0, c.detail()};
}

// ---- 10 ----
CriterionResult determinism(const ValidationOptions& o) {
  Checks c;
  ExperimentConfig cfg = shipped_config("paper");
  cfg.sim.horizon = 100'000;
  cfg.sim.replications = 4;
  cfg.sim.seed = o.seed;

  const auto simulate_csv = [&](unsigned workers, std::uint64_t seed) {
    ExperimentConfig x = cfg;
    x.sim.workers = workers;
    x.sim.seed = seed;
    std::ostringstream out;
    const SimReport r = run(make_sim_config(x, x.protocol, x.sim.lambda));
    write_sim_csv(out, r, bdf_analysis(experiment_rates(x, x.sim.lambda).rates).delay, "asymptotically-exact");
    return out.str();
  };
  const std::uint64_t second_seed = o.mutation == Mutation::Seed ? o.seed + 1 : o.seed;
  const std::string a = simulate_csv(1, o.seed);
  c.expect(a == simulate_csv(1, second_seed), "simulate CSV differs between identical runs");
  c.expect(a == simulate_csv(std::max(2u, o.workers), second_seed), "simulate CSV depends on the worker count");

  ExperimentConfig sweep = shipped_config("arrival-rate");
  sweep.sim.horizon = 20'000;
  sweep.sim.replications = 2;
  sweep.sim.seed = o.seed;
  const auto sweep_csv = [&](unsigned workers, std::uint64_t seed) {
    ExperimentConfig x = sweep;
    x.sim.seed = seed;
    std::ostringstream out;
    run_sweep(out, x, Figure::ArrivalRate, {workers});
    return out.str();
  };
  const std::string s = sweep_csv(1, o.seed);
  c.expect(s == sweep_csv(std::max(2u, o.workers), second_seed), "sweep CSV differs between identical runs");
  c.note("simulate " + std::to_string(a.size()) + " bytes, sweep " + std::to_string(s.size()) + " bytes");
  return {{}, c.ok(), 0.0, c.detail()};
}

using Runner = std::function<CriterionResult(const ValidationOptions&)>;

const std::vector<Runner>& runners() {
  static const std::vector<Runner> r = {optimal_power_oracle, relay_placement,  closed_form_consistency,
                                        buffer_gain_identities, bl_simulation,   bdf_simulation,
                                        sdf_bounds,            spatial_blocking, trend_reproduction,
                                        determinism};
  return r;
}

}  // namespace

std::string_view to_string(Mutation m) {
  switch (m) {
    case Mutation::None: return "none";
    case Mutation::OptimalPower: return "optimal-power";
    case Mutation::RelayPlacement: return "relay-placement";
    case Mutation::DelayFormula: return "delay-formula";
    case Mutation::BufferGain: return "buffer-gain";
    case Mutation::BlDelay: return "bl-delay";
    case Mutation::BdfDelay: return "bdf-delay";
    case Mutation::SdfDelay: return "sdf-delay";
    case Mutation::ClearProb: return "clear-prob";
    case Mutation::GainTrend: return "gain-trend";
    case Mutation::Seed: return "seed";
  }
  return "?";
}

Mutation parse_mutation(std::string_view name) {
  for (int i = 0; i <= static_cast<int>(Mutation::Seed); ++i) {
    const auto m = static_cast<Mutation>(i);
    if (to_string(m) == name) return m;
  }
  throw ParameterError("mutate", "unknown mutation '" + std::string(name) + "'");
}

const std::vector<CriterionInfo>& criteria() {
  static const std::vector<CriterionInfo> c = {
      {1, "optimal power oracle agreement", 5.0},
      {2, "relay placement", 10.0},
      {3, "closed-form self-consistency", 10.0},
      {4, "buffer gain identities", 1.0},
      {5, "simulation vs analysis, BL", 60.0},
      {6, "simulation vs analysis, BDF", 300.0},
      {7, "SDF bound directions", 300.0},
      {8, "spatial-mode blocking", 60.0},
      {9, "trend reproduction", 30.0},
      {10, "determinism", 30.0},
  };
  return c;
}

CriterionResult run_criterion(int id, const ValidationOptions& opts) {
  if (id < 1 || id > static_cast<int>(criteria().size()))
    throw ParameterError("criterion", "no criterion " + std::to_string(id));
  const auto t0 = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    r = runners()[id - 1](opts);
  } catch (const std::exception& e) {
    r.checks_passed = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.info = criteria()[id - 1];
  return r;
}

std::string format_result(const CriterionResult& r) {
  char head[160];
  std::snprintf(head, sizeof head, "[%s] c%02d %s (%.2f s / %g s): ", r.passed() ? "PASS" : "FAIL", r.info.id,
                r.info.name.c_str(), r.seconds, r.info.budget_seconds);
  std::string s = head + r.detail;
  if (r.checks_passed && !r.passed()) s += "; FAILED: over time budget";
  return s;
}

}  // namespace crs
