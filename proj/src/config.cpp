#include "crs/config.hpp"

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "crs/csv.hpp"
#include "crs/error.hpp"

namespace crs {

namespace pt = boost::property_tree;

namespace {

std::string upper(std::string_view s) {
  std::string u(s);
  std::transform(u.begin(), u.end(), u.begin(), [](unsigned char c) { return std::toupper(c); });
  return u;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void bad(const std::string& key, const std::string& what) {
  throw ConfigError(key + ": " + what);
}

double to_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(x))
    bad(key, "expected a finite number, got '" + v + "'");
  return x;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t x = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec == std::errc() && p == v.data() + v.size()) return x;
  // Accept integral values written in floating notation, e.g. 1e6.
  const double d = to_double(key, v);
  if (d < 0.0 || d != std::floor(d) || d > 1.8e19) bad(key, "expected a non-negative integer, got '" + v + "'");
  return static_cast<std::uint64_t>(d);
}

bool to_bool(const std::string& key, const std::string& v) {
  const std::string u = upper(v);
  if (u == "TRUE" || u == "YES" || u == "1") return true;
  if (u == "FALSE" || u == "NO" || u == "0") return false;
  bad(key, "expected true or false, got '" + v + "'");
}

using Setter = std::function<void(ExperimentConfig&, const std::string& key, const std::string& value)>;

template <class Member>
Setter real(Member m) {
  return [m](ExperimentConfig& c, const std::string& k, const std::string& v) { std::invoke(m, c) = to_double(k, v); };
}

const std::map<std::string, std::map<std::string, Setter>>& schema() {
  static const std::map<std::string, std::map<std::string, Setter>> s = {
      {"scenario",
       {
           {"rho", real([](ExperimentConfig& c) -> double& { return c.scenario.rho; })},
           {"pi0", real([](ExperimentConfig& c) -> double& { return c.scenario.pi0; })},
           {"theta", real([](ExperimentConfig& c) -> double& { return c.scenario.theta; })},
           {"gamma_th", real([](ExperimentConfig& c) -> double& { return c.scenario.gamma_th; })},
           {"kappa0", real([](ExperimentConfig& c) -> double& { return c.scenario.kappa0; })},
           {"alpha", real([](ExperimentConfig& c) -> double& { return c.scenario.alpha; })},
           {"sigma2", real([](ExperimentConfig& c) -> double& { return c.scenario.sigma2; })},
           {"sigmaI2", real([](ExperimentConfig& c) -> double& { return c.scenario.sigmaI2; })},
           {"sigmaP2", real([](ExperimentConfig& c) -> double& { return c.scenario.sigmaP2; })},
           {"Gt", real([](ExperimentConfig& c) -> double& { return c.scenario.Gt; })},
           {"Gr", real([](ExperimentConfig& c) -> double& { return c.scenario.Gr; })},
           {"M", real([](ExperimentConfig& c) -> double& { return c.scenario.M; })},
           {"B", real([](ExperimentConfig& c) -> double& { return c.scenario.B; })},
           {"Pmax", real([](ExperimentConfig& c) -> double& { return c.scenario.Pmax; })},
           {"D_SD", real([](ExperimentConfig& c) -> double& { return c.scenario.D_SD; })},
           {"D_SR",
            [](ExperimentConfig& c, const std::string& k, const std::string& v) {
              if (upper(v) == "OPTIMAL") {
                c.d_sr_optimal = true;
              } else {
                c.d_sr_optimal = false;
                c.scenario.D_SR = to_double(k, v);
              }
            }},
           {"D_RD", [](ExperimentConfig& c, const std::string& k,
                       const std::string& v) { c.scenario.D_RD = to_double(k, v); }},
       }},
      {"protocol",
       {
           {"kind",
            [](ExperimentConfig& c, const std::string& k, const std::string& v) {
              try {
                const ProtocolKind kind = parse_protocol_kind(v);
                const auto buffer = c.protocol.buffer;
                c.protocol.kind = kind;
                c.protocol.buffer = kind == ProtocolKind::GeneralL ? buffer : std::nullopt;
              } catch (const ParameterError&) {
                bad(k, "unknown protocol '" + v + "'");
              }
            }},
           {"L",
            [](ExperimentConfig& c, const std::string& k, const std::string& v) {
              const std::uint64_t L = to_u64(k, v);
              if (L < 1) bad(k, "relay buffer must hold at least one packet");
              c.protocol.buffer = L;
            }},
       }},
      {"sim",
       {
           {"mode",
            [](ExperimentConfig& c, const std::string& k, const std::string& v) {
              try {
                c.sim.mode = parse_sim_mode(v);
              } catch (const ParameterError&) {
                bad(k, "unknown mode '" + v + "'");
              }
            }},
           {"count_model",
            [](ExperimentConfig& c, const std::string& k, const std::string& v) {
              try {
                c.sim.count_model = parse_count_model(v);
              } catch (const ParameterError&) {
                bad(k, "unknown count model '" + v + "'");
              }
            }},
           {"horizon", [](ExperimentConfig& c, const std::string& k,
                          const std::string& v) { c.sim.horizon = to_u64(k, v); }},
           {"warmup", [](ExperimentConfig& c, const std::string& k,
                         const std::string& v) { c.sim.warmup = to_u64(k, v); }},
           {"seed", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.sim.seed = to_u64(k, v); }},
           {"replications",
            [](ExperimentConfig& c, const std::string& k, const std::string& v) {
              c.sim.replications = static_cast<unsigned>(to_u64(k, v));
            }},
           {"workers",
            [](ExperimentConfig& c, const std::string& k, const std::string& v) {
              c.sim.workers = static_cast<unsigned>(to_u64(k, v));
            }},
           {"queue_cap", [](ExperimentConfig& c, const std::string& k,
                            const std::string& v) { c.sim.queue_cap = to_u64(k, v); }},
           {"lambda", real([](ExperimentConfig& c) -> double& { return c.sim.lambda; })},
           {"p_SD", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.sim.p_SD = to_double(k, v); }},
           {"p_SR", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.sim.p_SR = to_double(k, v); }},
           {"p_RD", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.sim.p_RD = to_double(k, v); }},
       }},
      {"sweep",
       {
           {"variable",
            [](ExperimentConfig& c, const std::string& k, const std::string& v) {
              try {
                c.sweep.value().variable = parse_sweep_variable(v);
              } catch (const ParameterError&) {
                bad(k, "unknown sweep variable '" + v + "'");
              }
            }},
           {"lo", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.sweep->lo = to_double(k, v); }},
           {"hi", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.sweep->hi = to_double(k, v); }},
           {"steps",
            [](ExperimentConfig& c, const std::string& k, const std::string& v) {
              c.sweep->steps = static_cast<unsigned>(to_u64(k, v));
            }},
           {"simulate", [](ExperimentConfig& c, const std::string& k,
                           const std::string& v) { c.sweep->simulate = to_bool(k, v); }},
       }},
  };
  return s;
}

}  // namespace

std::string_view to_string(SweepVariable v) {
  switch (v) {
    case SweepVariable::D_SR: return "D_SR";
    case SweepVariable::Rho: return "rho";
    case SweepVariable::Pi0: return "pi0";
    case SweepVariable::Lambda: return "lambda";
  }
  return "?";
}

SweepVariable parse_sweep_variable(std::string_view name) {
  const std::string u = upper(name);
  if (u == "D_SR") return SweepVariable::D_SR;
  if (u == "RHO") return SweepVariable::Rho;
  if (u == "PI0") return SweepVariable::Pi0;
  if (u == "LAMBDA") return SweepVariable::Lambda;
  throw ParameterError("variable", "unknown sweep variable '" + std::string(name) + "'");
}

double SweepSpec::point(unsigned i) const {
  if (steps <= 1) return lo;
  if (i + 1 == steps) return hi;
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps - 1);
}

Scenario ExperimentConfig::resolved_scenario() const {
  Scenario s = scenario;
  if (d_sr_optimal) {
    s.D_RD.reset();
    s.D_SR = balanced_relay_distance(s);
  }
  return s;
}

ExperimentConfig parse_config(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("line " + std::to_string(e.line()) + ": " + e.message());
  }

  ExperimentConfig c;
  const auto& sch = schema();
  for (const auto& [section, body] : tree) {
    if (!body.data().empty()) throw ConfigError(section + ": key outside any section");
    const auto it = sch.find(section);
    if (it == sch.end()) throw ConfigError("unknown section [" + section + "]");
    if (section == "sweep") c.sweep.emplace();
    for (const auto& [key, value] : body) {
      const std::string field = section + "." + key;
      const auto setter = it->second.find(key);
      if (setter == it->second.end()) throw ConfigError("unknown key '" + field + "'");
      setter->second(c, field, trim(value.data()));
    }
  }
  if (c.protocol.kind == ProtocolKind::GeneralL && !c.protocol.buffer)
    throw ConfigError("protocol.L: GENERAL_L requires a buffer length");
  validate(c);
  return c;
}

ExperimentConfig parse_config_string(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  try {
    return parse_config(in);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void validate(const ExperimentConfig& c) {
  try {
    validate(c.resolved_scenario());
  } catch (const ParameterError& e) {
    throw ConfigError("scenario." + std::string(e.what()));
  }
  const SimSettings& s = c.sim;
  if (!(s.lambda >= 0.0 && s.lambda < 1.0)) bad("sim.lambda", "must lie in [0, 1)");
  for (const auto& [name, p] : {std::pair{"sim.p_SD", s.p_SD}, {"sim.p_SR", s.p_SR}, {"sim.p_RD", s.p_RD}})
    if (p && !(*p >= 0.0 && *p <= 1.0)) bad(name, "must lie in [0, 1]");
  if (s.replications < 1) bad("sim.replications", "must be at least 1");
  if (s.horizon < kBatches) bad("sim.horizon", "too short");
  if (s.warmup && *s.warmup >= s.horizon) bad("sim.warmup", "must be smaller than sim.horizon");
  if (c.sweep) {
    const SweepSpec& w = *c.sweep;
    if (w.steps < 1) bad("sweep.steps", "must be at least 1");
    if (w.lo > w.hi) bad("sweep.lo", "must not exceed sweep.hi");
    bool ok = true;
    switch (w.variable) {
      case SweepVariable::D_SR: ok = w.lo > 0.0 && w.hi < c.scenario.D_SD; break;
      case SweepVariable::Rho: ok = w.lo >= 0.0; break;
      case SweepVariable::Pi0: ok = w.lo >= 0.0 && w.hi <= 1.0; break;
      case SweepVariable::Lambda: ok = w.lo >= 0.0 && w.hi < 1.0; break;
    }
    if (!ok) bad("sweep.lo", "range outside the physical domain of " + std::string(to_string(w.variable)));
  }
}

std::string serialize(const ExperimentConfig& c) {
  std::ostringstream o;
  const Scenario& s = c.scenario;
  auto kv = [&](std::string_view k, const std::string& v) { o << k << " = " << v << '\n'; };
  o << "[scenario]\n";
  kv("rho", format_double(s.rho));
  kv("pi0", format_double(s.pi0));
  kv("theta", format_double(s.theta));
  kv("gamma_th", format_double(s.gamma_th));
  kv("kappa0", format_double(s.kappa0));
  kv("alpha", format_double(s.alpha));
  kv("sigma2", format_double(s.sigma2));
  kv("sigmaI2", format_double(s.sigmaI2));
  kv("sigmaP2", format_double(s.sigmaP2));
  kv("Gt", format_double(s.Gt));
  kv("Gr", format_double(s.Gr));
  kv("M", format_double(s.M));
  kv("B", format_double(s.B));
  kv("Pmax", format_double(s.Pmax));
  kv("D_SD", format_double(s.D_SD));
  kv("D_SR", c.d_sr_optimal ? std::string("optimal") : format_double(s.D_SR));
  if (s.D_RD) kv("D_RD", format_double(*s.D_RD));

  o << "\n[protocol]\n";
  kv("kind", std::string(to_string(c.protocol.kind)));
  if (c.protocol.buffer) kv("L", std::to_string(*c.protocol.buffer));

  const SimSettings& m = c.sim;
  o << "\n[sim]\n";
  kv("mode", std::string(to_string(m.mode)));
  kv("count_model", std::string(to_string(m.count_model)));
  kv("horizon", std::to_string(m.horizon));
  if (m.warmup) kv("warmup", std::to_string(*m.warmup));
  kv("seed", std::to_string(m.seed));
  kv("replications", std::to_string(m.replications));
  if (m.workers) kv("workers", std::to_string(*m.workers));
  kv("queue_cap", std::to_string(m.queue_cap));
  kv("lambda", format_double(m.lambda));
  if (m.p_SD) kv("p_SD", format_double(*m.p_SD));
  if (m.p_SR) kv("p_SR", format_double(*m.p_SR));
  if (m.p_RD) kv("p_RD", format_double(*m.p_RD));

  if (c.sweep) {
    const SweepSpec& w = *c.sweep;
    o << "\n[sweep]\n";
    kv("variable", std::string(to_string(w.variable)));
    kv("lo", format_double(w.lo));
    kv("hi", format_double(w.hi));
    kv("steps", std::to_string(w.steps));
    kv("simulate", w.simulate ? "true" : "false");
  }
  return o.str();
}

}  // namespace crs
