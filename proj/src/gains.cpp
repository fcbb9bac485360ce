#include "crs/gains.hpp"

#include <cmath>
#include <string>

#include "crs/error.hpp"
#include "crs/queueing.hpp"

namespace crs {

namespace {

Scenario with_relay_at(Scenario s, double d_sr) {
  s.D_SR = d_sr;
  s.D_RD.reset();
  return s;
}

}  // namespace

PathLossGain throughput_per_watt(const Scenario& s, double d_sr) {
  if (!(d_sr > 0.0 && d_sr < s.D_SD))
    throw DomainError("throughput_per_watt: relay must sit strictly between source and destination");
  const Scenario placed = with_relay_at(s, d_sr);
  const DerivedConstants k = derive_constants(placed);
  const Link sd = make_link(placed, LinkKind::SD);
  const Link sr = make_link(placed, LinkKind::SR);
  const Link rd = make_link(placed, LinkKind::RD);
  const PowerChoice c_sd = optimal_power(sd, k, s.Pmax);
  const PowerChoice c_sr = optimal_power(sr, k, s.Pmax);
  const PowerChoice c_rd = optimal_power(rd, k, s.Pmax);

  PathLossGain g;
  g.d_sr = d_sr;
  g.power_sd = c_sd.watts;
  g.power_sr = c_sr.watts;
  g.power_rd = c_rd.watts;
  g.p_sd = success_prob(sd, c_sd.watts, k, s.Pmax);
  g.p_sr = success_prob(sr, c_sr.watts, k, s.Pmax);
  g.p_rd = success_prob(rd, c_rd.watts, k, s.Pmax);
  g.clamped = c_sd.regime == PowerRegime::PowerLimited || c_sr.regime == PowerRegime::PowerLimited ||
              c_rd.regime == PowerRegime::PowerLimited;

  const double R = s.M;
  g.t_bl = R * g.p_sd;
  g.t_sdf = R * g.p_sr * g.p_rd / (g.p_sr + g.p_rd);
  g.delta_t = g.t_sdf / g.t_bl - 1.0;
  g.delta_p = (g.power_sr + g.power_rd) / g.power_sd - 1.0;
  g.delta_tp = (1.0 + g.delta_t) / (1.0 + g.delta_p) - 1.0;
  return g;
}

PlacementResult optimal_relay_position(const Scenario& s) {
  validate(s);
  PlacementResult p;
  p.c4 = placement_ratio(s.Gr, s.alpha);
  p.d_sr_star = (1.0 - p.c4) * s.D_SD;
  p.d_rd_star = s.D_SD - p.d_sr_star;

  const Scenario placed = with_relay_at(s, p.d_sr_star);
  const DerivedConstants k = derive_constants(placed);
  const double power_sr = unconstrained_optimal_power(make_link(placed, LinkKind::SR), k);
  const double power_rd = unconstrained_optimal_power(make_link(placed, LinkKind::RD), k);
  if (std::isinf(power_sr) && std::isinf(power_rd)) {
    p.power_balanced = true;  // both hops sit at Pmax with no blocking
  } else {
    p.power_balanced = std::abs(power_sr - power_rd) <= 1e-9 * std::max(power_sr, power_rd);
  }
  return p;
}

PeakPathLossGain peak_path_loss_gain(const Scenario& s) {
  const PlacementResult place = optimal_relay_position(s);
  const PathLossGain at_peak = throughput_per_watt(s, place.d_sr_star);

  PeakPathLossGain r;
  r.p_sd = at_peak.p_sd;
  r.clamped = at_peak.clamped;

  const double a = s.alpha;
  const double c4 = place.c4;
  const double hop_exponent = std::pow(c4, 2.0 * a / (a + 2.0));
  const double power_share = std::pow(s.Gr, -a / (a + 2.0)) * std::pow(1.0 - c4, a * a / (a + 2.0)) +
                             std::pow(c4, a * a / (a + 2.0));
  r.positive_gain_threshold = std::pow(2.0 * power_share, 1.0 / (hop_exponent - 1.0));
  r.positive_gain = r.p_sd < r.positive_gain_threshold;
  if (!r.clamped) {
    r.delta_tp_star = 0.5 * std::pow(r.p_sd, hop_exponent - 1.0) / power_share - 1.0;
  }
  return r;
}

double stability_gain(double zeta) {
  if (!(zeta > 0.0 && zeta <= 1.0)) throw ParameterError("zeta", "must lie in (0, 1]");
  return (1.0 - zeta) / (1.0 + zeta);
}

BufferGain buffer_gain(double zeta, double lambda) {
  BufferGain g;
  g.zeta = zeta;
  g.lambda = lambda;
  g.delta_lambda_star = stability_gain(zeta);
  if (!(lambda >= 0.0 && lambda < zeta / 2.0))
    throw InstabilityError(zeta / 2.0, "buffer_gain: arrival rate " + std::to_string(lambda) +
                                           " outside the SDF stability region");
  const double backlog = lambda / (1.0 - lambda);
  g.delta_w = lambda * backlog * (1.0 - zeta) / ((zeta - lambda) * (zeta - backlog));
  return g;
}

BufferGain buffer_gain_direct(double zeta, double lambda) {
  LinkRates rates;
  rates.p_SR = zeta;
  rates.p_RD = zeta;
  rates.lambda = lambda;
  const ProtocolAnalysis sdf = sdf_analysis(rates);
  const ProtocolAnalysis bdf = bdf_analysis(rates);
  BufferGain g;
  g.zeta = zeta;
  g.lambda = lambda;
  g.delta_lambda_star = bdf.lambda_star / sdf.lambda_star - 1.0;
  g.delta_w = 1.0 - bdf.delay / sdf.delay;
  return g;
}

double balanced_hop_success(const Scenario& s) {
  const PlacementResult place = optimal_relay_position(s);
  const Scenario placed = with_relay_at(s, place.d_sr_star);
  const DerivedConstants k = derive_constants(placed);
  return max_success_prob(make_link(placed, LinkKind::RD), k, s.Pmax);
}

double balanced_hop_success_from_direct(const Scenario& s) {
  const DerivedConstants k = derive_constants(s);
  const double p_sd = max_success_prob(make_link(s, LinkKind::SD), k, s.Pmax);
  const double a = s.alpha;
  return std::pow(p_sd, std::pow(k.c4, 2.0 * a / (a + 2.0)));
}

GainReport gain_report(const Scenario& s, double lambda) {
  GainReport r;
  r.placement = optimal_relay_position(s);
  r.path_loss = throughput_per_watt(s, r.placement.d_sr_star);
  r.peak = peak_path_loss_gain(s);
  r.zeta = balanced_hop_success(s);
  r.delta_lambda_star = stability_gain(r.zeta);
  if (lambda > 0.0 && lambda < r.zeta / 2.0) r.delta_w = buffer_gain(r.zeta, lambda).delta_w;
  r.r_bits = s.M;
  r.clamped = r.path_loss.clamped;
  return r;
}

}  // namespace crs
