#include "crs/link_model.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "crs/error.hpp"

namespace crs {

std::string_view to_string(LinkKind kind) {
  switch (kind) {
    case LinkKind::SD: return "SD";
    case LinkKind::SR: return "SR";
    case LinkKind::RD: return "RD";
  }
  return "?";
}

std::string_view to_string(PowerRegime regime) {
  return regime == PowerRegime::InterferenceLimited ? "interference-limited" : "power-limited";
}

Link make_link(const Scenario& s, LinkKind kind) {
  switch (kind) {
    case LinkKind::SD: return {kind, s.D_SD, 1.0};
    case LinkKind::SR: return {kind, s.D_SR, s.Gr};
    case LinkKind::RD: return {kind, s.d_rd(), 1.0};
  }
  throw DomainError("unknown link kind");
}

double DerivedConstants::c2(double distance) const {
  return outage_threshold * std::pow(distance, alpha) / c0;
}

DerivedConstants derive_constants(const Scenario& s) {
  validate(s);
  DerivedConstants k;
  k.alpha = s.alpha;
  k.c0 = s.kappa0 * s.Gt / (s.sigma2 + s.sigmaI2);
  k.inr_scale = k.c0 / (s.sigmaP2 * s.gamma_th);
  // pi0 = 0 makes every PU active: ln(1/pi0) diverges and the link is always blocked.
  const double log_inv_pi0 = s.pi0 > 0.0 ? -std::log(s.pi0) : std::numeric_limits<double>::infinity();
  k.c1 = s.rho == 0.0 ? 0.0
                      : 0.5 * s.rho * s.theta * std::pow(k.inr_scale, 2.0 / s.alpha) * log_inv_pi0;
  k.c3 = (1.0 + s.alpha / 2.0) * std::pow(s.alpha / 2.0, -s.alpha / (s.alpha + 2.0));
  k.c4 = placement_ratio(s.Gr, s.alpha);
  k.outage_threshold = std::expm1(s.bits_per_hz() * std::numbers::ln2);
  return k;
}

double interference_radius(double power, const DerivedConstants& k) {
  if (!(power >= 0.0)) throw DomainError("interference_radius: power must be >= 0");
  return std::pow(k.inr_scale * power, 1.0 / k.alpha);
}

double clear_prob(double power, const DerivedConstants& k) {
  if (!(power >= 0.0)) throw DomainError("clear_prob: power must be >= 0");
  if (k.c1 == 0.0 || power == 0.0) return 1.0;
  return std::exp(-k.c1 * std::pow(power, 2.0 / k.alpha));
}

double log_success_prob(const Link& link, double power, const DerivedConstants& k) {
  const double blocking = k.c1 == 0.0 ? 0.0 : k.c1 * std::pow(power, 2.0 / k.alpha);
  const double outage = k.c2(link) / (link.rx_gain * power);
  return -blocking - outage;
}

double success_prob(const Link& link, double power, const DerivedConstants& k, double pmax) {
  if (!(power > 0.0) || power > pmax)
    throw DomainError("success_prob: power " + std::to_string(power) + " W outside (0, " +
                      std::to_string(pmax) + "]");
  return std::exp(log_success_prob(link, power, k));
}

double unconstrained_optimal_power(const Link& link, const DerivedConstants& k) {
  if (k.c1 == 0.0) return std::numeric_limits<double>::infinity();
  const double a = k.alpha;
  return std::pow(a * k.c2(link) / (2.0 * link.rx_gain * k.c1), a / (a + 2.0));
}

PowerChoice optimal_power(const Link& link, const DerivedConstants& k, double pmax) {
  if (!(pmax > 0.0)) throw DomainError("optimal_power: pmax must be positive");
  const double p = unconstrained_optimal_power(link, k);
  // Below the stationary point the objective is increasing, so clamping is optimal.
  if (p > 0.0 && p < pmax) return {p, PowerRegime::InterferenceLimited};
  return {pmax, PowerRegime::PowerLimited};
}

double max_success_prob(const Link& link, const DerivedConstants& k, double pmax) {
  return success_prob(link, optimal_power(link, k, pmax).watts, k, pmax);
}

double closed_form_max_success_prob(const Link& link, const DerivedConstants& k) {
  const double a = k.alpha;
  const double effective_c2 = k.c2(link) / link.rx_gain;
  return std::exp(-k.c3 * std::pow(k.c1, a / (a + 2.0)) * std::pow(effective_c2, 2.0 / (a + 2.0)));
}

}  // namespace crs
