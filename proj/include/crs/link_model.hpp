#pragma once

#include <string_view>

#include "crs/scenario.hpp"

namespace crs {

enum class LinkKind { SD, SR, RD };

std::string_view to_string(LinkKind kind);

// One hop. rx_gain is G_r for the relay-receive hop and 1 otherwise.
struct Link {
  LinkKind kind = LinkKind::SD;
  double distance = 1.0;  // km
  double rx_gain = 1.0;
};

// Builds the hop of the given kind from the scenario geometry.
Link make_link(const Scenario& s, LinkKind kind);

// Scenario-level constants shared by all links.
struct DerivedConstants {
  double alpha = 4.0;
  double c0 = 0.0;              // kappa0 * Gt / (sigma2 + sigmaI2)
  double c1 = 0.0;              // blocking exponent per W^{2/alpha}
  double c3 = 0.0;              // (1 + a/2) (a/2)^{-a/(a+2)}
  double c4 = 0.0;              // balanced placement ratio
  double outage_threshold = 0;  // 2^{M/B} - 1
  double inr_scale = 0.0;       // C0 / (sigmaP2 * gamma_th)

  // Fading outage coefficient (W) for a hop of the given length.
  double c2(double distance) const;
  double c2(const Link& link) const { return c2(link.distance); }
};

DerivedConstants derive_constants(const Scenario& s);

// Radius (km) of the PU region whose INR would exceed the threshold.
double interference_radius(double power, const DerivedConstants& k);

// Probability that no PU inside the beam sector is active,
// exp{-C1 P^{2/alpha}}.
double clear_prob(double power, const DerivedConstants& k);

// log of the per-slot packet success probability; no Pmax check.
double log_success_prob(const Link& link, double power, const DerivedConstants& k);

// Per-slot packet success probability for 0 < power <= pmax.
double success_prob(const Link& link, double power, const DerivedConstants& k, double pmax);

enum class PowerRegime { InterferenceLimited, PowerLimited };

std::string_view to_string(PowerRegime regime);

struct PowerChoice {
  double watts = 0.0;
  PowerRegime regime = PowerRegime::InterferenceLimited;
};

// Stationary point of the success probability, ignoring Pmax. Infinite when
// there is no PU blocking.
double unconstrained_optimal_power(const Link& link, const DerivedConstants& k);

// Maximizer of success_prob over (0, pmax].
PowerChoice optimal_power(const Link& link, const DerivedConstants& k, double pmax);

// success_prob at optimal_power.
double max_success_prob(const Link& link, const DerivedConstants& k, double pmax);

// Closed-form maximum for the interference-limited regime (no clamping):
// exp{-C3 C1^{a/(a+2)} (C2/g)^{2/(a+2)}}.
double closed_form_max_success_prob(const Link& link, const DerivedConstants& k);

}  // namespace crs
