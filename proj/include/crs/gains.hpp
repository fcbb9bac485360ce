#pragma once

#include <optional>

#include "crs/link_model.hpp"
#include "crs/scenario.hpp"

namespace crs {

// Throughput-per-Watt comparison of the two-hop relay path against the direct
// link, for a relay at distance d_sr on the source-destination segment.
struct PathLossGain {
  double d_sr = 0.0;
  double t_bl = 0.0;   // bits / slot, direct
  double t_sdf = 0.0;  // bits / slot, relayed
  double delta_t = 0.0;
  double delta_p = 0.0;
  double delta_tp = 0.0;
  double p_sd = 0.0, p_sr = 0.0, p_rd = 0.0;
  double power_sd = 0.0, power_sr = 0.0, power_rd = 0.0;
  bool clamped = false;  // some hop ran at Pmax
};

PathLossGain throughput_per_watt(const Scenario& s, double d_sr);

struct PlacementResult {
  double d_sr_star = 0.0;
  double d_rd_star = 0.0;
  double c4 = 0.0;
  bool power_balanced = false;  // hop powers agree to 1e-9 relative
};

PlacementResult optimal_relay_position(const Scenario& s);

struct PeakPathLossGain {
  // Closed form at the balanced placement; empty in the clamped regime.
  std::optional<double> delta_tp_star;
  bool clamped = false;
  double p_sd = 0.0;
  // Direct-link success probability below which relaying has positive gain.
  double positive_gain_threshold = 0.0;
  bool positive_gain = false;
};

PeakPathLossGain peak_path_loss_gain(const Scenario& s);

// Buffer gains of BDF over SDF with balanced hops of success probability zeta.
struct BufferGain {
  double zeta = 0.0;
  double lambda = 0.0;
  double delta_lambda_star = 0.0;
  double delta_w = 0.0;
};

// (1 - zeta) / (1 + zeta).
double stability_gain(double zeta);

// Closed forms; throws InstabilityError unless 0 <= lambda < zeta / 2.
BufferGain buffer_gain(double zeta, double lambda);

// The same two quantities computed from the SDF and BDF analyses directly.
BufferGain buffer_gain_direct(double zeta, double lambda);

// zeta as the optimized relay-destination success probability at the
// balanced placement.
double balanced_hop_success(const Scenario& s);

// zeta from the direct-link optimum, p_SD^{C4^{2a/(a+2)}}.
double balanced_hop_success_from_direct(const Scenario& s);

// Everything above for one scenario, at the balanced placement.
struct GainReport {
  PlacementResult placement;
  PathLossGain path_loss;  // evaluated at the balanced placement
  PeakPathLossGain peak;
  double zeta = 0.0;
  double delta_lambda_star = 0.0;
  std::optional<double> delta_w;  // empty when lambda is outside (0, zeta/2)
  double r_bits = 0.0;
  bool clamped = false;
};

GainReport gain_report(const Scenario& s, double lambda);

}  // namespace crs
