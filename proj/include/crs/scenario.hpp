#pragma once

#include <numbers>
#include <optional>

namespace crs {

// Physical and topological parameters of a source / relay / destination
// system sharing spectrum with a field of primary users.
//
// Units are fixed across the project: distances in km, powers in W,
// rho in PUs per km^2. kappa0 is dimensionless for km distances.
struct Scenario {
  double rho = 2.0;                       // PU spatial density (per km^2)
  double pi0 = 0.8;                       // PU inactivity probability per slot
  double theta = std::numbers::pi / 3.0;  // transmit beamwidth (rad)
  double gamma_th = 1.0;                  // PU INR threshold
  double kappa0 = 1.0;                    // path-loss coefficient
  double alpha = 4.0;                     // path-loss exponent
  double sigma2 = 1.0;                    // receiver noise power (W)
  double sigmaI2 = 1.0;                   // aggregate PU interference at SU receivers (W)
  double sigmaP2 = 1.0;                   // noise power at PU receivers (W)
  double Gt = 2.0;                        // transmit antenna gain
  double Gr = 2.0;                        // relay receive antenna gain
  double M = 16000.0;                     // packet size (bits)
  double B = 16000.0;                     // bandwidth (Hz)
  double Pmax = 100.0;                    // per-node transmit power cap (W)
  double D_SD = 2.0;                      // source to destination (km)
  double D_SR = 1.0;                      // source to relay (km)
  std::optional<double> D_RD;             // explicit relay to destination; collinear if unset

  double pi1() const { return 1.0 - pi0; }
  double bits_per_hz() const { return M / B; }
  double d_rd() const { return D_RD ? *D_RD : D_SD - D_SR; }
};

// Throws ParameterError naming the first offending field.
void validate(const Scenario& s);

// Relay-to-source distance ratio complement: G_r^{-1/a} / (1 + G_r^{-1/a}).
double placement_ratio(double Gr, double alpha);

// Source-relay distance that balances the two hop powers, (1 - C4) * D_SD.
double balanced_relay_distance(const Scenario& s);

// Numerical-discussion parameter set with the relay at the balanced position.
Scenario reference_scenario();

}  // namespace crs
