#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "crs/link_model.hpp"
#include "crs/rng.hpp"
#include "crs/scenario.hpp"

namespace crs {

// How many PUs populate a transmitter's interference sector in a slot.
enum class CountModel {
  Poisson,             // homogeneous Poisson field, count ~ Poisson(rho * area)
  DeterministicCount,  // exactly rho * area PUs inside the sector (see SectorBlockingSampler)
};

std::string_view to_string(CountModel m);
CountModel parse_count_model(std::string_view name);

struct PrimaryUser {
  double x = 0.0;  // km, transmitter frame: beam centred on +x
  double y = 0.0;
  bool active = false;
};

// One slot's PU snapshot around a transmitter.
struct PuField {
  std::vector<PrimaryUser> users;
  double radius = 0.0;
  double theta = 0.0;
};

bool in_sector(const PrimaryUser& u, double radius, double theta);

// Area of a beam sector of the given opening angle.
double sector_area(double radius, double theta);

// Samples, per slot, whether an active PU lies inside a transmitter's beam
// sector. The PU field is redrawn every slot and PU activity is independent
// across users and slots.
//
// Poisson: points are thrown uniformly over the sector's bounding box with a
// Poisson count, so membership is decided geometrically.
// DeterministicCount: floor(rho A) users sit in the sector, plus one user of
// fractional weight f = rho A - floor(rho A) that is active with probability
// 1 - pi0^f. The clear probability is then exactly pi0^{rho A}.
class SectorBlockingSampler {
 public:
  SectorBlockingSampler(double rho, double pi0, double theta, double radius, CountModel model);

  bool blocked(Rng& rng) const;
  PuField sample_field(Rng& rng) const;

  double area() const { return sector_area(radius_, theta_); }
  double expected_count() const { return rho_ * area(); }
  double radius() const { return radius_; }

 private:
  double rho_, pi0_, theta_, radius_;
  CountModel model_;
  double box_x0_, box_x1_, box_y0_, box_y1_;
};

// Clear probability when the PU count is Poisson: exp{-rho A (1 - pi0)}.
double poisson_clear_prob(const Scenario& s, double power);

// Per-slot success indicator of one hop in spatial mode: unblocked and the
// Rayleigh power gain clears the outage threshold.
class SpatialLinkSampler {
 public:
  SpatialLinkSampler(const Scenario& s, const Link& link, double power, CountModel model);

  bool success(Rng& rng) const;

  double power() const { return power_; }
  double fading_threshold() const { return fading_threshold_; }
  const SectorBlockingSampler& blocking() const { return blocking_; }

 private:
  double power_;
  double fading_threshold_;
  SectorBlockingSampler blocking_;
};

struct ProbabilityEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  double ci95_half_width = 0.0;
  std::uint64_t slots = 0;
};

// Fraction of `slots` independent PU snapshots with no active PU inside the
// sector of a transmitter on `link`. Without an explicit power the link's
// optimal power is used.
ProbabilityEstimate empirical_clear_prob(const Scenario& s, const Link& link, std::optional<double> power,
                                         std::uint64_t slots, CountModel model, std::uint64_t seed);

}  // namespace crs
