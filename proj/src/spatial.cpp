#include "crs/spatial.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <string>

#include "crs/error.hpp"

namespace crs {

std::string_view to_string(CountModel m) {
  return m == CountModel::Poisson ? "POISSON" : "DETERMINISTIC_COUNT";
}

CountModel parse_count_model(std::string_view name) {
  std::string up(name);
  std::transform(up.begin(), up.end(), up.begin(), [](unsigned char c) { return std::toupper(c); });
  if (up == "POISSON") return CountModel::Poisson;
  if (up == "DETERMINISTIC_COUNT" || up == "DETERMINISTIC") return CountModel::DeterministicCount;
  throw ParameterError("count_model", "unknown count model '" + std::string(name) + "'");
}

bool in_sector(const PrimaryUser& u, double radius, double theta) {
  if (u.x * u.x + u.y * u.y > radius * radius) return false;
  if (theta >= 2.0 * std::numbers::pi) return true;
  return std::abs(std::atan2(u.y, u.x)) <= theta / 2.0;
}

double sector_area(double radius, double theta) { return 0.5 * theta * radius * radius; }

SectorBlockingSampler::SectorBlockingSampler(double rho, double pi0, double theta, double radius, CountModel model)
    : rho_(rho), pi0_(pi0), theta_(theta), radius_(radius), model_(model) {
  const double half = theta / 2.0;
  if (half <= std::numbers::pi / 2.0) {
    box_x0_ = 0.0;
    box_x1_ = radius;
    box_y0_ = -radius * std::sin(half);
    box_y1_ = radius * std::sin(half);
  } else {
    box_x0_ = -radius;
    box_x1_ = radius;
    box_y0_ = -radius;
    box_y1_ = radius;
  }
}

bool SectorBlockingSampler::blocked(Rng& rng) const {
  const double pi1 = 1.0 - pi0_;
  if (rho_ == 0.0 || radius_ == 0.0 || pi1 == 0.0) return false;

  if (model_ == CountModel::DeterministicCount) {
    const double n = expected_count();
    const double whole = std::floor(n);
    const auto count = static_cast<std::uint64_t>(whole);
    bool hit = false;
    for (std::uint64_t i = 0; i < count; ++i) hit = rng.bernoulli(pi1) || hit;
    const double frac = n - whole;
    if (frac > 0.0) hit = rng.bernoulli(-std::expm1(frac * std::log(pi0_))) || hit;
    return hit;
  }

  const double box_area = (box_x1_ - box_x0_) * (box_y1_ - box_y0_);
  const std::uint64_t count = rng.poisson(rho_ * box_area);
  bool hit = false;
  for (std::uint64_t i = 0; i < count; ++i) {
    // Position is only needed for active users.
    if (!rng.bernoulli(pi1)) continue;
    PrimaryUser u;
    u.x = box_x0_ + (box_x1_ - box_x0_) * rng.uniform();
    u.y = box_y0_ + (box_y1_ - box_y0_) * rng.uniform();
    u.active = true;
    hit = in_sector(u, radius_, theta_) || hit;
  }
  return hit;
}

PuField SectorBlockingSampler::sample_field(Rng& rng) const {
  PuField field;
  field.radius = radius_;
  field.theta = theta_;
  const double pi1 = 1.0 - pi0_;
  if (model_ == CountModel::DeterministicCount) {
    const auto count = static_cast<std::uint64_t>(std::floor(expected_count()));
    for (std::uint64_t i = 0; i < count; ++i) {
      const double r = radius_ * std::sqrt(rng.uniform());
      const double phi = theta_ * (rng.uniform() - 0.5);
      field.users.push_back({r * std::cos(phi), r * std::sin(phi), rng.bernoulli(pi1)});
    }
    return field;
  }
  const double box_area = (box_x1_ - box_x0_) * (box_y1_ - box_y0_);
  const std::uint64_t count = rng.poisson(rho_ * box_area);
  for (std::uint64_t i = 0; i < count; ++i) {
    PrimaryUser u;
    u.x = box_x0_ + (box_x1_ - box_x0_) * rng.uniform();
    u.y = box_y0_ + (box_y1_ - box_y0_) * rng.uniform();
    u.active = rng.bernoulli(pi1);
    field.users.push_back(u);
  }
  return field;
}

double poisson_clear_prob(const Scenario& s, double power) {
  const DerivedConstants k = derive_constants(s);
  const double area = sector_area(interference_radius(power, k), s.theta);
  return std::exp(-s.rho * area * s.pi1());
}

SpatialLinkSampler::SpatialLinkSampler(const Scenario& s, const Link& link, double power, CountModel model)
    : power_(power),
      fading_threshold_(derive_constants(s).c2(link) / (link.rx_gain * power)),
      blocking_(s.rho, s.pi0, s.theta, interference_radius(power, derive_constants(s)), model) {
  if (!(power > 0.0)) throw DomainError("spatial link: power must be positive");
}

bool SpatialLinkSampler::success(Rng& rng) const {
  const bool clear = !blocking_.blocked(rng);
  const bool faded_ok = rng.exponential() > fading_threshold_;
  return clear && faded_ok;
}

ProbabilityEstimate empirical_clear_prob(const Scenario& s, const Link& link, std::optional<double> power,
                                         std::uint64_t slots, CountModel model, std::uint64_t seed) {
  const DerivedConstants k = derive_constants(s);
  const double watts = power ? *power : optimal_power(link, k, s.Pmax).watts;
  if (!(watts >= 0.0)) throw DomainError("empirical_clear_prob: power must be >= 0");
  if (slots == 0) throw ParameterError("slots", "must be positive");
  const SectorBlockingSampler sampler(s.rho, s.pi0, s.theta, interference_radius(watts, k), model);
  Rng rng(seed);
  std::uint64_t clear = 0;
  for (std::uint64_t t = 0; t < slots; ++t)
    if (!sampler.blocked(rng)) ++clear;
  ProbabilityEstimate e;
  e.slots = slots;
  e.estimate = static_cast<double>(clear) / static_cast<double>(slots);
  e.std_error = std::sqrt(e.estimate * (1.0 - e.estimate) / static_cast<double>(slots));
  e.ci95_half_width = 1.959963984540054 * e.std_error;
  return e;
}

}  // namespace crs
