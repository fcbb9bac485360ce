#include <doctest.h>

#include <cmath>
#include <numbers>

#include "crs/link_model.hpp"
#include "crs/spatial.hpp"

using namespace crs;

TEST_CASE("sector geometry") {
  const double theta = std::numbers::pi / 3.0;
  CHECK(sector_area(2.0, theta) == doctest::Approx(theta * 2.0).epsilon(1e-15));
  CHECK(in_sector({1.0, 0.0, true}, 2.0, theta));
  CHECK(in_sector({1.0, 0.57, true}, 2.0, theta));    // 29.7 degrees
  CHECK_FALSE(in_sector({1.0, 0.59, true}, 2.0, theta));  // 30.5 degrees
  CHECK_FALSE(in_sector({2.1, 0.0, true}, 2.0, theta));
  CHECK_FALSE(in_sector({-1.0, 0.0, true}, 2.0, theta));
  CHECK(in_sector({-1.0, 0.0, true}, 2.0, 2.0 * std::numbers::pi));
}

TEST_CASE("clear probability oracles at the direct-link optimum") {
  const Scenario s = reference_scenario();
  const DerivedConstants k = derive_constants(s);
  const double power = optimal_power(make_link(s, LinkKind::SD), k, s.Pmax).watts;
  const double area = 0.5 * s.theta * std::pow(power, 2.0 / s.alpha);
  CHECK(area == doctest::Approx(2.699).epsilon(5e-4));
  CHECK(poisson_clear_prob(s, power) == doctest::Approx(std::exp(-s.rho * area * 0.2)).epsilon(1e-13));
  CHECK(poisson_clear_prob(s, power) == doctest::Approx(0.3397).epsilon(3e-4));
  CHECK(clear_prob(power, k) == doctest::Approx(std::pow(s.pi0, s.rho * area)).epsilon(1e-13));
  CHECK(clear_prob(power, k) < poisson_clear_prob(s, power));
}

TEST_CASE("empirical clear probability is exactly one without active PUs") {
  Scenario s = reference_scenario();
  s.rho = 0.0;
  const Link sd = make_link(s, LinkKind::SD);
  for (CountModel m : {CountModel::Poisson, CountModel::DeterministicCount})
    CHECK(empirical_clear_prob(s, sd, 30.0, 5000, m, 1).estimate == 1.0);
  s = reference_scenario();
  s.pi0 = 1.0;
  for (CountModel m : {CountModel::Poisson, CountModel::DeterministicCount})
    CHECK(empirical_clear_prob(s, sd, 30.0, 5000, m, 1).estimate == 1.0);
}

TEST_CASE("empirical clear probability matches both oracles within 3 sigma") {
  const Scenario s = reference_scenario();
  const DerivedConstants k = derive_constants(s);
  const Link sd = make_link(s, LinkKind::SD);
  const double power = optimal_power(sd, k, s.Pmax).watts;
  const std::uint64_t n = 200'000;
  const auto within = [&](double est, double p) { return std::abs(est - p) <= 3.0 * std::sqrt(p * (1 - p) / n); };
  CHECK(within(empirical_clear_prob(s, sd, std::nullopt, n, CountModel::Poisson, 7).estimate,
               poisson_clear_prob(s, power)));
  CHECK(within(empirical_clear_prob(s, sd, std::nullopt, n, CountModel::DeterministicCount, 7).estimate,
               clear_prob(power, k)));
}

TEST_CASE("wide beams use the full bounding square") {
  Scenario s = reference_scenario();
  s.theta = 1.5 * std::numbers::pi;
  const DerivedConstants k = derive_constants(s);
  const Link sd = make_link(s, LinkKind::SD);
  const double power = 10.0;
  const std::uint64_t n = 200'000;
  const double p = poisson_clear_prob(s, power);
  const double est = empirical_clear_prob(s, sd, power, n, CountModel::Poisson, 3).estimate;
  CHECK(std::abs(est - p) <= 3.0 * std::sqrt(p * (1 - p) / n));
  (void)k;
}

TEST_CASE("sampled PU fields") {
  const SectorBlockingSampler sampler(2.0, 0.8, std::numbers::pi / 3.0, 2.0, CountModel::Poisson);
  Rng rng(4);
  double inside = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const PuField f = sampler.sample_field(rng);
    for (const PrimaryUser& u : f.users) inside += in_sector(u, f.radius, f.theta);
  }
  CHECK(inside / n == doctest::Approx(sampler.expected_count()).epsilon(0.02));
}

TEST_CASE("spatial link success equals clear probability times fading survival") {
  const Scenario s = reference_scenario();
  const DerivedConstants k = derive_constants(s);
  const Link rd = make_link(s, LinkKind::RD);
  const double power = optimal_power(rd, k, s.Pmax).watts;
  const SpatialLinkSampler link(s, rd, power, CountModel::DeterministicCount);
  Rng rng(8);
  const int n = 200'000;
  int ok = 0;
  for (int i = 0; i < n; ++i) ok += link.success(rng);
  const double p = success_prob(rd, power, k, s.Pmax);
  CHECK(std::abs(ok / static_cast<double>(n) - p) <= 3.0 * std::sqrt(p * (1 - p) / n));
}

TEST_CASE("count model names") {
  CHECK(parse_count_model("poisson") == CountModel::Poisson);
  CHECK(parse_count_model(to_string(CountModel::DeterministicCount)) == CountModel::DeterministicCount);
}
