#include <doctest.h>

#include <cmath>
#include <functional>
#include <vector>

#include "crs/error.hpp"
#include "crs/queueing.hpp"
#include "oracles.hpp"

using namespace crs;

namespace {

LinkRates rates(double p_sr, double p_rd, double lambda, double p_sd = 0.0) {
  LinkRates r;
  r.p_SD = p_sd;
  r.p_SR = p_sr;
  r.p_RD = p_rd;
  r.lambda = lambda;
  return r;
}

// Stationary law of a discrete-time birth-death chain by solving the balance
// equations on a truncated state space.
std::vector<double> chain_law(const std::function<double(std::size_t)>& up,
                              const std::function<double(std::size_t)>& down, std::size_t n) {
  std::vector<double> q(n + 1);
  q[0] = 1.0;
  for (std::size_t k = 1; k <= n; ++k) q[k] = q[k - 1] * up(k - 1) / down(k);
  double s = 0.0;
  for (double v : q) s += v;
  for (double& v : q) v /= s;
  return q;
}

}  // namespace

TEST_CASE("BL examples") {
  CHECK(bl_analysis(rates(0, 0, 0.5, 1.0)).delay == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(bl_analysis(rates(0, 0, 0.0, 0.5)).delay == doctest::Approx(2.0).epsilon(1e-15));
  const ProtocolAnalysis a = bl_analysis(rates(0, 0, 0.05, 0.1641));
  CHECK(a.lambda_star == 0.1641);
  CHECK(a.delay == doctest::Approx(0.95 / 0.1141).epsilon(1e-14));
  CHECK(a.delay == doctest::Approx(8.326).epsilon(1e-4));
  CHECK(std::abs(little_delay(a) / a.delay - 1.0) < 1e-9);
  CHECK(a.steady.qS0() == doctest::Approx(1.0 - 0.05 / 0.1641).epsilon(1e-14));
}

TEST_CASE("BL source law solves the late-arrival balance equations") {
  const double p = 0.3, lambda = 0.2;
  const ProtocolAnalysis a = bl_analysis(rates(0, 0, lambda, p));
  // Up from n: arrival without departure; down from n >= 1: departure without arrival.
  const auto law = chain_law([&](std::size_t n) { return n == 0 ? lambda : lambda * (1 - p); },
                             [&](std::size_t) { return p * (1 - lambda); }, 4000);
  for (std::size_t n = 0; n < 30; ++n) CHECK(a.steady.q_S(n) == doctest::Approx(law[n]).epsilon(1e-10));
}

TEST_CASE("instability errors carry the stability region") {
  try {
    bl_analysis(rates(0, 0, 0.2, 0.2));
    FAIL("expected InstabilityError");
  } catch (const InstabilityError& e) {
    CHECK(e.lambda_star() == 0.2);
  }
  CHECK_THROWS_AS(sdf_analysis(rates(0.8, 0.8, 0.4)), InstabilityError);
  CHECK_THROWS_AS(bdf_analysis(rates(0.8, 0.3, 0.3)), InstabilityError);
  CHECK_THROWS_AS(general_l_analysis(rates(0.8, 0.8, 0.45), 4), InstabilityError);
}

TEST_CASE("SDF examples") {
  CHECK(sdf_stability_region(rates(1, 1, 0)) == 0.5);
  CHECK(sdf_analysis(rates(0.6, 0.7, 0.0)).delay == doctest::Approx(1 / 0.6 + 1 / 0.7).epsilon(1e-14));
  const ProtocolAnalysis a = sdf_analysis(rates(0.8, 0.8, 0.3));
  CHECK(a.delay == doctest::Approx(4.75).epsilon(1e-13));
  CHECK(a.steady.qR0() == doctest::Approx(1.0 - 0.3 / 0.8).epsilon(1e-14));
  CHECK(a.lambda_star == doctest::Approx(0.4).epsilon(1e-15));
}

TEST_CASE("BDF examples") {
  CHECK(bdf_stability_region(rates(1, 1, 0)) == 0.5);
  CHECK(bdf_stability_region(rates(0.8, 0.3, 0)) == doctest::Approx(0.3));
  CHECK(bdf_stability_region(rates(0.8, 0.9, 0)) == doctest::Approx(0.8 / 1.8).epsilon(1e-15));
  const ProtocolAnalysis a = bdf_analysis(rates(0.8, 0.8, 0.3));
  CHECK(a.delay == doctest::Approx(0.7 / 0.26 + 0.7 / 0.5).epsilon(1e-13));
  CHECK(a.delay == doctest::Approx(4.0923).epsilon(1e-4));
  CHECK(a.delay < sdf_analysis(rates(0.8, 0.8, 0.3)).delay);
  CHECK(bdf_analysis(rates(1, 1, 0.45)).delay == doctest::Approx(6.5).epsilon(1e-13));
}

TEST_CASE("general L reduces to SDF at L = 1") {
  const LinkRates r = rates(0.7, 0.55, 0.2);
  const ProtocolAnalysis g = general_l_analysis(r, 1);
  const ProtocolAnalysis s = sdf_analysis(r);
  CHECK(std::abs(g.delay - s.delay) <= 1e-10 * s.delay);
  CHECK(std::abs(g.steady.qS0() - s.steady.qS0()) <= 1e-10);
  CHECK(std::abs(g.steady.qR0() - s.steady.qR0()) <= 1e-10);
  CHECK(std::abs(g.lambda_star - s.lambda_star) <= 1e-12);
  CHECK(g.provenance == Provenance::Approximate);
}

TEST_CASE("general L approaches BDF for long buffers") {
  const LinkRates r = rates(0.8, 0.8, 0.3);
  const ProtocolAnalysis g = general_l_analysis(r, 64);
  const ProtocolAnalysis b = bdf_analysis(r);
  CHECK(std::abs(g.delay - b.delay) <= 1e-6 * b.delay);
  CHECK(std::abs(g.steady.qS0() - b.steady.qS0()) <= 1e-6);
}

TEST_CASE("general L on an empty system") {
  const ProtocolAnalysis g = general_l_analysis(rates(0.6, 0.4, 0.0), 5);
  CHECK(g.steady.qS0() == 1.0);
  CHECK(g.steady.qR0() == 1.0);
  CHECK(g.delay == doctest::Approx(1 / 0.6 + 1 / 0.4).epsilon(1e-14));
}

TEST_CASE("general L handles relay-bottleneck buffers without overflow") {
  const LinkRates r = rates(0.95, 0.2, 0.15);
  for (std::size_t L : {1u, 8u, 200u, 5000u}) {
    const double star = general_l_stability_region(r, L);
    CHECK(std::isfinite(star));
    if (r.lambda < star) {
      const ProtocolAnalysis g = general_l_analysis(r, L);
      CHECK(std::isfinite(g.delay));
      CHECK(g.steady.relay.total_mass() == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("mean from distribution") {
  CHECK(mean_from_distribution(BirthDeathDistribution::degenerate()) == 0.0);
  const BirthDeathDistribution geo(0.5, 0.5, 0.5, std::nullopt);  // q(n) = 0.5^{n+1}
  CHECK(mean_from_distribution(geo) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(mean_from_distribution(BirthDeathDistribution(0.1, 1.0, 1.0, std::nullopt)), InstabilityError);
  const BirthDeathDistribution capped(0.25, 1.0, 2.0, std::size_t{3});
  CHECK(mean_from_distribution(capped) == doctest::Approx(0.25 * (1 + 2 * 2 + 3 * 4)).epsilon(1e-14));
}

TEST_CASE("property: Little delays from the distributions equal the closed forms") {
  oracle::Gen gen(21);
  for (int n = 0; n < 500; ++n) {
    const double p_sr = gen.uniform(0.05, 1.0), p_rd = gen.uniform(0.05, 1.0);
    LinkRates r = rates(p_sr, p_rd, 0.0, gen.uniform(0.05, 1.0));
    r.lambda = gen.uniform(0.001, 0.99) * sdf_stability_region(r);
    const ProtocolAnalysis s = sdf_analysis(r);
    const ProtocolAnalysis b = bdf_analysis(r);
    CHECK(std::abs(little_delay(s) / s.delay - 1.0) < 1e-9);
    CHECK(std::abs(little_delay(b) / b.delay - 1.0) < 1e-9);
    if (r.lambda < r.p_SD * 0.99) {
      const ProtocolAnalysis l = bl_analysis(r);
      CHECK(std::abs(little_delay(l) / l.delay - 1.0) < 1e-9);
    }
    CHECK(s.steady.source.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.steady.relay.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(b.steady.relay.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("property: buffering never shrinks the stability region") {
  oracle::Gen gen(22);
  for (int n = 0; n < 300; ++n) {
    const LinkRates r = rates(gen.uniform(0.05, 1.0), gen.uniform(0.05, 1.0), 0.0);
    CHECK(bdf_stability_region(r) >= sdf_stability_region(r) - 1e-15);
  }
}

TEST_CASE("property: with balanced hops BDF delay is below SDF delay") {
  oracle::Gen gen(25);
  for (int n = 0; n < 300; ++n) {
    const double zeta = gen.uniform(0.05, 1.0);
    LinkRates r = rates(zeta, zeta, 0.0);
    r.lambda = gen.uniform(0.01, 0.99) * sdf_stability_region(r);
    CHECK(bdf_analysis(r).delay < sdf_analysis(r).delay);
  }
}

TEST_CASE("unbalanced hops can reverse the closed-form delay order") {
  const LinkRates r = rates(0.3, 0.1, 0.0375);
  CHECK(bdf_analysis(r).delay > sdf_analysis(r).delay);
}

TEST_CASE("property: longer relay buffers enlarge the region") {
  oracle::Gen gen(23);
  for (int n = 0; n < 60; ++n) {
    LinkRates r = rates(gen.uniform(0.1, 1.0), gen.uniform(0.1, 1.0), 0.0);
    r.lambda = gen.uniform(0.05, 0.95) * sdf_stability_region(r);
    double prev_star = 0.0;
    for (std::size_t L : {1u, 2u, 3u, 5u, 8u, 16u, 32u}) {
      const ProtocolAnalysis g = general_l_analysis(r, L);
      CHECK(g.lambda_star >= prev_star - 1e-12);
      prev_star = g.lambda_star;
    }
  }
}

TEST_CASE("property: any relay buffer beats L = 1 and the delay tends to BDF") {
  oracle::Gen gen(26);
  for (int n = 0; n < 60; ++n) {
    const double zeta = gen.uniform(0.1, 1.0);
    LinkRates r = rates(zeta, zeta, 0.0);
    r.lambda = gen.uniform(0.05, 0.95) * sdf_stability_region(r);
    const double sdf = sdf_analysis(r).delay;
    for (std::size_t L : {2u, 3u, 5u, 8u, 16u, 32u}) CHECK(general_l_analysis(r, L).delay < sdf);
    CHECK(general_l_analysis(r, 256).delay == doctest::Approx(bdf_analysis(r).delay).epsilon(1e-6));
  }
}

TEST_CASE("general L delay overshoots the BDF limit at small L") {
  const LinkRates r = rates(0.6, 0.6, 0.15);
  const double d3 = general_l_analysis(r, 3).delay;
  const double d5 = general_l_analysis(r, 5).delay;
  CHECK(d3 < d5);
  CHECK(d5 < bdf_analysis(r).delay);
}

TEST_CASE("property: delay strictly increasing in the arrival rate") {
  oracle::Gen gen(24);
  for (int n = 0; n < 100; ++n) {
    LinkRates r = rates(gen.uniform(0.1, 1.0), gen.uniform(0.1, 1.0), 0.0, gen.uniform(0.1, 1.0));
    for (const ProtocolSpec& p : {ProtocolSpec::bl(), ProtocolSpec::sdf(), ProtocolSpec::bdf(), ProtocolSpec::general(4)}) {
      const double star = stability_region(p, r);
      double prev = 0.0;
      for (int i = 0; i < 20; ++i) {
        r.lambda = star * i / 20.0;
        const double d = analyze(p, r).delay;
        CHECK(d > prev);
        CHECK(std::isfinite(d));
        prev = d;
      }
    }
  }
}

TEST_CASE("rate validation") {
  CHECK_THROWS_AS(bl_analysis(rates(0, 0, 1.0, 0.5)), ParameterError);
  CHECK_THROWS_AS(sdf_analysis(rates(1.2, 0.5, 0.1)), ParameterError);
  CHECK_THROWS_AS(ProtocolSpec::general(0), ParameterError);
  CHECK(parse_protocol_kind("bdf") == ProtocolKind::BDF);
  CHECK(parse_protocol_kind(to_string(ProtocolKind::GeneralL)) == ProtocolKind::GeneralL);
  CHECK_THROWS_AS(parse_protocol_kind("XYZ"), ParameterError);
}
