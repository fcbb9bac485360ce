#include "crs/queueing.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <string>

#include "crs/error.hpp"

namespace crs {

namespace {

// Stability margin: a queue whose empty probability is within this of zero
// is classified unstable.
constexpr double kStabilityMargin = 1e-12;

// Finite caps up to this size are summed directly.
constexpr std::size_t kDirectSumLimit = 1'000'000;

// sum_{k=0}^{n-1} r^k for 0 <= r <= 1.
double geometric_sum(double r, std::size_t n) {
  if (n == 0) return 0.0;
  if (r == 0.0) return 1.0;
  if (r == 1.0) return static_cast<double>(n);
  return -std::expm1(static_cast<double>(n) * std::log(r)) / (1.0 - r);
}

// sum_{k=1}^{n} k r^{k-1} for 0 <= r < 1.
double weighted_geometric_sum(double r, std::size_t n) {
  const double nd = static_cast<double>(n);
  const double rn = std::pow(r, nd);
  return (1.0 - (nd + 1.0) * rn + nd * rn * r) / ((1.0 - r) * (1.0 - r));
}

std::string fmt(double v) { return std::to_string(v); }

[[noreturn]] void unstable(ProtocolKind kind, double lambda, double lambda_star) {
  throw InstabilityError(lambda_star, std::string(to_string(kind)) + ": arrival rate " + fmt(lambda) +
                                          " is not below the stability region " + fmt(lambda_star));
}

// Source queue of a relay-less-looking birth-death chain with effective
// per-slot service probability sigma (Bernoulli arrivals, late arrival).
BirthDeathDistribution source_law(double lambda, double sigma) {
  const double mu = (1.0 - lambda) * sigma;
  if (lambda == 0.0) return {1.0, 0.0, 0.0, std::nullopt};
  return {1.0 - lambda / sigma, lambda / mu, lambda * (1.0 - sigma) / mu, std::nullopt};
}

// Relay occupancy law for a given relay arrival pressure a = (1 - qS0) p_SR.
struct RelayLaw {
  double empty = 1.0;
  double full = 0.0;
  double head = 0.0;
  double ratio = 0.0;
};

RelayLaw relay_law(double a, double p_RD, std::size_t L) {
  RelayLaw law;
  law.head = a / p_RD;
  law.ratio = a * (1.0 - p_RD) / p_RD;
  const double h = law.head;
  const double r = law.ratio;
  if (r <= 1.0) {
    law.empty = 1.0 / (1.0 + h * geometric_sum(r, L));
    law.full = law.empty * h * std::pow(r, static_cast<double>(L - 1));
  } else {
    // Scale by r^{L-1} so that long buffers with r > 1 do not overflow.
    const double t = std::pow(r, -static_cast<double>(L - 1));
    const double denom = t + h * (1.0 - t / r) / (1.0 - 1.0 / r);
    law.empty = t / denom;
    law.full = h / denom;
  }
  return law;
}

// Probability that the source finds the relay able to accept a packet:
// relay empty, or relay neither full nor successfully transmitting.
double acceptance_factor(const RelayLaw& law, double p_RD) {
  return law.empty + (1.0 - law.empty - law.full) * (1.0 - p_RD);
}

}  // namespace

std::string_view to_string(ProtocolKind kind) {
  switch (kind) {
    case ProtocolKind::BL: return "BL";
    case ProtocolKind::SDF: return "SDF";
    case ProtocolKind::BDF: return "BDF";
    case ProtocolKind::GeneralL: return "GENERAL_L";
  }
  return "?";
}

ProtocolKind parse_protocol_kind(std::string_view name) {
  std::string up(name);
  std::transform(up.begin(), up.end(), up.begin(), [](unsigned char c) { return std::toupper(c); });
  if (up == "BL") return ProtocolKind::BL;
  if (up == "SDF") return ProtocolKind::SDF;
  if (up == "BDF") return ProtocolKind::BDF;
  if (up == "GENERAL_L" || up == "L") return ProtocolKind::GeneralL;
  throw ParameterError("protocol", "unknown protocol '" + std::string(name) + "'");
}

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::Exact: return "exact";
    case Provenance::ApproxBound: return "approx-upper-stability/lower-delay";
    case Provenance::AsymptoticallyExact: return "asymptotically-exact";
    case Provenance::Approximate: return "approx-independence";
  }
  return "?";
}

ProtocolSpec ProtocolSpec::general(std::size_t L) {
  if (L < 1) throw ParameterError("L", "relay buffer must hold at least one packet");
  return {ProtocolKind::GeneralL, L};
}

std::optional<std::size_t> ProtocolSpec::relay_capacity() const {
  switch (kind) {
    case ProtocolKind::BL: return std::size_t{0};
    case ProtocolKind::SDF: return std::size_t{1};
    case ProtocolKind::BDF: return std::nullopt;
    case ProtocolKind::GeneralL: return buffer;
  }
  return std::nullopt;
}

void validate(const LinkRates& r) {
  auto prob = [](const char* field, double v) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) throw ParameterError(field, "must lie in [0, 1]");
  };
  prob("p_SD", r.p_SD);
  prob("p_SR", r.p_SR);
  prob("p_RD", r.p_RD);
  if (!std::isfinite(r.lambda) || r.lambda < 0.0 || r.lambda >= 1.0)
    throw ParameterError("lambda", "must lie in [0, 1)");
}

// ---------------------------------------------------------------------------

double BirthDeathDistribution::pmf(std::size_t n) const {
  if (n == 0) return empty_;
  if (cap_ && n > *cap_) return 0.0;
  if (head_ == 0.0 || empty_ == 0.0) return 0.0;
  if (n == 1) return empty_ * head_;
  if (ratio_ == 0.0) return 0.0;
  return std::exp(std::log(empty_) + std::log(head_) + static_cast<double>(n - 1) * std::log(ratio_));
}

double BirthDeathDistribution::full() const {
  if (!cap_ || *cap_ == 0) return 0.0;
  return pmf(*cap_);
}

double BirthDeathDistribution::total_mass() const {
  if (!cap_) {
    if (head_ == 0.0) return empty_;
    if (ratio_ >= 1.0) return std::numeric_limits<double>::infinity();
    return empty_ * (1.0 + head_ / (1.0 - ratio_));
  }
  if (*cap_ == 0) return empty_;
  if (ratio_ <= 1.0) return empty_ * (1.0 + head_ * geometric_sum(ratio_, *cap_));
  double s = empty_;
  for (std::size_t n = 1; n <= *cap_; ++n) s += pmf(n);
  return s;
}

double BirthDeathDistribution::mean() const {
  if (head_ == 0.0 || empty_ == 0.0) {
    if (!cap_ && empty_ == 0.0) return std::numeric_limits<double>::infinity();
    return 0.0;
  }
  if (!cap_) {
    if (ratio_ >= 1.0) return std::numeric_limits<double>::infinity();
    return empty_ * head_ / ((1.0 - ratio_) * (1.0 - ratio_));
  }
  if (*cap_ <= kDirectSumLimit || ratio_ >= 1.0) {
    double s = 0.0;
    for (std::size_t n = 1; n <= *cap_; ++n) s += static_cast<double>(n) * pmf(n);
    return s;
  }
  return empty_ * head_ * weighted_geometric_sum(ratio_, *cap_);
}

double mean_from_distribution(const BirthDeathDistribution& d) {
  const double c = d.empty() * d.head();
  const double r = d.ratio();
  if (d.cap() && *d.cap() == 0) return 0.0;
  if (!d.cap() && (d.empty() <= 0.0 || (c > 0.0 && r >= 1.0)))
    throw InstabilityError(0.0, "mean_from_distribution: divergent queue-length law");
  if (c == 0.0) return 0.0;

  const std::size_t limit = d.cap() ? *d.cap() : std::numeric_limits<std::size_t>::max();
  double partial = 0.0;
  double term = c;  // q(n) at n = 1
  for (std::size_t n = 1; n <= limit; ++n) {
    partial += static_cast<double>(n) * term;
    if (n == limit) return partial;
    term *= r;
    if (!d.cap()) {
      // Remainder sum_{k>n} k c r^{k-1} in closed form.
      const double nd = static_cast<double>(n);
      const double rn = std::pow(r, nd);
      const double remainder = c * ((nd + 1.0) * rn - nd * rn * r) / ((1.0 - r) * (1.0 - r));
      if (remainder <= 1e-12 * partial) return partial + remainder;
    } else if (term == 0.0) {
      return partial;
    }
  }
  return partial;
}

double little_delay(const ProtocolAnalysis& a) {
  if (a.lambda <= 0.0) throw DomainError("little_delay: undefined at zero arrival rate");
  return (mean_from_distribution(a.steady.source) + mean_from_distribution(a.steady.relay)) / a.lambda;
}

// ---------------------------------------------------------------------------

double bl_stability_region(const LinkRates& r) {
  validate(r);
  return r.p_SD;
}

double sdf_stability_region(const LinkRates& r) {
  validate(r);
  if (r.p_SR == 0.0 || r.p_RD == 0.0) return 0.0;
  return r.p_RD * r.p_SR / (r.p_RD + r.p_SR);
}

double bdf_stability_region(const LinkRates& r) {
  validate(r);
  return std::min(r.p_SR / (1.0 + r.p_SR), r.p_RD);
}

double general_l_stability_region(const LinkRates& r, std::size_t L) {
  validate(r);
  if (L < 1) throw ParameterError("L", "relay buffer must hold at least one packet");
  if (r.p_SR == 0.0 || r.p_RD == 0.0) return 0.0;
  // Saturated source (qS0 = 0): the largest service rate the source can see.
  const RelayLaw law = relay_law(r.p_SR, r.p_RD, L);
  return acceptance_factor(law, r.p_RD) * r.p_SR;
}

double stability_region(const ProtocolSpec& spec, const LinkRates& r) {
  switch (spec.kind) {
    case ProtocolKind::BL: return bl_stability_region(r);
    case ProtocolKind::SDF: return sdf_stability_region(r);
    case ProtocolKind::BDF: return bdf_stability_region(r);
    case ProtocolKind::GeneralL: return general_l_stability_region(r, spec.buffer.value_or(1));
  }
  return 0.0;
}

ProtocolAnalysis bl_analysis(const LinkRates& r) {
  ProtocolAnalysis a;
  a.protocol = ProtocolSpec::bl();
  a.lambda = r.lambda;
  a.lambda_star = bl_stability_region(r);
  a.provenance = Provenance::Exact;
  const double p = r.p_SD;
  const double lambda = r.lambda;
  if (!(p - lambda > kStabilityMargin)) unstable(ProtocolKind::BL, lambda, a.lambda_star);
  a.delay = (1.0 - lambda) / (p - lambda);
  a.steady.source = source_law(lambda, p);
  a.steady.relay = BirthDeathDistribution::degenerate();
  return a;
}

ProtocolAnalysis sdf_analysis(const LinkRates& r) {
  ProtocolAnalysis a;
  a.protocol = ProtocolSpec::sdf();
  a.lambda = r.lambda;
  a.lambda_star = sdf_stability_region(r);
  a.provenance = Provenance::ApproxBound;
  const double lambda = r.lambda;
  if (!(a.lambda_star - lambda > kStabilityMargin)) unstable(ProtocolKind::SDF, lambda, a.lambda_star);
  const double p_SR = r.p_SR;
  const double p_RD = r.p_RD;

  const double qR0 = 1.0 - lambda / p_RD;
  const double sigma = p_SR * qR0;
  a.delay = (1.0 - lambda) / (p_SR - p_SR / p_RD * lambda - lambda) + 1.0 / p_RD;
  a.steady.source = source_law(lambda, sigma);
  const double arrival_pressure = lambda / qR0;  // (1 - qS0) p_SR
  a.steady.relay = {qR0, arrival_pressure / p_RD, arrival_pressure * (1.0 - p_RD) / p_RD, std::size_t{1}};
  return a;
}

ProtocolAnalysis bdf_analysis(const LinkRates& r) {
  ProtocolAnalysis a;
  a.protocol = ProtocolSpec::bdf();
  a.lambda = r.lambda;
  a.lambda_star = bdf_stability_region(r);
  a.provenance = Provenance::AsymptoticallyExact;
  const double lambda = r.lambda;
  const double p_SR = r.p_SR;
  const double p_RD = r.p_RD;
  const double source_slack = (1.0 - lambda) * p_SR - lambda;  // qS0 > 0
  const double relay_slack = p_RD - lambda;                    // qR0 > 0
  if (!(source_slack > kStabilityMargin && relay_slack > kStabilityMargin))
    unstable(ProtocolKind::BDF, lambda, a.lambda_star);

  a.delay = (1.0 - lambda) / source_slack + (1.0 - lambda) / relay_slack;
  a.steady.source = source_law(lambda, (1.0 - lambda) * p_SR);
  const double arrival_pressure = lambda / (1.0 - lambda);
  a.steady.relay = {1.0 - lambda / p_RD, arrival_pressure / p_RD, arrival_pressure * (1.0 - p_RD) / p_RD,
                    std::nullopt};
  return a;
}

ProtocolAnalysis general_l_analysis(const LinkRates& r, std::size_t L, const SolverOptions& opts) {
  ProtocolAnalysis a;
  a.protocol = ProtocolSpec::general(L);
  a.lambda = r.lambda;
  a.lambda_star = general_l_stability_region(r, L);
  a.provenance = Provenance::Approximate;
  const double lambda = r.lambda;
  const double p_SR = r.p_SR;
  const double p_RD = r.p_RD;
  if (!(a.lambda_star - lambda > kStabilityMargin)) unstable(ProtocolKind::GeneralL, lambda, a.lambda_star);

  // Residual of the source-empty equation as a function of qS0.
  auto residual = [&](double qS0) {
    const RelayLaw law = relay_law((1.0 - qS0) * p_SR, p_RD, L);
    return 1.0 - lambda / (acceptance_factor(law, p_RD) * p_SR) - qS0;
  };

  double qS0 = 1.0;
  if (lambda > 0.0) {
    double lo = 0.0, hi = 1.0;
    double f_lo = residual(lo), f_hi = residual(hi);
    bool converged = false;
    for (int it = 0; it < opts.max_iterations; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double f_mid = residual(mid);
      if (f_mid > 0.0) {
        lo = mid;
        f_lo = f_mid;
      } else {
        hi = mid;
        f_hi = f_mid;
      }
      if (hi - lo <= opts.tolerance) {
        converged = true;
        break;
      }
    }
    if (!converged)
      throw NumericError(std::min(std::abs(f_lo), std::abs(f_hi)),
                         "general_l_analysis: bisection did not reach tolerance");
    // Final false-position step inside the bracket.
    qS0 = f_lo == f_hi ? lo : lo - f_lo * (hi - lo) / (f_hi - f_lo);
    qS0 = std::clamp(qS0, lo, hi);
    const double res = residual(qS0);
    if (!(std::abs(res) <= 1e3 * opts.tolerance + 1e-9))
      throw NumericError(res, "general_l_analysis: residual " + fmt(res) + " above tolerance");
  }

  const RelayLaw law = relay_law((1.0 - qS0) * p_SR, p_RD, L);
  if (!(qS0 > kStabilityMargin && law.empty > kStabilityMargin && law.full < 1.0 - kStabilityMargin))
    unstable(ProtocolKind::GeneralL, lambda, a.lambda_star);

  const double sigma = acceptance_factor(law, p_RD) * p_SR;
  a.steady.source = source_law(lambda, sigma);
  a.steady.relay = {law.empty, law.head, law.ratio, L};
  if (lambda == 0.0) {
    a.delay = 1.0 / p_SR + 1.0 / p_RD;
  } else {
    a.delay = (a.steady.source.mean() + a.steady.relay.mean()) / lambda;
  }
  return a;
}

ProtocolAnalysis analyze(const ProtocolSpec& spec, const LinkRates& r) {
  switch (spec.kind) {
    case ProtocolKind::BL: return bl_analysis(r);
    case ProtocolKind::SDF: return sdf_analysis(r);
    case ProtocolKind::BDF: return bdf_analysis(r);
    case ProtocolKind::GeneralL: return general_l_analysis(r, spec.buffer.value_or(1));
  }
  throw DomainError("analyze: unknown protocol");
}

}  // namespace crs
