#include "crs/scenario.hpp"

#include <cmath>
#include <string>

#include "crs/error.hpp"

namespace crs {

namespace {

void require_finite(const char* field, double v) {
  if (!std::isfinite(v)) throw ParameterError(field, "must be finite");
}

void require_nonnegative(const char* field, double v) {
  require_finite(field, v);
  if (v < 0.0) throw ParameterError(field, "must be non-negative, got " + std::to_string(v));
}

void require_positive(const char* field, double v) {
  require_finite(field, v);
  if (v <= 0.0) throw ParameterError(field, "must be positive, got " + std::to_string(v));
}

}  // namespace

void validate(const Scenario& s) {
  require_nonnegative("rho", s.rho);
  require_finite("pi0", s.pi0);
  if (s.pi0 < 0.0 || s.pi0 > 1.0) throw ParameterError("pi0", "must lie in [0, 1]");
  require_finite("theta", s.theta);
  if (s.theta <= 0.0 || s.theta > 2.0 * std::numbers::pi)
    throw ParameterError("theta", "must lie in (0, 2*pi]");
  require_positive("gamma_th", s.gamma_th);
  require_positive("kappa0", s.kappa0);
  require_finite("alpha", s.alpha);
  // alpha = 2 is admitted: every closed form stays finite there.
  if (s.alpha < 2.0) throw ParameterError("alpha", "must be >= 2");
  require_nonnegative("sigma2", s.sigma2);
  require_nonnegative("sigmaI2", s.sigmaI2);
  if (s.sigma2 + s.sigmaI2 <= 0.0)
    throw ParameterError("sigma2", "sigma2 + sigmaI2 must be positive");
  require_positive("sigmaP2", s.sigmaP2);
  require_finite("Gt", s.Gt);
  if (s.Gt < 1.0) throw ParameterError("Gt", "must be >= 1");
  require_finite("Gr", s.Gr);
  if (s.Gr < 1.0) throw ParameterError("Gr", "must be >= 1");
  require_positive("M", s.M);
  require_positive("B", s.B);
  require_positive("Pmax", s.Pmax);
  require_positive("D_SD", s.D_SD);
  require_positive("D_SR", s.D_SR);
  if (s.D_RD) {
    require_positive("D_RD", *s.D_RD);
  } else if (s.D_SR >= s.D_SD) {
    throw ParameterError("D_SR", "collinear relay must satisfy D_SR < D_SD");
  }
}

double placement_ratio(double Gr, double alpha) {
  const double g = std::pow(Gr, -1.0 / alpha);
  return g / (1.0 + g);
}

double balanced_relay_distance(const Scenario& s) {
  return (1.0 - placement_ratio(s.Gr, s.alpha)) * s.D_SD;
}

Scenario reference_scenario() {
  Scenario s;
  s.D_SR = balanced_relay_distance(s);
  return s;
}

}  // namespace crs
