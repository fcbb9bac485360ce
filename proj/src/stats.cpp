#include "crs/stats.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>

namespace crs {

double student_t_quantile(double p, double dof) {
  return boost::math::quantile(boost::math::students_t(dof), p);
}

MeanCi mean_ci95(std::span<const double> samples) {
  MeanCi r;
  const std::size_t n = samples.size();
  if (n == 0) {
    r.mean = std::numeric_limits<double>::quiet_NaN();
    r.half_width = r.mean;
    return r;
  }
  double sum = 0.0;
  for (double x : samples) sum += x;
  r.mean = sum / static_cast<double>(n);
  if (n < 2) {
    r.half_width = std::numeric_limits<double>::quiet_NaN();
    return r;
  }
  double ss = 0.0;
  for (double x : samples) ss += (x - r.mean) * (x - r.mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  r.half_width = student_t_quantile(0.975, static_cast<double>(n - 1)) * sd / std::sqrt(static_cast<double>(n));
  return r;
}

LineFit fit_line(std::span<const double> y) {
  LineFit f;
  const std::size_t n = y.size();
  if (n < 2) return f;
  const double nd = static_cast<double>(n);
  const double x_mean = (nd - 1.0) / 2.0;
  double y_mean = 0.0;
  for (double v : y) y_mean += v;
  y_mean /= nd;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = static_cast<double>(i) - x_mean;
    sxx += dx * dx;
    sxy += dx * (y[i] - y_mean);
  }
  f.slope = sxy / sxx;
  f.intercept = y_mean - f.slope * x_mean;
  if (n > 2) {
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = y[i] - (f.intercept + f.slope * static_cast<double>(i));
      sse += e * e;
    }
    f.slope_se = std::sqrt(sse / (nd - 2.0) / sxx);
  }
  return f;
}

std::string_view to_string(StabilityVerdict v) {
  switch (v) {
    case StabilityVerdict::Stable: return "STABLE";
    case StabilityVerdict::Unstable: return "UNSTABLE";
    case StabilityVerdict::Inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

StabilityVerdict drift_verdict(std::span<const double> batch_means) {
  const std::size_t n = batch_means.size();
  if (n < 3) return StabilityVerdict::Inconclusive;
  const LineFit fit = fit_line(batch_means);
  const double dof = static_cast<double>(n - 2);

  bool increasing = true;
  for (std::size_t i = 1; i < n; ++i) increasing = increasing && batch_means[i] > batch_means[i - 1];
  const double t_stat = fit.slope_se > 0.0 ? fit.slope / fit.slope_se
                                           : (fit.slope > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
  if (increasing && t_stat > student_t_quantile(0.995, dof)) return StabilityVerdict::Unstable;
  if (std::abs(fit.slope) <= student_t_quantile(0.975, dof) * fit.slope_se) return StabilityVerdict::Stable;
  return StabilityVerdict::Inconclusive;
}

StabilityVerdict worst(StabilityVerdict a, StabilityVerdict b) {
  if (a == StabilityVerdict::Unstable || b == StabilityVerdict::Unstable) return StabilityVerdict::Unstable;
  if (a == StabilityVerdict::Inconclusive || b == StabilityVerdict::Inconclusive)
    return StabilityVerdict::Inconclusive;
  return StabilityVerdict::Stable;
}

}  // namespace crs
