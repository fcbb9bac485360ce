#pragma once

#include <span>
#include <string_view>

namespace crs {

double student_t_quantile(double p, double dof);

struct MeanCi {
  double mean = 0.0;
  double half_width = 0.0;  // 95 %, NaN with fewer than two samples
};

MeanCi mean_ci95(std::span<const double> samples);

// Least-squares line through (i, y[i]), i = 0..n-1.
struct LineFit {
  double slope = 0.0;
  double slope_se = 0.0;
  double intercept = 0.0;
};

LineFit fit_line(std::span<const double> y);

enum class StabilityVerdict { Stable, Unstable, Inconclusive };

std::string_view to_string(StabilityVerdict v);

// Drift test on batch means of a queue length:
//   UNSTABLE      strictly increasing and slope t-statistic above the 99.5 %
//                 one-sided Student quantile;
//   STABLE        95 % confidence interval of the slope contains zero;
//   INCONCLUSIVE  otherwise.
StabilityVerdict drift_verdict(std::span<const double> batch_means);

// Unstable dominates inconclusive dominates stable.
StabilityVerdict worst(StabilityVerdict a, StabilityVerdict b);

}  // namespace crs
