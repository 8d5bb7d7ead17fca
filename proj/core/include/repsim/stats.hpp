#ifndef REPSIM_STATS_HPP
#define REPSIM_STATS_HPP

#include <span>
#include <string_view>
#include <vector>

namespace repsim {

enum class WelchDiagnostic {
  kNone,
  /// Both samples have zero variance and equal means: t is undefined and
  /// reported as t = 0, p = 1.
  kZeroVarianceEqualMeans,
  /// Both samples have zero variance and different means: t is reported as
  /// +/-infinity, p = 0.
  kZeroVarianceDifferentMeans,
};

std::string_view toString(WelchDiagnostic d) noexcept;

struct WelchResult {
  double t = 0.0;
  double df = 0.0;  ///< Welch-Satterthwaite degrees of freedom
  double p = 1.0;   ///< two-sided
  WelchDiagnostic diagnostic = WelchDiagnostic::kNone;
};

/// Two-sample t-test without the equal-variance assumption. Both samples need
/// at least two finite values; throws InvalidArgumentError otherwise.
WelchResult welchTTest(std::span<const double> a, std::span<const double> b);

/// Two-sided tail probability 2 * P(T_df > |t|) of Student's t.
double studentTwoSidedP(double t, double df);

/// Holm-Sidak step-down adjusted p-values, returned in input order.
/// Throws InvalidArgumentError for values outside [0, 1].
std::vector<double> holmSidak(std::span<const double> pValues);

double mean(std::span<const double> values);
/// Sample variance (n - 1 denominator).
double sampleVariance(std::span<const double> values);
/// Standard error of the mean, sqrt(var / n).
double standardError(std::span<const double> values);

}  // namespace repsim

#endif  // REPSIM_STATS_HPP
