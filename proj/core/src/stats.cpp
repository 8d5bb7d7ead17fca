#include "repsim/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>
#include <numeric>

#include "repsim/error.hpp"

namespace repsim {

std::string_view toString(WelchDiagnostic d) noexcept {
  switch (d) {
    case WelchDiagnostic::kNone: return "none";
    case WelchDiagnostic::kZeroVarianceEqualMeans: return "zero variance, equal means";
    case WelchDiagnostic::kZeroVarianceDifferentMeans: return "zero variance, different means";
  }
  return "unknown";
}

double mean(std::span<const double> values) {
  if (values.empty()) throw InvalidArgumentError("mean of an empty sample");
  return std::accumulate(values.begin(), values.end(), 0.0) /
         static_cast<double>(values.size());
}

double sampleVariance(std::span<const double> values) {
  if (values.size() < 2) throw InvalidArgumentError("variance needs at least 2 values");
  const double mu = mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - mu) * (v - mu);
  return ss / static_cast<double>(values.size() - 1);
}

double standardError(std::span<const double> values) {
  return std::sqrt(sampleVariance(values) / static_cast<double>(values.size()));
}

double studentTwoSidedP(double t, double df) {
  if (std::isnan(t) || !(df > 0.0)) throw InvalidArgumentError("studentTwoSidedP: bad arguments");
  if (std::isinf(t)) return 0.0;
  const boost::math::students_t_distribution<double> dist(df);
  return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))));
}

WelchResult welchTTest(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) {
    throw InvalidArgumentError("Welch's t-test needs at least 2 values per sample");
  }
  for (auto s : {a, b})
    for (double v : s)
      if (!std::isfinite(v)) throw InvalidArgumentError("Welch's t-test: non-finite value");

  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double ma = mean(a);
  const double mb = mean(b);
  const double qa = sampleVariance(a) / na;  // squared standard errors
  const double qb = sampleVariance(b) / nb;
  const double se2 = qa + qb;

  WelchResult r;
  if (se2 == 0.0) {
    r.df = na + nb - 2.0;
    if (ma == mb) {
      r.t = 0.0;
      r.p = 1.0;
      r.diagnostic = WelchDiagnostic::kZeroVarianceEqualMeans;
    } else {
      r.t = ma > mb ? std::numeric_limits<double>::infinity()
                    : -std::numeric_limits<double>::infinity();
      r.p = 0.0;
      r.diagnostic = WelchDiagnostic::kZeroVarianceDifferentMeans;
    }
    return r;
  }
  r.t = (ma - mb) / std::sqrt(se2);
  r.df = se2 * se2 / (qa * qa / (na - 1.0) + qb * qb / (nb - 1.0));
  r.p = studentTwoSidedP(r.t, r.df);
  return r;
}

std::vector<double> holmSidak(std::span<const double> pValues) {
  for (double p : pValues) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw InvalidArgumentError("holmSidak: p-values must lie in [0, 1]");
    }
  }
  const std::size_t m = pValues.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return pValues[x] < pValues[y]; });
  std::vector<double> adjusted(m);
  double running = 0.0;
  for (std::size_t rank = 0; rank < m; ++rank) {
    const double p = pValues[order[rank]];
    const double remaining = static_cast<double>(m - rank);
    // 1 - (1 - p)^k without cancellation for small p; never below p itself.
    const double adj =
        remaining == 1.0 ? p : std::max(p, -std::expm1(remaining * std::log1p(-p)));
    running = std::max(running, std::min(1.0, adj));
    adjusted[order[rank]] = running;
  }
  return adjusted;
}

}  // namespace repsim
