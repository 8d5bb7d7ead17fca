// Independent reference implementations used only by tests. They share no
// code with the library beyond the Matrix container and are written for
// obviousness, not speed.
#ifndef REPSIM_TESTS_ORACLES_HPP
#define REPSIM_TESTS_ORACLES_HPP

#include <vector>

#include "repsim/matrix.hpp"

namespace repsim::oracle {

using Dense = std::vector<std::vector<double>>;

Dense toDense(const Matrix& m);
Dense multiply(const Dense& a, const Dense& b);
Dense transpose(const Dense& a);

/// Triple-loop product.
Matrix naiveMatmul(const Matrix& a, const Matrix& b);

/// K_ij = sum_c x_ic x_jc by explicit double loop.
Dense naiveGram(const Matrix& x);

/// H K H with H = I - 11^T/n built explicitly.
Dense explicitCentering(const Dense& k);

/// vec(HKH) . vec(HLH) / (m-1)^2 with explicit H products.
double naiveHsic0(const Dense& k, const Dense& l);

/// Unbiased HSIC evaluated term by term: K~, L~ materialized, K~L~ formed by
/// explicit product, traces and 1^T M 1 sums taken by loops.
double naiveHsic1(const Dense& k, const Dense& l);

/// Linear CKA straight from its definition via the naive HSIC routines.
double naiveCkaBiased(const Matrix& x, const Matrix& y);
double naiveCkaUnbiased(const Matrix& x, const Matrix& y);

/// Regularized incomplete beta I_x(a, b) by Lentz's continued fraction.
double incompleteBeta(double a, double b, double x);

struct WelchOracle {
  double t;
  double df;
  double p;
};

/// Textbook Welch test; p from the incomplete-beta form of the t tail.
WelchOracle welch(const std::vector<double>& a, const std::vector<double>& b);

/// Holm-Sidak step-down with std::pow, stepped exactly as written in
/// textbooks: sort, adjust, running max, clip, unsort.
std::vector<double> holmSidak(const std::vector<double>& p);

}  // namespace repsim::oracle

#endif  // REPSIM_TESTS_ORACLES_HPP
