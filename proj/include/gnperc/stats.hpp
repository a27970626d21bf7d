#pragma once

// Shared statistical machinery: special functions, one-sample tests, and
// the Wilson score interval used by every Monte Carlo estimate.

#include <cstddef>
#include <functional>
#include <vector>

namespace gnp::stats {

// Wilson score interval for a binomial proportion.
struct CIEstimate {
  double p_hat = 0.0;
  double lower = 0.0;
  double upper = 1.0;
  double level = 0.95;   // two-sided confidence level
  std::size_t successes = 0;
  std::size_t trials = 0;
};

CIEstimate wilson_ci(std::size_t successes, std::size_t trials, double level);

// Standard normal CDF and its inverse (Wichura's AS241, double precision).
double normal_cdf(double x);
double inverse_normal_cdf(double p);

// Regularized incomplete gamma functions P(a,x) and Q(a,x) = 1 - P(a,x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Poisson(mean) pmf and P(X <= k).
double poisson_pmf(unsigned k, double mean);
double poisson_cdf(unsigned k, double mean);

// Gamma(shape k, rate 1) CDF.
double gamma_cdf(double shape, double x);

// One-sample Kolmogorov-Smirnov test of `sample` against the CDF `cdf`.
// Returns {D, p}; p uses the asymptotic Kolmogorov distribution with the
// usual finite-n correction. The sample is copied and sorted internally.
struct KSResult {
  double statistic = 0.0;
  double p_value = 0.0;
};
KSResult ks_test(std::vector<double> sample,
                 const std::function<double(double)>& cdf);

// Chi-square goodness-of-fit p-value: counts vs expected (same length,
// expected > 0). Degrees of freedom = bins - 1 - dof_reduction.
double chi_square_gof_p(const std::vector<double>& observed,
                        const std::vector<double>& expected,
                        std::size_t dof_reduction = 0);

double mean(const std::vector<double>& xs);
double variance(const std::vector<double>& xs);  // unbiased
double median(std::vector<double> xs);

}  // namespace gnp::stats
