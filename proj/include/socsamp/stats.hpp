#pragma once

#include <cstddef>
#include <vector>

namespace socsamp {

inline constexpr double kZ95 = 1.959963984540054;

// Logistic sigmoid with the argument clamped to [-500, 500] so the kernels
// stay total without changing any representable result.
double logistic(double x);
double log_logistic(double x);

double log_beta_function(double a, double b);

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double regularized_incomplete_beta(double x, double a, double b);

// p-quantile of Beta(a, b) by bisection on I_x(a, b) to 1e-10.
double beta_quantile(double p, double a, double b);

// Two-sided p-value of a t statistic with dof degrees of freedom.
double student_t_two_sided_p(double t, double dof);

double mean_of(const std::vector<double>& xs);
double sample_sd(const std::vector<double>& xs);  // n-1 denominator; NaN for n < 2

struct MeanCI {
  double mean = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  std::size_t n = 0;
};

// Normal-approximation 95% confidence interval of the mean.
MeanCI mean_ci95(const std::vector<double>& xs);

}  // namespace socsamp
