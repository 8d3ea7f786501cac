#include "socsamp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace socsamp {

namespace {

constexpr double kLogitClamp = 500.0;

// Continued fraction for I_x(a,b) via the modified Lentz method.
double incomplete_beta_cf(double x, double a, double b) {
  constexpr int kMaxIterations = 400;
  constexpr double kEps = 1e-15;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double logistic(double x) {
  x = std::clamp(x, -kLogitClamp, kLogitClamp);
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double log_logistic(double x) {
  x = std::clamp(x, -kLogitClamp, kLogitClamp);
  if (x >= 0.0) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

double log_beta_function(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

double regularized_incomplete_beta(double x, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("incomplete beta: a, b must be > 0");
  if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("incomplete beta: x outside [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double ln_front =
      a * std::log(x) + b * std::log1p(-x) - log_beta_function(a, b);
  const double front = std::exp(ln_front);
  // The continued fraction converges fastest for x < (a+1)/(a+b+2); use the
  // symmetry I_x(a,b) = 1 - I_{1-x}(b,a) on the other side.
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * incomplete_beta_cf(x, a, b) / a;
  }
  return 1.0 - front * incomplete_beta_cf(1.0 - x, b, a) / b;
}

double beta_quantile(double p, double a, double b) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("beta_quantile: p outside [0, 1]");
  if (p == 0.0) return 0.0;
  if (p == 1.0) return 1.0;
  double lo = 0.0, hi = 1.0;
  // 1e-10 interval width ~ 2^-34; a fixed 60 halvings is well past that and
  // keeps the loop branch-free.
  for (int it = 0; it < 60 && hi - lo > 1e-10; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (regularized_incomplete_beta(mid, a, b) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double student_t_two_sided_p(double t, double dof) {
  if (!(dof > 0.0)) throw std::invalid_argument("student_t_two_sided_p: dof must be > 0");
  if (!std::isfinite(t)) return 0.0;
  const double x = dof / (dof + t * t);
  return regularized_incomplete_beta(x, 0.5 * dof, 0.5);
}

double mean_of(const std::vector<double>& xs) {
  if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double sample_sd(const std::vector<double>& xs) {
  if (xs.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const double m = mean_of(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

MeanCI mean_ci95(const std::vector<double>& xs) {
  MeanCI ci;
  ci.n = xs.size();
  if (xs.empty()) {
    ci.mean = ci.lower = ci.upper = std::numeric_limits<double>::quiet_NaN();
    return ci;
  }
  ci.mean = mean_of(xs);
  if (xs.size() == 1) {
    ci.lower = ci.upper = ci.mean;
    return ci;
  }
  const double half = kZ95 * sample_sd(xs) / std::sqrt(static_cast<double>(xs.size()));
  ci.lower = ci.mean - half;
  ci.upper = ci.mean + half;
  return ci;
}

}  // namespace socsamp
