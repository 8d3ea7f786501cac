#include "socsamp/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace socsamp {

namespace {

double guarded(const std::function<double(const std::vector<double>&)>& fn,
               const std::vector<double>& x) {
  double v = fn(x);
  return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

}  // namespace

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& fn,
                             const std::vector<double>& start,
                             const NelderMeadOptions& options) {
  const std::size_t n = start.size();
  if (n == 0) throw std::invalid_argument("nelder_mead: zero-dimensional start");

  constexpr double kReflect = 1.0;
  constexpr double kExpand = 2.0;
  constexpr double kContract = 0.5;
  constexpr double kShrink = 0.5;

  std::vector<std::vector<double>> simplex(n + 1, start);
  for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += options.initial_step;
  std::vector<double> values(n + 1);
  for (std::size_t i = 0; i <= n; ++i) values[i] = guarded(fn, simplex[i]);

  std::vector<std::size_t> order(n + 1);
  NelderMeadResult result;
  int iter = 0;
  for (; iter < options.max_iterations; ++iter) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second_worst = order[n - 1];

    const double spread = values[worst] - values[best];
    if (std::isfinite(values[best]) && spread < options.spread_tolerance) {
      result.converged = true;
      break;
    }

    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t d = 0; d < n; ++d) centroid[d] += simplex[i][d];
    }
    for (double& c : centroid) c /= static_cast<double>(n);

    auto blend = [&](double coef) {
      std::vector<double> x(n);
      for (std::size_t d = 0; d < n; ++d)
        x[d] = centroid[d] + coef * (centroid[d] - simplex[worst][d]);
      return x;
    };

    std::vector<double> reflected = blend(kReflect);
    const double reflected_value = guarded(fn, reflected);
    if (reflected_value < values[best]) {
      std::vector<double> expanded = blend(kExpand);
      const double expanded_value = guarded(fn, expanded);
      if (expanded_value < reflected_value) {
        simplex[worst] = std::move(expanded);
        values[worst] = expanded_value;
      } else {
        simplex[worst] = std::move(reflected);
        values[worst] = reflected_value;
      }
      continue;
    }
    if (reflected_value < values[second_worst]) {
      simplex[worst] = std::move(reflected);
      values[worst] = reflected_value;
      continue;
    }
    // Contract toward the centroid (outside if the reflection improved on the
    // worst point, inside otherwise).
    const bool outside = reflected_value < values[worst];
    std::vector<double> contracted = blend(outside ? kContract : -kContract);
    const double contracted_value = guarded(fn, contracted);
    if (contracted_value < std::min(reflected_value, values[worst])) {
      simplex[worst] = std::move(contracted);
      values[worst] = contracted_value;
      continue;
    }
    // Shrink toward the best vertex.
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == best) continue;
      for (std::size_t d = 0; d < n; ++d)
        simplex[i][d] = simplex[best][d] + kShrink * (simplex[i][d] - simplex[best][d]);
      values[i] = guarded(fn, simplex[i]);
    }
  }

  const std::size_t best =
      static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
  result.x = simplex[best];
  result.value = values[best];
  result.iterations = iter;
  return result;
}

}  // namespace socsamp
