#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "socsamp/models.hpp"
#include "socsamp/panel.hpp"

namespace socsamp {

// Multinomial log likelihood sum_t sum_j n_{j,t} log theta_{j,t}. Days with
// zero new mimickers contribute 0. Returns -infinity when some option has
// n > 0 but theta == 0 (a sentinel, distinct from numeric failure).
double log_likelihood(const ModelSpec& model, const PanelDataset& panel);

struct FitResult {
  ModelSpec model;
  double log_likelihood = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> init_point;  // winning grid start, transformed coordinates
};

// Maximum likelihood fit of one family by Nelder-Mead over transformed
// coordinates: eta = 0.5 + 0.5 sigmoid(u) and alpha = sigmoid(u) keep the
// bounded parameters inside their open domains; regression betas are raw.
// The simplex is started from every point of a coarse grid
// ([-10,-1,0,1,10] per coordinate; [-1,1] for the full regression) and the
// best optimum across starts wins. gamma applies to the social-sampling
// family only and stays fixed during the fit.
FitResult fit(ModelFamily family, const PanelDataset& panel, double gamma = 1.0);

struct ProfilePoint {
  double gamma = 0.0;
  double log_likelihood = 0.0;
  double eta = 0.0;
  bool converged = false;
};

// Profile likelihood over the popularity scaling exponent: for each grid
// value, gamma is fixed and the likelihood is maximized over eta. Fit
// failures are recorded per point without aborting the sweep.
std::vector<ProfilePoint> gamma_profile(const PanelDataset& panel,
                                        const std::vector<double>& gamma_grid);

struct TraderScore {
  std::int64_t user_id = 0;
  std::int64_t score = 0;  // positive-profit days minus negative-profit days
  std::int64_t positive_days = 0;
  std::int64_t negative_days = 0;
};

// Ranks traders by score, descending; ties broken by ascending user id.
// Zero-profit days count for neither side.
std::vector<TraderScore> rank_traders(
    const std::map<std::int64_t, std::vector<double>>& daily_profits);

struct CredibleInterval {
  double lower = 0.0;
  double upper = 0.0;
  double level = 0.0;
};

// Equal-tailed credible interval of a Bernoulli rate under a uniform prior:
// quantiles of Beta(successes + 1, failures + 1).
CredibleInterval skill_credible_interval(std::int64_t successes, std::int64_t failures,
                                         double level);

// theta * total_new; the multinomial expectation of per-option new mimickers
// given the day's actual total.
std::vector<double> expected_new_mimickers(const ModelSpec& model,
                                           const MarketSnapshot& snapshot,
                                           std::int64_t total_new);

}  // namespace socsamp
