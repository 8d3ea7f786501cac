#include "socsamp/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "socsamp/nelder_mead.hpp"
#include "socsamp/stats.hpp"

namespace socsamp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// |u| is capped at 30 so the sigmoid stays strictly inside (0, 1) in double
// precision and eta/alpha never collapse onto their closed bounds.
double bounded_sigmoid(double u) { return logistic(std::clamp(u, -30.0, 30.0)); }
double bounded_eta(double u) { return 0.5 + 0.5 * bounded_sigmoid(u); }
double bounded_alpha(double u) { return bounded_sigmoid(u); }

// Builds a ModelSpec from the optimizer's coordinate vector.
ModelSpec model_from_params(ModelFamily family, const std::vector<double>& u, double gamma) {
  switch (family) {
    case ModelFamily::social_sampling:
      return SocialSampling{bounded_eta(u[0]), gamma};
    case ModelFamily::performance:
      return Performance{bounded_eta(u[0])};
    case ModelFamily::additive:
      return Additive{bounded_alpha(u[0]), bounded_eta(u[1])};
    case ModelFamily::performance_regression:
      return PerformanceRegression{u[0], u[1]};
    case ModelFamily::full_regression:
      return FullRegression{u[0], u[1], u[2], u[3]};
    case ModelFamily::popularity:
      return Popularity{};
  }
  throw std::invalid_argument("fit: unknown family");
}

std::size_t free_parameter_count(ModelFamily family) {
  switch (family) {
    case ModelFamily::social_sampling:
    case ModelFamily::performance:
      return 1;
    case ModelFamily::additive:
    case ModelFamily::performance_regression:
      return 2;
    case ModelFamily::full_regression:
      return 4;
    case ModelFamily::popularity:
      return 0;
  }
  throw std::invalid_argument("fit: unknown family");
}

std::vector<std::vector<double>> grid_starts(ModelFamily family) {
  const std::vector<double> coarse = {-10.0, -1.0, 0.0, 1.0, 10.0};
  const std::vector<double> full_regression_grid = {-1.0, 1.0};
  const std::vector<double>& axis =
      family == ModelFamily::full_regression ? full_regression_grid : coarse;
  const std::size_t dims = free_parameter_count(family);
  std::vector<std::vector<double>> starts;
  std::vector<std::size_t> idx(dims, 0);
  for (;;) {
    std::vector<double> point(dims);
    for (std::size_t d = 0; d < dims; ++d) point[d] = axis[idx[d]];
    starts.push_back(std::move(point));
    std::size_t d = 0;
    for (; d < dims; ++d) {
      if (++idx[d] < axis.size()) break;
      idx[d] = 0;
    }
    if (d == dims) break;
  }
  return starts;
}

}  // namespace

double log_likelihood(const ModelSpec& model, const PanelDataset& panel) {
  panel.validate();
  validate(model);
  double total = 0.0;
  for (const PanelDay& day : panel.days) {
    if (day.total_new() == 0) continue;
    const std::vector<double> log_theta = log_decision_probabilities(model, day.snapshot());
    for (std::size_t j = 0; j < day.size(); ++j) {
      const std::int64_t n = day.new_mimickers[j];
      if (n == 0) continue;
      if (log_theta[j] == -kInf) return -kInf;
      total += static_cast<double>(n) * log_theta[j];
    }
  }
  return total;
}

FitResult fit(ModelFamily family, const PanelDataset& panel, double gamma) {
  panel.validate();
  bool any_decisions = false;
  for (const PanelDay& day : panel.days) any_decisions |= day.total_new() > 0;
  if (!any_decisions)
    throw std::invalid_argument("fit: panel has no days with new mimic decisions");

  if (family == ModelFamily::popularity) {
    FitResult result;
    result.model = Popularity{};
    result.log_likelihood = log_likelihood(result.model, panel);
    result.converged = true;
    return result;
  }

  const auto objective = [&](const std::vector<double>& u) {
    // -inf likelihoods and out-of-domain trial points map to +inf so the
    // simplex retreats instead of aborting.
    try {
      return -log_likelihood(model_from_params(family, u, gamma), panel);
    } catch (const std::exception&) {
      return kInf;
    }
  };

  FitResult best;
  double best_value = kInf;
  bool have_best = false;
  for (const std::vector<double>& start : grid_starts(family)) {
    const NelderMeadResult nm = nelder_mead(objective, start);
    if (!have_best || nm.value < best_value) {
      have_best = true;
      best_value = nm.value;
      best.model = model_from_params(family, nm.x, gamma);
      best.log_likelihood = -nm.value;
      best.iterations = nm.iterations;
      best.converged = nm.converged;
      best.init_point = start;
    }
  }
  if (!std::isfinite(best_value)) {
    // Every start diverged; report the best point found without converging.
    best.converged = false;
  }
  return best;
}

std::vector<ProfilePoint> gamma_profile(const PanelDataset& panel,
                                        const std::vector<double>& gamma_grid) {
  if (gamma_grid.empty()) throw std::invalid_argument("gamma_profile: empty grid");
  for (double g : gamma_grid)
    if (!(g >= 0.0) || !std::isfinite(g))
      throw std::invalid_argument("gamma_profile: gamma values must be finite and >= 0");

  std::vector<ProfilePoint> profile;
  profile.reserve(gamma_grid.size());
  for (double g : gamma_grid) {
    ProfilePoint point;
    point.gamma = g;
    try {
      const FitResult r = fit(ModelFamily::social_sampling, panel, g);
      point.log_likelihood = r.log_likelihood;
      point.eta = std::get<SocialSampling>(r.model).eta;
      point.converged = r.converged;
    } catch (const std::exception&) {
      point.log_likelihood = std::numeric_limits<double>::quiet_NaN();
      point.eta = std::numeric_limits<double>::quiet_NaN();
      point.converged = false;
    }
    profile.push_back(point);
  }
  return profile;
}

std::vector<TraderScore> rank_traders(
    const std::map<std::int64_t, std::vector<double>>& daily_profits) {
  if (daily_profits.empty()) throw std::invalid_argument("rank_traders: no users");
  std::vector<TraderScore> scores;
  scores.reserve(daily_profits.size());
  for (const auto& [user, profits] : daily_profits) {
    TraderScore s;
    s.user_id = user;
    for (double p : profits) {
      if (p > 0.0) ++s.positive_days;
      else if (p < 0.0) ++s.negative_days;
    }
    s.score = s.positive_days - s.negative_days;
    scores.push_back(s);
  }
  std::sort(scores.begin(), scores.end(), [](const TraderScore& a, const TraderScore& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.user_id < b.user_id;
  });
  return scores;
}

CredibleInterval skill_credible_interval(std::int64_t successes, std::int64_t failures,
                                         double level) {
  if (successes < 0 || failures < 0)
    throw std::invalid_argument("skill_credible_interval: negative counts");
  if (!(level > 0.0 && level < 1.0))
    throw std::invalid_argument("skill_credible_interval: level outside (0, 1)");
  const double a = static_cast<double>(successes) + 1.0;
  const double b = static_cast<double>(failures) + 1.0;
  const double tail = 0.5 * (1.0 - level);
  CredibleInterval ci;
  ci.level = level;
  ci.lower = beta_quantile(tail, a, b);
  ci.upper = beta_quantile(1.0 - tail, a, b);
  return ci;
}

std::vector<double> expected_new_mimickers(const ModelSpec& model,
                                           const MarketSnapshot& snapshot,
                                           std::int64_t total_new) {
  if (total_new < 0) throw std::invalid_argument("expected_new_mimickers: negative total");
  ProbabilityVector theta = decision_probabilities(model, snapshot);
  for (double& t : theta) t *= static_cast<double>(total_new);
  return theta;
}

}  // namespace socsamp
