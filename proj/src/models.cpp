#include "socsamp/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "socsamp/errors.hpp"
#include "socsamp/stats.hpp"

namespace socsamp {

namespace {

constexpr double kLogitClamp = 500.0;

void require(bool ok, const char* message) {
  if (!ok) throw std::invalid_argument(message);
}

// p^gamma with the 0^0 = 1 convention, so gamma = 0 gives a uniform
// popularity factor for every count including zero.
double pow_gamma(double p, double gamma) {
  if (gamma == 0.0) return 1.0;
  return std::pow(p, gamma);
}

double eta_term(double eta, int r) { return r ? eta : 1.0 - eta; }

std::vector<double> normalize_log_weights(std::vector<double> log_weights) {
  double max_lw = -std::numeric_limits<double>::infinity();
  for (double lw : log_weights) max_lw = std::max(max_lw, lw);
  double sum = 0.0;
  for (double lw : log_weights) sum += std::exp(lw - max_lw);
  const double lse = max_lw + std::log(sum);
  for (double& lw : log_weights) lw -= lse;
  return log_weights;
}

std::vector<double> checked_log_weights(std::vector<double> log_weights) {
  for (std::size_t j = 0; j < log_weights.size(); ++j) {
    if (std::isnan(log_weights[j]) ||
        log_weights[j] == std::numeric_limits<double>::infinity()) {
      throw NumericError("non-finite decision weight",
                         static_cast<std::ptrdiff_t>(j));
    }
  }
  return normalize_log_weights(std::move(log_weights));
}

}  // namespace

void MarketSnapshot::validate() const {
  require(!popularity.empty(), "snapshot: no active options");
  require(popularity.size() == performance.size(),
          "snapshot: popularity/performance length mismatch");
  for (std::size_t j = 0; j < popularity.size(); ++j) {
    if (popularity[j] < 0)
      throw std::invalid_argument("snapshot: negative popularity");
    if (!std::isfinite(performance[j]))
      throw std::invalid_argument("snapshot: non-finite performance");
  }
}

ModelFamily family_of(const ModelSpec& model) {
  return std::visit(
      [](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, SocialSampling>) return ModelFamily::social_sampling;
        if constexpr (std::is_same_v<T, PerformanceRegression>)
          return ModelFamily::performance_regression;
        if constexpr (std::is_same_v<T, FullRegression>) return ModelFamily::full_regression;
        if constexpr (std::is_same_v<T, Popularity>) return ModelFamily::popularity;
        if constexpr (std::is_same_v<T, Performance>) return ModelFamily::performance;
        if constexpr (std::is_same_v<T, Additive>) return ModelFamily::additive;
      },
      model);
}

std::string family_name(ModelFamily family) {
  switch (family) {
    case ModelFamily::social_sampling: return "social_sampling";
    case ModelFamily::performance_regression: return "performance_regression";
    case ModelFamily::full_regression: return "full_regression";
    case ModelFamily::popularity: return "popularity";
    case ModelFamily::performance: return "performance";
    case ModelFamily::additive: return "additive";
  }
  return "unknown";
}

std::optional<ModelFamily> family_from_name(std::string_view name) {
  for (ModelFamily f : all_families()) {
    if (family_name(f) == name) return f;
  }
  return std::nullopt;
}

const std::vector<ModelFamily>& all_families() {
  static const std::vector<ModelFamily> families = {
      ModelFamily::social_sampling, ModelFamily::performance_regression,
      ModelFamily::full_regression, ModelFamily::popularity,
      ModelFamily::performance,     ModelFamily::additive,
  };
  return families;
}

void validate(const ModelSpec& model) {
  std::visit(
      [](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, SocialSampling>) {
          require(m.eta > 0.5 && m.eta < 1.0, "social sampling: eta outside (0.5, 1)");
          require(std::isfinite(m.gamma) && m.gamma >= 0.0,
                  "social sampling: gamma must be finite and >= 0");
        } else if constexpr (std::is_same_v<T, PerformanceRegression>) {
          require(std::isfinite(m.beta0) && std::isfinite(m.beta1),
                  "performance regression: non-finite coefficient");
        } else if constexpr (std::is_same_v<T, FullRegression>) {
          require(std::isfinite(m.beta0) && std::isfinite(m.beta1) && std::isfinite(m.beta2) &&
                      std::isfinite(m.beta3),
                  "full regression: non-finite coefficient");
        } else if constexpr (std::is_same_v<T, Performance>) {
          require(m.eta > 0.5 && m.eta < 1.0, "performance model: eta outside (0.5, 1)");
        } else if constexpr (std::is_same_v<T, Additive>) {
          require(m.alpha >= 0.0 && m.alpha <= 1.0, "additive model: alpha outside [0, 1]");
          require(m.eta > 0.5 && m.eta < 1.0, "additive model: eta outside (0.5, 1)");
        }
      },
      model);
}

int binarize_signal(double q) {
  if (!std::isfinite(q)) throw std::invalid_argument("binarize_signal: non-finite signal");
  return q > 0.0 ? 1 : 0;
}

double smoothing(std::size_t active_count) {
  if (active_count == 0) throw std::invalid_argument("smoothing: zero active options");
  return 1.0 / static_cast<double>(active_count);
}

std::vector<double> log_decision_probabilities(const ModelSpec& model,
                                               const MarketSnapshot& snapshot) {
  snapshot.validate();
  validate(model);
  const std::size_t m = snapshot.active_count();
  const double eps = smoothing(m);
  std::vector<double> log_weights(m);

  std::visit(
      [&](const auto& spec) {
        using T = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<T, SocialSampling>) {
          for (std::size_t j = 0; j < m; ++j) {
            const int r = binarize_signal(snapshot.performance[j]);
            const double prior =
                pow_gamma(static_cast<double>(snapshot.popularity[j]), spec.gamma) + eps;
            log_weights[j] = std::log(eta_term(spec.eta, r)) + std::log(prior);
          }
        } else if constexpr (std::is_same_v<T, PerformanceRegression>) {
          for (std::size_t j = 0; j < m; ++j) {
            const double logit = spec.beta0 + spec.beta1 * snapshot.performance[j];
            if (!std::isfinite(logit))
              throw NumericError("performance regression: non-finite logit",
                                 static_cast<std::ptrdiff_t>(j));
            log_weights[j] = log_logistic(std::clamp(logit, -kLogitClamp, kLogitClamp));
          }
        } else if constexpr (std::is_same_v<T, FullRegression>) {
          for (std::size_t j = 0; j < m; ++j) {
            const double p = static_cast<double>(snapshot.popularity[j]);
            const double q = snapshot.performance[j];
            const double logit = spec.beta0 + spec.beta1 * q + spec.beta2 * p + spec.beta3 * q * p;
            if (!std::isfinite(logit))
              throw NumericError("full regression: non-finite logit",
                                 static_cast<std::ptrdiff_t>(j));
            log_weights[j] = log_logistic(std::clamp(logit, -kLogitClamp, kLogitClamp));
          }
        } else if constexpr (std::is_same_v<T, Popularity>) {
          for (std::size_t j = 0; j < m; ++j)
            log_weights[j] = std::log(static_cast<double>(snapshot.popularity[j]) + eps);
        } else if constexpr (std::is_same_v<T, Performance>) {
          for (std::size_t j = 0; j < m; ++j) {
            const int r = binarize_signal(snapshot.performance[j]);
            log_weights[j] = std::log(eta_term(spec.eta, r));
          }
        } else if constexpr (std::is_same_v<T, Additive>) {
          double share_sum = 0.0;
          for (std::size_t j = 0; j < m; ++j)
            share_sum += static_cast<double>(snapshot.popularity[j]) + eps;
          for (std::size_t j = 0; j < m; ++j) {
            const int r = binarize_signal(snapshot.performance[j]);
            const double share = (static_cast<double>(snapshot.popularity[j]) + eps) / share_sum;
            const double w = spec.alpha * share + (1.0 - spec.alpha) * eta_term(spec.eta, r);
            log_weights[j] = std::log(w);
          }
        }
      },
      model);

  return checked_log_weights(std::move(log_weights));
}

ProbabilityVector decision_probabilities(const ModelSpec& model, const MarketSnapshot& snapshot) {
  std::vector<double> log_probs = log_decision_probabilities(model, snapshot);
  ProbabilityVector probs(log_probs.size());
  double sum = 0.0;
  for (std::size_t j = 0; j < log_probs.size(); ++j) {
    probs[j] = std::exp(log_probs[j]);
    sum += probs[j];
  }
  for (double& p : probs) p /= sum;
  return probs;
}

ProbabilityVector PosteriorState::probabilities() const {
  std::vector<double> normalized = normalize_log_weights(log_weights);
  ProbabilityVector probs(normalized.size());
  double sum = 0.0;
  for (std::size_t j = 0; j < normalized.size(); ++j) {
    probs[j] = std::exp(normalized[j]);
    sum += probs[j];
  }
  for (double& p : probs) p /= sum;
  return probs;
}

PosteriorState posterior_init(std::size_t option_count, double eta) {
  if (option_count == 0) throw std::invalid_argument("posterior_init: zero options");
  if (!(eta > 0.5 && eta < 1.0))
    throw std::invalid_argument("posterior_init: eta outside (0.5, 1)");
  PosteriorState state;
  state.eta = eta;
  state.log_weights.assign(option_count, 0.0);
  return state;
}

PosteriorState posterior_update(const PosteriorState& state, const std::vector<int>& signals) {
  if (signals.size() != state.log_weights.size())
    throw std::invalid_argument("posterior_update: signal count != option count");
  const double good = std::log(state.eta / 0.5);
  const double bad = std::log((1.0 - state.eta) / 0.5);
  PosteriorState next = state;
  for (std::size_t j = 0; j < signals.size(); ++j) {
    if (signals[j] != 0 && signals[j] != 1)
      throw std::invalid_argument("posterior_update: signals must be 0 or 1");
    next.log_weights[j] += signals[j] ? good : bad;
  }
  next.log_weights = normalize_log_weights(std::move(next.log_weights));
  return next;
}

double generalized_commit_probability(double likelihood_best, double likelihood_other,
                                      double ratio_bound) {
  if (!(likelihood_best > 0.0) || !(likelihood_other > 0.0))
    throw std::invalid_argument("generalized_commit_probability: likelihoods must be positive");
  if (!std::isfinite(likelihood_best) || !std::isfinite(likelihood_other) ||
      !std::isfinite(ratio_bound))
    throw std::invalid_argument("generalized_commit_probability: non-finite input");
  const double ratio = likelihood_best / likelihood_other;
  if (ratio > ratio_bound)
    throw std::invalid_argument(
        "generalized_commit_probability: ratio exceeds the stated bound");
  return ratio / ratio_bound;
}

}  // namespace socsamp
