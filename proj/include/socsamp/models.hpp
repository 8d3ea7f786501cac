#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace socsamp {

// One day's view of the market: popularity (mimicker count) and performance
// score of every active option.
struct MarketSnapshot {
  std::int64_t day = 0;
  std::vector<std::int64_t> popularity;
  std::vector<double> performance;

  std::size_t active_count() const { return popularity.size(); }
  void validate() const;  // throws std::invalid_argument
};

// Choice-model families. Each one defines a per-option commit probability
// theta_j over a snapshot; see decision_probabilities for the kernels.
struct SocialSampling {
  double eta;           // assumed best-option good-signal rate, in (0.5, 1)
  double gamma = 1.0;   // popularity scaling exponent, >= 0; 1 is canonical
};
struct PerformanceRegression {
  double beta0 = 0.0, beta1 = 0.0;
};
struct FullRegression {
  double beta0 = 0.0, beta1 = 0.0, beta2 = 0.0, beta3 = 0.0;
};
struct Popularity {};
struct Performance {
  double eta;
};
struct Additive {
  double alpha;  // popularity weight, in [0, 1]
  double eta;
};

using ModelSpec = std::variant<SocialSampling, PerformanceRegression, FullRegression,
                               Popularity, Performance, Additive>;

enum class ModelFamily {
  social_sampling,
  performance_regression,
  full_regression,
  popularity,
  performance,
  additive,
};

ModelFamily family_of(const ModelSpec& model);
std::string family_name(ModelFamily family);
std::optional<ModelFamily> family_from_name(std::string_view name);
const std::vector<ModelFamily>& all_families();

void validate(const ModelSpec& model);  // throws std::invalid_argument on bad bounds

using ProbabilityVector = std::vector<double>;

// 1 iff q > 0; ties at exactly zero count as bad signals.
int binarize_signal(double q);

// Smoothing term epsilon_t = 1 / M_t.
double smoothing(std::size_t active_count);

// Normalized per-option commit probabilities for one snapshot.
//   social sampling       theta_j ∝ eta^r (1-eta)^(1-r) (p^gamma + eps)
//   performance regr.     theta_j ∝ sigma(b0 + b1 q)
//   full regression       theta_j ∝ sigma(b0 + b1 q + b2 p + b3 q p)
//   popularity            theta_j ∝ p + eps
//   performance           theta_j ∝ eta^r (1-eta)^(1-r)
//   additive              theta_j ∝ a (p+eps)/sum(p+eps) + (1-a) eta^r (1-eta)^(1-r)
// with r = binarize_signal(q), eps = smoothing(M), and 0^0 = 1 so gamma = 0
// collapses the popularity factor to uniform.
ProbabilityVector decision_probabilities(const ModelSpec& model, const MarketSnapshot& snapshot);

// log(theta_j); same kernels evaluated in log space, immune to underflow.
std::vector<double> log_decision_probabilities(const ModelSpec& model,
                                               const MarketSnapshot& snapshot);

// Exact Bayesian posterior over "which option is best" in the
// needle-in-haystack world: the best option emits good signals at rate eta,
// every other option at rate 0.5.
struct PosteriorState {
  std::vector<double> log_weights;
  double eta = 0.0;

  ProbabilityVector probabilities() const;
};

PosteriorState posterior_init(std::size_t option_count, double eta);

// One Bayes step for a full column of binary signals. Each option's weight
// picks up r log(eta/0.5) + (1-r) log((1-eta)/0.5); the 0.5 likelihoods of
// non-best options cancel in normalization.
PosteriorState posterior_update(const PosteriorState& state, const std::vector<int>& signals);

// Commit probability (1/C) * likelihood_best / likelihood_other for the
// continuous-reward generalization; C must bound the likelihood ratio.
double generalized_commit_probability(double likelihood_best, double likelihood_other,
                                      double ratio_bound);

}  // namespace socsamp
