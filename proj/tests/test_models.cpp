#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "socsamp/errors.hpp"
#include "socsamp/models.hpp"
#include "socsamp/rng.hpp"
#include "support/generators.hpp"

using namespace socsamp;
using socsamp::testing::random_model;
using socsamp::testing::random_snapshot;

namespace {

MarketSnapshot snap(std::vector<std::int64_t> pop, std::vector<double> perf) {
  MarketSnapshot s;
  s.popularity = std::move(pop);
  s.performance = std::move(perf);
  return s;
}

double linf(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::fabs(a[i] - b[i]));
  return d;
}

}  // namespace

TEST_CASE("binarize_signal follows the strict-positive indicator") {
  CHECK(binarize_signal(0.03) == 1);
  CHECK(binarize_signal(0.0) == 0);
  CHECK(binarize_signal(-0.01) == 0);
  CHECK_THROWS_AS(binarize_signal(std::nan("")), std::invalid_argument);
  CHECK_THROWS_AS(binarize_signal(INFINITY), std::invalid_argument);
}

TEST_CASE("smoothing is 1/M") {
  CHECK(smoothing(1) == doctest::Approx(1.0));
  CHECK(smoothing(2) == doctest::Approx(0.5));
  CHECK(smoothing(1000) == doctest::Approx(0.001));
  CHECK_THROWS_AS(smoothing(0), std::invalid_argument);
}

TEST_CASE("decision probabilities match hand-derived values") {
  SUBCASE("social sampling") {
    const auto theta =
        decision_probabilities(SocialSampling{0.75, 1.0}, snap({3, 1}, {0.1, -0.1}));
    // numerators 0.75 * 3.5 and 0.25 * 1.5
    CHECK(theta[0] == doctest::Approx(0.875).epsilon(1e-12));
    CHECK(theta[1] == doctest::Approx(0.125).epsilon(1e-12));
  }
  SUBCASE("social sampling symmetry") {
    const auto theta =
        decision_probabilities(SocialSampling{0.75, 1.0}, snap({5, 5}, {0.1, 0.1}));
    CHECK(theta[0] == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("popularity") {
    const auto theta = decision_probabilities(Popularity{}, snap({1, 3}, {0.9, -0.2}));
    CHECK(theta[0] == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(theta[1] == doctest::Approx(0.7).epsilon(1e-12));
  }
  SUBCASE("performance") {
    const auto theta = decision_probabilities(Performance{0.8}, snap({7, 1, 9}, {0.2, -0.3, -0.1}));
    CHECK(theta[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(theta[1] == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
    CHECK(theta[2] == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  }
  SUBCASE("additive") {
    const auto theta =
        decision_probabilities(Additive{0.5, 0.75}, snap({1, 0}, {-0.1, 0.2}));
    CHECK(theta[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(theta[1] == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("full regression with zero coefficients is uniform") {
    const auto theta = decision_probabilities(FullRegression{0, 0, 0, 0},
                                              snap({4, 9, 0, 2}, {0.3, -0.2, 0.0, 1.5}));
    for (double t : theta) CHECK(t == doctest::Approx(0.25).epsilon(1e-12));
  }
}

TEST_CASE("decision probability input validation") {
  CHECK_THROWS_AS(decision_probabilities(Popularity{}, snap({}, {})), std::invalid_argument);
  CHECK_THROWS_AS(decision_probabilities(Popularity{}, snap({1, 2}, {0.1})),
                  std::invalid_argument);
  CHECK_THROWS_AS(decision_probabilities(Popularity{}, snap({-1}, {0.1})),
                  std::invalid_argument);
  CHECK_THROWS_AS(decision_probabilities(Popularity{}, snap({1}, {std::nan("")})),
                  std::invalid_argument);
  CHECK_THROWS_AS(decision_probabilities(SocialSampling{0.4, 1.0}, snap({1}, {0.1})),
                  std::invalid_argument);
  CHECK_THROWS_AS(decision_probabilities(Additive{1.5, 0.7}, snap({1}, {0.1})),
                  std::invalid_argument);
}

TEST_CASE("overflowing logits raise a numeric error naming the option") {
  const double huge = 1e200;
  try {
    decision_probabilities(FullRegression{0.0, 0.0, huge, huge}, snap({1, 1}, {huge, huge}));
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    CHECK(e.option_index() == 0);
  }
}

TEST_CASE("posterior init and single updates") {
  const PosteriorState uniform4 = posterior_init(4, 0.7);
  for (double p : uniform4.probabilities()) CHECK(p == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(posterior_init(1, 0.9).probabilities()[0] == doctest::Approx(1.0));
  CHECK_THROWS_AS(posterior_init(0, 0.7), std::invalid_argument);
  CHECK_THROWS_AS(posterior_init(3, 0.5), std::invalid_argument);

  PosteriorState state = posterior_init(2, 0.75);
  state = posterior_update(state, {1, 0});
  CHECK(state.probabilities()[0] == doctest::Approx(0.75).epsilon(1e-12));
  state = posterior_update(state, {1, 0});
  CHECK(state.probabilities()[0] == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(state.probabilities()[1] == doctest::Approx(0.1).epsilon(1e-12));

  CHECK_THROWS_AS(posterior_update(state, {1, 0, 1}), std::invalid_argument);
}

TEST_CASE("symmetric evidence leaves the posterior unchanged") {
  std::mt19937_64 engine = make_engine(11);
  PosteriorState state = posterior_init(5, 0.8);
  state = posterior_update(state, {1, 0, 0, 1, 0});
  const auto before = state.probabilities();
  const auto all_good = posterior_update(state, {1, 1, 1, 1, 1}).probabilities();
  const auto all_bad = posterior_update(state, {0, 0, 0, 0, 0}).probabilities();
  CHECK(linf(before, all_good) < 1e-12);
  CHECK(linf(before, all_bad) < 1e-12);
  (void)engine;
}

TEST_CASE("generalized commit probability") {
  CHECK(generalized_commit_probability(0.75, 0.5, 1.5) == doctest::Approx(1.0));
  CHECK(generalized_commit_probability(0.25, 0.5, 1.5) == doctest::Approx(1.0 / 3.0));
  CHECK(generalized_commit_probability(0.5, 0.5, 1.5) == doctest::Approx(2.0 / 3.0));
  CHECK_THROWS_AS(generalized_commit_probability(0.9, 0.3, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(generalized_commit_probability(-0.1, 0.5, 1.5), std::invalid_argument);

  // Monotone in the best-option likelihood, always within (0, 1].
  double previous = 0.0;
  for (double lb = 0.05; lb <= 1.0; lb += 0.05) {
    const double p = generalized_commit_probability(lb, 0.5, 2.0);
    CHECK(p > previous);
    CHECK(p > 0.0);
    CHECK(p <= 1.0);
    previous = p;
  }
}

TEST_CASE("property: simplex, permutation equivariance, reductions, monotonicity") {
  std::mt19937_64 engine = make_engine(2024);
  int checked = 0;
  for (int it = 0; it < 1200; ++it) {
    MarketSnapshot s = random_snapshot(engine);
    const ModelSpec model = random_model(engine);
    const auto theta = decision_probabilities(model, s);

    // Probability simplex within 1e-9.
    double sum = 0.0;
    for (double t : theta) {
      CHECK(t >= 0.0);
      sum += t;
    }
    CHECK(std::fabs(sum - 1.0) < 1e-9);

    // Permuting options permutes the output identically.
    std::vector<std::size_t> perm(s.active_count());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), engine);
    MarketSnapshot permuted;
    permuted.day = s.day;
    for (std::size_t j : perm) {
      permuted.popularity.push_back(s.popularity[j]);
      permuted.performance.push_back(s.performance[j]);
    }
    const auto theta_perm = decision_probabilities(model, permuted);
    for (std::size_t k = 0; k < perm.size(); ++k)
      CHECK(theta_perm[k] == doctest::Approx(theta[perm[k]]).epsilon(1e-12));
    ++checked;
  }
  CHECK(checked >= 1000);
}

TEST_CASE("property: reduction A - equal popularity collapses to the performance model") {
  std::mt19937_64 engine = make_engine(7);
  std::uniform_int_distribution<std::int64_t> pop(0, 500);
  for (int it = 0; it < 1000; ++it) {
    MarketSnapshot s = random_snapshot(engine);
    const std::int64_t level = pop(engine);
    std::fill(s.popularity.begin(), s.popularity.end(), level);
    const double eta = socsamp::testing::random_eta(engine);
    const auto social = decision_probabilities(SocialSampling{eta, 1.0}, s);
    const auto perf = decision_probabilities(Performance{eta}, s);
    CHECK(linf(social, perf) < 1e-14);
  }
}

TEST_CASE("property: reduction B - eta -> 0.5 collapses to the popularity model") {
  std::mt19937_64 engine = make_engine(8);
  for (int it = 0; it < 1000; ++it) {
    const MarketSnapshot s = random_snapshot(engine);
    const auto social = decision_probabilities(SocialSampling{0.5 + 1e-9, 1.0}, s);
    const auto popularity = decision_probabilities(Popularity{}, s);
    CHECK(linf(social, popularity) < 1e-6);
  }
}

TEST_CASE("property: reduction C - gamma = 0 equals the performance model") {
  std::mt19937_64 engine = make_engine(9);
  for (int it = 0; it < 1000; ++it) {
    const MarketSnapshot s = random_snapshot(engine);
    const double eta = socsamp::testing::random_eta(engine);
    const auto social = decision_probabilities(SocialSampling{eta, 0.0}, s);
    const auto perf = decision_probabilities(Performance{eta}, s);
    CHECK(linf(social, perf) < 1e-14);
  }
}

TEST_CASE("property: social sampling is monotone in popularity and signal") {
  std::mt19937_64 engine = make_engine(10);
  std::uniform_int_distribution<std::size_t> index(0, 64);
  for (int it = 0; it < 1000; ++it) {
    MarketSnapshot s = random_snapshot(engine);
    while (s.active_count() < 2) s = random_snapshot(engine);  // vacuous at M = 1
    const double eta = socsamp::testing::random_eta(engine);
    const std::size_t j = index(engine) % s.active_count();
    const auto base = decision_probabilities(SocialSampling{eta, 1.0}, s);

    MarketSnapshot more_popular = s;
    more_popular.popularity[j] += 1 + std::int64_t(index(engine));
    const auto bumped = decision_probabilities(SocialSampling{eta, 1.0}, more_popular);
    CHECK(bumped[j] > base[j]);

    if (binarize_signal(s.performance[j]) == 0) {
      MarketSnapshot good_signal = s;
      good_signal.performance[j] = 0.25;
      const auto flipped = decision_probabilities(SocialSampling{eta, 1.0}, good_signal);
      CHECK(flipped[j] > base[j]);
    }
  }
}

TEST_CASE("property: one-step consistency with the exact posterior") {
  std::mt19937_64 engine = make_engine(12);
  std::uniform_int_distribution<int> count(1, 12);
  for (int it = 0; it < 1000; ++it) {
    const int m = count(engine);
    const double eta = socsamp::testing::random_eta(engine);
    MarketSnapshot s;
    std::vector<int> signals;
    std::uniform_real_distribution<double> perf(-0.5, 0.5);
    // Uniform popularity at zero: the smoothing term cancels exactly in the
    // normalization, which is the epsilon -> 0 limit.
    for (int j = 0; j < m; ++j) {
      s.popularity.push_back(0);
      const double q = perf(engine);
      s.performance.push_back(q);
      signals.push_back(binarize_signal(q));
    }
    const auto social = decision_probabilities(SocialSampling{eta, 1.0}, s);
    const auto posterior = posterior_update(posterior_init(m, eta), signals).probabilities();
    CHECK(linf(social, posterior) < 1e-6);

    // Same at a large uniform popularity, where epsilon is negligible.
    std::fill(s.popularity.begin(), s.popularity.end(), 1000000000);
    const auto social_large = decision_probabilities(SocialSampling{eta, 1.0}, s);
    CHECK(linf(social_large, posterior) < 1e-6);
  }
}

TEST_CASE("property: sequential posterior updates equal one batch computation") {
  std::mt19937_64 engine = make_engine(13);
  std::uniform_int_distribution<int> count(1, 10);
  std::uniform_int_distribution<int> days(1, 30);
  std::uniform_int_distribution<int> coin(0, 1);
  for (int it = 0; it < 300; ++it) {
    const int m = count(engine);
    const int t = days(engine);
    const double eta = socsamp::testing::random_eta(engine);

    PosteriorState sequential = posterior_init(m, eta);
    std::vector<std::int64_t> good_count(m, 0);
    for (int d = 0; d < t; ++d) {
      std::vector<int> signals(m);
      for (int j = 0; j < m; ++j) {
        signals[j] = coin(engine);
        good_count[j] += signals[j];
      }
      sequential = posterior_update(sequential, signals);
    }

    const double good = std::log(eta / 0.5);
    const double bad = std::log((1.0 - eta) / 0.5);
    std::vector<double> batch_log(m);
    for (int j = 0; j < m; ++j)
      batch_log[j] = double(good_count[j]) * good + double(t - good_count[j]) * bad;
    // Compare normalized log weights.
    const double max_seq = *std::max_element(sequential.log_weights.begin(),
                                             sequential.log_weights.end());
    const double max_batch = *std::max_element(batch_log.begin(), batch_log.end());
    for (int j = 0; j < m; ++j) {
      const double a = sequential.log_weights[j] - max_seq;
      const double b = batch_log[j] - max_batch;
      CHECK(std::fabs(a - b) < 1e-9);
    }
  }
}
