#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "socsamp/models.hpp"
#include "socsamp/panel.hpp"

namespace socsamp {

enum class CVKind { by_user_10fold, by_day_10fold, temporal_last_fraction };

struct CVScheme {
  CVKind kind = CVKind::by_user_10fold;
  double fraction = 0.10;  // temporal holdout share of user-day rows
  int folds = 10;
  std::uint64_t seed = 0;

  void validate() const;
};

const char* cv_kind_name(CVKind kind);
std::optional<CVKind> cv_kind_from_name(std::string_view name);

struct SplitPair {
  PanelDataset train;
  PanelDataset test;
};

// by_user: seeded shuffle of the users, partitioned into `folds` groups; a
// group's user-days form one test set. by_day: same over calendar days (all
// of a day's rows stay together). temporal: single pair whose test set is
// the chronologically last days holding >= fraction of the rows.
std::vector<SplitPair> split(const PanelDataset& panel, const CVScheme& scheme);

struct ErrorMetrics {
  double mae = 0.0;
  double mse = 0.0;
  double f_score = 0.0;
};

// MAE and MSE of predicted vs actual new-mimicker counts; F1 of the
// "gains at least one mimicker" classification, where a prediction counts
// as positive iff it rounds (half-up) above zero.
ErrorMetrics error_metrics(const std::vector<double>& predicted,
                           const std::vector<std::int64_t>& actual);

// Fraction of the model's absolute residuals strictly larger than the
// baseline's; ties count for neither side.
double relative_error(const std::vector<double>& model_residuals,
                      const std::vector<double>& baseline_residuals);

struct ErrorReport {
  struct FamilyRow {
    ModelFamily family;
    double mae = 0.0;
    double mse = 0.0;
    double f_score = 0.0;
    std::int64_t rows = 0;
  };
  struct RelativeRow {
    ModelFamily family;
    double value = 0.0;
  };
  std::vector<FamilyRow> families;
  // Relative error of every other family against social sampling; present
  // only when social sampling is among the evaluated families.
  std::vector<RelativeRow> relative_to_social_sampling;
  int skipped_folds = 0;
};

// Fits every family on each training fold, predicts expected new mimickers
// on the test days given the actual daily totals, and pools the residuals.
// Folds whose test set has zero new decisions are skipped and counted.
ErrorReport cross_validate(const std::vector<ModelFamily>& families, const PanelDataset& panel,
                           const CVScheme& scheme, int threads = 1);

// Default strata: popularity {0}, [1,10], (10,100], (100,inf) and
// performance split at zero.
extern const std::vector<std::int64_t> kDefaultPopularityBinUpper;
extern const std::vector<double> kDefaultPerformanceBinUpper;

struct BinnedSummary {
  std::vector<std::int64_t> pop_upper;  // inclusive upper bounds; final bin open
  std::vector<double> perf_upper;
  struct Cell {
    std::int64_t n = 0;
    double mean_observed = 0.0;   // mean(new - lost); NaN when n == 0
    double ci_lower = 0.0;
    double ci_upper = 0.0;
    double mean_predicted = 0.0;  // mean(predicted new - observed lost); NaN if absent
  };
  std::vector<Cell> cells;  // popularity-major: cell(pop_bin, perf_bin)

  std::size_t pop_bins() const { return pop_upper.size() + 1; }
  std::size_t perf_bins() const { return perf_upper.size() + 1; }
  const Cell& at(std::size_t pop_bin, std::size_t perf_bin) const;
};

// Groups user-days by (previous-popularity bin, performance bin) and reports
// the mean observed popularity change per cell with Gaussian 95% CIs, plus
// the mean predicted change when per-day predictions are supplied (aligned
// with the panel's day/option layout).
BinnedSummary binned_interaction_summary(
    const PanelDataset& panel,
    const std::optional<std::vector<std::vector<double>>>& predictions,
    const std::vector<std::int64_t>& pop_upper = kDefaultPopularityBinUpper,
    const std::vector<double>& perf_upper = kDefaultPerformanceBinUpper);

struct RegressionResult {
  // Order: intercept, popularity, performance, interaction.
  std::array<double, 4> coefficients{};
  std::array<double, 4> p_values{};
  std::int64_t n_obs = 0;
};

struct OlsRow {
  double popularity = 0.0;
  double performance = 0.0;
  double response = 0.0;
};

// Ordinary least squares of the response on (1, p, q, p*q) with classical
// two-sided t-test p-values. Throws on rank-deficient designs.
RegressionResult ols_interaction_regression(const std::vector<OlsRow>& rows);

// Panel convenience: response = new_mimickers - lost_mimickers per user-day.
RegressionResult ols_interaction_regression(const PanelDataset& panel);

}  // namespace socsamp
