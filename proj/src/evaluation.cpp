#include "socsamp/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>

#include "socsamp/inference.hpp"
#include "socsamp/parallel.hpp"
#include "socsamp/rng.hpp"
#include "socsamp/stats.hpp"

namespace socsamp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Half-up rounding is the one place the F-score's "nearest whole number"
// convention lives.
std::int64_t round_half_up(double x) {
  return static_cast<std::int64_t>(std::floor(x + 0.5));
}

PanelDataset restrict_to_users(const PanelDataset& panel,
                               const std::set<std::int64_t>& users) {
  PanelDataset out;
  for (const PanelDay& day : panel.days) {
    PanelDay kept;
    kept.day = day.day;
    for (std::size_t i = 0; i < day.size(); ++i) {
      if (!users.count(day.user_ids[i])) continue;
      kept.user_ids.push_back(day.user_ids[i]);
      kept.prev_popularity.push_back(day.prev_popularity[i]);
      kept.performance.push_back(day.performance[i]);
      kept.new_mimickers.push_back(day.new_mimickers[i]);
      kept.lost_mimickers.push_back(day.lost_mimickers[i]);
    }
    if (!kept.user_ids.empty()) out.days.push_back(std::move(kept));
  }
  return out;
}

PanelDataset restrict_to_days(const PanelDataset& panel, const std::set<Day>& days) {
  PanelDataset out;
  for (const PanelDay& day : panel.days)
    if (days.count(day.day)) out.days.push_back(day);
  return out;
}

template <typename T>
std::vector<std::vector<T>> partition_shuffled(std::vector<T> units, int folds,
                                               std::uint64_t seed) {
  std::mt19937_64 engine = make_engine(derive_seed(seed, 0xf01d5));
  std::shuffle(units.begin(), units.end(), engine);
  std::vector<std::vector<T>> groups(static_cast<std::size_t>(folds));
  const std::size_t base = units.size() / static_cast<std::size_t>(folds);
  const std::size_t extra = units.size() % static_cast<std::size_t>(folds);
  std::size_t pos = 0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const std::size_t take = base + (g < extra ? 1 : 0);
    groups[g].assign(units.begin() + pos, units.begin() + pos + take);
    pos += take;
  }
  return groups;
}

}  // namespace

void CVScheme::validate() const {
  if (!(fraction > 0.0 && fraction < 1.0))
    throw std::invalid_argument("cv scheme: fraction outside (0, 1)");
  if (folds < 2) throw std::invalid_argument("cv scheme: folds must be >= 2");
}

const char* cv_kind_name(CVKind kind) {
  switch (kind) {
    case CVKind::by_user_10fold: return "by_user";
    case CVKind::by_day_10fold: return "by_day";
    case CVKind::temporal_last_fraction: return "temporal";
  }
  return "unknown";
}

std::optional<CVKind> cv_kind_from_name(std::string_view name) {
  if (name == "by_user") return CVKind::by_user_10fold;
  if (name == "by_day") return CVKind::by_day_10fold;
  if (name == "temporal") return CVKind::temporal_last_fraction;
  return std::nullopt;
}

std::vector<SplitPair> split(const PanelDataset& panel, const CVScheme& scheme) {
  panel.validate();
  scheme.validate();
  std::vector<SplitPair> pairs;

  if (scheme.kind == CVKind::by_user_10fold) {
    std::vector<std::int64_t> users = panel.distinct_users();
    if (users.size() < static_cast<std::size_t>(scheme.folds))
      throw std::invalid_argument("split: fewer users than folds (by_user scheme)");
    const auto groups = partition_shuffled(users, scheme.folds, scheme.seed);
    const std::set<std::int64_t> all(users.begin(), users.end());
    for (const auto& group : groups) {
      std::set<std::int64_t> test_users(group.begin(), group.end());
      std::set<std::int64_t> train_users;
      std::set_difference(all.begin(), all.end(), test_users.begin(), test_users.end(),
                          std::inserter(train_users, train_users.begin()));
      SplitPair pair;
      pair.train = restrict_to_users(panel, train_users);
      pair.test = restrict_to_users(panel, test_users);
      pairs.push_back(std::move(pair));
    }
    return pairs;
  }

  if (scheme.kind == CVKind::by_day_10fold) {
    std::vector<Day> days;
    for (const PanelDay& d : panel.days) days.push_back(d.day);
    if (days.size() < static_cast<std::size_t>(scheme.folds))
      throw std::invalid_argument("split: fewer days than folds (by_day scheme)");
    const auto groups = partition_shuffled(days, scheme.folds, scheme.seed);
    const std::set<Day> all(days.begin(), days.end());
    for (const auto& group : groups) {
      std::set<Day> test_days(group.begin(), group.end());
      std::set<Day> train_days;
      std::set_difference(all.begin(), all.end(), test_days.begin(), test_days.end(),
                          std::inserter(train_days, train_days.begin()));
      SplitPair pair;
      pair.train = restrict_to_days(panel, train_days);
      pair.test = restrict_to_days(panel, test_days);
      pairs.push_back(std::move(pair));
    }
    return pairs;
  }

  // Temporal holdout: walk back from the most recent day until the test side
  // holds at least `fraction` of the user-day rows; day boundaries stay
  // intact.
  if (panel.days.size() < 2)
    throw std::invalid_argument("split: need at least two days (temporal scheme)");
  const std::size_t total_rows = panel.row_count();
  std::size_t test_rows = 0;
  std::size_t cut = panel.days.size();
  while (cut > 1) {
    if (test_rows >= static_cast<std::size_t>(
                         std::ceil(scheme.fraction * static_cast<double>(total_rows))))
      break;
    --cut;
    test_rows += panel.days[cut].size();
  }
  SplitPair pair;
  pair.train.days.assign(panel.days.begin(), panel.days.begin() + cut);
  pair.test.days.assign(panel.days.begin() + cut, panel.days.end());
  pairs.push_back(std::move(pair));
  return pairs;
}

ErrorMetrics error_metrics(const std::vector<double>& predicted,
                           const std::vector<std::int64_t>& actual) {
  if (predicted.size() != actual.size())
    throw std::invalid_argument("error_metrics: length mismatch");
  if (predicted.empty()) throw std::invalid_argument("error_metrics: empty input");
  double abs_sum = 0.0, sq_sum = 0.0;
  std::int64_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double residual = predicted[i] - static_cast<double>(actual[i]);
    abs_sum += std::fabs(residual);
    sq_sum += residual * residual;
    const bool pred_positive = round_half_up(predicted[i]) > 0;
    const bool act_positive = actual[i] > 0;
    tp += pred_positive && act_positive;
    fp += pred_positive && !act_positive;
    fn += !pred_positive && act_positive;
  }
  ErrorMetrics m;
  m.mae = abs_sum / static_cast<double>(predicted.size());
  m.mse = sq_sum / static_cast<double>(predicted.size());
  const double precision = tp + fp > 0 ? double(tp) / double(tp + fp) : 0.0;
  const double recall = tp + fn > 0 ? double(tp) / double(tp + fn) : 0.0;
  m.f_score = precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
  return m;
}

double relative_error(const std::vector<double>& model_residuals,
                      const std::vector<double>& baseline_residuals) {
  if (model_residuals.size() != baseline_residuals.size())
    throw std::invalid_argument("relative_error: length mismatch");
  if (model_residuals.empty()) throw std::invalid_argument("relative_error: empty input");
  std::size_t larger = 0;
  for (std::size_t i = 0; i < model_residuals.size(); ++i)
    larger += model_residuals[i] > baseline_residuals[i];
  return static_cast<double>(larger) / static_cast<double>(model_residuals.size());
}

ErrorReport cross_validate(const std::vector<ModelFamily>& families, const PanelDataset& panel,
                           const CVScheme& scheme, int threads) {
  if (families.empty()) throw std::invalid_argument("cross_validate: no families");
  const std::vector<SplitPair> folds = split(panel, scheme);

  struct FoldInfo {
    bool usable = false;
    std::vector<ModelSpec> fitted;  // per family
  };
  std::vector<FoldInfo> fold_info(folds.size());
  ErrorReport report;

  for (std::size_t f = 0; f < folds.size(); ++f) {
    std::int64_t test_total = 0;
    for (const PanelDay& day : folds[f].test.days) test_total += day.total_new();
    std::int64_t train_total = 0;
    for (const PanelDay& day : folds[f].train.days) train_total += day.total_new();
    fold_info[f].usable = test_total > 0 && train_total > 0 && !folds[f].test.days.empty();
    if (!fold_info[f].usable) ++report.skipped_folds;
    fold_info[f].fitted.resize(families.size());
  }

  parallel_for(folds.size() * families.size(), threads, [&](std::size_t unit) {
    const std::size_t f = unit / families.size();
    const std::size_t k = unit % families.size();
    if (!fold_info[f].usable) return;
    fold_info[f].fitted[k] = fit(families[k], folds[f].train).model;
  });

  // Pool predictions per family; row order is identical across families so
  // relative errors pair correctly.
  std::vector<std::vector<double>> pooled_pred(families.size());
  std::vector<std::int64_t> pooled_actual;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    if (!fold_info[f].usable) continue;
    for (const PanelDay& day : folds[f].test.days) {
      const MarketSnapshot snap = day.snapshot();
      const std::int64_t total = day.total_new();
      for (std::size_t k = 0; k < families.size(); ++k) {
        const std::vector<double> expected =
            expected_new_mimickers(fold_info[f].fitted[k], snap, total);
        pooled_pred[k].insert(pooled_pred[k].end(), expected.begin(), expected.end());
      }
      pooled_actual.insert(pooled_actual.end(), day.new_mimickers.begin(),
                           day.new_mimickers.end());
    }
  }
  if (pooled_actual.empty())
    throw std::invalid_argument("cross_validate: every fold was skipped");

  std::ptrdiff_t social_index = -1;
  for (std::size_t k = 0; k < families.size(); ++k) {
    const ErrorMetrics m = error_metrics(pooled_pred[k], pooled_actual);
    report.families.push_back({families[k], m.mae, m.mse, m.f_score,
                               static_cast<std::int64_t>(pooled_actual.size())});
    if (families[k] == ModelFamily::social_sampling) social_index = std::ptrdiff_t(k);
  }
  if (social_index >= 0) {
    auto abs_residuals = [&](std::size_t k) {
      std::vector<double> r(pooled_actual.size());
      for (std::size_t i = 0; i < r.size(); ++i)
        r[i] = std::fabs(pooled_pred[k][i] - static_cast<double>(pooled_actual[i]));
      return r;
    };
    const std::vector<double> baseline = abs_residuals(std::size_t(social_index));
    for (std::size_t k = 0; k < families.size(); ++k) {
      if (std::ptrdiff_t(k) == social_index) continue;
      report.relative_to_social_sampling.push_back(
          {families[k], relative_error(abs_residuals(k), baseline)});
    }
  }
  return report;
}

const std::vector<std::int64_t> kDefaultPopularityBinUpper = {0, 10, 100};
const std::vector<double> kDefaultPerformanceBinUpper = {0.0};

const BinnedSummary::Cell& BinnedSummary::at(std::size_t pop_bin, std::size_t perf_bin) const {
  return cells.at(pop_bin * perf_bins() + perf_bin);
}

BinnedSummary binned_interaction_summary(
    const PanelDataset& panel,
    const std::optional<std::vector<std::vector<double>>>& predictions,
    const std::vector<std::int64_t>& pop_upper, const std::vector<double>& perf_upper) {
  panel.validate();
  if (!std::is_sorted(pop_upper.begin(), pop_upper.end()) ||
      std::adjacent_find(pop_upper.begin(), pop_upper.end()) != pop_upper.end())
    throw std::invalid_argument("binned summary: popularity bin bounds must strictly increase");
  if (!std::is_sorted(perf_upper.begin(), perf_upper.end()))
    throw std::invalid_argument("binned summary: performance bin bounds must increase");
  if (predictions) {
    if (predictions->size() != panel.days.size())
      throw std::invalid_argument("binned summary: predictions/day count mismatch");
    for (std::size_t t = 0; t < panel.days.size(); ++t)
      if ((*predictions)[t].size() != panel.days[t].size())
        throw std::invalid_argument("binned summary: predictions/option count mismatch");
  }

  BinnedSummary summary;
  summary.pop_upper = pop_upper;
  summary.perf_upper = perf_upper;
  const std::size_t cells = summary.pop_bins() * summary.perf_bins();
  std::vector<std::vector<double>> observed(cells), predicted(cells);

  auto pop_bin_of = [&](std::int64_t p) {
    for (std::size_t i = 0; i < pop_upper.size(); ++i)
      if (p <= pop_upper[i]) return i;
    return pop_upper.size();
  };
  auto perf_bin_of = [&](double q) {
    for (std::size_t i = 0; i < perf_upper.size(); ++i)
      if (q <= perf_upper[i]) return i;
    return perf_upper.size();
  };

  for (std::size_t t = 0; t < panel.days.size(); ++t) {
    const PanelDay& day = panel.days[t];
    for (std::size_t i = 0; i < day.size(); ++i) {
      const std::size_t cell =
          pop_bin_of(day.prev_popularity[i]) * summary.perf_bins() + perf_bin_of(day.performance[i]);
      observed[cell].push_back(
          static_cast<double>(day.new_mimickers[i] - day.lost_mimickers[i]));
      if (predictions)
        predicted[cell].push_back((*predictions)[t][i] -
                                  static_cast<double>(day.lost_mimickers[i]));
    }
  }

  summary.cells.resize(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    BinnedSummary::Cell& cell = summary.cells[c];
    cell.n = static_cast<std::int64_t>(observed[c].size());
    if (observed[c].empty()) {
      cell.mean_observed = cell.ci_lower = cell.ci_upper = kNaN;
    } else {
      const MeanCI ci = mean_ci95(observed[c]);
      cell.mean_observed = ci.mean;
      cell.ci_lower = ci.lower;
      cell.ci_upper = ci.upper;
    }
    cell.mean_predicted =
        predictions && !predicted[c].empty() ? mean_of(predicted[c]) : kNaN;
  }
  return summary;
}

RegressionResult ols_interaction_regression(const std::vector<OlsRow>& rows) {
  constexpr std::size_t kP = 4;
  if (rows.size() < 5)
    throw std::invalid_argument("ols: need at least 5 observations");

  double xtx[kP][kP] = {};
  double xty[kP] = {};
  for (const OlsRow& row : rows) {
    const double x[kP] = {1.0, row.popularity, row.performance,
                          row.popularity * row.performance};
    for (std::size_t a = 0; a < kP; ++a) {
      xty[a] += x[a] * row.response;
      for (std::size_t b = 0; b < kP; ++b) xtx[a][b] += x[a] * x[b];
    }
  }

  // Solve [XtX | Xty, I] by Gauss-Jordan with partial pivoting; the inverse
  // supplies the coefficient variances.
  double aug[kP][kP + 1 + kP];
  for (std::size_t a = 0; a < kP; ++a) {
    for (std::size_t b = 0; b < kP; ++b) aug[a][b] = xtx[a][b];
    aug[a][kP] = xty[a];
    for (std::size_t b = 0; b < kP; ++b) aug[a][kP + 1 + b] = a == b ? 1.0 : 0.0;
  }
  double scale = 0.0;
  for (std::size_t a = 0; a < kP; ++a) scale = std::max(scale, std::fabs(xtx[a][a]));
  for (std::size_t col = 0; col < kP; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < kP; ++r)
      if (std::fabs(aug[r][col]) > std::fabs(aug[pivot][col])) pivot = r;
    if (std::fabs(aug[pivot][col]) < 1e-12 * std::max(scale, 1.0))
      throw std::invalid_argument("ols: singular design matrix");
    if (pivot != col)
      for (std::size_t b = 0; b < kP + 1 + kP; ++b) std::swap(aug[pivot][b], aug[col][b]);
    const double inv_pivot = 1.0 / aug[col][col];
    for (std::size_t b = 0; b < kP + 1 + kP; ++b) aug[col][b] *= inv_pivot;
    for (std::size_t r = 0; r < kP; ++r) {
      if (r == col) continue;
      const double factor = aug[r][col];
      if (factor == 0.0) continue;
      for (std::size_t b = 0; b < kP + 1 + kP; ++b) aug[r][b] -= factor * aug[col][b];
    }
  }

  RegressionResult result;
  result.n_obs = static_cast<std::int64_t>(rows.size());
  for (std::size_t a = 0; a < kP; ++a) result.coefficients[a] = aug[a][kP];

  double rss = 0.0;
  for (const OlsRow& row : rows) {
    const double x[kP] = {1.0, row.popularity, row.performance,
                          row.popularity * row.performance};
    double fitted = 0.0;
    for (std::size_t a = 0; a < kP; ++a) fitted += result.coefficients[a] * x[a];
    const double r = row.response - fitted;
    rss += r * r;
  }
  const double dof = static_cast<double>(rows.size()) - double(kP);
  const double sigma2 = rss / dof;
  for (std::size_t a = 0; a < kP; ++a) {
    const double se = std::sqrt(std::max(sigma2 * aug[a][kP + 1 + a], 0.0));
    if (se == 0.0) {
      result.p_values[a] = result.coefficients[a] == 0.0 ? 1.0 : 0.0;
    } else {
      result.p_values[a] = student_t_two_sided_p(result.coefficients[a] / se, dof);
    }
  }
  return result;
}

RegressionResult ols_interaction_regression(const PanelDataset& panel) {
  panel.validate();
  std::vector<OlsRow> rows;
  rows.reserve(panel.row_count());
  for (const PanelDay& day : panel.days)
    for (std::size_t i = 0; i < day.size(); ++i)
      rows.push_back({static_cast<double>(day.prev_popularity[i]), day.performance[i],
                      static_cast<double>(day.new_mimickers[i] - day.lost_mimickers[i])});
  return ols_interaction_regression(rows);
}

}  // namespace socsamp
