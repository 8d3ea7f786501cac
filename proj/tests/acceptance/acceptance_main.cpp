// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failed criteria. Individual criteria can be selected by number on the
// command line, e.g. `acceptance 1 3 9`.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "socsamp/cli.hpp"
#include "socsamp/evaluation.hpp"
#include "socsamp/inference.hpp"
#include "socsamp/models.hpp"
#include "socsamp/parallel.hpp"
#include "socsamp/pipeline.hpp"
#include "socsamp/rng.hpp"
#include "socsamp/simulator.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"
#include "support/synthetic_panel.hpp"

using namespace socsamp;
using socsamp::testing::make_choice_panel;

namespace {

namespace fs = std::filesystem;

struct Check {
  bool ok = true;
  std::string detail;

  void require(bool condition, const std::string& what) {
    if (!condition) {
      ok = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Criterion 1: gamma sweep peaks sharply at the linear prior.

bool criterion_gamma_sweep(Check& check) {
  SweepGrid grid;
  grid.n_agents = {1000};
  grid.n_options = {10};
  grid.n_rounds = {200};
  grid.true_best_rate = {0.7};
  grid.assumed_best_rate = {0.7};
  grid.gamma = {0.0, 0.5, 1.0, 2.0, 4.0};
  grid.repetitions = 200;
  grid.seed = 1001;
  const auto rows = run_sweep(grid, 0);

  const SweepRow* linear = nullptr;
  for (const SweepRow& row : rows)
    if (row.config.gamma == 1.0) linear = &row;
  for (const SweepRow& row : rows) {
    if (row.config.gamma == 1.0) continue;
    check.require(linear->mean > row.mean,
                  "gamma=1 mean " + fmt(linear->mean) + " not above gamma=" +
                      fmt(row.config.gamma) + " mean " + fmt(row.mean));
    if (row.config.gamma == 0.0 || row.config.gamma == 4.0)
      check.require(linear->ci_lower > row.ci_upper,
                    "CI overlap against gamma=" + fmt(row.config.gamma));
  }
  return check.ok;
}

// ---------------------------------------------------------------------------
// Criterion 2: performance is robust to the assumed rate once it is above 0.5.

bool criterion_eta_robustness(Check& check) {
  SweepGrid grid;
  grid.n_agents = {1000};
  grid.n_options = {10};
  grid.n_rounds = {200};
  grid.true_best_rate = {0.7};
  grid.assumed_best_rate = {0.5, 0.6, 0.7, 0.8, 0.9};
  grid.gamma = {1.0};
  grid.repetitions = 200;
  grid.seed = 1002;
  const auto rows = run_sweep(grid, 0);

  const SweepRow* ignorant = nullptr;
  for (const SweepRow& row : rows)
    if (row.config.assumed_best_rate == 0.5) ignorant = &row;
  const double half_width = 0.5 * (ignorant->ci_upper - ignorant->ci_lower);

  std::vector<double> informed;
  for (const SweepRow& row : rows) {
    if (row.config.assumed_best_rate == 0.5) continue;
    const double lift = row.mean - ignorant->mean;
    check.require(lift >= 5.0 * half_width,
                  "eta=" + fmt(row.config.assumed_best_rate) + " lift " + fmt(lift) +
                      " under 5x half-width " + fmt(half_width));
    informed.push_back(row.mean);
  }
  const double spread = *std::max_element(informed.begin(), informed.end()) -
                        *std::min_element(informed.begin(), informed.end());
  double mean_lift = 0.0;
  for (double m : informed) mean_lift += m - ignorant->mean;
  mean_lift /= double(informed.size());
  std::string cells = "cells:";
  for (const SweepRow& row : rows)
    cells += " eta=" + fmt(row.config.assumed_best_rate) + "->" + fmt(row.mean);
  check.require(spread < 0.25 * mean_lift,
                "spread " + fmt(spread) + " not under 25% of mean lift " + fmt(mean_lift) +
                    " (" + cells + ")");
  return check.ok;
}

// ---------------------------------------------------------------------------
// Criterion 3: popularity share tracks the exact posterior.

bool criterion_posterior_tracking(Check& check) {
  SimulationConfig cfg;
  cfg.n_agents = 10000;
  cfg.n_options = 5;
  cfg.n_rounds = 300;
  cfg.true_best_rate = 0.7;
  cfg.assumed_best_rate = 0.7;
  cfg.gamma = 1.0;
  const int seeds = 50;
  std::vector<double> per_seed(seeds);
  parallel_for(seeds, 0, [&](std::size_t s) {
    SimulationConfig local = cfg;
    local.seed = derive_seed(1003, s);
    const SimulationResult r = run_simulation(local);
    double acc = 0.0;
    for (std::size_t t = 150; t < r.posterior_l1_trajectory.size(); ++t)
      acc += r.posterior_l1_trajectory[t];
    per_seed[s] = acc / 150.0;
  });
  const double mean_l1 =
      std::accumulate(per_seed.begin(), per_seed.end(), 0.0) / double(seeds);
  check.require(mean_l1 <= 0.15, "mean L1 " + fmt(mean_l1) + " exceeds 0.15");
  return check.ok;
}

// ---------------------------------------------------------------------------
// Criterion 4: parameter recovery and profile argmax.

bool criterion_recovery(Check& check) {
  const int seeds = 20;
  std::vector<double> eta_error(seeds);
  std::vector<int> argmax_ok(seeds);
  const std::vector<double> grid = {0.5, 0.75, 1.0, 1.25, 1.5, 2.0};
  parallel_for(seeds, 0, [&](std::size_t s) {
    const PanelDataset panel =
        make_choice_panel(SocialSampling{0.8, 1.0}, 50, 100, 1000, 2000 + s);
    const FitResult fitted = fit(ModelFamily::social_sampling, panel);
    eta_error[s] = std::fabs(std::get<SocialSampling>(fitted.model).eta - 0.8);
    const auto profile = gamma_profile(panel, grid);
    const auto best = std::max_element(profile.begin(), profile.end(),
                                       [](const ProfilePoint& a, const ProfilePoint& b) {
                                         return a.log_likelihood < b.log_likelihood;
                                       });
    argmax_ok[s] = best->gamma == 1.0;
  });
  std::vector<double> sorted = eta_error;
  std::sort(sorted.begin(), sorted.end());
  const double median = 0.5 * (sorted[9] + sorted[10]);
  const int hits = std::accumulate(argmax_ok.begin(), argmax_ok.end(), 0);
  check.require(median <= 0.02, "median |eta error| " + fmt(median) + " exceeds 0.02");
  check.require(hits >= 18, "profile argmax at gamma=1 in only " + std::to_string(hits) +
                                "/20 seeds");
  return check.ok;
}

// ---------------------------------------------------------------------------
// Criterion 5: model discrimination across all three CV schemes.

bool criterion_discrimination(Check& check) {
  const std::vector<ModelFamily> families = all_families();
  const std::vector<CVScheme> schemes = [] {
    CVScheme by_user{CVKind::by_user_10fold, 0.10, 10, 77};
    CVScheme by_day{CVKind::by_day_10fold, 0.10, 10, 77};
    CVScheme temporal{CVKind::temporal_last_fraction, 0.10, 10, 77};
    return std::vector<CVScheme>{by_user, by_day, temporal};
  }();

  // Sparse decision volume (under one expected gain per option-day) keeps the
  // gains-any-mimickers classification informative, like the real panels.
  const PanelDataset social_panel =
      make_choice_panel(SocialSampling{0.8, 1.0}, 50, 100, 40, 3001);
  for (const CVScheme& scheme : schemes) {
    const ErrorReport report = cross_validate(families, social_panel, scheme, 0);
    const auto social = std::find_if(report.families.begin(), report.families.end(),
                                     [](const auto& row) {
                                       return row.family == ModelFamily::social_sampling;
                                     });
    for (const auto& row : report.families) {
      check.require(social->mae <= row.mae,
                    std::string(cv_kind_name(scheme.kind)) + ": social MAE " +
                        fmt(social->mae) + " beaten by " + family_name(row.family) + " " +
                        fmt(row.mae));
      check.require(social->f_score >= row.f_score,
                    std::string(cv_kind_name(scheme.kind)) + ": social F " +
                        fmt(social->f_score) + " beaten by " + family_name(row.family) + " " +
                        fmt(row.f_score));
    }
  }

  const PanelDataset popularity_panel = make_choice_panel(Popularity{}, 50, 100, 40, 3002);
  for (const CVScheme& scheme : schemes) {
    const ErrorReport report = cross_validate(families, popularity_panel, scheme, 0);
    double best_mae = 1e300, popularity_mae = 0.0;
    for (const auto& row : report.families) {
      best_mae = std::min(best_mae, row.mae);
      if (row.family == ModelFamily::popularity) popularity_mae = row.mae;
    }
    check.require(popularity_mae <= 1.01 * best_mae,
                  std::string(cv_kind_name(scheme.kind)) + ": popularity MAE " +
                      fmt(popularity_mae) + " above 1% of best " + fmt(best_mae));
  }
  return check.ok;
}

// ---------------------------------------------------------------------------
// Criterion 6: the interaction regression is positive and significant.

bool criterion_interaction_regression(Check& check) {
  const int seeds = 20;
  std::vector<int> significant(seeds);
  parallel_for(seeds, 0, [&](std::size_t s) {
    const PanelDataset panel =
        make_choice_panel(SocialSampling{0.8, 1.0}, 50, 100, 1000, 4000 + s, 0.05, 100);
    const RegressionResult r = ols_interaction_regression(panel);
    significant[s] = r.coefficients[3] > 0.0 && r.p_values[3] < 0.05;
  });
  const int hits = std::accumulate(significant.begin(), significant.end(), 0);
  check.require(hits >= 18, "positive significant interaction in only " +
                                std::to_string(hits) + "/20 seeds");

  // Exact interpolation of a noiseless law.
  std::vector<OlsRow> rows;
  std::mt19937_64 engine = make_engine(46);
  std::uniform_real_distribution<double> pop(0.0, 40.0), perf(-0.5, 0.5);
  for (int i = 0; i < 24; ++i) {
    const double p = pop(engine), q = perf(engine);
    rows.push_back({p, q, 0.01 + 0.005 * p + 0.02 * q + 0.05 * p * q});
  }
  const RegressionResult exact = ols_interaction_regression(rows);
  const double tol = 1e-10;
  check.require(std::fabs(exact.coefficients[0] - 0.01) < tol &&
                    std::fabs(exact.coefficients[1] - 0.005) < tol &&
                    std::fabs(exact.coefficients[2] - 0.02) < tol &&
                    std::fabs(exact.coefficients[3] - 0.05) < tol,
                "exact interpolation drifted beyond 1e-10");
  return check.ok;
}

// ---------------------------------------------------------------------------
// Criterion 7: metric fixtures.

bool criterion_metric_fixtures(Check& check) {
  const ErrorMetrics m = error_metrics({0.6, 0.2, 1.4}, {1, 0, 0});
  check.require(std::fabs(m.mae - 2.0 / 3.0) < 1e-9, "mae fixture " + fmt(m.mae));
  check.require(std::fabs(m.mse - 0.72) < 1e-9, "mse fixture " + fmt(m.mse));
  check.require(std::fabs(m.f_score - 2.0 / 3.0) < 1e-9, "f fixture " + fmt(m.f_score));

  check.require(relative_error({1, 2, 3}, {1, 2, 3}) == 0.0, "relative error identity");
  check.require(relative_error({2, 2, 2}, {1, 3, 1}) == 2.0 / 3.0, "relative error 2/3");
  check.require(relative_error({1, 1}, {5, 5}) == 0.0, "relative error dominated");

  const CredibleInterval flat = skill_credible_interval(0, 0, 0.95);
  check.require(std::fabs(flat.lower - 0.025) < 1e-9 && std::fabs(flat.upper - 0.975) < 1e-9,
                "uniform Beta(1,1) quantiles [" + fmt(flat.lower) + ", " + fmt(flat.upper) +
                    "]");
  const CredibleInterval ci = skill_credible_interval(60, 40, 0.95);
  const double lo = socsamp::testing::beta_quantile_quadrature(0.025, 61, 41);
  const double hi = socsamp::testing::beta_quantile_quadrature(0.975, 61, 41);
  check.require(std::fabs(ci.lower - lo) < 1e-6 && std::fabs(ci.upper - hi) < 1e-6,
                "Beta(61,41) interval deviates from the quadrature oracle");
  return check.ok;
}

// ---------------------------------------------------------------------------
// Criterion 8: pipeline round-trips.

bool criterion_pipeline_roundtrip(Check& check) {
  SyntheticMarketConfig cfg;
  cfg.n_users = 12;
  cfg.n_days = 80;
  cfg.decisions_per_day = 20;
  cfg.generator_model = SocialSampling{0.8, 1.0};
  cfg.best_skill = 0.8;
  cfg.unfollow_rate = 0.05;
  cfg.seed = 8001;
  cfg.window_days = 20;
  const SyntheticMarket market = generate_synthetic_market(cfg);

  std::ostringstream emitted;
  write_trades_csv(emitted, market.trades);
  std::istringstream in(emitted.str());
  const ParseResult parsed = parse_trades(in);
  check.require(parsed.diagnostics.empty(), "unexpected parse diagnostics");
  const MimicHistory history = reconstruct_popularity(parsed.records);
  PerformanceMetricSpec spec;
  spec.window_days = cfg.window_days;
  const PerformanceTable performance = compute_performance(parsed.records, spec);
  PanelBuildOptions options;
  options.window_days = cfg.window_days;
  const PanelDataset rebuilt = build_panel(history, performance, options);
  std::ostringstream truth_csv, rebuilt_csv;
  write_panel_csv(truth_csv, market.panel);
  write_panel_csv(rebuilt_csv, rebuilt);
  check.require(truth_csv.str() == rebuilt_csv.str(), "synth->ingest panel not byte-exact");

  // Imputation: delete 50 parents with surviving copies, keeping one ratio
  // pair alive per affected mirror.
  std::map<std::int64_t, const TradeRecord*> by_id;
  for (const TradeRecord& t : market.trades) by_id[t.trade_id] = &t;
  std::map<std::int64_t, int> mirror_pairs;
  std::map<std::int64_t, std::vector<std::int64_t>> parent_mirrors;
  for (const TradeRecord& t : market.trades) {
    if (!t.mirror_id || !t.parent_trade_id) continue;
    mirror_pairs[*t.mirror_id] += 1;
    parent_mirrors[*t.parent_trade_id].push_back(*t.mirror_id);
  }
  std::set<std::int64_t> deleted;
  for (const auto& [parent, mirrors] : parent_mirrors) {
    if (deleted.size() == 50) break;
    bool safe = true;
    for (std::int64_t m : mirrors) safe &= mirror_pairs[m] >= 2;
    if (!safe) continue;
    for (std::int64_t m : mirrors) mirror_pairs[m] -= 1;
    deleted.insert(parent);
  }
  check.require(deleted.size() == 50, "could not select 50 deletable parents");
  std::vector<TradeRecord> pruned;
  for (const TradeRecord& t : market.trades)
    if (!deleted.count(t.trade_id)) pruned.push_back(t);
  const ImputationResult imputed = impute_missing_parents(pruned);
  check.require(imputed.imputed_count == std::int64_t(deleted.size()),
                "imputed " + std::to_string(imputed.imputed_count) + " of 50");
  int signs = 0;
  for (std::int64_t id : deleted) {
    const auto it = std::find_if(imputed.records.begin(), imputed.records.end(),
                                 [&](const TradeRecord& t) { return t.trade_id == id; });
    if (it == imputed.records.end()) continue;
    signs += (by_id.at(id)->net_profit > 0) == (it->net_profit > 0);
  }
  check.require(signs == 50, "profit sign recovered for " + std::to_string(signs) + "/50");

  // Hand-traced median-ratio fixture: ratios {0.1, 0.2}, copies {5, 8}
  // -> proposals {50, 40} -> units 45; single copy at ratio 0.5, units 7 -> 14.
  auto fixture_trade = [](std::int64_t id, std::int64_t user, Day day, double units,
                          std::optional<std::int64_t> parent,
                          std::optional<std::int64_t> mirror) {
    TradeRecord t;
    t.trade_id = id;
    t.user_id = user;
    t.open_date = t.close_date = day;
    t.asset = "EURUSD";
    t.units = units;
    t.amount_invested = units;
    t.leverage = 1.0;
    t.open_rate = 1.0;
    t.close_rate = 1.1;
    t.net_profit = units * 0.1;
    t.parent_trade_id = parent;
    t.mirror_id = mirror;
    return t;
  };
  const Day d0 = *parse_date("2011-06-06");
  std::vector<TradeRecord> fixture;
  fixture.push_back(fixture_trade(1, 1, d0, 10, std::nullopt, std::nullopt));
  fixture.push_back(fixture_trade(2, 2, d0, 1, 1, 100));
  fixture.push_back(fixture_trade(3, 1, d0 + 1, 10, std::nullopt, std::nullopt));
  fixture.push_back(fixture_trade(4, 3, d0 + 1, 2, 3, 200));
  fixture.push_back(fixture_trade(5, 2, d0 + 2, 5, 99, 100));
  fixture.push_back(fixture_trade(6, 3, d0 + 2, 8, 99, 200));
  fixture.push_back(fixture_trade(7, 2, d0 + 3, 7, 55, 100));
  // Rebuild mirror 100's ratio to 0.5 for the single-proposal case: add a
  // second mirror with that ratio instead.
  fixture.push_back(fixture_trade(8, 1, d0 + 3, 10, std::nullopt, std::nullopt));
  fixture.push_back(fixture_trade(9, 4, d0 + 3, 5, 8, 300));
  fixture.push_back(fixture_trade(10, 4, d0 + 4, 7, 56, 300));
  const ImputationResult hand = impute_missing_parents(fixture);
  const auto find_imputed = [&](std::int64_t id) -> const TradeRecord* {
    const auto it = std::find_if(hand.records.begin(), hand.records.end(),
                                 [&](const TradeRecord& t) { return t.trade_id == id; });
    return it == hand.records.end() ? nullptr : &*it;
  };
  const TradeRecord* median_case = find_imputed(99);
  check.require(median_case && std::fabs(median_case->units - 45.0) < 1e-12,
                "median-of-medians fixture units");
  const TradeRecord* single_case = find_imputed(56);
  check.require(single_case && std::fabs(single_case->units - 14.0) < 1e-12,
                "single-proposal fixture units");
  const TradeRecord* chained = find_imputed(55);
  check.require(chained && std::fabs(chained->units - 70.0) < 1e-12,
                "ratio-0.1 fixture units");
  return check.ok;
}

// ---------------------------------------------------------------------------
// Criterion 9: kernel reductions and invariants as property tests.

bool criterion_kernel_properties(Check& check) {
  std::mt19937_64 engine = make_engine(9001);
  int simplex_ok = 0, perm_ok = 0, reduction_a = 0, reduction_b = 0, reduction_c = 0,
      monotone_ok = 0, onestep_ok = 0, batch_ok = 0;
  const int iterations = 1000;
  auto linf = [](const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::fabs(a[i] - b[i]));
    return d;
  };

  for (int it = 0; it < iterations; ++it) {
    MarketSnapshot snap = socsamp::testing::random_snapshot(engine);
    while (snap.active_count() < 2) snap = socsamp::testing::random_snapshot(engine);
    const ModelSpec model = socsamp::testing::random_model(engine);
    const double eta = socsamp::testing::random_eta(engine);

    const auto theta = decision_probabilities(model, snap);
    double sum = 0.0;
    bool nonneg = true;
    for (double t : theta) {
      sum += t;
      nonneg &= t >= 0.0;
    }
    simplex_ok += nonneg && std::fabs(sum - 1.0) < 1e-9;

    std::vector<std::size_t> perm(snap.active_count());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), engine);
    MarketSnapshot permuted;
    for (std::size_t j : perm) {
      permuted.popularity.push_back(snap.popularity[j]);
      permuted.performance.push_back(snap.performance[j]);
    }
    const auto theta_perm = decision_probabilities(model, permuted);
    bool match = true;
    for (std::size_t k = 0; k < perm.size(); ++k)
      match &= std::fabs(theta_perm[k] - theta[perm[k]]) < 1e-12;
    perm_ok += match;

    MarketSnapshot equal_pop = snap;
    std::fill(equal_pop.popularity.begin(), equal_pop.popularity.end(), 7);
    reduction_a += linf(decision_probabilities(SocialSampling{eta, 1.0}, equal_pop),
                        decision_probabilities(Performance{eta}, equal_pop)) < 1e-14;
    reduction_b += linf(decision_probabilities(SocialSampling{0.5 + 1e-9, 1.0}, snap),
                        decision_probabilities(Popularity{}, snap)) < 1e-6;
    reduction_c += linf(decision_probabilities(SocialSampling{eta, 0.0}, snap),
                        decision_probabilities(Performance{eta}, snap)) < 1e-14;

    const std::size_t j = std::size_t(engine() % snap.active_count());
    const auto base = decision_probabilities(SocialSampling{eta, 1.0}, snap);
    MarketSnapshot bumped = snap;
    bumped.popularity[j] += 3;
    MarketSnapshot flipped = snap;
    flipped.performance[j] = std::fabs(flipped.performance[j]) + 0.1;
    const auto theta_bumped = decision_probabilities(SocialSampling{eta, 1.0}, bumped);
    const auto theta_flipped = decision_probabilities(SocialSampling{eta, 1.0}, flipped);
    const bool pop_up = theta_bumped[j] > base[j];
    const bool sig_up = binarize_signal(snap.performance[j]) == 1 ||
                        theta_flipped[j] > base[j];
    monotone_ok += pop_up && sig_up;

    MarketSnapshot zero_pop = snap;
    std::fill(zero_pop.popularity.begin(), zero_pop.popularity.end(), 0);
    std::vector<int> signals(zero_pop.active_count());
    for (std::size_t k = 0; k < signals.size(); ++k)
      signals[k] = binarize_signal(zero_pop.performance[k]);
    const auto one_step =
        posterior_update(posterior_init(zero_pop.active_count(), eta), signals);
    onestep_ok += linf(decision_probabilities(SocialSampling{eta, 1.0}, zero_pop),
                       one_step.probabilities()) < 1e-6;

    // Sequential vs batch posterior over a short history.
    const int days = 1 + int(engine() % 12);
    PosteriorState seq = posterior_init(snap.active_count(), eta);
    std::vector<std::int64_t> good(snap.active_count(), 0);
    for (int d = 0; d < days; ++d) {
      std::vector<int> column(snap.active_count());
      for (std::size_t k = 0; k < column.size(); ++k) {
        column[k] = int(engine() % 2);
        good[k] += column[k];
      }
      seq = posterior_update(seq, column);
    }
    const double lg = std::log(eta / 0.5), lb = std::log((1.0 - eta) / 0.5);
    double max_seq = -1e300, max_batch = -1e300;
    std::vector<double> batch(snap.active_count());
    for (std::size_t k = 0; k < batch.size(); ++k) {
      batch[k] = double(good[k]) * lg + double(days - good[k]) * lb;
      max_seq = std::max(max_seq, seq.log_weights[k]);
      max_batch = std::max(max_batch, batch[k]);
    }
    bool batch_match = true;
    for (std::size_t k = 0; k < batch.size(); ++k)
      batch_match &=
          std::fabs((seq.log_weights[k] - max_seq) - (batch[k] - max_batch)) < 1e-9;
    batch_ok += batch_match;
  }

  check.require(simplex_ok == iterations, "simplex failures");
  check.require(perm_ok == iterations, "permutation equivariance failures");
  check.require(reduction_a == iterations, "reduction A failures");
  check.require(reduction_b == iterations, "reduction B failures");
  check.require(reduction_c == iterations, "reduction C failures");
  check.require(monotone_ok == iterations, "monotonicity failures");
  check.require(onestep_ok == iterations, "one-step consistency failures");
  check.require(batch_ok == iterations, "posterior batch-vs-sequential failures");
  return check.ok;
}

// ---------------------------------------------------------------------------
// Criterion 10: CLI determinism via manifest replay.

bool criterion_cli_determinism(Check& check) {
  const fs::path root = fs::temp_directory_path() / "socsamp_acceptance";
  fs::remove_all(root);
  fs::create_directories(root);
  std::ostringstream sink_out, sink_err;
  auto run = [&](const std::vector<std::string>& args) {
    return run_command(args, sink_out, sink_err);
  };
  auto file_bytes = [](const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
  };
  auto same_outputs = [&](const fs::path& a, const fs::path& b) {
    std::ifstream mf(a / "manifest.json");
    nlohmann::json manifest;
    mf >> manifest;
    for (const auto& out : manifest.at("outputs")) {
      const std::string name = out.get<std::string>();
      if (file_bytes(a / name) != file_bytes(b / name)) return name;
    }
    return std::string();
  };

  {
    std::ofstream cfg(root / "sim.json");
    cfg << R"({"schema_version":1,"grid":{"n_agents":[400],"n_options":[5],"n_rounds":[40],)"
        << R"("true_best_rate":[0.7],"assumed_best_rate":[0.6,0.7],"gamma":[1.0],)"
        << R"("repetitions":15,"seed":77}})";
  }
  {
    std::ofstream cfg(root / "market.json");
    cfg << R"({"schema_version":1,"market":{"n_users":9,"n_days":45,"decisions_per_day":10,)"
        << R"("generator_model":{"family":"social_sampling","eta":0.8,"gamma":1.0},)"
        << R"("best_skill":0.8,"unfollow_rate":0.04,"seed":13,"window_days":12}})";
  }

  struct Step {
    const char* name;
    std::vector<std::string> argv;
  };
  const std::vector<Step> steps = {
      {"simulate",
       {"--config", (root / "sim.json").string(), "--out", (root / "simulate").string(),
        "simulate"}},
      {"synth",
       {"--config", (root / "market.json").string(), "--out", (root / "synth").string(),
        "synth"}},
      {"ingest",
       {"--out", (root / "ingest").string(), "ingest", "--trades",
        (root / "synth" / "trades.csv").string(), "--window", "12"}},
      {"fit",
       {"--out", (root / "fit").string(), "fit", "--panel",
        (root / "synth" / "panel.csv").string(), "--family", "social_sampling",
        "--gamma-profile", "0.5,1,2"}},
      {"evaluate",
       {"--out", (root / "evaluate").string(), "--seed", "5", "evaluate", "--panel",
        (root / "synth" / "panel.csv").string(), "--scheme", "by_day", "--folds", "4"}},
  };
  for (const Step& step : steps) {
    const int code = run(step.argv);
    check.require(code == 0, std::string(step.name) + " exited " + std::to_string(code));
    if (code != 0) continue;
    const fs::path original = root / step.name;
    const fs::path replayed = root / (std::string(step.name) + "_replay");
    std::ostringstream out, err;
    const int replay_code =
        replay_manifest((original / "manifest.json").string(), replayed.string(), out, err);
    check.require(replay_code == 0,
                  std::string(step.name) + " replay exited " + std::to_string(replay_code));
    if (replay_code != 0) continue;
    const std::string mismatch = same_outputs(original, replayed);
    check.require(mismatch.empty(),
                  std::string(step.name) + " replay differs in " + mismatch);
  }
  fs::remove_all(root);
  return check.ok;
}

}  // namespace

int main(int argc, char** argv) {
  struct Criterion {
    int id;
    const char* name;
    std::function<bool(Check&)> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "gamma sweep peaks at the linear popularity prior", criterion_gamma_sweep},
      {2, "group performance is flat across assumed rates above 0.5", criterion_eta_robustness},
      {3, "popularity share tracks the exact posterior", criterion_posterior_tracking},
      {4, "eta recovery and gamma-profile argmax", criterion_recovery},
      {5, "cross-validated model discrimination", criterion_discrimination},
      {6, "positive significant popularity-performance interaction",
       criterion_interaction_regression},
      {7, "error-metric and credible-interval fixtures", criterion_metric_fixtures},
      {8, "trade-log round-trips and imputation", criterion_pipeline_roundtrip},
      {9, "choice-kernel invariants and reductions", criterion_kernel_properties},
      {10, "CLI determinism under manifest replay", criterion_cli_determinism},
  };

  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (const Criterion& criterion : criteria) {
    if (!selected.empty() && !selected.count(criterion.id)) continue;
    Check check;
    bool ok = false;
    std::string error;
    try {
      ok = criterion.run(check);
    } catch (const std::exception& e) {
      ok = false;
      error = e.what();
    }
    if (ok) {
      std::printf("[PASS] criterion %d: %s\n", criterion.id, criterion.name);
    } else {
      ++failures;
      std::printf("[FAIL] criterion %d: %s", criterion.id, criterion.name);
      if (!check.detail.empty()) std::printf(" -- %s", check.detail.c_str());
      if (!error.empty()) std::printf(" -- exception: %s", error.c_str());
      std::printf("\n");
    }
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
