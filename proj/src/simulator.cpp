#include "socsamp/simulator.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "socsamp/errors.hpp"
#include "socsamp/models.hpp"
#include "socsamp/parallel.hpp"
#include "socsamp/rng.hpp"
#include "socsamp/stats.hpp"

namespace socsamp {

namespace {

void require(bool ok, const char* message) {
  if (!ok) throw std::invalid_argument(message);
}

double commit_probability(double eta, int reward) { return reward ? eta : 1.0 - eta; }

std::vector<int> draw_rewards(std::int64_t n_options, std::int64_t best_option,
                              double true_best_rate, std::mt19937_64& engine) {
  std::vector<int> rewards(static_cast<std::size_t>(n_options));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::int64_t j = 0; j < n_options; ++j) {
    const double rate = (j == best_option) ? true_best_rate : 0.5;
    rewards[static_cast<std::size_t>(j)] = unit(engine) < rate ? 1 : 0;
  }
  return rewards;
}

double popularity_posterior_l1(const std::vector<std::int64_t>& counts,
                               const PosteriorState& posterior) {
  std::int64_t total = 0;
  for (std::int64_t c : counts) total += c;
  const ProbabilityVector post = posterior.probabilities();
  double l1 = 0.0;
  for (std::size_t j = 0; j < counts.size(); ++j) {
    const double share =
        total > 0 ? static_cast<double>(counts[j]) / static_cast<double>(total) : 0.0;
    l1 += std::fabs(share - post[j]);
  }
  return l1;
}

// Shared body of the plain and unfollow runs.
SimulationResult simulate(const SimulationConfig& config, bool unfollow) {
  config.validate();
  const std::size_t m = static_cast<std::size_t>(config.n_options);
  std::mt19937_64 engine = make_engine(derive_seed(config.seed, 0x5150u));
  std::uniform_int_distribution<std::int64_t> pick_best(0, config.n_options - 1);
  const std::int64_t best_option = pick_best(engine);

  SimulationResult result;
  result.best_option = best_option;
  result.popularity_trajectory.reserve(static_cast<std::size_t>(config.n_rounds));
  result.posterior_l1_trajectory.reserve(static_cast<std::size_t>(config.n_rounds));

  // Posterior diagnostics use the agents' assumed rate; at 0.5 the update is
  // a no-op, matching agents who ignore performance.
  const double oracle_eta =
      config.assumed_best_rate > 0.5 ? config.assumed_best_rate : 0.5 + 1e-12;
  PosteriorState posterior = posterior_init(m, oracle_eta);

  std::vector<std::int64_t> counts(m, 0);
  std::vector<int> observed = draw_rewards(config.n_options, best_option,
                                           config.true_best_rate, engine);
  for (std::int64_t round = 1; round <= config.n_rounds; ++round) {
    std::vector<std::int64_t> next;
    if (unfollow) {
      next = persist_commitments(counts, observed, config.assumed_best_rate, engine);
      const std::vector<std::int64_t> fresh = run_round(config, counts, observed, engine);
      for (std::size_t j = 0; j < m; ++j) next[j] += fresh[j];
    } else {
      next = run_round(config, counts, observed, engine);
    }
    posterior = posterior_update(posterior, observed);
    result.posterior_l1_trajectory.push_back(popularity_posterior_l1(next, posterior));

    const std::vector<int> scored = draw_rewards(config.n_options, best_option,
                                                 config.true_best_rate, engine);
    if (round == config.n_rounds) {
      std::int64_t committed = 0;
      double reward_sum = 0.0;
      double expected_sum = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        committed += next[j];
        reward_sum += static_cast<double>(next[j]) * scored[j];
        const double rate =
            std::int64_t(j) == best_option ? config.true_best_rate : 0.5;
        expected_sum += static_cast<double>(next[j]) * rate;
      }
      result.committing_count_final = committed;
      if (committed > 0) {
        result.mean_mimicker_performance = reward_sum / static_cast<double>(committed);
        result.expected_mimicker_performance = expected_sum / static_cast<double>(committed);
      } else {
        result.mean_mimicker_performance = std::numeric_limits<double>::quiet_NaN();
        result.expected_mimicker_performance = std::numeric_limits<double>::quiet_NaN();
      }
    }
    result.popularity_trajectory.push_back(next);
    counts = std::move(next);
    observed = scored;
  }
  return result;
}

}  // namespace

void SimulationConfig::validate() const {
  require(n_agents >= 1, "simulation: n_agents must be >= 1");
  require(n_options >= 1, "simulation: n_options must be >= 1");
  require(n_rounds >= 1, "simulation: n_rounds must be >= 1");
  require(true_best_rate > 0.5 && true_best_rate < 1.0,
          "simulation: true_best_rate outside (0.5, 1)");
  require(assumed_best_rate >= 0.5 && assumed_best_rate < 1.0,
          "simulation: assumed_best_rate outside [0.5, 1)");
  require(std::isfinite(gamma) && gamma >= 0.0, "simulation: gamma must be finite and >= 0");
  require(repetitions >= 1, "simulation: repetitions must be >= 1");
}

std::vector<std::int64_t> run_round(const SimulationConfig& config,
                                    const std::vector<std::int64_t>& prev_counts,
                                    const std::vector<int>& rewards, std::mt19937_64& engine) {
  const std::size_t m = static_cast<std::size_t>(config.n_options);
  require(prev_counts.size() == m, "run_round: prev_counts length != n_options");
  require(rewards.size() == m, "run_round: rewards length != n_options");

  // Consideration weights p^gamma + 1/M. Sampling the per-option
  // consideration counts as a multinomial and the commits as binomials is
  // distributionally identical to iterating the agents one by one.
  std::vector<double> weights(m);
  const double eps = 1.0 / static_cast<double>(m);
  for (std::size_t j = 0; j < m; ++j) {
    double base = 1.0;
    if (config.gamma != 0.0)
      base = std::pow(static_cast<double>(prev_counts[j]), config.gamma);
    weights[j] = base + eps;
  }
  const std::vector<std::int64_t> considered =
      sample_multinomial(config.n_agents, weights, engine);

  std::vector<std::int64_t> commits(m, 0);
  for (std::size_t j = 0; j < m; ++j) {
    if (considered[j] == 0) continue;
    const double p = commit_probability(config.assumed_best_rate, rewards[j]);
    std::binomial_distribution<std::int64_t> binom(considered[j], p);
    commits[j] = binom(engine);
  }
  return commits;
}

std::vector<std::int64_t> persist_commitments(const std::vector<std::int64_t>& counts,
                                              const std::vector<int>& rewards, double eta,
                                              std::mt19937_64& engine) {
  require(counts.size() == rewards.size(), "persist_commitments: length mismatch");
  std::vector<std::int64_t> survived(counts.size(), 0);
  for (std::size_t j = 0; j < counts.size(); ++j) {
    if (counts[j] == 0) continue;
    const double p = commit_probability(eta, rewards[j]);
    std::binomial_distribution<std::int64_t> binom(counts[j], p);
    survived[j] = binom(engine);
  }
  return survived;
}

SimulationResult run_simulation(const SimulationConfig& config) {
  return simulate(config, /*unfollow=*/false);
}

SimulationResult run_unfollow_simulation(const SimulationConfig& config) {
  require(config.unfollow_enabled, "run_unfollow_simulation: unfollow_enabled must be set");
  return simulate(config, /*unfollow=*/true);
}

void SweepGrid::validate() const {
  require(!n_agents.empty() && !n_options.empty() && !n_rounds.empty() &&
              !true_best_rate.empty() && !assumed_best_rate.empty() && !gamma.empty(),
          "sweep: every axis needs at least one value");
  require(repetitions >= 1, "sweep: repetitions must be >= 1");
  require(max_cells >= 1, "sweep: max_cells must be >= 1");
}

std::size_t SweepGrid::cell_count() const {
  return n_agents.size() * n_options.size() * n_rounds.size() * true_best_rate.size() *
         assumed_best_rate.size() * gamma.size();
}

std::vector<SweepRow> run_sweep(const SweepGrid& grid, int threads) {
  grid.validate();
  const std::size_t cells = grid.cell_count();
  if (cells > static_cast<std::size_t>(grid.max_cells))
    throw CapExceeded("sweep: " + std::to_string(cells) + " cells exceed the cap of " +
                      std::to_string(grid.max_cells));

  std::vector<SweepRow> rows(cells);
  std::size_t index = 0;
  for (std::int64_t agents : grid.n_agents)
    for (std::int64_t options : grid.n_options)
      for (std::int64_t rounds : grid.n_rounds)
        for (double true_rate : grid.true_best_rate)
          for (double assumed_rate : grid.assumed_best_rate)
            for (double g : grid.gamma) {
              SweepRow& row = rows[index];
              row.cell_index = index;
              row.config.n_agents = agents;
              row.config.n_options = options;
              row.config.n_rounds = rounds;
              row.config.true_best_rate = true_rate;
              row.config.assumed_best_rate = assumed_rate;
              row.config.gamma = g;
              row.config.cost = grid.cost;
              row.config.repetitions = grid.repetitions;
              row.config.seed = grid.seed;
              row.config.unfollow_enabled = grid.unfollow_enabled;
              row.config.validate();
              ++index;
            }

  const std::size_t reps = static_cast<std::size_t>(grid.repetitions);
  std::vector<double> rep_means(cells * reps);
  parallel_for(cells * reps, threads, [&](std::size_t unit) {
    const std::size_t cell = unit / reps;
    const std::size_t rep = unit % reps;
    SimulationConfig config = rows[cell].config;
    config.seed = derive_seed(grid.seed, cell, rep);
    const SimulationResult r = grid.unfollow_enabled ? run_unfollow_simulation(config)
                                                     : run_simulation(config);
    rep_means[unit] = r.expected_mimicker_performance;
  });

  for (std::size_t cell = 0; cell < cells; ++cell) {
    std::vector<double> means;
    means.reserve(reps);
    for (std::size_t rep = 0; rep < reps; ++rep) {
      const double v = rep_means[cell * reps + rep];
      if (std::isfinite(v)) means.push_back(v);
    }
    const MeanCI ci = mean_ci95(means);
    rows[cell].mean = ci.mean;
    rows[cell].ci_lower = ci.lower;
    rows[cell].ci_upper = ci.upper;
    rows[cell].mean_net_of_cost = ci.mean - grid.cost;
    rows[cell].repetitions_used = static_cast<std::int64_t>(means.size());
  }
  return rows;
}

}  // namespace socsamp
