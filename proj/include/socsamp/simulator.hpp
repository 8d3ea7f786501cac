#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace socsamp {

// Idealized multi-agent environment: M options, one of which is best and
// emits good Bernoulli rewards at rate true_best_rate while the rest emit at
// 0.5. Agents consider an option with probability proportional to
// p^gamma + 1/M and commit with probability eta^r (1-eta)^(1-r) using their
// assumed rate.
struct SimulationConfig {
  std::int64_t n_agents = 1000;
  std::int64_t n_options = 10;
  std::int64_t n_rounds = 100;
  double true_best_rate = 0.7;     // eta*, in (0.5, 1)
  double assumed_best_rate = 0.7;  // eta, in [0.5, 1); 0.5 ignores performance
  double gamma = 1.0;
  double cost = 0.5;
  std::int64_t repetitions = 1;
  std::uint64_t seed = 0;
  bool unfollow_enabled = false;

  void validate() const;
};

struct SimulationResult {
  // Mean final-round reward among agents holding a commitment in the final
  // round; NaN when nobody commits. Raw reward; net-of-cost is derived
  // downstream.
  double mean_mimicker_performance = 0.0;
  // Conditional expectation of the same quantity given the final allocation:
  // commit shares weighted by each option's true reward rate. Identical in
  // expectation, far lower variance (the realized value is a single shared
  // Bernoulli draw per option).
  double expected_mimicker_performance = 0.0;
  std::int64_t committing_count_final = 0;
  std::int64_t best_option = 0;  // index of the option drawing good rewards at eta*
  std::vector<std::vector<std::int64_t>> popularity_trajectory;  // rounds x options
  // L1 distance between the popularity share and the exact posterior under
  // the agents' assumed rate, per round.
  std::vector<double> posterior_l1_trajectory;
};

// One decision round: every agent samples an option with probability
// proportional to prev_counts^gamma + 1/M, then commits with probability
// eta^r (1-eta)^(1-r); non-committers abstain. Returns per-option commit
// counts.
std::vector<std::int64_t> run_round(const SimulationConfig& config,
                                    const std::vector<std::int64_t>& prev_counts,
                                    const std::vector<int>& rewards, std::mt19937_64& engine);

// Survival step of the unfollow extension: each standing commitment to
// option j persists with probability eta^r (1-eta)^(1-r).
std::vector<std::int64_t> persist_commitments(const std::vector<std::int64_t>& counts,
                                              const std::vector<int>& rewards, double eta,
                                              std::mt19937_64& engine);

SimulationResult run_simulation(const SimulationConfig& config);

// As run_simulation, but commitments persist across rounds via
// persist_commitments and N fresh decisions are added every round;
// trajectories and diagnostics cover total (persisted + new) counts.
SimulationResult run_unfollow_simulation(const SimulationConfig& config);

struct SweepGrid {
  std::vector<std::int64_t> n_agents{1000};
  std::vector<std::int64_t> n_options{10};
  std::vector<std::int64_t> n_rounds{100};
  std::vector<double> true_best_rate{0.7};
  std::vector<double> assumed_best_rate{0.7};
  std::vector<double> gamma{1.0};
  double cost = 0.5;
  std::int64_t repetitions = 100;
  std::uint64_t seed = 0;
  bool unfollow_enabled = false;
  std::int64_t max_cells = 2000;

  void validate() const;
  std::size_t cell_count() const;
};

struct SweepRow {
  std::size_t cell_index = 0;
  SimulationConfig config;
  // Mean mimicker performance over repetitions, estimated through the
  // conditional-expectation form (see SimulationResult); same mean as the
  // realized average, tight enough CIs to compare cells at a few hundred
  // repetitions.
  double mean = 0.0;
  double ci_lower = 0.0;  // normal-approximation 95% CI
  double ci_upper = 0.0;
  double mean_net_of_cost = 0.0;
  std::int64_t repetitions_used = 0;  // repetitions with at least one committer
};

// Crosses all grid axes (agents x options x rounds x true rate x assumed
// rate x gamma, in that order). Each (cell, repetition) owns a seed derived
// from (grid seed, cell index, repetition), so results are independent of
// thread count. Throws CapExceeded when the grid is larger than max_cells.
std::vector<SweepRow> run_sweep(const SweepGrid& grid, int threads = 0);

}  // namespace socsamp
