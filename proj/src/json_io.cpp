#include "socsamp/json_io.hpp"

#include <stdexcept>

namespace socsamp {

using nlohmann::json;

json model_to_json(const ModelSpec& model) {
  json j;
  j["family"] = family_name(family_of(model));
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, SocialSampling>) {
          j["eta"] = m.eta;
          j["gamma"] = m.gamma;
        } else if constexpr (std::is_same_v<T, PerformanceRegression>) {
          j["beta0"] = m.beta0;
          j["beta1"] = m.beta1;
        } else if constexpr (std::is_same_v<T, FullRegression>) {
          j["beta0"] = m.beta0;
          j["beta1"] = m.beta1;
          j["beta2"] = m.beta2;
          j["beta3"] = m.beta3;
        } else if constexpr (std::is_same_v<T, Performance>) {
          j["eta"] = m.eta;
        } else if constexpr (std::is_same_v<T, Additive>) {
          j["alpha"] = m.alpha;
          j["eta"] = m.eta;
        }
      },
      model);
  return j;
}

ModelSpec model_from_json(const json& j) {
  const std::string family = j.at("family").get<std::string>();
  const auto tag = family_from_name(family);
  if (!tag) throw std::invalid_argument("model json: unknown family '" + family + "'");
  switch (*tag) {
    case ModelFamily::social_sampling:
      return SocialSampling{j.at("eta").get<double>(), j.value("gamma", 1.0)};
    case ModelFamily::performance_regression:
      return PerformanceRegression{j.at("beta0").get<double>(), j.at("beta1").get<double>()};
    case ModelFamily::full_regression:
      return FullRegression{j.at("beta0").get<double>(), j.at("beta1").get<double>(),
                            j.at("beta2").get<double>(), j.at("beta3").get<double>()};
    case ModelFamily::popularity:
      return Popularity{};
    case ModelFamily::performance:
      return Performance{j.at("eta").get<double>()};
    case ModelFamily::additive:
      return Additive{j.at("alpha").get<double>(), j.at("eta").get<double>()};
  }
  throw std::invalid_argument("model json: unknown family");
}

json fit_result_to_json(const FitResult& result) {
  json j;
  j["model"] = model_to_json(result.model);
  j["log_likelihood"] = result.log_likelihood;
  j["iterations"] = result.iterations;
  j["converged"] = result.converged;
  j["init_point"] = result.init_point;
  return j;
}

namespace {

template <typename T>
std::vector<T> axis_from_json(const json& j, const char* key, std::vector<T> fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (v.is_array()) return v.get<std::vector<T>>();
  return {v.get<T>()};
}

}  // namespace

json sweep_grid_to_json(const SweepGrid& grid) {
  json j;
  j["n_agents"] = grid.n_agents;
  j["n_options"] = grid.n_options;
  j["n_rounds"] = grid.n_rounds;
  j["true_best_rate"] = grid.true_best_rate;
  j["assumed_best_rate"] = grid.assumed_best_rate;
  j["gamma"] = grid.gamma;
  j["cost"] = grid.cost;
  j["repetitions"] = grid.repetitions;
  j["seed"] = grid.seed;
  j["unfollow_enabled"] = grid.unfollow_enabled;
  j["max_cells"] = grid.max_cells;
  return j;
}

SweepGrid sweep_grid_from_json(const json& j) {
  SweepGrid grid;
  grid.n_agents = axis_from_json<std::int64_t>(j, "n_agents", grid.n_agents);
  grid.n_options = axis_from_json<std::int64_t>(j, "n_options", grid.n_options);
  grid.n_rounds = axis_from_json<std::int64_t>(j, "n_rounds", grid.n_rounds);
  grid.true_best_rate = axis_from_json<double>(j, "true_best_rate", grid.true_best_rate);
  grid.assumed_best_rate = axis_from_json<double>(j, "assumed_best_rate", grid.assumed_best_rate);
  grid.gamma = axis_from_json<double>(j, "gamma", grid.gamma);
  grid.cost = j.value("cost", grid.cost);
  grid.repetitions = j.value("repetitions", grid.repetitions);
  grid.seed = j.value("seed", grid.seed);
  grid.unfollow_enabled = j.value("unfollow_enabled", grid.unfollow_enabled);
  grid.max_cells = j.value("max_cells", grid.max_cells);
  return grid;
}

}  // namespace socsamp
