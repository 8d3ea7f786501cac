#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "socsamp/cli.hpp"
#include "socsamp/dates.hpp"
#include "socsamp/evaluation.hpp"
#include "socsamp/inference.hpp"
#include "socsamp/models.hpp"
#include "socsamp/panel.hpp"
#include "socsamp/pipeline.hpp"
#include "socsamp/simulator.hpp"
#include "socsamp/version.hpp"

namespace py = pybind11;
using namespace socsamp;

namespace {

MarketSnapshot make_snapshot(std::vector<std::int64_t> popularity,
                             std::vector<double> performance, std::int64_t day) {
  MarketSnapshot snap;
  snap.day = day;
  snap.popularity = std::move(popularity);
  snap.performance = std::move(performance);
  snap.validate();
  return snap;
}

ModelFamily family_arg(const std::string& name) {
  const auto family = family_from_name(name);
  if (!family) throw std::invalid_argument("unknown model family '" + name + "'");
  return *family;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Social-sampling decision models: kernels, simulations, fitting, evaluation";
  m.attr("__version__") = kVersion;

  py::class_<SocialSampling>(m, "SocialSampling")
      .def(py::init<double, double>(), py::arg("eta"), py::arg("gamma") = 1.0)
      .def_readwrite("eta", &SocialSampling::eta)
      .def_readwrite("gamma", &SocialSampling::gamma)
      .def("__repr__", [](const SocialSampling& s) {
        std::ostringstream os;
        os << "SocialSampling(eta=" << s.eta << ", gamma=" << s.gamma << ")";
        return os.str();
      });
  py::class_<PerformanceRegression>(m, "PerformanceRegression")
      .def(py::init<double, double>(), py::arg("beta0"), py::arg("beta1"))
      .def_readwrite("beta0", &PerformanceRegression::beta0)
      .def_readwrite("beta1", &PerformanceRegression::beta1);
  py::class_<FullRegression>(m, "FullRegression")
      .def(py::init<double, double, double, double>(), py::arg("beta0"), py::arg("beta1"),
           py::arg("beta2"), py::arg("beta3"))
      .def_readwrite("beta0", &FullRegression::beta0)
      .def_readwrite("beta1", &FullRegression::beta1)
      .def_readwrite("beta2", &FullRegression::beta2)
      .def_readwrite("beta3", &FullRegression::beta3);
  py::class_<Popularity>(m, "Popularity").def(py::init<>());
  py::class_<Performance>(m, "Performance")
      .def(py::init<double>(), py::arg("eta"))
      .def_readwrite("eta", &Performance::eta);
  py::class_<Additive>(m, "Additive")
      .def(py::init<double, double>(), py::arg("alpha"), py::arg("eta"))
      .def_readwrite("alpha", &Additive::alpha)
      .def_readwrite("eta", &Additive::eta);

  m.def("binarize_signal", &binarize_signal, py::arg("q"));
  m.def("smoothing", &smoothing, py::arg("active_count"));
  m.def(
      "decision_probabilities",
      [](const ModelSpec& model, std::vector<std::int64_t> popularity,
         std::vector<double> performance) {
        return decision_probabilities(
            model, make_snapshot(std::move(popularity), std::move(performance), 0));
      },
      py::arg("model"), py::arg("popularity"), py::arg("performance"));
  m.def("generalized_commit_probability", &generalized_commit_probability,
        py::arg("likelihood_best"), py::arg("likelihood_other"), py::arg("ratio_bound"));

  py::class_<PosteriorState>(m, "PosteriorState")
      .def_readonly("log_weights", &PosteriorState::log_weights)
      .def_readonly("eta", &PosteriorState::eta)
      .def("probabilities", &PosteriorState::probabilities);
  m.def("posterior_init", &posterior_init, py::arg("option_count"), py::arg("eta"));
  m.def("posterior_update", &posterior_update, py::arg("state"), py::arg("signals"));

  py::class_<SimulationConfig>(m, "SimulationConfig")
      .def(py::init([](std::int64_t n_agents, std::int64_t n_options, std::int64_t n_rounds,
                       double true_best_rate, double assumed_best_rate, double gamma,
                       double cost, std::uint64_t seed, bool unfollow_enabled) {
             SimulationConfig cfg;
             cfg.n_agents = n_agents;
             cfg.n_options = n_options;
             cfg.n_rounds = n_rounds;
             cfg.true_best_rate = true_best_rate;
             cfg.assumed_best_rate = assumed_best_rate;
             cfg.gamma = gamma;
             cfg.cost = cost;
             cfg.seed = seed;
             cfg.unfollow_enabled = unfollow_enabled;
             cfg.validate();
             return cfg;
           }),
           py::arg("n_agents"), py::arg("n_options"), py::arg("n_rounds"),
           py::arg("true_best_rate") = 0.7, py::arg("assumed_best_rate") = 0.7,
           py::arg("gamma") = 1.0, py::arg("cost") = 0.5, py::arg("seed") = 0,
           py::arg("unfollow_enabled") = false)
      .def_readwrite("n_agents", &SimulationConfig::n_agents)
      .def_readwrite("n_options", &SimulationConfig::n_options)
      .def_readwrite("n_rounds", &SimulationConfig::n_rounds)
      .def_readwrite("true_best_rate", &SimulationConfig::true_best_rate)
      .def_readwrite("assumed_best_rate", &SimulationConfig::assumed_best_rate)
      .def_readwrite("gamma", &SimulationConfig::gamma)
      .def_readwrite("seed", &SimulationConfig::seed)
      .def_readwrite("unfollow_enabled", &SimulationConfig::unfollow_enabled);
  py::class_<SimulationResult>(m, "SimulationResult")
      .def_readonly("mean_mimicker_performance", &SimulationResult::mean_mimicker_performance)
      .def_readonly("expected_mimicker_performance",
                    &SimulationResult::expected_mimicker_performance)
      .def_readonly("committing_count_final", &SimulationResult::committing_count_final)
      .def_readonly("best_option", &SimulationResult::best_option)
      .def_readonly("popularity_trajectory", &SimulationResult::popularity_trajectory)
      .def_readonly("posterior_l1_trajectory", &SimulationResult::posterior_l1_trajectory);
  m.def("run_simulation", &run_simulation, py::arg("config"),
        py::call_guard<py::gil_scoped_release>());
  m.def("run_unfollow_simulation", &run_unfollow_simulation, py::arg("config"),
        py::call_guard<py::gil_scoped_release>());

  py::class_<PanelDay>(m, "PanelDay")
      .def(py::init([](std::int64_t day, std::vector<std::int64_t> user_ids,
                       std::vector<std::int64_t> prev_popularity,
                       std::vector<double> performance, std::vector<std::int64_t> new_mimickers,
                       std::vector<std::int64_t> lost_mimickers) {
             PanelDay d;
             d.day = day;
             d.user_ids = std::move(user_ids);
             d.prev_popularity = std::move(prev_popularity);
             d.performance = std::move(performance);
             d.new_mimickers = std::move(new_mimickers);
             d.lost_mimickers = std::move(lost_mimickers);
             d.validate();
             return d;
           }),
           py::arg("day"), py::arg("user_ids"), py::arg("prev_popularity"),
           py::arg("performance"), py::arg("new_mimickers"), py::arg("lost_mimickers"))
      .def_readonly("day", &PanelDay::day)
      .def_readonly("user_ids", &PanelDay::user_ids)
      .def_readonly("prev_popularity", &PanelDay::prev_popularity)
      .def_readonly("performance", &PanelDay::performance)
      .def_readonly("new_mimickers", &PanelDay::new_mimickers)
      .def_readonly("lost_mimickers", &PanelDay::lost_mimickers);
  py::class_<PanelDataset>(m, "PanelDataset")
      .def(py::init([](std::vector<PanelDay> days) {
             PanelDataset p;
             p.days = std::move(days);
             p.validate();
             return p;
           }),
           py::arg("days"))
      .def_readonly("days", &PanelDataset::days)
      .def("row_count", &PanelDataset::row_count)
      .def("distinct_users", &PanelDataset::distinct_users);
  m.def("load_panel", &read_panel_file, py::arg("path"));
  m.def("save_panel", &write_panel_file, py::arg("path"), py::arg("panel"));

  m.def("log_likelihood", &log_likelihood, py::arg("model"), py::arg("panel"));
  m.def(
      "fit",
      [](const std::string& family, const PanelDataset& panel, double gamma) {
        const FitResult r = fit(family_arg(family), panel, gamma);
        py::dict out;
        out["family"] = family;
        out["log_likelihood"] = r.log_likelihood;
        out["iterations"] = r.iterations;
        out["converged"] = r.converged;
        py::dict params;
        std::visit(
            [&](const auto& spec) {
              using T = std::decay_t<decltype(spec)>;
              if constexpr (std::is_same_v<T, SocialSampling>) {
                params["eta"] = spec.eta;
                params["gamma"] = spec.gamma;
              } else if constexpr (std::is_same_v<T, PerformanceRegression>) {
                params["beta0"] = spec.beta0;
                params["beta1"] = spec.beta1;
              } else if constexpr (std::is_same_v<T, FullRegression>) {
                params["beta0"] = spec.beta0;
                params["beta1"] = spec.beta1;
                params["beta2"] = spec.beta2;
                params["beta3"] = spec.beta3;
              } else if constexpr (std::is_same_v<T, Performance>) {
                params["eta"] = spec.eta;
              } else if constexpr (std::is_same_v<T, Additive>) {
                params["alpha"] = spec.alpha;
                params["eta"] = spec.eta;
              }
            },
            r.model);
        out["params"] = params;
        return out;
      },
      py::arg("family"), py::arg("panel"), py::arg("gamma") = 1.0);
  m.def(
      "gamma_profile",
      [](const PanelDataset& panel, const std::vector<double>& grid) {
        std::vector<std::tuple<double, double, double, bool>> out;
        for (const ProfilePoint& p : gamma_profile(panel, grid))
          out.emplace_back(p.gamma, p.log_likelihood, p.eta, p.converged);
        return out;
      },
      py::arg("panel"), py::arg("gamma_grid"), py::call_guard<py::gil_scoped_release>());
  m.def(
      "expected_new_mimickers",
      [](const ModelSpec& model, std::vector<std::int64_t> popularity,
         std::vector<double> performance, std::int64_t total_new) {
        return expected_new_mimickers(
            model, make_snapshot(std::move(popularity), std::move(performance), 0), total_new);
      },
      py::arg("model"), py::arg("popularity"), py::arg("performance"), py::arg("total_new"));
  m.def(
      "skill_credible_interval",
      [](std::int64_t successes, std::int64_t failures, double level) {
        const CredibleInterval ci = skill_credible_interval(successes, failures, level);
        return std::make_pair(ci.lower, ci.upper);
      },
      py::arg("successes"), py::arg("failures"), py::arg("level") = 0.95);
  m.def(
      "error_metrics",
      [](const std::vector<double>& predicted, const std::vector<std::int64_t>& actual) {
        const ErrorMetrics e = error_metrics(predicted, actual);
        return std::make_tuple(e.mae, e.mse, e.f_score);
      },
      py::arg("predicted"), py::arg("actual"));
  m.def("relative_error", &relative_error, py::arg("model_residuals"),
        py::arg("baseline_residuals"));
  m.def(
      "cross_validate",
      [](const std::vector<std::string>& families, const PanelDataset& panel,
         const std::string& scheme, double fraction, int folds, std::uint64_t seed,
         int threads) {
        std::vector<ModelFamily> tags;
        for (const std::string& name : families) tags.push_back(family_arg(name));
        CVScheme cv;
        const auto kind = cv_kind_from_name(scheme);
        if (!kind) throw std::invalid_argument("unknown scheme '" + scheme + "'");
        cv.kind = *kind;
        cv.fraction = fraction;
        cv.folds = folds;
        cv.seed = seed;
        const ErrorReport report = cross_validate(tags, panel, cv, threads);
        py::dict out;
        py::dict per_family;
        for (const auto& row : report.families) {
          py::dict metrics;
          metrics["mae"] = row.mae;
          metrics["mse"] = row.mse;
          metrics["f_score"] = row.f_score;
          metrics["rows"] = row.rows;
          per_family[family_name(row.family).c_str()] = metrics;
        }
        out["families"] = per_family;
        py::dict rel;
        for (const auto& r : report.relative_to_social_sampling)
          rel[family_name(r.family).c_str()] = r.value;
        out["relative_to_social_sampling"] = rel;
        out["skipped_folds"] = report.skipped_folds;
        return out;
      },
      py::arg("families"), py::arg("panel"), py::arg("scheme") = "by_user",
      py::arg("fraction") = 0.10, py::arg("folds") = 10, py::arg("seed") = 0,
      py::arg("threads") = 1);

  m.def("parse_date", [](const std::string& iso) {
    const auto day = parse_date(iso);
    if (!day) throw std::invalid_argument("bad ISO date '" + iso + "'");
    return *day;
  });
  m.def("format_date", &format_date, py::arg("day"));

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = run_command(args, out, err);
        return std::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), py::call_guard<py::gil_scoped_release>(),
      "Run a CLI invocation in-process; returns (exit_code, stdout, stderr)");
}
