#pragma once

#include <string>

#include "json.hpp"
#include "socsamp/inference.hpp"
#include "socsamp/models.hpp"
#include "socsamp/simulator.hpp"

namespace socsamp {

nlohmann::json model_to_json(const ModelSpec& model);
ModelSpec model_from_json(const nlohmann::json& j);

nlohmann::json fit_result_to_json(const FitResult& result);

nlohmann::json sweep_grid_to_json(const SweepGrid& grid);
SweepGrid sweep_grid_from_json(const nlohmann::json& j);

}  // namespace socsamp
