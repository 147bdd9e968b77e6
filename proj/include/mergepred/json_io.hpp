#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "mergepred/eval.hpp"
#include "mergepred/ngsim.hpp"
#include "mergepred/sampler.hpp"
#include "mergepred/types.hpp"

namespace mergepred {

nlohmann::json to_json(const Scenario& scenario);
Scenario scenario_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ScenarioManifest& manifest);
ScenarioManifest manifest_from_json(const nlohmann::json& j);

ScenarioManifest load_manifest(const std::string& path);
void save_manifest(const ScenarioManifest& manifest, const std::string& path);

/// One line of the prediction JSONL stream.
struct PredictionRecord {
  std::string id;
  std::string status;  // interior | boundary | rank_deficient | error
  std::string message;  // set when status is "error"
  ControllerParams theta_hat;
  double primal_value{0.0};
  double dual_value{0.0};
  double constraint_residual{0.0};
  double ess{0.0};
  bool degenerate{false};
  std::string lead_mode{"truth"};
  double predict_time_s{0.0};
  std::vector<ControllerParams> thetas;
  std::vector<double> probabilities;
  std::vector<std::vector<double>> positions;  // [sample][step]
};

nlohmann::json to_json(const PredictionRecord& record);
PredictionRecord prediction_from_json(const nlohmann::json& j);

std::vector<PredictionRecord> load_predictions(const std::string& path);
void save_predictions(const std::vector<PredictionRecord>& records, const std::string& path);

nlohmann::json to_json(const MetricsReport& report);

}  // namespace mergepred
