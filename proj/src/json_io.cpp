#include "mergepred/json_io.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace mergepred {

using nlohmann::json;

namespace {

json state_to_json(const VehicleState& s) { return json{{"x", s.x}, {"v", s.v}}; }

VehicleState state_from_json(const json& j) {
  return VehicleState{j.at("x").get<double>(), j.at("v").get<double>()};
}

json theta_to_json(const ControllerParams& t) {
  return json{{"k_v", t.k_v}, {"k_g", t.k_g}, {"g_star", t.g_star}};
}

ControllerParams theta_from_json(const json& j) {
  return ControllerParams{j.at("k_v").get<double>(), j.at("k_g").get<double>(),
                          j.at("g_star").get<double>()};
}

}  // namespace

json to_json(const Scenario& scenario) {
  json observed = json::array();
  for (const JointState& s : scenario.observed) {
    observed.push_back(json{{"lag", state_to_json(s.lag)}, {"lead", state_to_json(s.lead)}});
  }
  json lead_future = json::array();
  for (const VehicleState& s : scenario.lead_future) lead_future.push_back(state_to_json(s));
  json j{{"dt", scenario.dt},
         {"lead_length", scenario.lead_length},
         {"observed", std::move(observed)},
         {"lead_future", std::move(lead_future)}};
  if (scenario.truth_lag_future) {
    json truth = json::array();
    for (const VehicleState& s : *scenario.truth_lag_future) truth.push_back(state_to_json(s));
    j["truth_lag_future"] = std::move(truth);
  } else {
    j["truth_lag_future"] = nullptr;
  }
  return j;
}

Scenario scenario_from_json(const json& j) {
  Scenario scenario;
  scenario.dt = j.at("dt").get<double>();
  scenario.lead_length = j.at("lead_length").get<double>();
  for (const json& s : j.at("observed")) {
    scenario.observed.push_back(
        JointState{state_from_json(s.at("lag")), state_from_json(s.at("lead"))});
  }
  for (const json& s : j.at("lead_future")) {
    scenario.lead_future.push_back(state_from_json(s));
  }
  if (j.contains("truth_lag_future") && !j.at("truth_lag_future").is_null()) {
    std::vector<VehicleState> truth;
    for (const json& s : j.at("truth_lag_future")) truth.push_back(state_from_json(s));
    scenario.truth_lag_future = std::move(truth);
  }
  return scenario;
}

json to_json(const ScenarioManifest& manifest) {
  json entries = json::array();
  for (const ManifestEntry& e : manifest.entries) {
    json entry{{"id", e.id}, {"scenario", to_json(e.scenario)}};
    if (e.provenance) {
      entry["provenance"] = json{{"source", e.provenance->source},
                                 {"lag_id", e.provenance->lag_id},
                                 {"lead_id", e.provenance->lead_id},
                                 {"merge_id", e.provenance->merge_id},
                                 {"window_start_frame", e.provenance->window_start_frame},
                                 {"window_end_frame", e.provenance->window_end_frame}};
    }
    entries.push_back(std::move(entry));
  }
  return json{{"format", "scenario_manifest_v1"},
              {"scenarios", std::move(entries)},
              {"skips", json{{"no_pair", manifest.skips.no_pair},
                             {"no_window_start", manifest.skips.no_window_start},
                             {"short_observation", manifest.skips.short_observation},
                             {"empty_prediction", manifest.skips.empty_prediction},
                             {"duplicates", manifest.skips.duplicates}}}};
}

ScenarioManifest manifest_from_json(const json& j) {
  if (j.value("format", "") != "scenario_manifest_v1") {
    throw ParseError("manifest: unknown or missing format tag");
  }
  ScenarioManifest manifest;
  for (const json& entry : j.at("scenarios")) {
    ManifestEntry e;
    e.id = entry.at("id").get<std::string>();
    e.scenario = scenario_from_json(entry.at("scenario"));
    if (entry.contains("provenance")) {
      const json& p = entry.at("provenance");
      e.provenance = ScenarioProvenance{
          p.at("source").get<std::string>(),      p.at("lag_id").get<long>(),
          p.at("lead_id").get<long>(),            p.at("merge_id").get<long>(),
          p.at("window_start_frame").get<long>(), p.at("window_end_frame").get<long>()};
    }
    manifest.entries.push_back(std::move(e));
  }
  if (j.contains("skips")) {
    const json& s = j.at("skips");
    manifest.skips.no_pair = s.value("no_pair", 0);
    manifest.skips.no_window_start = s.value("no_window_start", 0);
    manifest.skips.short_observation = s.value("short_observation", 0);
    manifest.skips.empty_prediction = s.value("empty_prediction", 0);
    manifest.skips.duplicates = s.value("duplicates", 0);
  }
  return manifest;
}

ScenarioManifest load_manifest(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw ParseError(path + ": cannot open manifest");
  json j;
  try {
    file >> j;
  } catch (const json::exception& e) {
    throw ParseError(path + ": invalid JSON: " + e.what());
  }
  return manifest_from_json(j);
}

void save_manifest(const ScenarioManifest& manifest, const std::string& path) {
  std::ofstream file(path);
  if (!file) throw std::runtime_error(path + ": cannot open for writing");
  file << to_json(manifest).dump(2) << "\n";
}

json to_json(const PredictionRecord& record) {
  json thetas = json::array();
  for (const ControllerParams& t : record.thetas) thetas.push_back(theta_to_json(t));
  json j{{"id", record.id},
         {"status", record.status},
         {"theta_hat", theta_to_json(record.theta_hat)},
         {"primal_value", record.primal_value},
         {"dual_value", record.dual_value},
         {"constraint_residual", record.constraint_residual},
         {"ess", record.ess},
         {"degenerate", record.degenerate},
         {"lead_mode", record.lead_mode},
         {"predict_time_s", record.predict_time_s},
         {"thetas", std::move(thetas)},
         {"probabilities", record.probabilities},
         {"positions", record.positions}};
  if (!record.message.empty()) j["message"] = record.message;
  return j;
}

PredictionRecord prediction_from_json(const json& j) {
  PredictionRecord record;
  record.id = j.at("id").get<std::string>();
  record.status = j.at("status").get<std::string>();
  record.message = j.value("message", "");
  if (record.status == "error") return record;
  record.theta_hat = theta_from_json(j.at("theta_hat"));
  record.primal_value = j.value("primal_value", 0.0);
  record.dual_value = j.value("dual_value", 0.0);
  record.constraint_residual = j.value("constraint_residual", 0.0);
  record.ess = j.value("ess", 0.0);
  record.degenerate = j.value("degenerate", false);
  record.lead_mode = j.value("lead_mode", "truth");
  record.predict_time_s = j.value("predict_time_s", 0.0);
  for (const json& t : j.at("thetas")) record.thetas.push_back(theta_from_json(t));
  record.probabilities = j.at("probabilities").get<std::vector<double>>();
  record.positions = j.at("positions").get<std::vector<std::vector<double>>>();
  return record;
}

std::vector<PredictionRecord> load_predictions(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw ParseError(path + ": cannot open predictions");
  std::vector<PredictionRecord> records;
  std::string line;
  int line_no = 0;
  while (std::getline(file, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      records.push_back(prediction_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw ParseError(path + ": line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

void save_predictions(const std::vector<PredictionRecord>& records, const std::string& path) {
  std::ofstream file(path);
  if (!file) throw std::runtime_error(path + ": cannot open for writing");
  for (const PredictionRecord& record : records) {
    file << to_json(record).dump() << "\n";
  }
}

json to_json(const MetricsReport& report) {
  json horizons = json::array();
  for (const HorizonMetrics& m : report.horizons) {
    horizons.push_back(json{{"t_seconds", m.t_seconds},
                            {"scenario_count", m.scenario_count},
                            {"ade_m", m.ade_m},
                            {"rmse_m", m.rmse_m}});
  }
  return json{{"horizons", std::move(horizons)},
              {"calibration", report.calibration},
              {"mean_predict_time_s", report.mean_predict_time_s}};
}

}  // namespace mergepred
