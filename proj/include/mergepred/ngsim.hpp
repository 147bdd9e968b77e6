#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mergepred/types.hpp"

namespace mergepred {

struct TrajectoryRow {
  long vehicle_id{0};
  long frame{0};
  int lane{0};
  double x{0.0};       // longitudinal position [m]
  double v{0.0};       // velocity [m/s]
  double length{0.0};  // vehicle length [m]
};

/// Unit-normalized trajectory table; frames per vehicle strictly increase.
struct TrajectoryTable {
  std::vector<TrajectoryRow> rows;
  double frame_period{0.1};  // [s]
};

enum class Units { Meters, Feet };

/// Parses a comma-separated table with a header. Recognized column names
/// (case-insensitive): vehicle_id, frame/frame_id, lane/lane_id,
/// x/local_y, v/v_vel, length/v_length. Feet inputs are converted at
/// 0.3048 m/ft. Malformed rows and non-monotone frames raise ParseError
/// with the offending line number.
TrajectoryTable parse_table(const std::string& path, Units units, double frame_hz);

/// Same parser over an in-memory buffer; `name` labels error messages.
TrajectoryTable parse_table_text(const std::string& text, Units units, double frame_hz,
                                 const std::string& name);

struct ScenarioProvenance {
  std::string source;
  long lag_id{0};
  long lead_id{0};
  long merge_id{0};
  long window_start_frame{0};
  long window_end_frame{0};
};

struct ManifestEntry {
  std::string id;
  Scenario scenario;
  std::optional<ScenarioProvenance> provenance;
};

struct SkipReport {
  int no_pair{0};              // merge without an identifiable lead/lag pair
  int no_window_start{0};      // merger never passes the lag
  int short_observation{0};    // observation window incomplete
  int empty_prediction{0};     // window start at or after window end data
  int duplicates{0};           // deduplicated by (lag id, window start)
};

struct ScenarioManifest {
  std::vector<ManifestEntry> entries;
  SkipReport skips;
};

struct ExtractConfig {
  std::vector<int> ramp_lanes{7};
  int target_lane{6};
  double observe_seconds{3.2};
  std::string source_name{"table"};
};

/// Finds vehicles whose lane sequence moves from a ramp lane into the
/// target lane, pairs each with the lead/lag vehicles it merged between
/// (and the pair behind), and cuts observation plus prediction windows:
/// prediction starts when the merger first passes the lag and ends when it
/// passes the lead or enters the target lane, whichever is first.
ScenarioManifest extract_merge_scenarios(const TrajectoryTable& table,
                                         const ExtractConfig& config);

}  // namespace mergepred
