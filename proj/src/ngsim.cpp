#include "mergepred/ngsim.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

namespace mergepred {

namespace {

constexpr double kFeetToMeters = 0.3048;

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) {
    // trim whitespace
    const auto begin = field.find_first_not_of(" \t\r");
    const auto end = field.find_last_not_of(" \t\r");
    fields.push_back(begin == std::string::npos ? std::string()
                                                : field.substr(begin, end - begin + 1));
  }
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

int find_column(const std::vector<std::string>& header,
                const std::vector<std::string>& aliases) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string name = lower(header[i]);
    for (const std::string& alias : aliases) {
      if (name == alias) return static_cast<int>(i);
    }
  }
  return -1;
}

double parse_double(const std::string& s, int line_no, const char* what) {
  double value{};
  const char* begin = s.data();
  const char* end = begin + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw ParseError("line " + std::to_string(line_no) + ": bad " + what + " value '" + s + "'");
  }
  return value;
}

long parse_long(const std::string& s, int line_no, const char* what) {
  long value{};
  const char* begin = s.data();
  const char* end = begin + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw ParseError("line " + std::to_string(line_no) + ": bad " + what + " value '" + s + "'");
  }
  return value;
}

}  // namespace

TrajectoryTable parse_table_text(const std::string& text, Units units, double frame_hz,
                                 const std::string& name) {
  if (!(frame_hz > 0.0)) {
    throw std::invalid_argument("parse_table: frame_hz must be positive");
  }
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) {
    throw ParseError(name + ": empty file, expected a header row");
  }
  const std::vector<std::string> header = split_csv_line(line);
  const int col_id = find_column(header, {"vehicle_id", "id"});
  const int col_frame = find_column(header, {"frame", "frame_id", "frame_index"});
  const int col_lane = find_column(header, {"lane", "lane_id"});
  const int col_x = find_column(header, {"x", "local_y", "position"});
  const int col_v = find_column(header, {"v", "v_vel", "velocity"});
  const int col_len = find_column(header, {"length", "v_length", "vehicle_length"});
  if (col_id < 0 || col_frame < 0 || col_lane < 0 || col_x < 0 || col_v < 0 || col_len < 0) {
    throw ParseError(name +
                     ": header must name vehicle_id, frame, lane, x (local_y), v (v_vel), "
                     "length (v_length) columns");
  }
  const int max_col =
      std::max({col_id, col_frame, col_lane, col_x, col_v, col_len});
  const double unit_scale = units == Units::Feet ? kFeetToMeters : 1.0;

  TrajectoryTable table;
  table.frame_period = 1.0 / frame_hz;
  std::unordered_map<long, long> last_frame;

  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (static_cast<int>(fields.size()) <= max_col) {
      throw ParseError(name + ": line " + std::to_string(line_no) + ": expected at least " +
                       std::to_string(max_col + 1) + " fields, got " +
                       std::to_string(fields.size()));
    }
    TrajectoryRow row;
    row.vehicle_id = parse_long(fields[col_id], line_no, "vehicle_id");
    row.frame = parse_long(fields[col_frame], line_no, "frame");
    row.lane = static_cast<int>(parse_long(fields[col_lane], line_no, "lane"));
    row.x = parse_double(fields[col_x], line_no, "position") * unit_scale;
    row.v = parse_double(fields[col_v], line_no, "velocity") * unit_scale;
    row.length = parse_double(fields[col_len], line_no, "length") * unit_scale;
    if (!std::isfinite(row.x) || !std::isfinite(row.v) || !std::isfinite(row.length)) {
      throw ParseError(name + ": line " + std::to_string(line_no) + ": non-finite value");
    }
    if (row.v < 0.0) {
      throw ParseError(name + ": line " + std::to_string(line_no) + ": negative velocity for vehicle " +
                       std::to_string(row.vehicle_id));
    }
    const auto it = last_frame.find(row.vehicle_id);
    if (it != last_frame.end() && row.frame <= it->second) {
      throw ParseError(name + ": line " + std::to_string(line_no) + ": vehicle " +
                       std::to_string(row.vehicle_id) + " frame " + std::to_string(row.frame) +
                       " is not after frame " + std::to_string(it->second));
    }
    last_frame[row.vehicle_id] = row.frame;
    table.rows.push_back(row);
  }
  return table;
}

TrajectoryTable parse_table(const std::string& path, Units units, double frame_hz) {
  std::ifstream file(path);
  if (!file) {
    throw ParseError(path + ": cannot open file");
  }
  std::stringstream buffer;
  buffer << file.rdbuf();
  return parse_table_text(buffer.str(), units, frame_hz, path);
}

namespace {

struct Track {
  std::vector<long> frames;
  std::vector<TrajectoryRow> rows;  // same order as frames

  const TrajectoryRow* at(long frame) const {
    const auto it = std::lower_bound(frames.begin(), frames.end(), frame);
    if (it == frames.end() || *it != frame) return nullptr;
    return &rows[static_cast<std::size_t>(it - frames.begin())];
  }
};

/// First frame (within both tracks' common range) at which a.x > b.x.
std::optional<long> first_passing_frame(const Track& a, const Track& b) {
  const long lo = std::max(a.frames.front(), b.frames.front());
  const long hi = std::min(a.frames.back(), b.frames.back());
  for (long f = lo; f <= hi; ++f) {
    const TrajectoryRow* ra = a.at(f);
    const TrajectoryRow* rb = b.at(f);
    if (ra && rb && ra->x > rb->x) return f;
  }
  return std::nullopt;
}

}  // namespace

ScenarioManifest extract_merge_scenarios(const TrajectoryTable& table,
                                         const ExtractConfig& config) {
  ScenarioManifest manifest;
  const std::set<int> ramp(config.ramp_lanes.begin(), config.ramp_lanes.end());
  const double dt = table.frame_period;
  const int observe_frames = static_cast<int>(std::lround(config.observe_seconds / dt));

  std::map<long, Track> tracks;
  for (const TrajectoryRow& row : table.rows) {
    Track& t = tracks[row.vehicle_id];
    t.frames.push_back(row.frame);
    t.rows.push_back(row);
  }

  std::set<std::pair<long, long>> seen;  // (lag id, window start frame)

  for (const auto& [merge_id, merger] : tracks) {
    // Merge frame: first target-lane frame after time spent in a ramp lane.
    bool was_on_ramp = false;
    std::optional<long> merge_frame;
    for (std::size_t i = 0; i < merger.rows.size(); ++i) {
      const int lane = merger.rows[i].lane;
      if (ramp.count(lane)) was_on_ramp = true;
      if (was_on_ramp && lane == config.target_lane) {
        merge_frame = merger.frames[i];
        break;
      }
    }
    if (!merge_frame) continue;

    // Lead/lag pair in the target lane at the merge frame, by position.
    const TrajectoryRow* merger_at = merger.at(*merge_frame);
    if (!merger_at) continue;
    struct Neighbor {
      long id;
      double x;
    };
    std::vector<Neighbor> ahead, behind;
    for (const auto& [vid, track] : tracks) {
      if (vid == merge_id) continue;
      const TrajectoryRow* row = track.at(*merge_frame);
      if (!row || row->lane != config.target_lane) continue;
      if (row->x > merger_at->x) {
        ahead.push_back({vid, row->x});
      } else {
        behind.push_back({vid, row->x});
      }
    }
    std::sort(ahead.begin(), ahead.end(), [](const Neighbor& a, const Neighbor& b) {
      return a.x < b.x;
    });
    std::sort(behind.begin(), behind.end(), [](const Neighbor& a, const Neighbor& b) {
      return a.x > b.x;
    });

    // The pair merged between, then the pair behind it.
    std::vector<std::pair<long, long>> pairs;  // (lead id, lag id)
    if (!ahead.empty() && !behind.empty()) {
      pairs.emplace_back(ahead.front().id, behind.front().id);
      if (behind.size() >= 2) {
        pairs.emplace_back(behind.front().id, behind[1].id);
      }
    } else {
      ++manifest.skips.no_pair;
    }

    for (const auto& [lead_id, lag_id] : pairs) {
      const Track& lead = tracks.at(lead_id);
      const Track& lag = tracks.at(lag_id);

      const std::optional<long> start = first_passing_frame(merger, lag);
      if (!start) {
        ++manifest.skips.no_window_start;
        continue;
      }
      long end = *merge_frame;
      if (const std::optional<long> passes_lead = first_passing_frame(merger, lead)) {
        end = std::min(end, *passes_lead);
      }
      // Clip to frames where both pair vehicles exist contiguously.
      const long last_common = std::min(lead.frames.back(), lag.frames.back());
      end = std::min(end, last_common);
      if (end <= *start) {
        ++manifest.skips.empty_prediction;
        continue;
      }
      if (!seen.insert({lag_id, *start}).second) {
        ++manifest.skips.duplicates;
        continue;
      }

      const long obs_begin = *start - observe_frames;
      bool complete = true;
      Scenario scenario;
      scenario.dt = dt;
      for (long f = obs_begin; f < *start && complete; ++f) {
        const TrajectoryRow* rl = lag.at(f);
        const TrajectoryRow* rf = lead.at(f);
        if (!rl || !rf) {
          complete = false;
          break;
        }
        scenario.observed.push_back(
            JointState{VehicleState{rl->x, rl->v}, VehicleState{rf->x, rf->v}});
      }
      if (!complete || static_cast<int>(scenario.observed.size()) != observe_frames) {
        ++manifest.skips.short_observation;
        continue;
      }
      std::vector<VehicleState> truth;
      for (long f = *start; f <= end && complete; ++f) {
        const TrajectoryRow* rl = lag.at(f);
        const TrajectoryRow* rf = lead.at(f);
        if (!rl || !rf) {
          // Gap inside the prediction window: truncate there.
          end = f - 1;
          break;
        }
        scenario.lead_future.push_back(VehicleState{rf->x, rf->v});
        truth.push_back(VehicleState{rl->x, rl->v});
      }
      if (scenario.lead_future.empty()) {
        ++manifest.skips.empty_prediction;
        continue;
      }
      scenario.truth_lag_future = std::move(truth);
      scenario.lead_length = lead.rows.front().length;

      ManifestEntry entry;
      entry.scenario = std::move(scenario);
      entry.provenance = ScenarioProvenance{config.source_name, lag_id, lead_id,
                                            merge_id, *start, end};
      entry.id = config.source_name + ":lag" + std::to_string(lag_id) + ":f" +
                 std::to_string(*start);
      manifest.entries.push_back(std::move(entry));
    }
  }
  return manifest;
}

}  // namespace mergepred
