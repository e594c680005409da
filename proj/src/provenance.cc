// Copyright 2026 The mvforge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mvforge/provenance.h"

#include <array>
#include <chrono>
#include <fstream>
#include <sstream>

#include "mvforge/bundle.h"
#include "mvforge/error.h"

namespace mvforge {
namespace {

using nlohmann::json;

constexpr std::array<std::string_view, 14> kKindNames = {
    "upload_table", "add_chart",    "remove_chart",         "edit_encoding",
    "change_type",  "move_chart",   "resize_chart",         "lock_chart",
    "unlock_chart", "recommend_mv_request", "chart_ideas_click", "cross_filter",
    "restore_version", "save_session"};

constexpr std::string_view kLogFormat = "mvforge-log";
constexpr int kLogVersion = 1;

std::size_t position_of(const MVState& mv, const json& payload) {
  if (!payload.contains("position") || !payload.at("position").is_number_integer()) {
    throw Error(ErrorCode::kInvalidEdit, "payload needs an integer position");
  }
  const auto pos = payload.at("position").get<long long>();
  if (pos < 0 || static_cast<std::size_t>(pos) >= mv.charts.size()) {
    throw Error(ErrorCode::kPosition, "no chart at position " + std::to_string(pos));
  }
  return static_cast<std::size_t>(pos);
}

ChartSpec resolve_spec_impl(const DataTable& table, const json& j) {
  ChartSpec spec = chart_spec_from_json(j);
  if (!j.contains("encodings")) {
    try {
      spec = assign_encodings(table, spec.columns, spec.type);
    } catch (const Error& e) {
      throw Error(ErrorCode::kInvalidEdit, e.what());
    }
  }
  validate_spec(table, spec);
  return spec;
}

MvChart resolve_chart(const DataTable& table, const json& j, std::size_t position) {
  if (!j.is_object() || !j.contains("spec")) throw Error(ErrorCode::kInvalidEdit, "chart needs a spec");
  MvChart chart;
  chart.spec = resolve_chart_spec(table, j.at("spec"));
  chart.locked = j.value("locked", false);
  chart.layout = j.contains("layout") ? grid_cell_from_json(j.at("layout")) : default_layout(position);
  return chart;
}

void check_size(const MVState& mv) {
  if (mv.charts.size() > static_cast<std::size_t>(kMaxMvCharts)) {
    throw Error(ErrorCode::kTooManyCharts, "an MV holds at most 12 charts");
  }
}

json event_json(const ProvenanceEvent& e, const DataTable& table) {
  json j = {{"timestamp", e.timestamp_ms},
            {"session_id", e.session_id},
            {"seq", e.seq},
            {"kind", event_kind_name(e.kind)},
            {"payload", e.payload}};
  if (e.snapshot) j["mv_snapshot"] = to_json(*e.snapshot, &table);
  return j;
}

}  // namespace

ChartSpec resolve_chart_spec(const DataTable& table, const json& j) {
  return resolve_spec_impl(table, j);
}

std::string_view event_kind_name(EventKind kind) {
  return kKindNames[static_cast<std::size_t>(kind)];
}

std::optional<EventKind> parse_event_kind(std::string_view name) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == name) return static_cast<EventKind>(i);
  }
  return std::nullopt;
}

bool is_mutating(EventKind kind) {
  switch (kind) {
    case EventKind::kUploadTable:
    case EventKind::kCrossFilter:
    case EventKind::kSaveSession:
      return false;
    default:
      return true;
  }
}

MVState apply_event(const MVState& mv, EventKind kind, const json& payload,
                    const DataTable& table, const SnapshotLookup& snapshots) {
  MVState next = mv;
  switch (kind) {
    case EventKind::kAddChart:
    case EventKind::kChartIdeasClick: {
      if (!payload.contains("chart")) throw Error(ErrorCode::kInvalidEdit, "payload needs a chart");
      next.charts.push_back(resolve_chart(table, payload.at("chart"), mv.charts.size()));
      check_size(next);
      break;
    }
    case EventKind::kRemoveChart:
      next.charts.erase(next.charts.begin() + static_cast<long>(position_of(mv, payload)));
      break;
    case EventKind::kEditEncoding:
    case EventKind::kChangeType:
    case EventKind::kMoveChart:
    case EventKind::kResizeChart:
    case EventKind::kLockChart:
    case EventKind::kUnlockChart: {
      // An edit carries any of spec, layout and locked; the kind names the
      // primary change and must be present.
      const std::size_t pos = position_of(mv, payload);
      const bool spec_kind = kind == EventKind::kEditEncoding || kind == EventKind::kChangeType;
      const bool layout_kind = kind == EventKind::kMoveChart || kind == EventKind::kResizeChart;
      if (spec_kind && !payload.contains("spec")) {
        throw Error(ErrorCode::kInvalidEdit, "payload needs a spec");
      }
      if (layout_kind && !payload.contains("layout")) {
        throw Error(ErrorCode::kInvalidEdit, "payload needs a layout");
      }
      MvChart& chart = next.charts[pos];
      if (payload.contains("spec")) chart.spec = resolve_chart_spec(table, payload.at("spec"));
      if (payload.contains("layout")) chart.layout = grid_cell_from_json(payload.at("layout"));
      if (kind == EventKind::kLockChart) chart.locked = true;
      if (kind == EventKind::kUnlockChart) chart.locked = false;
      if (payload.contains("locked") && payload.at("locked").is_boolean()) {
        chart.locked = payload.at("locked").get<bool>();
      }
      break;
    }
    case EventKind::kRecommendMvRequest: {
      if (!payload.contains("result")) throw Error(ErrorCode::kInvalidEdit, "payload needs a result");
      next = mv_state_from_json(payload.at("result"));
      for (const MvChart& c : next.charts) validate_spec(table, c.spec);
      check_size(next);
      break;
    }
    case EventKind::kRestoreVersion: {
      if (!payload.contains("seq") || !payload.at("seq").is_number_integer()) {
        throw Error(ErrorCode::kInvalidEdit, "payload needs an integer seq");
      }
      const std::int64_t seq = payload.at("seq").get<std::int64_t>();
      const MVState* target = snapshots ? snapshots(seq) : nullptr;
      if (target == nullptr) {
        throw Error(ErrorCode::kUnknownVersion, "no snapshot at seq " + std::to_string(seq));
      }
      next = *target;
      break;
    }
    case EventKind::kUploadTable:
    case EventKind::kCrossFilter:
    case EventKind::kSaveSession:
      break;
  }
  return next;
}

std::vector<MVState> replay(const ProvenanceLog& log, const DataTable& table) {
  std::vector<MVState> out;
  std::vector<std::pair<std::int64_t, std::size_t>> index;  // seq -> out slot
  MVState mv;
  auto lookup = [&](std::int64_t seq) -> const MVState* {
    for (const auto& [s, slot] : index) {
      if (s == seq) return &out[slot];
    }
    return nullptr;
  };
  for (const ProvenanceEvent& e : log.events) {
    if (!is_mutating(e.kind)) continue;
    mv = apply_event(mv, e.kind, e.payload, table, lookup);
    index.emplace_back(e.seq, out.size());
    out.push_back(mv);
  }
  return out;
}

std::string export_log_jsonl(const ProvenanceLog& log, const DataTable& table) {
  json header = {{"format", kLogFormat},
                 {"version", kLogVersion},
                 {"session_id", log.session_id},
                 {"consent", log.consent},
                 {"table", {{"table_id", log.table.table_id}, {"name", log.table.name}, {"csv", log.table.csv}}},
                 {"features", features_to_json(log.features)}};
  std::string out = header.dump() + "\n";
  for (const ProvenanceEvent& e : log.events) out += event_json(e, table).dump() + "\n";
  return out;
}

ProvenanceLog import_log_jsonl(std::string_view text) {
  ProvenanceLog log;
  std::istringstream in{std::string(text)};
  std::string line;
  bool header = true;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kCorrupt, "log line " + std::to_string(line_no) + ": " + e.what());
    }
    try {
      if (header) {
        if (j.value("format", "") != kLogFormat) throw Error(ErrorCode::kCorrupt, "not a session log");
        if (j.at("version").get<int>() != kLogVersion) {
          throw Error(ErrorCode::kVersion, "unsupported log version");
        }
        log.session_id = j.at("session_id").get<std::string>();
        log.consent = j.at("consent").get<bool>();
        const json& t = j.at("table");
        log.table = {t.at("table_id").get<std::string>(), t.at("name").get<std::string>(),
                     t.at("csv").get<std::string>()};
        log.features = features_from_json(j.at("features"));
        header = false;
        continue;
      }
      ProvenanceEvent e;
      e.timestamp_ms = j.at("timestamp").get<std::int64_t>();
      e.session_id = j.at("session_id").get<std::string>();
      e.seq = j.at("seq").get<std::int64_t>();
      auto kind = parse_event_kind(j.at("kind").get<std::string>());
      if (!kind) throw Error(ErrorCode::kCorrupt, "unknown event kind on line " + std::to_string(line_no));
      e.kind = *kind;
      e.payload = j.at("payload");
      if (j.contains("mv_snapshot")) e.snapshot = mv_state_from_json(j.at("mv_snapshot"));
      if (!log.events.empty() && e.seq <= log.events.back().seq) {
        throw Error(ErrorCode::kCorrupt, "seq not increasing on line " + std::to_string(line_no));
      }
      log.events.push_back(std::move(e));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kCorrupt, "log line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (header) throw Error(ErrorCode::kCorrupt, "log has no header");
  return log;
}

DataTable log_table(const ProvenanceLog& log) { return parse_csv(log.table.csv, log.table.name); }

std::string log_file_name(std::string_view session_id) {
  return std::string(session_id) + ".mvlog.jsonl";
}

Clock system_clock_ms() {
  return [] {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
  };
}

Session::Session(std::string session_id, std::string table_name, std::string csv_bytes,
                 Clock clock)
    : table_(parse_csv(csv_bytes, table_name)), clock_(std::move(clock)) {
  log_.session_id = std::move(session_id);
  log_.features = featurize_table(table_);
  log_.table = {table_.table_id, table_.name, std::move(csv_bytes)};
  if (!clock_) clock_ = system_clock_ms();
}

const MVState* Session::snapshot_at(std::int64_t seq) const {
  for (const ProvenanceEvent& e : log_.events) {
    if (e.seq == seq) return e.snapshot ? &*e.snapshot : nullptr;
  }
  return nullptr;
}

const ProvenanceEvent& Session::record(EventKind kind, json payload) {
  if (closed_) throw Error(ErrorCode::kSessionClosed, "session " + log_.session_id + " is closed");
  ProvenanceEvent e;
  e.session_id = log_.session_id;
  e.seq = log_.events.empty() ? 1 : log_.events.back().seq + 1;
  e.kind = kind;
  if (is_mutating(kind)) {
    MVState next = apply_event(current_, kind, payload, table_,
                               [this](std::int64_t s) { return snapshot_at(s); });
    e.snapshot = next;
    current_ = std::move(next);
  }
  e.payload = std::move(payload);
  e.timestamp_ms = clock_();
  log_.events.push_back(std::move(e));
  return log_.events.back();
}

const MVState& Session::restore(std::int64_t seq) {
  record(EventKind::kRestoreVersion, {{"seq", seq}});
  return current_;
}

std::vector<const ProvenanceEvent*> Session::history() const {
  std::vector<const ProvenanceEvent*> out;
  for (const ProvenanceEvent& e : log_.events) {
    if (e.snapshot) out.push_back(&e);
  }
  return out;
}

std::string Session::export_jsonl() const {
  if (!log_.consent) throw Error(ErrorCode::kConsentDenied, "session has no consent to store logs");
  return export_log_jsonl(log_, table_);
}

std::optional<std::filesystem::path> Session::flush(const std::filesystem::path& dir) const {
  if (!log_.consent) return std::nullopt;
  std::filesystem::create_directories(dir);
  const auto path = dir / log_file_name(log_.session_id);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << export_log_jsonl(log_, table_);
  if (!out) throw Error(ErrorCode::kCorrupt, "cannot write " + path.string());
  return path;
}

}  // namespace mvforge
