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

#ifndef MVFORGE_PROVENANCE_H_
#define MVFORGE_PROVENANCE_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "mvforge/featurize.h"
#include "mvforge/ingest.h"
#include "mvforge/mvstate.h"

namespace mvforge {

enum class EventKind {
  kUploadTable,
  kAddChart,
  kRemoveChart,
  kEditEncoding,
  kChangeType,
  kMoveChart,
  kResizeChart,
  kLockChart,
  kUnlockChart,
  kRecommendMvRequest,
  kChartIdeasClick,
  kCrossFilter,
  kRestoreVersion,
  kSaveSession,
};

std::string_view event_kind_name(EventKind kind);
std::optional<EventKind> parse_event_kind(std::string_view name);

// Mutating kinds change the MV and always carry a snapshot.
bool is_mutating(EventKind kind);

// Payloads by kind:
//   add_chart, chart_ideas_click   {"chart": MvChart json}
//   remove_chart                   {"position"}
//   edit_encoding, change_type,
//   move_chart, resize_chart,
//   lock_chart, unlock_chart       {"position", "spec"?, "layout"?, "locked"?}
//     (spec kinds require "spec", layout kinds require "layout")
//   recommend_mv_request           {"n_charts", "result": MVState json}
//   restore_version                {"seq"}
// Other kinds carry free-form payloads.
struct ProvenanceEvent {
  std::int64_t timestamp_ms = 0;
  std::string session_id;
  std::int64_t seq = 0;
  EventKind kind = EventKind::kCrossFilter;
  nlohmann::json payload = nlohmann::json::object();
  std::optional<MVState> snapshot;
};

struct TableRef {
  std::string table_id;
  std::string name;
  std::string csv;  // raw bytes as uploaded
};

struct ProvenanceLog {
  std::string session_id;
  bool consent = false;
  TableRef table;
  TableFeatures features;
  std::vector<ProvenanceEvent> events;
};

// Parses a chart spec against a table; specs without "encodings" get the
// default assignment for their type. Throws InvalidEdit.
ChartSpec resolve_chart_spec(const DataTable& table, const nlohmann::json& j);

// Applies a mutating event's payload to `mv`. `snapshots` resolves
// restore_version targets. Throws InvalidEdit, PositionError or
// UnknownVersion; `mv` is untouched on failure.
using SnapshotLookup = std::function<const MVState*(std::int64_t seq)>;
MVState apply_event(const MVState& mv, EventKind kind, const nlohmann::json& payload,
                    const DataTable& table, const SnapshotLookup& snapshots);

// Re-derives every snapshot by applying the log's events to an empty MV.
std::vector<MVState> replay(const ProvenanceLog& log, const DataTable& table);

// Line 1 is the header, then one event per line.
std::string export_log_jsonl(const ProvenanceLog& log, const DataTable& table);
ProvenanceLog import_log_jsonl(std::string_view text);
// Parses the CSV carried by the header.
DataTable log_table(const ProvenanceLog& log);

std::string log_file_name(std::string_view session_id);

using Clock = std::function<std::int64_t()>;
Clock system_clock_ms();

// One authoring session with a linear, append-only history.
class Session {
 public:
  Session(std::string session_id, std::string table_name, std::string csv_bytes, Clock clock);

  const std::string& id() const { return log_.session_id; }
  const DataTable& table() const { return table_; }
  const TableFeatures& features() const { return log_.features; }
  const MVState& current() const { return current_; }
  const ProvenanceLog& log() const { return log_; }
  bool closed() const { return closed_; }

  // Appends the event; mutating kinds update the current MV and snapshot it.
  const ProvenanceEvent& record(EventKind kind, nlohmann::json payload = nlohmann::json::object());
  // Replaces the current MV with the snapshot at `seq`; recorded as an event.
  const MVState& restore(std::int64_t seq);
  // Events that carry snapshots, in order.
  std::vector<const ProvenanceEvent*> history() const;

  void set_consent(bool consent) { log_.consent = consent; }
  bool consent() const { return log_.consent; }
  // Throws ConsentDenied without consent.
  std::string export_jsonl() const;
  // Writes {dir}/{session_id}.mvlog.jsonl when consent is given; otherwise
  // writes nothing and returns nullopt.
  std::optional<std::filesystem::path> flush(const std::filesystem::path& dir) const;
  void close() { closed_ = true; }

 private:
  const MVState* snapshot_at(std::int64_t seq) const;

  ProvenanceLog log_;
  DataTable table_;
  MVState current_;
  Clock clock_;
  bool closed_ = false;
};

}  // namespace mvforge

#endif  // MVFORGE_PROVENANCE_H_
