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

#include <fstream>
#include <random>

#include "gtest/gtest.h"
#include "mvforge/error.h"
#include "test_support.h"

namespace mvforge {
namespace {

using nlohmann::json;

Clock counter_clock() {
  auto t = std::make_shared<std::int64_t>(1000);
  return [t] { return ++*t; };
}

json chart(const std::vector<int>& cols, const std::string& type) {
  return {{"chart", {{"spec", {{"columns", cols}, {"chart_type", type}}}}}};
}

Session new_session(const std::string& id = "s1") {
  Session s(id, "sample", testing::sample_csv(), counter_clock());
  s.record(EventKind::kUploadTable, {{"name", "sample"}});
  return s;
}

TEST(EventKindTest, NamesRoundTripAndMutatingSet) {
  for (int i = 0; i <= static_cast<int>(EventKind::kSaveSession); ++i) {
    const auto k = static_cast<EventKind>(i);
    EXPECT_EQ(parse_event_kind(event_kind_name(k)), k);
  }
  EXPECT_FALSE(is_mutating(EventKind::kUploadTable));
  EXPECT_FALSE(is_mutating(EventKind::kCrossFilter));
  EXPECT_FALSE(is_mutating(EventKind::kSaveSession));
  EXPECT_TRUE(is_mutating(EventKind::kAddChart));
  EXPECT_TRUE(is_mutating(EventKind::kRestoreVersion));
  EXPECT_FALSE(parse_event_kind("nope").has_value());
}

TEST(SessionTest, MutatingEventsSnapshotTheMv) {
  Session s = new_session();
  EXPECT_FALSE(s.log().events[0].snapshot.has_value());
  s.record(EventKind::kAddChart, chart({0, 1}, "bar"));
  s.record(EventKind::kAddChart, chart({3, 4}, "line"));
  ASSERT_EQ(s.current().size(), 2u);
  EXPECT_EQ(s.current().charts[1].spec.type, ChartType::kLine);
  EXPECT_EQ(s.current().charts[1].layout, default_layout(1));
  ASSERT_TRUE(s.log().events.back().snapshot.has_value());
  EXPECT_EQ(*s.log().events.back().snapshot, s.current());
  s.record(EventKind::kCrossFilter, {{"brush", "x"}});
  EXPECT_FALSE(s.log().events.back().snapshot.has_value());
  EXPECT_EQ(s.history().size(), 2u);
}

TEST(SessionTest, EditsChangeOnlyTheTargetedChart) {
  Session s = new_session();
  s.record(EventKind::kAddChart, chart({0, 1}, "bar"));
  s.record(EventKind::kAddChart, chart({1, 4}, "scatter"));
  const MVState before = s.current();
  json spec = to_json(assign_encodings(s.table(), {0, 1}, ChartType::kPie));
  s.record(EventKind::kChangeType, {{"position", 0}, {"spec", spec}});
  EXPECT_EQ(s.current().charts[0].spec.type, ChartType::kPie);
  EXPECT_EQ(s.current().charts[1], before.charts[1]);
  s.record(EventKind::kLockChart, {{"position", 1}, {"locked", true}});
  EXPECT_TRUE(s.current().charts[1].locked);
  s.record(EventKind::kResizeChart, {{"position", 1}, {"layout", {{"x", 0}, {"y", 8}, {"w", 6}, {"h", 3}}}});
  EXPECT_EQ(s.current().charts[1].layout, (GridCell{0, 8, 6, 3}));
  s.record(EventKind::kRemoveChart, {{"position", 0}});
  ASSERT_EQ(s.current().size(), 1u);
  EXPECT_TRUE(s.current().charts[0].locked);
}

TEST(SessionTest, InvalidEditsLeaveStateUntouched) {
  Session s = new_session();
  s.record(EventKind::kAddChart, chart({0, 1}, "bar"));
  const std::size_t events = s.log().events.size();
  const MVState before = s.current();
  try {
    s.record(EventKind::kRemoveChart, {{"position", 5}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kPosition);
  }
  EXPECT_THROW(s.record(EventKind::kAddChart, chart({0, 1, 2, 3, 4}, "bar")), Error);
  EXPECT_THROW(s.record(EventKind::kChangeType, {{"position", 0}}), Error);
  EXPECT_EQ(s.current(), before);
  EXPECT_EQ(s.log().events.size(), events);
}

TEST(SessionTest, ThirteenthChartIsRejected) {
  Session s = new_session();
  for (int i = 0; i < 12; ++i) s.record(EventKind::kAddChart, chart({i % 6}, "bar"));
  try {
    s.record(EventKind::kAddChart, chart({0}, "bar"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTooManyCharts);
  }
}

TEST(SessionTest, RestoreRevertsToAnEarlierSnapshot) {
  Session s = new_session();
  const auto& first = s.record(EventKind::kAddChart, chart({0, 1}, "bar"));
  const std::int64_t seq = first.seq;
  const MVState one = s.current();
  s.record(EventKind::kAddChart, chart({2}, "pie"));
  s.restore(seq);
  EXPECT_EQ(s.current(), one);
  EXPECT_EQ(s.log().events.back().kind, EventKind::kRestoreVersion);
  try {
    s.restore(999);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnknownVersion);
  }
  // Upload carries no snapshot, so it is not a version.
  EXPECT_THROW(s.restore(s.log().events[0].seq), Error);
}

TEST(SessionTest, ClosedSessionRejectsEvents) {
  Session s = new_session();
  s.close();
  try {
    s.record(EventKind::kAddChart, chart({0}, "bar"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSessionClosed);
  }
}

TEST(SessionTest, ConsentGatesExportAndFlush) {
  Session s = new_session("consent-check");
  s.record(EventKind::kAddChart, chart({0, 1}, "bar"));
  const auto dir = testing::temp_dir("consent");
  EXPECT_FALSE(s.flush(dir).has_value());
  EXPECT_TRUE(std::filesystem::is_empty(dir));
  try {
    s.export_jsonl();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConsentDenied);
  }
  s.set_consent(true);
  const auto path = s.flush(dir);
  ASSERT_TRUE(path.has_value());
  EXPECT_EQ(path->filename(), "consent-check.mvlog.jsonl");
  EXPECT_TRUE(std::filesystem::exists(*path));
}

TEST(ExportTest, RoundTripsByteExactly) {
  Session s = new_session();
  s.set_consent(true);
  s.record(EventKind::kAddChart, chart({0, 1}, "bar"));
  s.record(EventKind::kAddChart, chart({3, 4}, "line"));
  s.record(EventKind::kCrossFilter, {{"range", {1, 2}}});
  s.record(EventKind::kRemoveChart, {{"position", 0}});
  const std::string text = s.export_jsonl();
  const ProvenanceLog log = import_log_jsonl(text);
  EXPECT_EQ(log.session_id, "s1");
  EXPECT_TRUE(log.consent);
  EXPECT_EQ(log.events.size(), s.log().events.size());
  EXPECT_EQ(export_log_jsonl(log, log_table(log)), text);
  const json header = json::parse(text.substr(0, text.find('\n')));
  EXPECT_EQ(header["format"], "mvforge-log");
  EXPECT_EQ(header["version"], 1);
}

TEST(ExportTest, RejectsNonIncreasingSequence) {
  Session s = new_session();
  s.set_consent(true);
  s.record(EventKind::kAddChart, chart({0}, "bar"));
  s.record(EventKind::kAddChart, chart({1}, "bar"));
  std::string text = s.export_jsonl();
  std::vector<std::string> lines;
  std::stringstream ss(text);
  for (std::string l; std::getline(ss, l);) lines.push_back(l);
  std::swap(lines[2], lines[3]);
  std::string swapped;
  for (const auto& l : lines) swapped += l + "\n";
  EXPECT_THROW(import_log_jsonl(swapped), Error);
  EXPECT_THROW(import_log_jsonl("{\"format\":\"other\"}\n"), Error);
}

TEST(ReplayTest, FuzzedSessionsReplayBitExactly) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    Session s = new_session("fuzz");
    const int events = 5 + static_cast<int>(rng() % 20);
    for (int e = 0; e < events; ++e) {
      const std::size_t n = s.current().size();
      const int op = static_cast<int>(rng() % 5);
      std::vector<int> cols{static_cast<int>(rng() % 6)};
      if (rng() % 2) cols.push_back(static_cast<int>((cols[0] + 1 + rng() % 5) % 6));
      const std::string type(chart_type_name(kAllChartTypes[rng() % 5]));
      if (op == 0 || n == 0) {
        if (n < 12) s.record(EventKind::kAddChart, chart(cols, type));
      } else if (op == 1) {
        s.record(EventKind::kRemoveChart, {{"position", rng() % n}});
      } else if (op == 2) {
        json spec = {{"columns", cols}, {"chart_type", type}};
        s.record(EventKind::kChangeType, {{"position", rng() % n}, {"spec", spec}});
      } else if (op == 3) {
        s.record(EventKind::kLockChart, {{"position", rng() % n}, {"locked", true}});
      } else {
        const auto versions = s.history();
        s.restore(versions[rng() % versions.size()]->seq);
      }
    }
    const std::vector<MVState> replayed = replay(s.log(), s.table());
    const auto history = s.history();
    ASSERT_EQ(replayed.size(), history.size());
    for (std::size_t i = 0; i < history.size(); ++i) EXPECT_EQ(replayed[i], *history[i]->snapshot);
  }
}

}  // namespace
}  // namespace mvforge
