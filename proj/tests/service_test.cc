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

#include "mvforge/service.h"

#include <unistd.h>

#include <chrono>
#include <thread>

#include "gtest/gtest.h"
#include "httplib.h"
#include "mvforge/error.h"
#include "mvforge/pairgen.h"
#include "mvforge/synth.h"
#include "test_support.h"

namespace mvforge {
namespace {

using nlohmann::json;

ServiceConfig test_config(const std::string& name) {
  ServiceConfig c;
  c.data_dir = testing::temp_dir(name).string();
  c.deterministic = true;
  return c;
}

std::unique_ptr<Service> make_service(const ServiceConfig& c) {
  return std::make_unique<Service>(c, testing::random_bundle(ModelKind::kSingleChart, 1),
                                   testing::random_bundle(ModelKind::kMv, 2));
}

ApiResponse call(Service& s, const std::string& method, const std::string& path,
                 const json& body = json::object()) {
  ApiRequest r;
  r.method = method;
  r.path = path;
  if (method != "GET") r.body = body.dump();
  ApiResponse out = s.handle(r);
  EXPECT_EQ(out.body.value("api_version", 0), kApiVersion) << path;
  return out;
}

std::string upload(Service& s, const std::string& csv = testing::sample_csv()) {
  ApiRequest r{"POST", "/api/datasets", csv, "sample.csv", {}};
  const ApiResponse out = s.handle(r);
  EXPECT_EQ(out.status, 200) << out.body.dump();
  return out.body.value("session_id", "");
}

std::set<ColumnSet> column_sets(const json& mv) {
  std::set<ColumnSet> out;
  for (const json& c : mv.at("charts")) out.insert(c.at("columns").get<ColumnSet>());
  return out;
}

TEST(ServiceTest, HealthReportsVersionAndModels) {
  auto s = make_service(test_config("health"));
  const ApiResponse r = call(*s, "GET", "/api/health");
  EXPECT_EQ(r.status, 200);
  EXPECT_EQ(r.body["version"], std::string(kVersion));
  EXPECT_EQ(r.body["models"]["single_chart"], "single_chart-0");
}

TEST(ServiceTest, UploadProfilesTheTable) {
  auto s = make_service(test_config("upload"));
  ApiRequest r{"POST", "/api/datasets", testing::sample_csv(), "sample.csv", {}};
  const ApiResponse out = s->handle(r);
  ASSERT_EQ(out.status, 200);
  EXPECT_EQ(out.body["session_id"], "sess-000001");
  EXPECT_EQ(out.body["table"]["name"], "sample");
  ASSERT_EQ(out.body["table"]["columns"].size(), 6u);
  EXPECT_EQ(out.body["table"]["columns"][1]["type"], "quantitative");
  EXPECT_TRUE(out.body["table"]["columns"][1]["profile"].contains("missing_ratio"));
}

TEST(ServiceTest, ScriptedSession) {
  const ServiceConfig config = test_config("scripted");
  auto s = make_service(config);
  const std::string id = upload(*s);
  const std::string base = "/api/sessions/" + id;
  const json lock = {{"columns", {0, 1}}, {"chart_type", "bar"}};

  const ApiResponse rec = call(*s, "POST", base + "/recommend-mv", {{"n_charts", 5}, {"locked", {lock}}});
  ASSERT_EQ(rec.status, 200) << rec.body.dump();
  const json& charts = rec.body["mv"]["charts"];
  ASSERT_EQ(charts.size(), 5u);
  EXPECT_EQ(charts[0]["columns"], json({0, 1}));
  EXPECT_EQ(charts[0]["chart_type"], "bar");
  EXPECT_EQ(rec.body["mv"]["locked"][0], true);
  EXPECT_EQ(rec.body["scores"]["per_chart"].size(), 5u);
  EXPECT_EQ(column_sets(rec.body["mv"]).size(), 5u);
  const std::int64_t rec_seq = rec.body["seq"];

  // Three edits: type change, move, removal.
  const std::string new_type = charts[1]["chart_type"] == "pie" ? "bar" : "pie";
  ApiResponse e1 = call(*s, "PATCH", base + "/charts/1", {{"chart_type", new_type}});
  ASSERT_EQ(e1.status, 200) << e1.body.dump();
  EXPECT_EQ(e1.body["mv"]["charts"][1]["chart_type"], new_type);
  ApiResponse e2 = call(*s, "PATCH", base + "/charts/2", {{"layout", {{"x", 0}, {"y", 12}, {"w", 4}, {"h", 4}}}});
  ASSERT_EQ(e2.status, 200);
  ApiResponse e3 = call(*s, "DELETE", base + "/charts/4");
  ASSERT_EQ(e3.status, 200);
  EXPECT_EQ(e3.body["mv"]["charts"].size(), 4u);

  const ApiResponse ideas = call(*s, "POST", base + "/chart-ideas", {{"must_include", {2}}, {"limit", 50}});
  ASSERT_EQ(ideas.status, 200);
  const auto current = column_sets(e3.body["mv"]);
  ASSERT_FALSE(ideas.body["ideas"].empty());
  for (const json& idea : ideas.body["ideas"]) {
    const auto cols = idea["columns"].get<ColumnSet>();
    EXPECT_FALSE(current.count(cols));
    EXPECT_TRUE(std::count(cols.begin(), cols.end(), 2));
    EXPECT_TRUE(idea.contains("vegalite"));
  }

  const ApiResponse restored = call(*s, "POST", base + "/restore", {{"seq", rec_seq}});
  ASSERT_EQ(restored.status, 200);
  EXPECT_EQ(restored.body["mv"]["charts"], rec.body["mv"]["charts"]);

  const ApiResponse history = call(*s, "GET", base + "/history");
  ASSERT_EQ(history.status, 200);
  EXPECT_EQ(history.body["history"].size(), 5u);  // recommend, 3 edits, restore
  EXPECT_EQ(history.body["history"][1]["kind"], "change_type");
  EXPECT_EQ(history.body["history"][2]["kind"], "move_chart");
  EXPECT_EQ(history.body["history"][3]["kind"], "remove_chart");
  EXPECT_EQ(history.body["history"][4]["kind"], "restore_version");

  const ApiResponse saved = call(*s, "POST", base + "/save", {{"consent", false}});
  ASSERT_EQ(saved.status, 200);
  EXPECT_FALSE(saved.body["stored"].get<bool>());
  const auto logs = std::filesystem::path(config.data_dir) / "logs";
  EXPECT_TRUE(!std::filesystem::exists(logs) || std::filesystem::is_empty(logs));
}

TEST(ServiceTest, RecommendUsesCurrentLocksByDefault) {
  auto s = make_service(test_config("locks"));
  const std::string base = "/api/sessions/" + upload(*s);
  call(*s, "POST", base + "/charts", {{"spec", {{"columns", {3, 4}}, {"chart_type", "line"}}}});
  const ApiResponse locked = call(*s, "PATCH", base + "/charts/0", {{"lock", true}});
  EXPECT_TRUE(locked.body["mv"]["charts"][0]["locked"].get<bool>());
  const ApiResponse rec = call(*s, "POST", base + "/recommend-mv", {{"n_charts", 3}});
  ASSERT_EQ(rec.status, 200);
  EXPECT_EQ(rec.body["mv"]["charts"][0]["columns"], json({3, 4}));
  EXPECT_EQ(rec.body["mv"]["charts"][0]["chart_type"], "line");
}

TEST(ServiceTest, ErrorStatuses) {
  ServiceConfig c = test_config("errors");
  c.max_upload_bytes = 64;
  auto s = make_service(c);
  EXPECT_EQ(call(*s, "GET", "/api/sessions/nope").status, 404);
  EXPECT_EQ(call(*s, "GET", "/api/unknown").status, 404);
  ApiRequest big{"POST", "/api/datasets", std::string(65, 'a'), "", {}};
  EXPECT_EQ(s->handle(big).status, 413);
  ApiRequest empty{"POST", "/api/datasets", "", "", {}};
  EXPECT_EQ(s->handle(empty).status, 400);
  ApiRequest ragged{"POST", "/api/datasets", "a,b\n1,2,3\n", "", {}};
  EXPECT_EQ(s->handle(ragged).status, 400);

  ApiRequest ok{"POST", "/api/datasets", "a,b\nx,1\ny,2\n", "", {}};
  const std::string base = "/api/sessions/" + s->handle(ok).body["session_id"].get<std::string>();
  EXPECT_EQ(call(*s, "POST", base + "/recommend-mv", {{"n_charts", 0}}).status, 422);
  EXPECT_EQ(call(*s, "POST", base + "/recommend-mv", {{"n_charts", 9}}).status, 422);
  EXPECT_EQ(call(*s, "POST", base + "/recommend-mv", json::object()).status, 422);
  EXPECT_EQ(call(*s, "PATCH", base + "/charts/0", {{"chart_type", "pie"}}).status, 404);
  EXPECT_EQ(call(*s, "POST", base + "/charts", {{"spec", {{"columns", {5}}, {"chart_type", "bar"}}}}).status, 422);
  EXPECT_EQ(call(*s, "POST", base + "/restore", {{"seq", 42}}).status, 422);
  EXPECT_EQ(call(*s, "POST", base + "/events", {{"kind", "add_chart"}}).status, 422);
  EXPECT_EQ(call(*s, "POST", base + "/events", {{"kind", "cross_filter"}, {"payload", {{"x", 1}}}}).status, 200);
  ApiRequest bad_json{"POST", base + "/recommend-mv", "{", "", {}};
  EXPECT_EQ(s->handle(bad_json).status, 400);
}

TEST(ServiceTest, TokenIsRequiredWhenConfigured) {
  ServiceConfig c = test_config("token");
  c.api_token = "secret";
  auto s = make_service(c);
  EXPECT_EQ(call(*s, "GET", "/api/health").status, 200);
  ApiRequest r{"POST", "/api/datasets", testing::sample_csv(), "", {}};
  EXPECT_EQ(s->handle(r).status, 401);
  r.headers["Authorization"] = "Bearer secret";
  EXPECT_EQ(s->handle(r).status, 200);
}

TEST(ServiceTest, SessionsAreIsolated) {
  auto s = make_service(test_config("isolation"));
  const std::string a = "/api/sessions/" + upload(*s);
  const std::string b = "/api/sessions/" + upload(*s);
  EXPECT_NE(a, b);
  call(*s, "POST", a + "/charts", {{"spec", {{"columns", {0}}, {"chart_type", "pie"}}}});
  call(*s, "POST", a + "/charts", {{"spec", {{"columns", {1}}, {"chart_type", "bar"}}}});
  call(*s, "POST", b + "/charts", {{"spec", {{"columns", {2, 4}}, {"chart_type", "bar"}}}});
  EXPECT_EQ(call(*s, "GET", a).body["mv"]["charts"].size(), 2u);
  const json mv_b = call(*s, "GET", b).body["mv"];
  ASSERT_EQ(mv_b["charts"].size(), 1u);
  EXPECT_EQ(mv_b["charts"][0]["columns"], json({2, 4}));
}

TEST(ServiceTest, EveryMutatingCallRecordsExactlyOneEvent) {
  auto s = make_service(test_config("audit"));
  const std::string base = "/api/sessions/" + upload(*s);
  EXPECT_EQ(s->event_count(), 1u);
  const std::vector<std::tuple<std::string, std::string, json>> calls{
      {"POST", "/charts", {{"spec", {{"columns", {0, 1}}, {"chart_type", "bar"}}}}},
      {"POST", "/charts", {{"spec", {{"columns", {3}}, {"chart_type", "bar"}}}, {"source", "idea"}}},
      {"PATCH", "/charts/0", {{"chart_type", "pie"}, {"lock", true}, {"layout", {{"x", 4}, {"y", 4}, {"w", 2}, {"h", 2}}}}},
      {"PATCH", "/charts/1", {{"transforms", {{"x", {{"bin", true}}}}}}},
      {"PATCH", "/charts/1", {{"lock", true}}},
      {"PATCH", "/charts/1", {{"lock", false}}},
      {"POST", "/recommend-mv", {{"n_charts", 4}}},
      {"DELETE", "/charts/3", json::object()},
      {"POST", "/events", {{"kind", "cross_filter"}}},
      {"POST", "/save", {{"consent", false}}},
  };
  const std::vector<std::string> kinds{"add_chart", "chart_ideas_click", "change_type", "edit_encoding",
                                       "lock_chart", "unlock_chart", "recommend_mv_request",
                                       "remove_chart", "cross_filter", "save_session"};
  std::size_t before = s->event_count();
  for (std::size_t i = 0; i < calls.size(); ++i) {
    const auto& [method, path, body] = calls[i];
    const ApiResponse r = call(*s, method, base + path, body);
    ASSERT_EQ(r.status, 200) << path << " " << r.body.dump();
    EXPECT_EQ(s->event_count(), before + 1) << path;
    before = s->event_count();
  }
  // The combined PATCH recorded one change_type event carrying all edits.
  const json state = call(*s, "GET", base).body;
  EXPECT_EQ(state["seq"], 11);
  const ApiResponse h = call(*s, "GET", base + "/history");
  std::vector<std::string> got;
  for (const json& e : h.body["history"]) got.push_back(e["kind"]);
  std::vector<std::string> mutating;
  for (const auto& k : kinds) {
    if (k != "cross_filter" && k != "save_session") mutating.push_back(k);
  }
  EXPECT_EQ(got, mutating);
  const json combined = h.body["history"][2]["snapshot"]["charts"][0];
  EXPECT_EQ(combined["chart_type"], "pie");
  EXPECT_TRUE(combined["locked"].get<bool>());
  EXPECT_EQ(combined["layout"]["w"], 2);
}

TEST(ServiceTest, ConsentingSaveWritesAReplayableLog) {
  const ServiceConfig c = test_config("consent_save");
  auto s = make_service(c);
  const std::string id = upload(*s);
  const std::string base = "/api/sessions/" + id;
  call(*s, "POST", base + "/recommend-mv", {{"n_charts", 3}});
  call(*s, "DELETE", base + "/charts/0");
  const ApiResponse saved = call(*s, "POST", base + "/save", {{"consent", true}});
  ASSERT_TRUE(saved.body["stored"].get<bool>());
  const ProvenanceLog log = import_log_jsonl(read_file(saved.body["path"].get<std::string>()));
  EXPECT_EQ(log.session_id, id);
  EXPECT_EQ(replay(log, log_table(log)).back(), mv_state_from_json(call(*s, "GET", base).body["mv"]));
  EXPECT_EQ(s->flush_all(), 1u);
}

std::vector<std::string> scripted_payloads() {
  auto s = make_service(test_config("determinism"));
  const std::string base = "/api/sessions/" + upload(*s, testing::wide_csv());
  std::vector<std::string> out;
  out.push_back(call(*s, "POST", base + "/recommend-mv", {{"n_charts", 4}}).body.dump());
  out.push_back(call(*s, "PATCH", base + "/charts/0", {{"lock", true}}).body.dump());
  out.push_back(call(*s, "POST", base + "/chart-ideas", {{"must_include", {1}}}).body.dump());
  out.push_back(call(*s, "GET", base + "/history").body.dump());
  return out;
}

TEST(ServiceTest, DeterministicModeGivesIdenticalPayloads) {
  EXPECT_EQ(scripted_payloads(), scripted_payloads());
}

TEST(ServiceTest, AdminTrainPublishesAndRejectsConcurrentRuns) {
  const ServiceConfig c = test_config("admin_train");
  auto s = make_service(c);
  SynthOptions o;
  o.tables = 40;
  o.seed = 3;
  const auto corpus = std::filesystem::path(c.data_dir) / "corpus";
  write_synthetic_corpus(generate_synthetic_corpus(o), corpus);
  const CorpusPairs cp = corpus_pairs_from_dir(corpus);
  const auto pairs = std::filesystem::path(c.data_dir) / "pairs.jsonl";
  write_file(pairs, write_chart_pairs_jsonl(cp.records));
  write_file(features_sidecar_path(pairs), to_json(cp.features).dump());

  EXPECT_EQ(call(*s, "POST", "/api/admin/train", {{"kind", "single"}, {"pairs_path", "/no/such"}}).status, 400);
  EXPECT_EQ(call(*s, "POST", "/api/admin/train", {{"kind", "tree"}}).status, 400);

  const json request = {{"kind", "single"}, {"pairs_path", pairs.string()}, {"config", {{"epochs", 6}, {"seed", 4}}}};
  ApiResponse first;
  std::thread worker([&] { first = call(*s, "POST", "/api/admin/train", request); });
  while (!s->training(ModelKind::kSingleChart)) std::this_thread::yield();
  const ApiResponse second = call(*s, "POST", "/api/admin/train", request);
  EXPECT_EQ(second.status, 409);
  // Sessions keep working while training runs.
  EXPECT_EQ(call(*s, "GET", "/api/health").status, 200);
  worker.join();
  ASSERT_EQ(first.status, 200) << first.body.dump();
  EXPECT_EQ(first.body["bundle_id"], "single_chart-1");
  EXPECT_TRUE(std::filesystem::exists(first.body["path"].get<std::string>()));
  EXPECT_EQ(call(*s, "GET", "/api/health").body["models"]["single_chart"], "single_chart-1");
  EXPECT_FALSE(s->training(ModelKind::kSingleChart));
  const ModelBundle stored = load_bundle_file(first.body["path"].get<std::string>());
  EXPECT_EQ(stored.meta.epochs_run, 6);
  // The published model is the one sessions now use.
  const std::string base = "/api/sessions/" + upload(*s);
  const ApiResponse rec = call(*s, "POST", base + "/recommend-mv", {{"n_charts", 2}});
  EXPECT_EQ(rec.body["models"]["single_chart"], "single_chart-1");
}

TEST(ServiceConfigTest, EnvironmentOverridesFile) {
  const auto dir = testing::temp_dir("config");
  write_file(dir / "cfg.json", R"({"port": 9001, "data_dir": "d", "pool_cap": 64})");
  const ServiceConfig c = load_service_config(dir / "cfg.json",
                                              {{"MVFORGE_PORT", "9002"}, {"MVFORGE_DETERMINISTIC", "true"}});
  EXPECT_EQ(c.port, 9002);
  EXPECT_EQ(c.data_dir, "d");
  EXPECT_EQ(c.pool_cap, 64u);
  EXPECT_TRUE(c.deterministic);
  EXPECT_THROW(load_service_config(std::nullopt, {{"MVFORGE_PORT", "x"}}), Error);
  EXPECT_THROW(load_service_config(std::nullopt, {{"MVFORGE_PORT", "70000"}}), Error);
  ServiceConfig missing;
  missing.single_model = (dir / "none.json").string();
  try {
    Service::from_config(missing);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfig);
  }
}

TEST(HttpServerTest, ServesTheApiOverHttp) {
  ServiceConfig c = test_config("http");
  c.port = 18000 + static_cast<int>(::getpid() % 2000);
  auto s = make_service(c);
  std::thread server([&] { run_server(*s); });
  httplib::Client client(c.host, c.port);
  httplib::Result health;
  for (int i = 0; i < 200 && !health; ++i) {
    health = client.Get("/api/health");
    if (!health) std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  ASSERT_TRUE(health);
  EXPECT_EQ(health->status, 200);
  EXPECT_EQ(json::parse(health->body)["version"], std::string(kVersion));

  httplib::MultipartFormDataItems items{{"file", testing::sample_csv(), "sample.csv", "text/csv"}};
  const auto up = client.Post("/api/datasets", items);
  ASSERT_TRUE(up);
  EXPECT_EQ(up->status, 200);
  const std::string id = json::parse(up->body)["session_id"];
  const auto rec = client.Post("/api/sessions/" + id + "/recommend-mv", R"({"n_charts":2})", "application/json");
  ASSERT_TRUE(rec);
  EXPECT_EQ(rec->status, 200);
  const auto del = client.Delete("/api/sessions/" + id + "/charts/0");
  ASSERT_TRUE(del);
  EXPECT_EQ(json::parse(del->body)["mv"]["charts"].size(), 1u);
  stop_server();
  server.join();
}

}  // namespace
}  // namespace mvforge
