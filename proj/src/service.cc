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

#include <cstdlib>
#include <fstream>
#include <random>
#include <regex>
#include <set>
#include <sstream>

#include "httplib.h"
#include "mvforge/error.h"
#include "mvforge/mvrank.h"
#include "mvforge/pairgen.h"
#include "mvforge/ranker.h"

extern char** environ;

namespace mvforge {
namespace {

using nlohmann::json;

ApiResponse reply(int status, json body) {
  body["api_version"] = kApiVersion;
  return {status, std::move(body)};
}

ApiResponse fail(int status, std::string_view code, const std::string& message) {
  return reply(status, {{"error", {{"code", code}, {"message", message}}}});
}

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyInput:
    case ErrorCode::kMalformedCsv:
    case ErrorCode::kCorrupt:
    case ErrorCode::kVersion:
    case ErrorCode::kLayout:
    case ErrorCode::kEmptyDataset:
    case ErrorCode::kConfig:
      return 400;
    case ErrorCode::kSessionClosed:
    case ErrorCode::kConsentDenied:
      return 409;
    default:
      return 422;
  }
}

ApiResponse from_error(const Error& e) {
  return fail(status_for(e.code()), error_name(e.code()), e.what());
}

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  std::stringstream ss(path);
  std::string part;
  while (std::getline(ss, part, '/')) {
    if (!part.empty()) parts.push_back(part);
  }
  return parts;
}

std::optional<std::size_t> parse_position(const std::string& s) {
  if (s.empty() || s.size() > 6 || s.find_first_not_of("0123456789") != std::string::npos) {
    return std::nullopt;
  }
  return static_cast<std::size_t>(std::stoul(s));
}

json table_json(const DataTable& table) {
  json cols = json::array();
  for (const Column& c : table.columns) {
    const ColumnProfile p = profile(c);
    json prof = json::object();
    for (int i = 0; i < kProfileSize; ++i) {
      prof[std::string(ColumnProfile::name(static_cast<ProfileStat>(i)))] = p.values[static_cast<std::size_t>(i)];
    }
    cols.push_back({{"index", c.index},
                    {"header", c.header},
                    {"type", data_type_name(c.inferred_type)},
                    {"profile", prof}});
  }
  return {{"table_id", table.table_id},
          {"name", table.name},
          {"row_count", table.row_count},
          {"columns", cols}};
}

json mv_json(const Session& s) { return mv_view_json(s.table(), s.current()); }

json session_state(const Session& s) {
  json j = {{"session_id", s.id()}, {"mv", mv_json(s)}};
  if (!s.log().events.empty()) j["seq"] = s.log().events.back().seq;
  return j;
}

std::string env_or(const std::map<std::string, std::string>& env, const std::string& key,
                   const std::string& fallback) {
  auto it = env.find("MVFORGE_" + key);
  return it == env.end() ? fallback : it->second;
}

bool parse_bool(const std::string& v) {
  return v == "1" || v == "true" || v == "yes" || v == "on";
}

TrainingHyper hyper_from_json(const json& c, TrainingHyper h) {
  h.epochs = c.value("epochs", h.epochs);
  h.margin = c.value("margin", h.margin);
  h.lambda = c.value("lambda", h.lambda);
  h.lr = c.value("lr", h.lr);
  h.batch_size = c.value("batch_size", h.batch_size);
  h.seed = c.value("seed", h.seed);
  return h;
}

}  // namespace

ServiceConfig load_service_config(const std::optional<std::filesystem::path>& path,
                                  const std::map<std::string, std::string>& env) {
  ServiceConfig c;
  try {
    if (path) {
      const json j = json::parse(read_file(*path));
      c.host = j.value("host", c.host);
      c.port = j.value("port", c.port);
      c.single_model = j.value("single_model", c.single_model);
      c.mv_model = j.value("mv_model", c.mv_model);
      c.data_dir = j.value("data_dir", c.data_dir);
      c.max_upload_bytes = j.value("max_upload_bytes", c.max_upload_bytes);
      c.pool_cap = j.value("pool_cap", c.pool_cap);
      c.deterministic = j.value("deterministic", c.deterministic);
      c.seed = j.value("seed", c.seed);
      c.api_token = j.value("api_token", c.api_token);
    }
    c.host = env_or(env, "HOST", c.host);
    c.port = std::stoi(env_or(env, "PORT", std::to_string(c.port)));
    c.single_model = env_or(env, "SINGLE_MODEL", c.single_model);
    c.mv_model = env_or(env, "MV_MODEL", c.mv_model);
    c.data_dir = env_or(env, "DATA_DIR", c.data_dir);
    c.max_upload_bytes = std::stoull(env_or(env, "MAX_UPLOAD_BYTES", std::to_string(c.max_upload_bytes)));
    c.pool_cap = std::stoull(env_or(env, "POOL_CAP", std::to_string(c.pool_cap)));
    c.deterministic = parse_bool(env_or(env, "DETERMINISTIC", c.deterministic ? "true" : "false"));
    c.seed = std::stoull(env_or(env, "SEED", std::to_string(c.seed)));
    c.api_token = env_or(env, "API_TOKEN", c.api_token);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfig, std::string("bad config file: ") + e.what());
  } catch (const std::logic_error& e) {
    throw Error(ErrorCode::kConfig, std::string("bad config value: ") + e.what());
  }
  if (c.port < 0 || c.port > 65535) throw Error(ErrorCode::kConfig, "port out of range");
  return c;
}

std::map<std::string, std::string> process_environment() {
  std::map<std::string, std::string> env;
  for (char** e = environ; e != nullptr && *e != nullptr; ++e) {
    const std::string kv(*e);
    const auto eq = kv.find('=');
    if (eq != std::string::npos && kv.rfind("MVFORGE_", 0) == 0) env[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  return env;
}

Service::Service(ServiceConfig config, ModelBundle single, ModelBundle mv)
    : config_(std::move(config)) {
  check_single_chart_bundle(single);
  check_mv_bundle(mv);
  auto m = std::make_shared<Models>();
  m->single = std::make_shared<const ModelBundle>(std::move(single));
  m->mv = std::make_shared<const ModelBundle>(std::move(mv));
  m->single_id = "single_chart-0";
  m->mv_id = "mv-0";
  models_ = std::move(m);
}

std::unique_ptr<Service> Service::from_config(const ServiceConfig& config) {
  for (const auto& [what, path] : {std::pair{"single_model", config.single_model},
                                   std::pair{"mv_model", config.mv_model}}) {
    if (path.empty() || !std::filesystem::exists(path)) {
      throw Error(ErrorCode::kConfig, std::string(what) + " not found: '" + path + "'");
    }
  }
  return std::make_unique<Service>(config, load_bundle_file(config.single_model),
                                   load_bundle_file(config.mv_model));
}

std::shared_ptr<const Service::Models> Service::models() const {
  std::lock_guard lock(models_mutex_);
  return models_;
}

void Service::publish(ModelKind kind, ModelBundle bundle, std::string id) {
  if (kind == ModelKind::kSingleChart) {
    check_single_chart_bundle(bundle);
  } else {
    check_mv_bundle(bundle);
  }
  auto shared = std::make_shared<const ModelBundle>(std::move(bundle));
  std::lock_guard lock(models_mutex_);
  auto next = std::make_shared<Models>(*models_);
  if (kind == ModelKind::kSingleChart) {
    next->single = std::move(shared);
    next->single_id = std::move(id);
  } else {
    next->mv = std::move(shared);
    next->mv_id = std::move(id);
  }
  models_ = std::move(next);
}

bool Service::training(ModelKind kind) const {
  return kind == ModelKind::kSingleChart ? training_single_.load() : training_mv_.load();
}

std::size_t Service::event_count() const {
  std::lock_guard lock(sessions_mutex_);
  std::size_t n = 0;
  for (const auto& [id, slot] : sessions_) {
    std::lock_guard slot_lock(slot->mutex);
    n += slot->session->log().events.size();
  }
  return n;
}

std::size_t Service::flush_all() {
  std::lock_guard lock(sessions_mutex_);
  std::size_t n = 0;
  for (const auto& [id, slot] : sessions_) {
    std::lock_guard slot_lock(slot->mutex);
    if (slot->session->flush(std::filesystem::path(config_.data_dir) / "logs")) ++n;
  }
  return n;
}

Service::SessionSlot* Service::find_session(const std::string& id) {
  std::lock_guard lock(sessions_mutex_);
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second.get();
}

std::string Service::next_session_id() {
  // Called with sessions_mutex_ held.
  ++session_counter_;
  if (config_.deterministic) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "sess-%06llu", static_cast<unsigned long long>(session_counter_));
    return buf;
  }
  static thread_local std::mt19937_64 rng(std::random_device{}());
  char buf[40];
  std::snprintf(buf, sizeof(buf), "sess-%016llx", static_cast<unsigned long long>(rng()));
  return buf;
}

const CandidatePool& Service::pool_for(SessionSlot& slot, const Models& models, bool dedup) {
  const auto key = std::make_pair(dedup, models.single_id);
  auto it = slot.pools.find(key);
  if (it == slot.pools.end()) {
    PoolOptions o;
    o.dedup = dedup;
    o.wide_table_cap = config_.pool_cap;
    const Session& s = *slot.session;
    auto pool = std::make_shared<const CandidatePool>(
        enumerate_candidates(s.table(), bundle_chart_scorer(*models.single, s.features()), o));
    it = slot.pools.emplace(key, std::move(pool)).first;
  }
  return *it->second;
}

ApiResponse Service::handle(const ApiRequest& req) {
  try {
    const auto parts = split_path(req.path);
    if (parts.size() < 2 || parts[0] != "api") return fail(404, "NotFound", "unknown path");
    if (req.method == "GET" && parts.size() == 2 && parts[1] == "health") {
      const auto m = models();
      return reply(200, {{"status", "ok"},
                         {"version", kVersion},
                         {"models", {{"single_chart", m->single_id}, {"mv", m->mv_id}}}});
    }
    if (!config_.api_token.empty()) {
      auto it = req.headers.find("Authorization");
      if (it == req.headers.end() || it->second != "Bearer " + config_.api_token) {
        return fail(401, "Unauthorized", "missing or wrong API token");
      }
    }
    if (parts.size() == 2 && parts[1] == "datasets") {
      if (req.method != "POST") return fail(405, "MethodNotAllowed", "use POST");
      return upload(req);
    }
    json body = json::object();
    if (!req.body.empty() && req.method != "GET") {
      try {
        body = json::parse(req.body);
      } catch (const json::exception& e) {
        return fail(400, "BadJson", e.what());
      }
      if (!body.is_object()) return fail(400, "BadJson", "body must be a JSON object");
    }
    if (parts.size() == 3 && parts[1] == "admin" && parts[2] == "train") {
      if (req.method != "POST") return fail(405, "MethodNotAllowed", "use POST");
      return admin_train(body);
    }
    if (parts[1] == "sessions" && parts.size() >= 3 && parts.size() <= 5) {
      return session_call(parts[2], req.method, parts.size() > 3 ? parts[3] : "",
                          parts.size() > 4 ? parts[4] : "", body);
    }
    return fail(404, "NotFound", "unknown path");
  } catch (const Error& e) {
    return from_error(e);
  } catch (const json::exception& e) {
    return fail(422, "InvalidRequest", e.what());
  }
}

ApiResponse Service::upload(const ApiRequest& req) {
  if (req.body.size() > config_.max_upload_bytes) {
    return fail(413, "PayloadTooLarge", "upload exceeds " + std::to_string(config_.max_upload_bytes) + " bytes");
  }
  std::string name = req.file_name.empty() ? "dataset" : req.file_name;
  if (name.size() > 4 && name.substr(name.size() - 4) == ".csv") name.resize(name.size() - 4);
  Clock clock;
  if (config_.deterministic) {
    auto tick = std::make_shared<std::int64_t>(0);
    clock = [tick] { return ++*tick; };
  }
  std::string id;
  {
    std::lock_guard lock(sessions_mutex_);
    id = next_session_id();
  }
  auto slot = std::make_unique<SessionSlot>();
  slot->session = std::make_unique<Session>(id, name, req.body, clock);
  slot->session->record(EventKind::kUploadTable,
                        {{"table_id", slot->session->table().table_id}, {"name", name}});
  json out = {{"session_id", id}, {"table", table_json(slot->session->table())}};
  {
    std::lock_guard lock(sessions_mutex_);
    sessions_.emplace(id, std::move(slot));
  }
  return reply(200, std::move(out));
}

ApiResponse Service::session_call(const std::string& id, const std::string& method,
                                  const std::string& action, const std::string& arg,
                                  const json& body) {
  SessionSlot* slot = find_session(id);
  if (slot == nullptr) return fail(404, "NotFound", "no session " + id);
  std::lock_guard lock(slot->mutex);
  Session& s = *slot->session;
  const auto m = models();  // one model snapshot for the whole request

  if (action.empty() && method == "GET") return reply(200, session_state(s));

  if (action == "recommend-mv" && method == "POST") {
    if (!body.contains("n_charts") || !body.at("n_charts").is_number_integer()) {
      return fail(422, "InfeasibleRequest", "n_charts must be an integer");
    }
    const int n = body.at("n_charts").get<int>();
    std::vector<ChartSpec> locked;
    if (body.contains("locked")) {
      for (const json& ref : body.at("locked")) {
        if (ref.is_number_integer()) {
          const auto pos = ref.get<long long>();
          if (pos < 0 || static_cast<std::size_t>(pos) >= s.current().size()) {
            return fail(422, "PositionError", "no chart at position " + std::to_string(pos));
          }
          locked.push_back(s.current().charts[static_cast<std::size_t>(pos)].spec);
        } else {
          locked.push_back(resolve_chart_spec(s.table(), ref));
        }
      }
    } else {
      for (const MvChart& c : s.current().charts) {
        if (c.locked) locked.push_back(c.spec);
      }
    }
    const bool dedup = body.value("drop_alternative_types", true);
    const CandidatePool& pool = pool_for(*slot, *m, dedup);
    const MvScorer scorer = learned_mv_scorer(*m->mv, *m->single, s.features());
    const MVState mv = recommend_mv(s.table(), n, locked, pool, scorer);
    const ChartScorer chart_scorer = cached_chart_scorer(*m->single, s.features());
    std::vector<ChartScore> per_chart;
    for (const MvChart& c : mv.charts) per_chart.push_back(chart_scorer(c.spec.columns));
    const double mv_score = scorer({mv.specs()}).front();
    json locked_json = json::array();
    for (const ChartSpec& c : locked) locked_json.push_back(to_json(c));
    s.record(EventKind::kRecommendMvRequest,
             {{"n_charts", n}, {"locked", locked_json}, {"result", to_json(mv)}});
    json out = recommendation_json(s.table(), mv, mv_score, per_chart);
    out["session_id"] = s.id();
    out["seq"] = s.log().events.back().seq;
    out["models"] = {{"single_chart", m->single_id}, {"mv", m->mv_id}};
    return reply(200, std::move(out));
  }

  if (action == "chart-ideas" && method == "POST") {
    std::set<int> must;
    if (body.contains("must_include")) {
      for (int c : body.at("must_include").get<std::vector<int>>()) must.insert(c);
    }
    const bool dedup = body.value("drop_alternative_types", true);
    const int limit = body.value("limit", 10);
    if (limit < 1) return fail(422, "InvalidRequest", "limit must be at least 1");
    const CandidatePool& pool = pool_for(*slot, *m, dedup);
    const auto ideas = chart_ideas(s.current(), must, pool,
                                   learned_mv_scorer(*m->mv, *m->single, s.features()),
                                   static_cast<std::size_t>(limit));
    json list = json::array();
    for (const ChartIdea& idea : ideas) {
      json j = to_json(idea.spec);
      j["vegalite"] = vegalite_json(idea.spec, s.table());
      j["score"] = to_json(idea.score);
      j["projected"] = idea.projected;
      list.push_back(std::move(j));
    }
    return reply(200, {{"session_id", s.id()}, {"ideas", list}});
  }

  if (action == "charts") {
    if (method == "POST" && arg.empty()) {
      if (!body.contains("spec")) return fail(422, "InvalidEdit", "body needs a spec");
      json chart = {{"spec", body.at("spec")}};
      if (body.contains("layout")) chart["layout"] = body.at("layout");
      if (body.contains("locked")) chart["locked"] = body.at("locked");
      const EventKind kind = body.value("source", "") == "idea" ? EventKind::kChartIdeasClick
                                                                 : EventKind::kAddChart;
      s.record(kind, {{"chart", chart}});
      return reply(200, session_state(s));
    }
    const auto pos = parse_position(arg);
    if (!pos) return fail(404, "NotFound", "bad chart position");
    if (*pos >= s.current().size()) return fail(404, "NotFound", "no chart at position " + arg);
    const MvChart& cur = s.current().charts[*pos];
    if (method == "DELETE") {
      s.record(EventKind::kRemoveChart, {{"position", *pos}});
      return reply(200, session_state(s));
    }
    if (method == "PATCH") {
      json payload = {{"position", *pos}};
      std::optional<EventKind> kind;
      const bool type_change = body.contains("chart_type");
      if (type_change || body.contains("encodings") || body.contains("transforms") ||
          body.contains("columns")) {
        json spec = to_json(cur.spec);
        if (type_change) spec["chart_type"] = body.at("chart_type");
        if (body.contains("columns")) spec["columns"] = body.at("columns");
        if (body.contains("encodings")) {
          spec["encodings"] = body.at("encodings");
        } else if (type_change || body.contains("columns")) {
          spec.erase("encodings");  // reassigned for the new type or columns
        }
        if (body.contains("transforms")) {
          if (!spec.contains("encodings")) {
            spec = to_json(resolve_chart_spec(s.table(), spec));
          }
          for (const auto& [channel, t] : body.at("transforms").items()) {
            if (!spec["encodings"].contains(channel)) {
              return fail(422, "InvalidEdit", "no encoding on channel " + channel);
            }
            for (const auto& [k, v] : t.items()) spec["encodings"][channel][k] = v;
          }
        }
        payload["spec"] = spec;
        const bool type_differs = type_change && body.at("chart_type") != chart_type_name(cur.spec.type);
        kind = type_differs ? EventKind::kChangeType : EventKind::kEditEncoding;
      }
      if (body.contains("layout")) {
        const GridCell cell = grid_cell_from_json(body.at("layout"));
        payload["layout"] = to_json(cell);
        if (!kind) {
          kind = (cell.w != cur.layout.w || cell.h != cur.layout.h) ? EventKind::kResizeChart
                                                                     : EventKind::kMoveChart;
        }
      }
      if (body.contains("lock")) {
        const bool lock_value = body.at("lock").get<bool>();
        payload["locked"] = lock_value;
        if (!kind) kind = lock_value ? EventKind::kLockChart : EventKind::kUnlockChart;
      }
      if (!kind) return fail(422, "InvalidEdit", "nothing to edit");
      s.record(*kind, payload);
      return reply(200, session_state(s));
    }
    return fail(405, "MethodNotAllowed", "unsupported method on a chart");
  }

  if (action == "restore" && method == "POST") {
    if (!body.contains("seq") || !body.at("seq").is_number_integer()) {
      return fail(422, "UnknownVersion", "seq must be an integer");
    }
    s.restore(body.at("seq").get<std::int64_t>());
    return reply(200, session_state(s));
  }

  if (action == "history" && method == "GET") {
    json entries = json::array();
    for (const ProvenanceEvent* e : s.history()) {
      entries.push_back({{"seq", e->seq},
                         {"kind", event_kind_name(e->kind)},
                         {"timestamp", e->timestamp_ms},
                         {"charts", e->snapshot->size()},
                         {"snapshot", mv_view_json(s.table(), *e->snapshot)}});
    }
    return reply(200, {{"session_id", s.id()}, {"history", entries}});
  }

  if (action == "save" && method == "POST") {
    const bool consent = body.value("consent", false);
    s.set_consent(consent);
    s.record(EventKind::kSaveSession, {{"consent", consent}});
    const auto path = s.flush(std::filesystem::path(config_.data_dir) / "logs");
    json out = {{"session_id", s.id()}, {"consent", consent}, {"stored", path.has_value()}};
    if (path) out["path"] = path->string();
    return reply(200, std::move(out));
  }

  if (action == "events" && method == "POST") {
    const auto kind = parse_event_kind(body.value("kind", ""));
    if (!kind || is_mutating(*kind) || *kind == EventKind::kUploadTable ||
        *kind == EventKind::kSaveSession) {
      return fail(422, "InvalidRequest", "only cross_filter events may be posted");
    }
    const auto& e = s.record(*kind, body.value("payload", json::object()));
    return reply(200, {{"session_id", s.id()}, {"seq", e.seq}});
  }

  return fail(404, "NotFound", "unknown session action");
}

ApiResponse Service::admin_train(const json& body) {
  const auto kind = parse_model_kind(body.value("kind", ""));
  if (!kind) return fail(400, "InvalidRequest", "kind must be single or mv");
  std::atomic<bool>& flag = *kind == ModelKind::kSingleChart ? training_single_ : training_mv_;
  bool expected = false;
  if (!flag.compare_exchange_strong(expected, true)) {
    return fail(409, "TrainingInProgress", "a training run is already active for this kind");
  }
  struct Release {
    std::atomic<bool>& f;
    ~Release() { f = false; }
  } release{flag};
  try {
    const std::filesystem::path pairs = body.value("pairs_path", "");
    if (pairs.empty() || !std::filesystem::exists(pairs)) {
      return fail(400, "InvalidRequest", "pairs file not found");
    }
    const TrainingHyper hyper = hyper_from_json(body.value("config", json::object()), TrainingHyper{});
    ModelBundle bundle;
    if (*kind == ModelKind::kSingleChart) {
      const auto records = read_chart_pairs_jsonl(read_file(pairs));
      const auto store = feature_store_from_json(json::parse(read_file(features_sidecar_path(pairs))));
      bundle = train_single(single_chart_dataset(records, store), hyper);
    } else {
      bundle = train_mv(mv_dataset(read_mv_pairs_jsonl(read_file(pairs))), hyper);
    }
    std::uint64_t n;
    {
      std::lock_guard lock(models_mutex_);
      n = ++bundle_counter_;
    }
    const std::string id = std::string(model_kind_name(*kind)) + "-" + std::to_string(n);
    const auto path = std::filesystem::path(config_.data_dir) / "models" / (id + ".json");
    save_bundle_file(bundle, path.string());
    const std::size_t pair_count = bundle.meta.pair_count;
    const double loss = bundle.meta.final_loss;
    publish(*kind, std::move(bundle), id);
    return reply(200, {{"bundle_id", id}, {"path", path.string()}, {"pairs", pair_count}, {"final_loss", loss}});
  } catch (const Error& e) {
    return fail(400, error_name(e.code()), e.what());
  } catch (const json::exception& e) {
    return fail(400, "Corrupt", e.what());
  }
}

namespace {
std::mutex g_server_mutex;
httplib::Server* g_server = nullptr;
}  // namespace

bool run_server(Service& service) {
  httplib::Server server;
  server.set_payload_max_length(service.config().max_upload_bytes + (1u << 20));
  auto handler = [&service](const httplib::Request& req, httplib::Response& res) {
    ApiRequest r;
    r.method = req.method;
    r.path = req.path;
    for (const auto& [k, v] : req.headers) r.headers[k] = v;
    if (req.is_multipart_form_data()) {
      const auto file = req.has_file("file") ? req.get_file_value("file") : httplib::MultipartFormData{};
      r.body = file.content;
      r.file_name = file.filename;
    } else {
      r.body = req.body;
      if (req.has_param("name")) r.file_name = req.get_param_value("name");
    }
    const ApiResponse out = service.handle(r);
    res.status = out.status;
    res.set_content(out.body.dump(), "application/json");
  };
  const std::string pattern = R"(/api/.*)";
  server.Get(pattern, handler);
  server.Post(pattern, handler);
  server.Patch(pattern, handler);
  server.Delete(pattern, handler);
  {
    std::lock_guard lock(g_server_mutex);
    g_server = &server;
  }
  const bool ok = server.listen(service.config().host, service.config().port);
  {
    std::lock_guard lock(g_server_mutex);
    g_server = nullptr;
  }
  return ok;
}

void stop_server() {
  std::lock_guard lock(g_server_mutex);
  if (g_server != nullptr) g_server->stop();
}

}  // namespace mvforge
