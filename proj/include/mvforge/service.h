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

#ifndef MVFORGE_SERVICE_H_
#define MVFORGE_SERVICE_H_

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "json.hpp"
#include "mvforge/bundle.h"
#include "mvforge/provenance.h"
#include "mvforge/recommend.h"

namespace mvforge {

inline constexpr int kApiVersion = 1;
inline constexpr std::string_view kVersion = "0.1.0";

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string single_model;
  std::string mv_model;
  std::string data_dir = "mvforge-data";
  std::size_t max_upload_bytes = 20u << 20;
  std::size_t pool_cap = 256;
  bool deterministic = false;
  std::uint64_t seed = 0;
  std::string api_token;  // when set, required as "Authorization: Bearer <token>"
};

// JSON config file (optional) overridden by MVFORGE_* environment variables:
// HOST, PORT, SINGLE_MODEL, MV_MODEL, DATA_DIR, MAX_UPLOAD_BYTES, POOL_CAP,
// DETERMINISTIC, SEED, API_TOKEN.
ServiceConfig load_service_config(const std::optional<std::filesystem::path>& path,
                                  const std::map<std::string, std::string>& env);
std::map<std::string, std::string> process_environment();

struct ApiRequest {
  std::string method;
  std::string path;
  std::string body;
  std::string file_name;  // upload name, if any
  std::map<std::string, std::string> headers;
};

struct ApiResponse {
  int status = 200;
  nlohmann::json body;
};

class Service {
 public:
  Service(ServiceConfig config, ModelBundle single, ModelBundle mv);
  // Loads the configured bundles; throws Config when a path is missing.
  static std::unique_ptr<Service> from_config(const ServiceConfig& config);

  ApiResponse handle(const ApiRequest& request);

  const ServiceConfig& config() const { return config_; }
  // Provenance events appended across all sessions.
  std::size_t event_count() const;
  bool training(ModelKind kind) const;
  // Writes every consenting session's log; returns how many were written.
  std::size_t flush_all();
  void publish(ModelKind kind, ModelBundle bundle, std::string id);

 private:
  struct Models {
    std::shared_ptr<const ModelBundle> single;
    std::shared_ptr<const ModelBundle> mv;
    std::string single_id;
    std::string mv_id;
  };
  struct SessionSlot {
    std::mutex mutex;
    std::unique_ptr<Session> session;
    // Candidate pools keyed by (dedup, single-chart model id).
    std::map<std::pair<bool, std::string>, std::shared_ptr<const CandidatePool>> pools;
  };

  std::shared_ptr<const Models> models() const;
  const CandidatePool& pool_for(SessionSlot& slot, const Models& models, bool dedup);
  SessionSlot* find_session(const std::string& id);
  std::string next_session_id();

  ApiResponse upload(const ApiRequest& request);
  ApiResponse session_call(const std::string& id, const std::string& method,
                           const std::string& action, const std::string& arg,
                           const nlohmann::json& body);
  ApiResponse admin_train(const nlohmann::json& body);

  ServiceConfig config_;
  mutable std::mutex models_mutex_;
  std::shared_ptr<const Models> models_;
  mutable std::mutex sessions_mutex_;
  std::map<std::string, std::unique_ptr<SessionSlot>> sessions_;
  std::uint64_t session_counter_ = 0;
  std::uint64_t bundle_counter_ = 0;
  std::atomic<bool> training_single_{false};
  std::atomic<bool> training_mv_{false};
};

// Binds the service to HTTP and blocks until stop_server() is called.
// Returns false if the port could not be bound.
bool run_server(Service& service);
void stop_server();

}  // namespace mvforge

#endif  // MVFORGE_SERVICE_H_
