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

#include "mvforge/bundle.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "mvforge/error.h"
#include "mvforge/featurize.h"

namespace mvforge {
namespace {

using nlohmann::json;

constexpr std::string_view kFormat = "mvforge-model";
constexpr int kFormatVersion = 1;

[[noreturn]] void corrupt(const std::string& what) { throw Error(ErrorCode::kCorrupt, what); }

}  // namespace

std::string_view model_kind_name(ModelKind kind) {
  return kind == ModelKind::kSingleChart ? "single_chart" : "mv";
}

std::optional<ModelKind> parse_model_kind(std::string_view name) {
  if (name == "single_chart" || name == "single") return ModelKind::kSingleChart;
  if (name == "mv") return ModelKind::kMv;
  return std::nullopt;
}

int expected_layout_version(ModelKind kind) {
  return kind == ModelKind::kSingleChart ? kLayoutVersion : kChartEmbeddingLayoutVersion;
}

neural::ScorerConfig default_scorer_config(ModelKind kind) {
  neural::ScorerConfig c;
  if (kind == ModelKind::kSingleChart) {
    c.input_dim = kEmbeddingDim;
    c.max_len = kMaxChartColumns;
  } else {
    c.input_dim = kChartEmbeddingDim;
    c.max_len = kMaxMvCharts;
    c.type_head_dims.clear();
  }
  return c;
}

neural::SiameseOptions TrainingHyper::siamese_options() const {
  neural::SiameseOptions o;
  o.epochs = epochs;
  o.batch_size = batch_size;
  o.margin = margin;
  o.lambda = lambda;
  o.adam = {lr, beta1, beta2, eps};
  o.seed = seed;
  return o;
}

ModelBundle make_bundle(ModelKind kind, neural::ScorerConfig config, bool use_default_config) {
  ModelBundle b;
  b.kind = kind;
  b.layout_version = expected_layout_version(kind);
  b.model = neural::BiLstmScorer<double>(use_default_config ? default_scorer_config(kind)
                                                            : std::move(config));
  return b;
}

std::string save_bundle(const ModelBundle& bundle) {
  const auto& cfg = bundle.model.config();
  json params = json::object();
  for (const auto& [name, m] : bundle.model.parameters()) {
    std::vector<double> flat(static_cast<std::size_t>(m->size()));
    // Row-major flattening.
    for (Eigen::Index r = 0; r < m->rows(); ++r) {
      for (Eigen::Index c = 0; c < m->cols(); ++c) {
        flat[static_cast<std::size_t>(r * m->cols() + c)] = (*m)(r, c);
      }
    }
    params[name] = json::array({json::array({m->rows(), m->cols()}), flat});
  }
  const TrainingHyper& h = bundle.hyper;
  json doc = {
      {"format", kFormat},
      {"version", kFormatVersion},
      {"kind", model_kind_name(bundle.kind)},
      {"layout_version", bundle.layout_version},
      {"hyper",
       {{"input_dim", cfg.input_dim},
        {"hidden_dim", cfg.hidden_dim},
        {"head_dims", cfg.head_dims},
        {"type_head_dims", cfg.type_head_dims},
        {"max_len", cfg.max_len},
        {"margin", h.margin},
        {"lambda", h.lambda},
        {"lr", h.lr},
        {"beta1", h.beta1},
        {"beta2", h.beta2},
        {"eps", h.eps},
        {"batch_size", h.batch_size},
        {"epochs", h.epochs},
        {"seed", h.seed}}},
      {"training",
       {{"epochs_run", bundle.meta.epochs_run},
        {"pair_count", bundle.meta.pair_count},
        {"seed", bundle.meta.seed},
        {"final_loss", bundle.meta.final_loss}}},
      {"params", std::move(params)},
  };
  return doc.dump();
}

ModelBundle load_bundle(std::string_view bytes) {
  json doc;
  try {
    doc = json::parse(bytes);
  } catch (const json::parse_error& e) {
    corrupt(std::string("model file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || doc.value("format", "") != kFormat) {
    corrupt("not an mvforge-model document");
  }
  try {
    const int version = doc.at("version").get<int>();
    if (version != kFormatVersion) {
      throw Error(ErrorCode::kVersion, "unsupported model format version " + std::to_string(version));
    }
    auto kind = parse_model_kind(doc.at("kind").get<std::string>());
    if (!kind) corrupt("unknown model kind");
    const int layout = doc.at("layout_version").get<int>();
    if (layout != expected_layout_version(*kind)) {
      throw Error(ErrorCode::kLayout,
                  "model layout_version " + std::to_string(layout) + " but this build uses " +
                      std::to_string(expected_layout_version(*kind)));
    }
    const json& hj = doc.at("hyper");
    neural::ScorerConfig cfg;
    cfg.input_dim = hj.at("input_dim").get<int>();
    cfg.hidden_dim = hj.at("hidden_dim").get<int>();
    cfg.head_dims = hj.at("head_dims").get<std::vector<int>>();
    cfg.type_head_dims = hj.at("type_head_dims").get<std::vector<int>>();
    cfg.max_len = hj.at("max_len").get<int>();
    ModelBundle b;
    b.kind = *kind;
    b.layout_version = layout;
    try {
      b.model = neural::BiLstmScorer<double>(cfg);
    } catch (const Error& e) {
      corrupt(std::string("inconsistent hyper-parameters: ") + e.what());
    }
    b.hyper.margin = hj.at("margin").get<double>();
    b.hyper.lambda = hj.at("lambda").get<double>();
    b.hyper.lr = hj.at("lr").get<double>();
    b.hyper.beta1 = hj.at("beta1").get<double>();
    b.hyper.beta2 = hj.at("beta2").get<double>();
    b.hyper.eps = hj.at("eps").get<double>();
    b.hyper.batch_size = hj.at("batch_size").get<int>();
    b.hyper.epochs = hj.at("epochs").get<int>();
    b.hyper.seed = hj.at("seed").get<std::uint64_t>();
    const json& tj = doc.at("training");
    b.meta.epochs_run = tj.at("epochs_run").get<int>();
    b.meta.pair_count = tj.at("pair_count").get<std::size_t>();
    b.meta.seed = tj.at("seed").get<std::uint64_t>();
    b.meta.final_loss = tj.at("final_loss").get<double>();

    const json& pj = doc.at("params");
    auto params = b.model.parameters();
    if (pj.size() != params.size()) corrupt("parameter count does not match the architecture");
    for (auto& [name, m] : params) {
      if (!pj.contains(name)) corrupt("missing parameter " + name);
      const json& entry = pj.at(name);
      const auto dims = entry.at(0).get<std::vector<Eigen::Index>>();
      const auto& values = entry.at(1);
      if (dims.size() != 2 || dims[0] != m->rows() || dims[1] != m->cols()) {
        corrupt("shape mismatch for " + name);
      }
      if (static_cast<Eigen::Index>(values.size()) != m->size()) {
        corrupt("value count mismatch for " + name);
      }
      for (Eigen::Index r = 0; r < m->rows(); ++r) {
        for (Eigen::Index c = 0; c < m->cols(); ++c) {
          const json& v = values.at(static_cast<std::size_t>(r * m->cols() + c));
          if (!v.is_number()) corrupt("non-numeric value in " + name);
          (*m)(r, c) = v.get<double>();
        }
      }
    }
    return b;
  } catch (const json::exception& e) {
    corrupt(std::string("malformed model document: ") + e.what());
  }
}

ModelBundle load_bundle_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kCorrupt, "cannot open model file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return load_bundle(ss.str());
}

void save_bundle_file(const ModelBundle& bundle, const std::string& path) {
  const std::filesystem::path parent = std::filesystem::path(path).parent_path();
  std::error_code ec;
  if (!parent.empty()) std::filesystem::create_directories(parent, ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kConfig, "cannot write model file " + path);
  out << save_bundle(bundle);
}

}  // namespace mvforge
