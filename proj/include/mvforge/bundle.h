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

#ifndef MVFORGE_BUNDLE_H_
#define MVFORGE_BUNDLE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "mvforge/featurize.h"
#include "mvforge/neural.h"

namespace mvforge {

enum class ModelKind { kSingleChart, kMv };

std::string_view model_kind_name(ModelKind kind);
std::optional<ModelKind> parse_model_kind(std::string_view name);

// Feature layout each kind of model consumes: the column embedding layout
// for single-chart models, the chart-in-context embedding for MV models.
inline constexpr int kChartEmbeddingDim = 9;
inline constexpr int kChartEmbeddingLayoutVersion = 1;
inline constexpr int kMaxMvCharts = 12;

int expected_layout_version(ModelKind kind);
neural::ScorerConfig default_scorer_config(ModelKind kind);

struct TrainingHyper {
  double margin = 1.0;
  double lambda = 0.5;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  int batch_size = 128;
  int epochs = 10;
  std::uint64_t seed = 0;

  neural::SiameseOptions siamese_options() const;
};

struct TrainingMeta {
  int epochs_run = 0;
  std::size_t pair_count = 0;
  std::uint64_t seed = 0;
  double final_loss = 0.0;
};

struct ModelBundle {
  ModelKind kind = ModelKind::kSingleChart;
  int layout_version = kLayoutVersion;
  TrainingHyper hyper;
  TrainingMeta meta;
  neural::BiLstmScorer<double> model;
};

// Zero-parameter bundle of the given kind.
ModelBundle make_bundle(ModelKind kind, neural::ScorerConfig config = {},
                        bool use_default_config = true);

// Canonical JSON envelope: sorted keys, shortest round-trip doubles.
std::string save_bundle(const ModelBundle& bundle);

// Throws Error{kCorrupt} on unparsable or inconsistent input, Error{kVersion}
// for an unknown envelope version and Error{kLayout} when the stored layout
// does not match what this build featurizes for that kind.
ModelBundle load_bundle(std::string_view bytes);

ModelBundle load_bundle_file(const std::string& path);
void save_bundle_file(const ModelBundle& bundle, const std::string& path);

}  // namespace mvforge

#endif  // MVFORGE_BUNDLE_H_
