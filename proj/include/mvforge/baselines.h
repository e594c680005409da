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

#ifndef MVFORGE_BASELINES_H_
#define MVFORGE_BASELINES_H_

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mvforge/neural.h"
#include "mvforge/ranker.h"

namespace mvforge {

// Sequences padded to the dataset's max_len and stacked into one column
// each: (input_dim * max_len) x refs.size().
Eigen::MatrixXd flatten_sequences(const PairDataset& data,
                                  std::span<const neural::SequenceRef> refs);

// Fully connected scorer over flattened inputs.
class MlpRanker {
 public:
  using Matrix = neural::Matrix<double>;

  MlpRanker() = default;
  // Widths of the hidden layers; the output layer has one unit.
  MlpRanker(int input_dim, const std::vector<int>& hidden);

  void initialize(std::uint64_t seed);
  Eigen::RowVectorXd forward(const Eigen::MatrixXd& x) const;

  std::vector<std::pair<std::string, Matrix*>> parameters();
  std::vector<std::pair<std::string, const Matrix*>> parameters() const;
  std::vector<neural::DenseLayer<double>>& layers() { return layers_; }
  const std::vector<neural::DenseLayer<double>>& layers() const { return layers_; }

 private:
  std::vector<neural::DenseLayer<double>> layers_;
};

struct NnBaselineConfig {
  std::vector<int> hidden{128, 32};
  TrainingHyper hyper;
};

MlpRanker train_nn_baseline(const PairDataset& data, const NnBaselineConfig& config = {});

// f(x) = w . x
class LinearRanker {
 public:
  using Matrix = neural::Matrix<double>;

  LinearRanker() = default;
  explicit LinearRanker(int input_dim) : w_(Matrix::Zero(1, input_dim)) {}

  Eigen::RowVectorXd forward(const Eigen::MatrixXd& x) const { return w_ * x; }
  const Matrix& weights() const { return w_; }

  std::vector<std::pair<std::string, Matrix*>> parameters() { return {{"w", &w_}}; }
  std::vector<std::pair<std::string, const Matrix*>> parameters() const { return {{"w", &w_}}; }

 private:
  Matrix w_;
};

struct RankSvmConfig {
  double c = 10.0;  // inverse regularization strength
  int epochs = 30;
  int batch_size = 128;
  double lr = 1e-2;
  std::uint64_t seed = 0;
};

// Hinge loss on difference vectors plus an L2 penalty, minimized with Adam.
LinearRanker train_ranksvm_baseline(const PairDataset& data, const RankSvmConfig& config = {});

SequenceScorer as_scorer(const MlpRanker& model);
SequenceScorer as_scorer(const LinearRanker& model);

}  // namespace mvforge

#endif  // MVFORGE_BASELINES_H_
