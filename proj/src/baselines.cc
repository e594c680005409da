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

#include "mvforge/baselines.h"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <random>

#include "mvforge/error.h"

namespace mvforge {
namespace {

struct FlatPairs {
  Eigen::MatrixXd pos;
  Eigen::MatrixXd neg;
};

FlatPairs flatten_pairs(const PairDataset& data, const std::vector<std::size_t>& idx) {
  std::vector<neural::SequenceRef> pos, neg;
  for (std::size_t i : idx) {
    pos.push_back(data.pairs[i].positive);
    neg.push_back(data.pairs[i].negative);
  }
  return {flatten_sequences(data, pos), flatten_sequences(data, neg)};
}

// Seeded shuffled mini-batches over pair indices.
template <typename Step>
void for_each_batch(std::size_t n, int epochs, int batch_size, std::uint64_t seed, Step step) {
  if (batch_size <= 0) throw Error(ErrorCode::kConfig, "batch_size must be positive");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed ^ 0x5eedULL);
  for (int e = 0; e < epochs; ++e) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(batch_size)) {
      const std::size_t end = std::min(n, start + static_cast<std::size_t>(batch_size));
      step(std::vector<std::size_t>(order.begin() + static_cast<long>(start),
                                    order.begin() + static_cast<long>(end)));
    }
  }
}

}  // namespace

Eigen::MatrixXd flatten_sequences(const PairDataset& data,
                                  std::span<const neural::SequenceRef> refs) {
  const Eigen::Index d = data.input_dim;
  Eigen::VectorXd pad = data.padding.size() == d ? data.padding : Eigen::VectorXd::Zero(d);
  Eigen::MatrixXd out(d * data.max_len, static_cast<Eigen::Index>(refs.size()));
  for (std::size_t j = 0; j < refs.size(); ++j) {
    const auto& ref = refs[j];
    if (ref.steps.empty() || static_cast<int>(ref.steps.size()) > data.max_len) {
      throw Error(ErrorCode::kShape, "sequence length outside 1..max_len");
    }
    const Eigen::MatrixXd& bank = data.banks.at(static_cast<std::size_t>(ref.bank));
    for (int t = 0; t < data.max_len; ++t) {
      out.block(t * d, static_cast<Eigen::Index>(j), d, 1) =
          t < static_cast<int>(ref.steps.size()) ? Eigen::VectorXd(bank.col(ref.steps[static_cast<std::size_t>(t)]))
                                                 : pad;
    }
  }
  return out;
}

MlpRanker::MlpRanker(int input_dim, const std::vector<int>& hidden) {
  if (input_dim <= 0) throw Error(ErrorCode::kConfig, "input width must be positive");
  for (int w : hidden) {
    if (w <= 0) throw Error(ErrorCode::kConfig, "hidden widths must be positive");
  }
  int in = input_dim;
  std::vector<int> widths = hidden;
  widths.push_back(1);
  for (int w : widths) {
    layers_.push_back({Matrix::Zero(w, in), Matrix::Zero(w, 1)});
    in = w;
  }
}

void MlpRanker::initialize(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (auto& l : layers_) {
    const double k = 1.0 / std::sqrt(static_cast<double>(l.w.cols()));
    std::uniform_real_distribution<double> dist(-k, k);
    for (Eigen::Index c = 0; c < l.w.cols(); ++c) {
      for (Eigen::Index r = 0; r < l.w.rows(); ++r) l.w(r, c) = dist(rng);
    }
    for (Eigen::Index r = 0; r < l.b.rows(); ++r) l.b(r, 0) = dist(rng);
  }
}

Eigen::RowVectorXd MlpRanker::forward(const Eigen::MatrixXd& x) const {
  std::vector<Matrix> inputs, pre;
  return neural::internal::dense_forward(layers_, x, &inputs, &pre).row(0);
}

std::vector<std::pair<std::string, MlpRanker::Matrix*>> MlpRanker::parameters() {
  std::vector<std::pair<std::string, Matrix*>> out;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    out.emplace_back("mlp." + std::to_string(i) + ".W", &layers_[i].w);
    out.emplace_back("mlp." + std::to_string(i) + ".b", &layers_[i].b);
  }
  return out;
}

std::vector<std::pair<std::string, const MlpRanker::Matrix*>> MlpRanker::parameters() const {
  std::vector<std::pair<std::string, const Matrix*>> out;
  for (auto& [name, p] : const_cast<MlpRanker*>(this)->parameters()) out.emplace_back(name, p);
  return out;
}

MlpRanker train_nn_baseline(const PairDataset& data, const NnBaselineConfig& config) {
  if (data.empty()) throw Error(ErrorCode::kEmptyDataset, "no training pairs");
  MlpRanker model(data.input_dim * data.max_len, config.hidden);
  model.initialize(config.hyper.seed);
  neural::AdamState<MlpRanker> adam(model);
  MlpRanker grad = model;
  const neural::AdamConfig ac{config.hyper.lr, config.hyper.beta1, config.hyper.beta2,
                              config.hyper.eps};
  for_each_batch(data.size(), config.hyper.epochs, config.hyper.batch_size, config.hyper.seed,
                 [&](const std::vector<std::size_t>& batch) {
    const FlatPairs x = flatten_pairs(data, batch);
    std::vector<MlpRanker::Matrix> in_p, pre_p, in_n, pre_n;
    const auto& layers = model.layers();
    const Eigen::MatrixXd sp = neural::internal::dense_forward(layers, x.pos, &in_p, &pre_p);
    const Eigen::MatrixXd sn = neural::internal::dense_forward(layers, x.neg, &in_n, &pre_n);
    const double n = static_cast<double>(batch.size());
    Eigen::MatrixXd dp = Eigen::MatrixXd::Zero(1, sp.cols());
    for (Eigen::Index j = 0; j < sp.cols(); ++j) {
      if (config.hyper.margin - (sp(0, j) - sn(0, j)) > 0) dp(0, j) = -1.0 / n;
    }
    for (auto& [name, g] : grad.parameters()) g->setZero();
    neural::internal::dense_backward(layers, in_p, pre_p, dp, grad.layers());
    neural::internal::dense_backward(layers, in_n, pre_n, Eigen::MatrixXd(-dp), grad.layers());
    neural::adam_step(model, grad, adam, ac);
  });
  return model;
}

LinearRanker train_ranksvm_baseline(const PairDataset& data, const RankSvmConfig& config) {
  if (data.empty()) throw Error(ErrorCode::kEmptyDataset, "no training pairs");
  if (!(config.c > 0.0)) throw Error(ErrorCode::kConfig, "C must be positive");
  const int dim = data.input_dim * data.max_len;
  LinearRanker model(dim);
  LinearRanker grad(dim);
  neural::AdamState<LinearRanker> adam(model);
  const neural::AdamConfig ac{config.lr, 0.9, 0.999, 1e-8};
  // Objective: ||w||^2 / (2 C N) + mean_i max(0, 1 - w . (x+ - x-)).
  const double reg = 1.0 / (config.c * static_cast<double>(data.size()));
  for_each_batch(data.size(), config.epochs, config.batch_size, config.seed,
                 [&](const std::vector<std::size_t>& batch) {
    const FlatPairs x = flatten_pairs(data, batch);
    const Eigen::MatrixXd diff = x.pos - x.neg;
    const Eigen::RowVectorXd margin = model.forward(diff);
    auto& g = *grad.parameters().front().second;
    g = reg * model.weights();
    const double n = static_cast<double>(batch.size());
    for (Eigen::Index j = 0; j < diff.cols(); ++j) {
      if (1.0 - margin(j) > 0) g -= diff.col(j).transpose() / n;
    }
    neural::adam_step(model, grad, adam, ac);
  });
  return model;
}

SequenceScorer as_scorer(const MlpRanker& model) {
  auto m = std::make_shared<const MlpRanker>(model);
  return [m](const PairDataset& data, std::span<const neural::SequenceRef> refs) {
    const Eigen::RowVectorXd s = m->forward(flatten_sequences(data, refs));
    return std::vector<double>(s.data(), s.data() + s.size());
  };
}

SequenceScorer as_scorer(const LinearRanker& model) {
  auto m = std::make_shared<const LinearRanker>(model);
  return [m](const PairDataset& data, std::span<const neural::SequenceRef> refs) {
    const Eigen::RowVectorXd s = m->forward(flatten_sequences(data, refs));
    return std::vector<double>(s.data(), s.data() + s.size());
  };
}

}  // namespace mvforge
