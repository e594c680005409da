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

#ifndef MVFORGE_NEURAL_H_
#define MVFORGE_NEURAL_H_

// Dense numerical core of the scoring networks: a bidirectional LSTM trunk
// with feed-forward heads, hand-derived reverse-mode gradients, the pairwise
// margin objective and Adam. Everything is templated on the scalar type;
// training and gradient checks run in double, inference may run in float.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mvforge/error.h"

namespace mvforge::neural {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

struct ScorerConfig {
  int input_dim = 96;
  int hidden_dim = 64;
  // Output widths of the score head layers; the input width is 2 * hidden_dim.
  std::vector<int> head_dims{32, 1};
  // Empty for scorers without a chart-type head.
  std::vector<int> type_head_dims{32, 5};
  int max_len = 4;

  bool has_type_head() const { return !type_head_dims.empty(); }
  bool operator==(const ScorerConfig&) const = default;
};

inline void validate(const ScorerConfig& config) {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kConfig, what); };
  if (config.input_dim <= 0) fail("input_dim must be positive");
  if (config.hidden_dim <= 0) fail("hidden_dim must be positive");
  if (config.max_len <= 0) fail("max_len must be positive");
  if (config.head_dims.empty() || config.head_dims.back() != 1) {
    fail("score head must end in a width-1 layer");
  }
  for (int d : config.head_dims) {
    if (d <= 0) fail("head widths must be positive");
  }
  if (config.has_type_head()) {
    if (config.type_head_dims.back() != 5) fail("type head must end in 5 outputs");
    for (int d : config.type_head_dims) {
      if (d <= 0) fail("type head widths must be positive");
    }
  }
}

template <typename Scalar>
Scalar sigmoid(Scalar x) {
  return x >= 0 ? Scalar(1) / (Scalar(1) + std::exp(-x))
                : std::exp(x) / (Scalar(1) + std::exp(x));
}

template <typename Derived>
auto sigmoid_array(const Eigen::MatrixBase<Derived>& z) {
  using Scalar = typename Derived::Scalar;
  return z.unaryExpr([](Scalar v) { return sigmoid(v); });
}

// Column-wise softmax.
template <typename Scalar>
Matrix<Scalar> softmax(const Matrix<Scalar>& logits) {
  Matrix<Scalar> out(logits.rows(), logits.cols());
  for (Eigen::Index j = 0; j < logits.cols(); ++j) {
    const Scalar peak = logits.col(j).maxCoeff();
    out.col(j) = (logits.col(j).array() - peak).exp().matrix();
    out.col(j) /= out.col(j).sum();
  }
  return out;
}

// Hinge that is zero once the positive beats the negative by the margin.
template <typename Scalar>
Scalar margin_rank_loss(Scalar s_pos, Scalar s_neg, Scalar margin) {
  return std::max(Scalar(0), margin - (s_pos - s_neg));
}

template <typename Scalar>
struct LstmWeights {
  Matrix<Scalar> w;  // 4H x D, gate blocks i, f, g, o
  Matrix<Scalar> u;  // 4H x H
  Matrix<Scalar> b;  // 4H x 1
};

template <typename Scalar>
struct DenseLayer {
  Matrix<Scalar> w;  // out x in
  Matrix<Scalar> b;  // out x 1
};

namespace internal {

// Feed-forward stack with ReLU between layers and a linear last layer.
// Records each layer's input and pre-activation for the backward pass.
template <typename Scalar>
Matrix<Scalar> dense_forward(const std::vector<DenseLayer<Scalar>>& layers,
                             const Matrix<Scalar>& input, std::vector<Matrix<Scalar>>* inputs,
                             std::vector<Matrix<Scalar>>* pre) {
  inputs->clear();
  pre->clear();
  Matrix<Scalar> a = input;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    Matrix<Scalar> z = layers[l].w * a;
    z.colwise() += layers[l].b.col(0);
    inputs->push_back(std::move(a));
    pre->push_back(z);
    if (l + 1 < layers.size()) {
      a = z.cwiseMax(Scalar(0));
    } else {
      a = std::move(z);
    }
  }
  return a;
}

// Accumulates layer gradients and returns the gradient w.r.t. the input.
template <typename Scalar>
Matrix<Scalar> dense_backward(const std::vector<DenseLayer<Scalar>>& layers,
                              const std::vector<Matrix<Scalar>>& inputs,
                              const std::vector<Matrix<Scalar>>& pre,
                              const Matrix<Scalar>& d_out,
                              std::vector<DenseLayer<Scalar>>& grads) {
  Matrix<Scalar> dz = d_out;
  for (std::size_t l = layers.size(); l-- > 0;) {
    grads[l].w.noalias() += dz * inputs[l].transpose();
    grads[l].b += dz.rowwise().sum();
    Matrix<Scalar> da = layers[l].w.transpose() * dz;
    if (l == 0) return da;
    dz = (da.array() * (pre[l - 1].array() > Scalar(0)).template cast<Scalar>()).matrix();
  }
  return dz;
}

}  // namespace internal

template <typename Scalar>
class BiLstmScorer {
 public:
  using MatrixType = Matrix<Scalar>;

  struct Output {
    MatrixType scores;      // 1 x B, raw
    MatrixType type_logits; // 5 x B, empty without a type head
    MatrixType type_probs;
  };

  struct DirectionTrace {
    std::vector<MatrixType> i, f, g, o, c, tanh_c, h;
  };

  struct Trace {
    DirectionTrace forward_dir, backward_dir;
    std::vector<MatrixType> score_inputs, score_pre;
    std::vector<MatrixType> type_inputs, type_pre;
  };

  BiLstmScorer() = default;

  // Zero-initialised parameters of the right shapes.
  explicit BiLstmScorer(ScorerConfig config) : config_(std::move(config)) {
    validate(config_);
    const int h = config_.hidden_dim;
    for (LstmWeights<Scalar>* dir : {&forward_, &backward_}) {
      dir->w = MatrixType::Zero(4 * h, config_.input_dim);
      dir->u = MatrixType::Zero(4 * h, h);
      dir->b = MatrixType::Zero(4 * h, 1);
    }
    score_head_ = make_head(config_.head_dims);
    type_head_ = make_head(config_.type_head_dims);
  }

  const ScorerConfig& config() const { return config_; }

  LstmWeights<Scalar>& forward_lstm() { return forward_; }
  LstmWeights<Scalar>& backward_lstm() { return backward_; }
  std::vector<DenseLayer<Scalar>>& score_head() { return score_head_; }
  std::vector<DenseLayer<Scalar>>& type_head() { return type_head_; }

  // Stable, named view of every parameter tensor; the order is the
  // serialization order and the order Adam walks.
  std::vector<std::pair<std::string, MatrixType*>> parameters() {
    std::vector<std::pair<std::string, MatrixType*>> out;
    auto lstm = [&](const std::string& prefix, LstmWeights<Scalar>& l) {
      out.emplace_back(prefix + ".W", &l.w);
      out.emplace_back(prefix + ".U", &l.u);
      out.emplace_back(prefix + ".b", &l.b);
    };
    lstm("lstm_fwd", forward_);
    lstm("lstm_bwd", backward_);
    auto head = [&](const std::string& prefix, std::vector<DenseLayer<Scalar>>& layers) {
      for (std::size_t i = 0; i < layers.size(); ++i) {
        out.emplace_back(prefix + "." + std::to_string(i) + ".W", &layers[i].w);
        out.emplace_back(prefix + "." + std::to_string(i) + ".b", &layers[i].b);
      }
    };
    head("score", score_head_);
    head("type", type_head_);
    return out;
  }

  std::vector<std::pair<std::string, const MatrixType*>> parameters() const {
    auto mutable_params = const_cast<BiLstmScorer*>(this)->parameters();
    std::vector<std::pair<std::string, const MatrixType*>> out;
    out.reserve(mutable_params.size());
    for (auto& [name, ptr] : mutable_params) out.emplace_back(name, ptr);
    return out;
  }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& [name, p] : parameters()) n += static_cast<std::size_t>(p->size());
    return n;
  }

  void set_zero() {
    for (auto& [name, p] : parameters()) p->setZero();
  }

  // uniform(-k, k) with k = 1/sqrt(fan_in); forget-gate bias shifted by +1.
  void initialize(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto fill = [&](MatrixType& m, int fan_in) {
      const double k = 1.0 / std::sqrt(static_cast<double>(fan_in));
      std::uniform_real_distribution<double> dist(-k, k);
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = static_cast<Scalar>(dist(rng));
      }
    };
    const int h = config_.hidden_dim;
    for (LstmWeights<Scalar>* dir : {&forward_, &backward_}) {
      fill(dir->w, config_.input_dim);
      fill(dir->u, h);
      fill(dir->b, h);
      dir->b.block(h, 0, h, 1).array() += Scalar(1);
    }
    for (auto* head : {&score_head_, &type_head_}) {
      for (DenseLayer<Scalar>& layer : *head) {
        fill(layer.w, static_cast<int>(layer.w.cols()));
        fill(layer.b, static_cast<int>(layer.w.cols()));
      }
    }
  }

  template <typename Other>
  BiLstmScorer<Other> cast() const {
    BiLstmScorer<Other> out(config_);
    auto dst = out.parameters();
    auto src = parameters();
    for (std::size_t i = 0; i < src.size(); ++i) {
      *dst[i].second = src[i].second->template cast<Other>();
    }
    return out;
  }

  // steps: one input_dim x B matrix per time step; all sequences in the
  // batch share the same length.
  Output forward(const std::vector<MatrixType>& steps, Trace* trace = nullptr) const {
    check_steps(steps);
    const Eigen::Index batch = steps.front().cols();
    const int h = config_.hidden_dim;
    DirectionTrace local_fwd, local_bwd;
    DirectionTrace& tf = trace ? trace->forward_dir : local_fwd;
    DirectionTrace& tb = trace ? trace->backward_dir : local_bwd;
    run_direction(forward_, steps, /*reverse=*/false, tf);
    run_direction(backward_, steps, /*reverse=*/true, tb);
    MatrixType trunk(2 * h, batch);
    trunk.topRows(h) = tf.h.back();
    trunk.bottomRows(h) = tb.h.back();

    Output out;
    std::vector<MatrixType> local_in, local_pre;
    out.scores = internal::dense_forward(score_head_, trunk, trace ? &trace->score_inputs : &local_in,
                          trace ? &trace->score_pre : &local_pre);
    if (config_.has_type_head()) {
      std::vector<MatrixType> tin, tpre;
      out.type_logits = internal::dense_forward(type_head_, trunk, trace ? &trace->type_inputs : &tin,
                                 trace ? &trace->type_pre : &tpre);
      out.type_probs = softmax(out.type_logits);
    }
    return out;
  }

  // Accumulates parameter gradients into grad (same configuration).
  void backward(const std::vector<MatrixType>& steps, const Trace& trace,
                const MatrixType& d_scores, const MatrixType* d_type_logits,
                BiLstmScorer& grad) const {
    if (!(grad.config_ == config_)) {
      throw Error(ErrorCode::kShape, "gradient buffer has a different configuration");
    }
    const int h = config_.hidden_dim;
    MatrixType d_trunk = internal::dense_backward(score_head_, trace.score_inputs, trace.score_pre,
                                       d_scores, grad.score_head_);
    if (config_.has_type_head() && d_type_logits != nullptr) {
      d_trunk += internal::dense_backward(type_head_, trace.type_inputs, trace.type_pre,
                               *d_type_logits, grad.type_head_);
    }
    direction_backward(forward_, steps, false, trace.forward_dir, d_trunk.topRows(h),
                       grad.forward_);
    direction_backward(backward_, steps, true, trace.backward_dir, d_trunk.bottomRows(h),
                       grad.backward_);
  }

  struct SingleScore {
    Scalar score = 0;
    Vector<Scalar> type_probs;  // empty without a type head
  };

  // sequence: input_dim x L, one column per step.
  SingleScore score(const MatrixType& sequence) const {
    std::vector<MatrixType> steps;
    steps.reserve(static_cast<std::size_t>(sequence.cols()));
    for (Eigen::Index t = 0; t < sequence.cols(); ++t) steps.emplace_back(sequence.col(t));
    Output out = forward(steps);
    SingleScore s;
    s.score = out.scores(0, 0);
    if (config_.has_type_head()) s.type_probs = out.type_probs.col(0);
    return s;
  }

 private:
  std::vector<DenseLayer<Scalar>> make_head(const std::vector<int>& dims) const {
    std::vector<DenseLayer<Scalar>> layers;
    int in = 2 * config_.hidden_dim;
    for (int out : dims) {
      layers.push_back({MatrixType::Zero(out, in), MatrixType::Zero(out, 1)});
      in = out;
    }
    return layers;
  }

  void check_steps(const std::vector<MatrixType>& steps) const {
    if (steps.empty() || static_cast<int>(steps.size()) > config_.max_len) {
      throw Error(ErrorCode::kShape, "sequence length " + std::to_string(steps.size()) +
                                         " outside [1, " + std::to_string(config_.max_len) +
                                         "]");
    }
    const Eigen::Index batch = steps.front().cols();
    for (const MatrixType& x : steps) {
      if (x.rows() != config_.input_dim || x.cols() != batch || batch == 0) {
        throw Error(ErrorCode::kShape,
                    "step is " + std::to_string(x.rows()) + "x" + std::to_string(x.cols()) +
                        ", expected " + std::to_string(config_.input_dim) + " rows");
      }
    }
  }

  void run_direction(const LstmWeights<Scalar>& lw, const std::vector<MatrixType>& steps,
                     bool reverse, DirectionTrace& tr) const {
    const int h = config_.hidden_dim;
    const std::size_t len = steps.size();
    const Eigen::Index batch = steps.front().cols();
    for (auto* v : {&tr.i, &tr.f, &tr.g, &tr.o, &tr.c, &tr.tanh_c, &tr.h}) {
      v->clear();
      v->reserve(len);
    }
    MatrixType h_prev = MatrixType::Zero(h, batch);
    MatrixType c_prev = MatrixType::Zero(h, batch);
    for (std::size_t k = 0; k < len; ++k) {
      const MatrixType& x = steps[reverse ? len - 1 - k : k];
      MatrixType z = lw.w * x + lw.u * h_prev;
      z.colwise() += lw.b.col(0);
      tr.i.push_back(sigmoid_array(z.topRows(h)));
      tr.f.push_back(sigmoid_array(z.middleRows(h, h)));
      tr.g.push_back(z.middleRows(2 * h, h).array().tanh().matrix());
      tr.o.push_back(sigmoid_array(z.bottomRows(h)));
      tr.c.push_back((tr.f.back().array() * c_prev.array() +
                      tr.i.back().array() * tr.g.back().array())
                         .matrix());
      tr.tanh_c.push_back(tr.c.back().array().tanh().matrix());
      tr.h.push_back((tr.o.back().array() * tr.tanh_c.back().array()).matrix());
      h_prev = tr.h.back();
      c_prev = tr.c.back();
    }
  }

  template <typename Derived>
  void direction_backward(const LstmWeights<Scalar>& lw, const std::vector<MatrixType>& steps,
                          bool reverse, const DirectionTrace& tr,
                          const Eigen::MatrixBase<Derived>& d_h_final,
                          LstmWeights<Scalar>& g) const {
    const int h = config_.hidden_dim;
    const std::size_t len = steps.size();
    const Eigen::Index batch = steps.front().cols();
    MatrixType dh = d_h_final;
    MatrixType dc = MatrixType::Zero(h, batch);
    MatrixType dz(4 * h, batch);
    for (std::size_t kk = len; kk-- > 0;) {
      const MatrixType& x = steps[reverse ? len - 1 - kk : kk];
      const auto& i = tr.i[kk].array();
      const auto& f = tr.f[kk].array();
      const auto& gg = tr.g[kk].array();
      const auto& o = tr.o[kk].array();
      const auto& tc = tr.tanh_c[kk].array();
      dc.array() += dh.array() * o * (Scalar(1) - tc * tc);
      dz.bottomRows(h) = (dh.array() * tc * o * (Scalar(1) - o)).matrix();
      dz.topRows(h) = (dc.array() * gg * i * (Scalar(1) - i)).matrix();
      dz.middleRows(2 * h, h) = (dc.array() * i * (Scalar(1) - gg * gg)).matrix();
      if (kk > 0) {
        dz.middleRows(h, h) = (dc.array() * tr.c[kk - 1].array() * f * (Scalar(1) - f)).matrix();
      } else {
        dz.middleRows(h, h).setZero();
      }
      g.w.noalias() += dz * x.transpose();
      g.b += dz.rowwise().sum();
      if (kk > 0) g.u.noalias() += dz * tr.h[kk - 1].transpose();
      dh.noalias() = lw.u.transpose() * dz;
      dc.array() *= f;
    }
  }

  ScorerConfig config_;
  LstmWeights<Scalar> forward_, backward_;
  std::vector<DenseLayer<Scalar>> score_head_, type_head_;
};

// A sequence is a list of columns drawn from one bank matrix
// (input_dim x N). Single-chart training uses one bank per table holding its
// column embeddings; multi-chart training uses one bank per MV.
struct SequenceRef {
  int bank = 0;
  std::vector<int> steps;
};

struct TrainingPair {
  SequenceRef positive;
  SequenceRef negative;
  int type_label = -1;  // chart-type label of the positive, -1 if none
};

struct LossBreakdown {
  double total = 0.0;
  double hinge = 0.0;
  double cross_entropy = 0.0;
  std::size_t pairs = 0;
};

namespace internal {

// Groups sequence slots by length so each group runs as one dense batch.
template <typename Scalar>
struct LengthGroup {
  std::vector<std::size_t> slots;
  std::vector<Matrix<Scalar>> steps;
};

template <typename Scalar>
std::map<std::size_t, LengthGroup<Scalar>> group_by_length(
    const std::vector<Matrix<Scalar>>& banks, const std::vector<const SequenceRef*>& refs) {
  std::map<std::size_t, LengthGroup<Scalar>> groups;
  for (std::size_t s = 0; s < refs.size(); ++s) {
    groups[refs[s]->steps.size()].slots.push_back(s);
  }
  for (auto& [len, group] : groups) {
    if (len == 0) throw Error(ErrorCode::kShape, "empty sequence");
    const Eigen::Index rows = banks.at(static_cast<std::size_t>(refs[group.slots[0]]->bank)).rows();
    const Eigen::Index batch = static_cast<Eigen::Index>(group.slots.size());
    group.steps.assign(len, Matrix<Scalar>(rows, batch));
    for (Eigen::Index j = 0; j < batch; ++j) {
      const SequenceRef& ref = *refs[group.slots[static_cast<std::size_t>(j)]];
      const Matrix<Scalar>& bank = banks.at(static_cast<std::size_t>(ref.bank));
      for (std::size_t t = 0; t < len; ++t) {
        group.steps[t].col(j) = bank.col(ref.steps[t]);
      }
    }
  }
  return groups;
}

}  // namespace internal

// Raw scores for many sequences, batched by length.
template <typename Scalar>
std::vector<Scalar> score_sequences(const BiLstmScorer<Scalar>& model,
                                    const std::vector<Matrix<Scalar>>& banks,
                                    std::span<const SequenceRef> refs) {
  std::vector<const SequenceRef*> ptrs;
  ptrs.reserve(refs.size());
  for (const SequenceRef& r : refs) ptrs.push_back(&r);
  std::vector<Scalar> scores(refs.size());
  for (auto& [len, group] : internal::group_by_length(banks, ptrs)) {
    auto out = model.forward(group.steps);
    for (std::size_t j = 0; j < group.slots.size(); ++j) {
      scores[group.slots[j]] = out.scores(0, static_cast<Eigen::Index>(j));
    }
  }
  return scores;
}

// Loss L = sum_pairs [margin_rank_loss(s+, s-, m) + lambda * CE(p_type(+), label)]
// over the batch; when grad is non-null its parameters receive dL/dtheta
// (accumulated, both sides of each pair share the one parameter set).
template <typename Scalar>
LossBreakdown pair_batch_gradient(const BiLstmScorer<Scalar>& model,
                                  const std::vector<Matrix<Scalar>>& banks,
                                  std::span<const TrainingPair> batch, Scalar margin,
                                  Scalar lambda, BiLstmScorer<Scalar>* grad) {
  using MatrixType = Matrix<Scalar>;
  const bool typed = model.config().has_type_head();
  std::vector<const SequenceRef*> refs;
  refs.reserve(2 * batch.size());
  for (const TrainingPair& p : batch) {
    refs.push_back(&p.positive);
    refs.push_back(&p.negative);
  }
  auto groups = internal::group_by_length(banks, refs);

  struct GroupState {
    typename BiLstmScorer<Scalar>::Trace trace;
    typename BiLstmScorer<Scalar>::Output out;
  };
  std::map<std::size_t, GroupState> states;
  std::vector<Scalar> score(refs.size());
  std::vector<std::pair<std::size_t, Eigen::Index>> where(refs.size());
  for (auto& [len, group] : groups) {
    GroupState& st = states[len];
    st.out = model.forward(group.steps, grad ? &st.trace : nullptr);
    for (std::size_t j = 0; j < group.slots.size(); ++j) {
      score[group.slots[j]] = st.out.scores(0, static_cast<Eigen::Index>(j));
      where[group.slots[j]] = {len, static_cast<Eigen::Index>(j)};
    }
  }

  LossBreakdown loss;
  loss.pairs = batch.size();
  std::vector<Scalar> d_score(refs.size(), Scalar(0));
  std::map<std::size_t, MatrixType> d_logits;
  if (typed) {
    for (auto& [len, st] : states) d_logits[len] = MatrixType::Zero(5, st.out.scores.cols());
  }
  for (std::size_t p = 0; p < batch.size(); ++p) {
    const Scalar sp = score[2 * p], sn = score[2 * p + 1];
    const Scalar hinge = margin_rank_loss(sp, sn, margin);
    loss.hinge += static_cast<double>(hinge);
    if (hinge > Scalar(0)) {
      d_score[2 * p] -= Scalar(1);
      d_score[2 * p + 1] += Scalar(1);
    }
    const int label = batch[p].type_label;
    if (typed && label >= 0) {
      if (label >= 5) throw Error(ErrorCode::kShape, "type label outside 0..4");
      const auto [len, col] = where[2 * p];
      const auto probs = states[len].out.type_probs.col(col);
      loss.cross_entropy -= std::log(std::max(static_cast<double>(probs(label)), 1e-300));
      MatrixType& dl = d_logits[len];
      dl.col(col) += lambda * probs;
      dl(label, col) -= lambda;
    }
  }
  loss.total = loss.hinge + static_cast<double>(lambda) * loss.cross_entropy;

  if (grad) {
    for (auto& [len, group] : groups) {
      GroupState& st = states[len];
      MatrixType ds(1, static_cast<Eigen::Index>(group.slots.size()));
      for (std::size_t j = 0; j < group.slots.size(); ++j) {
        ds(0, static_cast<Eigen::Index>(j)) = d_score[group.slots[j]];
      }
      model.backward(group.steps, st.trace, ds, typed ? &d_logits[len] : nullptr, *grad);
    }
  }
  return loss;
}

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// First and second moment buffers shaped like the parameters they track.
template <typename Params>
struct AdamState {
  Params m;
  Params v;
  long step = 0;

  AdamState() = default;
  explicit AdamState(const Params& like) : m(like), v(like) {
    for (auto& [name, p] : m.parameters()) p->setZero();
    for (auto& [name, p] : v.parameters()) p->setZero();
  }
};

// Params is any type exposing parameters() as a list of (name, Matrix*).
template <typename Params>
void adam_step(Params& params, const Params& grads, AdamState<Params>& state,
               const AdamConfig& config) {
  auto p = params.parameters();
  auto g = grads.parameters();
  auto m = state.m.parameters();
  auto v = state.v.parameters();
  if (p.size() != g.size() || p.size() != m.size() || p.size() != v.size()) {
    throw Error(ErrorCode::kShape, "optimizer state does not match parameters");
  }
  ++state.step;
  const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < p.size(); ++i) {
    auto& pm = *p[i].second;
    const auto& gm = *g[i].second;
    if (pm.rows() != gm.rows() || pm.cols() != gm.cols() || m[i].second->size() != pm.size()) {
      throw Error(ErrorCode::kShape, "shape mismatch for " + p[i].first);
    }
    using S = typename std::remove_reference_t<decltype(pm)>::Scalar;
    auto& mm = *m[i].second;
    auto& vm = *v[i].second;
    mm = S(config.beta1) * mm + S(1 - config.beta1) * gm;
    vm = S(config.beta2) * vm + S(1 - config.beta2) * gm.cwiseProduct(gm);
    pm.array() -= S(config.lr) * (mm.array() / S(c1)) /
                  ((vm.array() / S(c2)).sqrt() + S(config.eps));
  }
}

struct SiameseOptions {
  int epochs = 10;
  int batch_size = 128;
  double margin = 1.0;
  double lambda = 0.5;
  AdamConfig adam;
  std::uint64_t seed = 0;
};

struct EpochReport {
  int epoch = 0;
  double mean_loss = 0.0;
};

// Mini-batch Siamese training; bit-deterministic for a fixed seed because
// shuffling is seeded and every reduction runs in a fixed order.
template <typename Scalar, typename Callback = std::nullptr_t>
std::vector<EpochReport> train_siamese(BiLstmScorer<Scalar>& model,
                                       const std::vector<Matrix<Scalar>>& banks,
                                       const std::vector<TrainingPair>& pairs,
                                       const SiameseOptions& options,
                                       Callback on_epoch = nullptr) {
  if (pairs.empty()) throw Error(ErrorCode::kEmptyDataset, "no training pairs");
  if (options.batch_size <= 0) throw Error(ErrorCode::kConfig, "batch_size must be positive");
  std::vector<EpochReport> reports;
  AdamState<BiLstmScorer<Scalar>> adam(model);
  BiLstmScorer<Scalar> grad(model.config());
  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(options.seed ^ 0x5eedULL);
  std::vector<TrainingPair> batch;
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double total = 0.0;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(options.batch_size)) {
      const std::size_t end =
          std::min(order.size(), start + static_cast<std::size_t>(options.batch_size));
      batch.clear();
      for (std::size_t k = start; k < end; ++k) batch.push_back(pairs[order[k]]);
      grad.set_zero();
      LossBreakdown loss = pair_batch_gradient<Scalar>(
          model, banks, batch, Scalar(options.margin), Scalar(options.lambda), &grad);
      total += loss.total;
      // Mean over the batch keeps the step size independent of batch size.
      for (auto& [name, g] : grad.parameters()) *g /= Scalar(static_cast<double>(batch.size()));
      adam_step(model, grad, adam, options.adam);
    }
    reports.push_back({epoch + 1, total / static_cast<double>(pairs.size())});
    if constexpr (!std::is_same_v<Callback, std::nullptr_t>) on_epoch(reports.back());
  }
  return reports;
}

}  // namespace mvforge::neural

#endif  // MVFORGE_NEURAL_H_
