/*
 *  Copyright 2026 The qfault Authors
 *
 *  Licensed under the Apache License, Version 2.0 (the "License");
 *  you may not use this file except in compliance with the License.
 *  You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 *  Unless required by applicable law or agreed to in writing, software
 *  distributed under the License is distributed on an "AS IS" BASIS,
 *  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 *  See the License for the specific language governing permissions and
 *  limitations under the License.
 */

#include "qfault/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qfault/parallel.hpp"
#include "qfault/rng.hpp"

namespace qfault {
namespace {

struct StepOutput {
  LossReport report;
  std::size_t correct = 0;
};

std::size_t count_correct(const Tensor& logits, std::span<const std::uint8_t> labels) {
  const auto pred = argmax_rows(logits);
  std::size_t c = 0;
  for (std::size_t s = 0; s < pred.size(); ++s) c += pred[s] == labels[s] ? 1 : 0;
  return c;
}

struct PassResult {
  double task_loss = 0.0;
  double l1 = 0.0;
  std::size_t correct = 0;
  Gradients grads;
};

PassResult forward_backward(const Model& model, const Tensor& batch, std::span<const std::uint8_t> labels,
                            const TrainConfig& config, const std::vector<Tensor>* offsets) {
  auto tape = forward(model, batch, {Mode::Train, config.quantized, Record::Full, offsets});
  const auto loss = softmax_cross_entropy(tape.logits, labels);
  PassResult out;
  out.task_loss = loss.loss;
  out.correct = count_correct(tape.logits, labels);
  if (config.has_l1()) {
    const auto alphas = config.expanded_alphas(model);
    const auto penalty = l1_activation_penalty(model, tape, alphas);
    out.l1 = penalty.value;
    out.grads = backward(model, tape, loss.grad, &penalty.output_grads);
  } else {
    out.grads = backward(model, tape, loss.grad);
  }
  return out;
}

StepOutput conventional_step_impl(Model& model, Sgd& optimizer, const Tensor& batch,
                                  std::span<const std::uint8_t> labels, const TrainConfig& config) {
  auto pass = forward_backward(model, batch, labels, config, nullptr);
  optimizer.step(model, pass.grads);
  StepOutput out;
  out.report.task_loss = pass.task_loss;
  out.report.l1_penalty = pass.l1;
  out.report.total = pass.task_loss + pass.l1;
  out.correct = pass.correct;
  return out;
}

StepOutput saq_step_impl(Model& model, Sgd& optimizer, const Tensor& batch, std::span<const std::uint8_t> labels,
                         const TrainConfig& config) {
  const auto first = forward_backward(model, batch, labels, config, nullptr);
  const auto epsilon = saq_epsilon(first.grads, config.rho);
  auto second = forward_backward(model, batch, labels, config, &epsilon);
  optimizer.step(model, second.grads);
  StepOutput out;
  out.report.task_loss = first.task_loss;
  out.report.l1_penalty = first.l1;
  out.report.sharpness_estimate = second.task_loss - first.task_loss;
  out.report.total = first.task_loss + first.l1;
  out.report.gradient_norm = first.grads.weight_quantized_norm();
  double sq = 0.0;
  for (const auto& e : epsilon) {
    for (float v : e.data()) sq += static_cast<double>(v) * v;
  }
  out.report.epsilon_norm = std::sqrt(sq);
  out.correct = first.correct;
  return out;
}

using StepFn = StepOutput (*)(Model&, Sgd&, const Tensor&, std::span<const std::uint8_t>, const TrainConfig&);

double lr_for_epoch(const TrainConfig& config, std::size_t epoch) {
  double lr = config.lr;
  for (double f : config.lr_decay_at) {
    if (static_cast<double>(epoch) >= f * static_cast<double>(config.epochs)) lr *= config.lr_gamma;
  }
  return lr;
}

TrainResult run_training(Model model, const Dataset& train_set, const Dataset* val, const TrainConfig& config,
                         StepFn step, const EpochCallback& on_epoch) {
  config.validate(model);
  if (train_set.empty()) throw std::invalid_argument("training on an empty dataset");
  Sgd optimizer(config.lr, config.momentum, config.weight_decay);
  TrainResult result;
  std::vector<std::size_t> order(train_set.size());

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    optimizer.set_lr(lr_for_epoch(config, epoch));
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(split_seed(config.seed, epoch));
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);

    double task = 0.0, l1 = 0.0, sharp = 0.0;
    std::size_t correct = 0;
    std::vector<std::uint8_t> labels;
    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
      const std::size_t end = std::min(begin + config.batch_size, order.size());
      const std::span<const std::size_t> idx(order.data() + begin, end - begin);
      labels.resize(idx.size());
      for (std::size_t k = 0; k < idx.size(); ++k) labels[k] = train_set.labels[idx[k]];
      StepOutput out;
      try {
        out = step(model, optimizer, train_set.gather(idx), labels, config);
      } catch (const NonFiniteError& e) {
        throw TrainingDiverged("training diverged in epoch " + std::to_string(epoch) + " at sample " +
                               std::to_string(begin) + ": " + e.what());
      }
      if (!std::isfinite(out.report.total)) {
        throw TrainingDiverged("non-finite loss in epoch " + std::to_string(epoch) + " at sample " +
                               std::to_string(begin));
      }
      const auto w = static_cast<double>(idx.size());
      task += out.report.task_loss * w;
      l1 += out.report.l1_penalty * w;
      sharp += out.report.sharpness_estimate * w;
      correct += out.correct;
    }

    const auto n = static_cast<double>(train_set.size());
    EpochRecord rec;
    rec.epoch = epoch + 1;
    rec.task_loss = task / n;
    rec.l1_penalty = l1 / n;
    rec.sharpness_estimate = sharp / n;
    rec.train_acc = static_cast<double>(correct) / n;
    if (config.evaluate_each_epoch && val != nullptr && !val->empty()) {
      Model snapshot = model;
      if (config.quantized) freeze_quantization(snapshot, train_set, config.calib_samples);
      rec.val_acc = accuracy(snapshot, *val, config.quantized);
      rec.overall_sparsity = measure_sparsity(snapshot, *val, config.quantized).overall;
    }
    result.history.epochs.push_back(rec);
    if (on_epoch) on_epoch(rec);
  }
  result.model = std::move(model);
  return result;
}

}  // namespace

const char* to_string(Regime regime) {
  switch (regime) {
    case Regime::Conventional: return "conventional";
    case Regime::Sparse: return "sparse";
    case Regime::Saq: return "saq";
    case Regime::SaqSparse: return "saq_sparse";
  }
  return "unknown";
}

Regime parse_regime(const std::string& text) {
  if (text == "conventional") return Regime::Conventional;
  if (text == "sparse") return Regime::Sparse;
  if (text == "saq") return Regime::Saq;
  if (text == "saq_sparse") return Regime::SaqSparse;
  throw std::invalid_argument("unknown regime '" + text + "' (expected conventional, sparse, saq or saq_sparse)");
}

bool TrainConfig::has_l1() const {
  return std::any_of(l1_alphas.begin(), l1_alphas.end(), [](double a) { return a > 0.0; });
}

std::vector<double> TrainConfig::expanded_alphas(const Model& model) const {
  const std::size_t layers = model.activation_layers().size();
  if (l1_alphas.size() == 1) return std::vector<double>(layers, l1_alphas[0]);
  if (l1_alphas.size() != layers) {
    throw std::invalid_argument("l1_alphas: expected 1 or " + std::to_string(layers) + " values, got " +
                                std::to_string(l1_alphas.size()));
  }
  return l1_alphas;
}

void TrainConfig::validate(const Model& model) const {
  if (!(lr > 0.0)) throw std::invalid_argument("train: lr must be positive");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw std::invalid_argument("train: momentum must lie in [0, 1)");
  if (batch_size == 0) throw std::invalid_argument("train: batch_size must be positive");
  if (!(rho >= 0.0) || !std::isfinite(rho)) throw std::invalid_argument("train: rho must be non-negative");
  if (!(weight_decay >= 0.0)) throw std::invalid_argument("train: weight_decay must be non-negative");
  if (bits < 2 || bits > 16) throw std::invalid_argument("train: bits must lie in [2, 16]");
  if (bits != model.bits) throw std::invalid_argument("train: config bits differ from the model's bit width");
  if (l1_alphas.empty()) throw std::invalid_argument("train: l1_alphas must not be empty");
  for (double a : l1_alphas) {
    if (!(a >= 0.0) || !std::isfinite(a)) throw std::invalid_argument("train: l1 alphas must be non-negative");
  }
  expanded_alphas(model);
  for (double f : lr_decay_at) {
    if (!(f > 0.0 && f < 1.0)) throw std::invalid_argument("train: lr_decay_at fractions must lie in (0, 1)");
  }
  switch (regime) {
    case Regime::Conventional:
      if (rho != 0.0 || has_l1()) throw std::invalid_argument("conventional regime requires rho = 0 and alpha = 0");
      break;
    case Regime::Sparse:
      if (rho != 0.0) throw std::invalid_argument("sparse regime requires rho = 0");
      break;
    case Regime::Saq:
      if (!(rho > 0.0)) throw std::invalid_argument("saq regime requires rho > 0");
      if (has_l1()) throw std::invalid_argument("saq regime takes alpha = 0 (use saq_sparse)");
      break;
    case Regime::SaqSparse:
      if (!(rho > 0.0)) throw std::invalid_argument("saq_sparse regime requires rho > 0");
      break;
  }
}

std::size_t saq_default_epochs(std::size_t conventional_epochs) { return std::max<std::size_t>(1, conventional_epochs / 2); }

L1Penalty l1_activation_penalty(const Model& model, const ForwardTape& tape, std::span<const double> alphas) {
  const auto act = model.activation_layers();
  if (alphas.size() != act.size()) {
    throw std::invalid_argument("l1_activation_penalty: " + std::to_string(alphas.size()) + " alphas for " +
                                std::to_string(act.size()) + " activation layers");
  }
  if (tape.record == Record::Logits || tape.layers.size() != model.layers.size()) {
    throw std::invalid_argument("l1_activation_penalty: tape lacks activation records");
  }
  L1Penalty out;
  out.output_grads.resize(model.layers.size());
  const double inv_n = 1.0 / static_cast<double>(tape.batch_size);
  for (std::size_t j = 0; j < act.size(); ++j) {
    const Tensor& x = tape.layers[act[j]].output;
    if (alphas[j] == 0.0) continue;
    double sum = 0.0;
    for (float v : x.data()) sum += std::fabs(static_cast<double>(v));
    out.value += alphas[j] * sum * inv_n;
    Tensor g(x.shape());
    const auto step = static_cast<float>(alphas[j] * inv_n);
    for (std::size_t k = 0; k < x.size(); ++k) g[k] = x[k] > 0.0f ? step : (x[k] < 0.0f ? -step : 0.0f);
    out.output_grads[act[j]] = std::move(g);
  }
  return out;
}

std::vector<Tensor> saq_epsilon(const Gradients& grads, double rho) {
  std::vector<Tensor> eps(grads.weight_quantized.size());
  const double norm = grads.weight_quantized_norm();
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const Tensor& g = grads.weight_quantized[i];
    if (g.empty()) continue;
    eps[i] = Tensor(g.shape());
    if (norm == 0.0 || rho == 0.0) continue;
    const double scale = rho / norm;
    for (std::size_t k = 0; k < g.size(); ++k) eps[i][k] = static_cast<float>(scale * g[k]);
  }
  return eps;
}

LossReport conventional_step(Model& model, Sgd& optimizer, const Tensor& batch, std::span<const std::uint8_t> labels,
                             const TrainConfig& config) {
  return conventional_step_impl(model, optimizer, batch, labels, config).report;
}

LossReport saq_step(Model& model, Sgd& optimizer, const Tensor& batch, std::span<const std::uint8_t> labels,
                    const TrainConfig& config) {
  if (!(config.rho > 0.0)) throw std::invalid_argument("saq_step: rho must be positive");
  return saq_step_impl(model, optimizer, batch, labels, config).report;
}

TrainResult train_conventional(Model model, const Dataset& train_set, const Dataset* val, const TrainConfig& config,
                               const EpochCallback& on_epoch) {
  if (config.rho != 0.0 || config.has_l1()) {
    throw std::invalid_argument("train_conventional: requires rho = 0 and alpha = 0");
  }
  return run_training(std::move(model), train_set, val, config, &conventional_step_impl, on_epoch);
}

TrainResult train_sparse(Model model, const Dataset& train_set, const Dataset* val, const TrainConfig& config,
                         const EpochCallback& on_epoch) {
  if (config.rho != 0.0) throw std::invalid_argument("train_sparse: requires rho = 0");
  return run_training(std::move(model), train_set, val, config, &conventional_step_impl, on_epoch);
}

TrainResult train_saq(Model model, const Dataset& train_set, const Dataset* val, const TrainConfig& config,
                      const EpochCallback& on_epoch) {
  if (!(config.rho > 0.0)) throw std::invalid_argument("train_saq: requires rho > 0");
  return run_training(std::move(model), train_set, val, config, &saq_step_impl, on_epoch);
}

TrainResult train(Model model, const Dataset& train_set, const Dataset* val, const TrainConfig& config,
                  const EpochCallback& on_epoch) {
  config.validate(model);
  switch (config.regime) {
    case Regime::Conventional: return train_conventional(std::move(model), train_set, val, config, on_epoch);
    case Regime::Sparse: return train_sparse(std::move(model), train_set, val, config, on_epoch);
    case Regime::Saq:
    case Regime::SaqSparse: return train_saq(std::move(model), train_set, val, config, on_epoch);
  }
  throw std::invalid_argument("train: unknown regime");
}

SparsityReport measure_sparsity(const Model& model, const Dataset& data, bool quantized, std::size_t batch_size) {
  if (data.empty()) throw std::invalid_argument("measure_sparsity: empty dataset");
  const auto act = model.activation_layers();
  batch_size = std::max<std::size_t>(batch_size, 1);
  const std::size_t chunks = (data.size() + batch_size - 1) / batch_size;
  std::vector<std::vector<std::size_t>> zeros(chunks, std::vector<std::size_t>(act.size(), 0));
  std::vector<std::vector<std::size_t>> totals(chunks, std::vector<std::size_t>(act.size(), 0));
  parallel_for(chunks, [&](std::size_t c) {
    const std::size_t begin = c * batch_size;
    const std::size_t end = std::min(begin + batch_size, data.size());
    const auto tape = forward(model, data.batch(begin, end), {Mode::Eval, quantized, Record::Metrics, nullptr});
    for (std::size_t j = 0; j < act.size(); ++j) {
      const Tensor& x = tape.layers[act[j]].output;
      zeros[c][j] = static_cast<std::size_t>(std::count(x.data().begin(), x.data().end(), 0.0f));
      totals[c][j] = x.size();
    }
  });
  SparsityReport report;
  report.per_layer.assign(act.size(), 0.0);
  for (std::size_t j = 0; j < act.size(); ++j) {
    std::size_t z = 0, t = 0;
    for (std::size_t c = 0; c < chunks; ++c) {
      z += zeros[c][j];
      t += totals[c][j];
    }
    report.per_layer[j] = t == 0 ? 0.0 : static_cast<double>(z) / static_cast<double>(t);
  }
  if (!act.empty()) {
    report.overall = std::accumulate(report.per_layer.begin(), report.per_layer.end(), 0.0) /
                     static_cast<double>(act.size());
  }
  return report;
}

}  // namespace qfault
