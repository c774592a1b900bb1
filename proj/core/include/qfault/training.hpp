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

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qfault/dataset.hpp"
#include "qfault/model.hpp"
#include "qfault/network.hpp"
#include "qfault/optimizer.hpp"

namespace qfault {

enum class Regime {
  Conventional,  // quantization-aware training
  Sparse,        // plus L1 activation penalty
  Saq,           // sharpness-aware quantization
  SaqSparse,     // SAQ with the L1 penalty in both passes
};

const char* to_string(Regime regime);
Regime parse_regime(const std::string& text);

struct TrainConfig {
  Regime regime = Regime::Conventional;
  double lr = 0.01;
  double momentum = 0.9;
  std::size_t epochs = 10;
  std::size_t batch_size = 64;
  /// One value per ReLU layer, or a single value broadcast to all of them.
  std::vector<double> l1_alphas{0.0};
  double rho = 0.0;
  double weight_decay = 5e-4;
  std::uint64_t seed = 1;
  int bits = 4;
  bool quantized = true;
  /// Step decay: lr is multiplied by lr_gamma at each listed fraction of the run.
  std::vector<double> lr_decay_at{};
  double lr_gamma = 0.1;
  std::size_t calib_samples = 512;
  /// Evaluate val accuracy and sparsity at the end of each epoch.
  bool evaluate_each_epoch = true;

  /// Checks ranges and the regime's preconditions against `model`.
  void validate(const Model& model) const;
  /// The alpha applied to each ReLU layer of `model`.
  std::vector<double> expanded_alphas(const Model& model) const;
  bool has_l1() const;
};

/// SAQ runs get half the epochs of the paired conventional run (at least one).
std::size_t saq_default_epochs(std::size_t conventional_epochs);

struct LossReport {
  double task_loss = 0.0;
  double l1_penalty = 0.0;
  double sharpness_estimate = 0.0;
  double total = 0.0;
  /// SAQ only: ||dL/dQ(w)||_2 of the first pass and ||eps||_2 of the perturbation.
  double gradient_norm = 0.0;
  double epsilon_norm = 0.0;
};

struct SparsityReport {
  std::vector<double> per_layer;  // zero fraction per ReLU layer
  double overall = 0.0;           // unweighted mean over layers
};

struct EpochRecord {
  std::size_t epoch = 0;
  double task_loss = 0.0;
  double l1_penalty = 0.0;
  double sharpness_estimate = 0.0;
  double train_acc = 0.0;
  double val_acc = 0.0;
  double overall_sparsity = 0.0;

  friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  friend bool operator==(const TrainHistory&, const TrainHistory&) = default;
};

struct TrainResult {
  Model model;
  TrainHistory history;
};

class TrainingDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct L1Penalty {
  double value = 0.0;
  /// Gradient added to each layer's output, indexed by layer (empty when unused).
  std::vector<Tensor> output_grads;
};

/// (1/N) * sum_n sum_l alpha_l * ||x_{l,n}||_1 over the ReLU outputs recorded in
/// `tape`, with gradient alpha_l * sign(x) / N (sign(0) = 0).
L1Penalty l1_activation_penalty(const Model& model, const ForwardTape& tape, std::span<const double> alphas);

/// rho * g / ||g||_2 over all weight gradients w.r.t. the quantized weights,
/// indexed by layer. A zero gradient yields a zero perturbation.
std::vector<Tensor> saq_epsilon(const Gradients& grads, double rho);

/// One quantization-aware SGD step (with the L1 penalty when configured).
LossReport conventional_step(Model& model, Sgd& optimizer, const Tensor& batch, std::span<const std::uint8_t> labels,
                             const TrainConfig& config);

/// Two forward/backward passes: the first at Q(w) yields the perturbation,
/// the second at Q(w) + eps yields the gradient applied to the latent weights.
LossReport saq_step(Model& model, Sgd& optimizer, const Tensor& batch, std::span<const std::uint8_t> labels,
                    const TrainConfig& config);

using EpochCallback = std::function<void(const EpochRecord&)>;

TrainResult train_conventional(Model model, const Dataset& train, const Dataset* val, const TrainConfig& config,
                               const EpochCallback& on_epoch = {});
TrainResult train_sparse(Model model, const Dataset& train, const Dataset* val, const TrainConfig& config,
                         const EpochCallback& on_epoch = {});
TrainResult train_saq(Model model, const Dataset& train, const Dataset* val, const TrainConfig& config,
                      const EpochCallback& on_epoch = {});
/// Dispatches on config.regime.
TrainResult train(Model model, const Dataset& train, const Dataset* val, const TrainConfig& config,
                  const EpochCallback& on_epoch = {});

/// Zero fraction of every ReLU output over the dataset (quantized eval by default).
SparsityReport measure_sparsity(const Model& model, const Dataset& data, bool quantized = true,
                                std::size_t batch_size = 250);

}  // namespace qfault
