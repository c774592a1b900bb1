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
#include <optional>
#include <span>
#include <vector>

#include "qfault/dataset.hpp"
#include "qfault/model.hpp"
#include "qfault/tensor.hpp"

namespace qfault {

/// Train: weight and activation QuantParams are calibrated from the current
/// weights and batch. Eval: the model's frozen QuantParams are used.
enum class Mode { Train, Eval };

/// How much of the forward pass the tape keeps.
enum class Record {
  Logits,   // final logits only
  Metrics,  // plus conv/fc inputs and ReLU outputs (sparsity, MAC profiling)
  Full,     // everything backward needs
};

struct ForwardOptions {
  Mode mode = Mode::Eval;
  bool quantized = false;
  Record record = Record::Logits;
  /// Optional per-layer tensors added to the effective (fake-quantized)
  /// weights; empty entries are skipped.
  const std::vector<Tensor>* weight_offsets = nullptr;
};

struct LayerRecord {
  Tensor input;
  Tensor output;
  /// ReLU: d(out)/d(in) multiplier (ReLU gate times activation STE mask).
  /// Parameterized layers: weight STE mask.
  Tensor mask;
  Tensor weight;  // effective weight used by the forward pass
  std::vector<std::uint32_t> argmax;
  std::optional<QuantParams> weight_params;
  std::optional<QuantParams> activation_params;
};

struct ForwardTape {
  Mode mode = Mode::Eval;
  bool quantized = false;
  Record record = Record::Logits;
  std::size_t batch_size = 0;
  std::vector<LayerRecord> layers;
  Tensor logits;
  bool consumed = false;
};

/// Parameter gradients indexed by layer (empty tensors on parameter-free layers).
struct Gradients {
  std::vector<Tensor> weight;  // latent weights, straight-through mask applied
  std::vector<Tensor> bias;
  std::vector<Tensor> weight_quantized;  // w.r.t. the effective quantized weights

  static Gradients zeros_like(const Model& model);
  double weight_quantized_norm() const;
  bool all_zero() const;
};

/// Counts forward/backward invocations process-wide.
struct PassCounts {
  std::uint64_t forward = 0;
  std::uint64_t backward = 0;
};
PassCounts pass_counts();
void reset_pass_counts();

/// Runs the network on a [N, C, H, W] batch. Throws ShapeError on input
/// mismatch, NonFiniteError when any layer output is NaN/Inf, and
/// std::logic_error when quantized eval is requested without frozen params.
ForwardTape forward(const Model& model, const Tensor& batch, const ForwardOptions& options);

/// Backpropagates `logits_grad` (and optional extra gradients added to the
/// output of individual layers, indexed by layer). Consumes the tape.
Gradients backward(const Model& model, ForwardTape& tape, const Tensor& logits_grad,
                   const std::vector<Tensor>* output_grads = nullptr);

struct LossResult {
  double loss = 0.0;  // mean over the batch
  Tensor grad;        // d loss / d logits
};

LossResult softmax_cross_entropy(const Tensor& logits, std::span<const std::uint8_t> labels);

std::vector<std::size_t> argmax_rows(const Tensor& logits);

/// Top-1 accuracy in [0, 1]. Quantized evaluation requires frozen params.
double accuracy(const Model& model, const Dataset& data, bool quantized, std::size_t batch_size = 500);

/// Mean cross-entropy over the dataset in eval mode.
double evaluate_loss(const Model& model, const Dataset& data, bool quantized, std::size_t batch_size = 500);

/// Fixes weight QuantParams from the current weights and activation params from
/// one quantized train-mode pass over the first `samples` of `calibration`.
void freeze_quantization(Model& model, const Dataset& calibration, std::size_t samples = 512);

}  // namespace qfault
