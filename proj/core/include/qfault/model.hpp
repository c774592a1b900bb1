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
#include <string>
#include <vector>

#include "qfault/quant.hpp"
#include "qfault/tensor.hpp"

namespace qfault {

enum class LayerKind : std::uint8_t {
  Conv2d = 0,
  MaxPool2x2 = 1,
  AvgPool = 2,
  FullyConnected = 3,
  Relu = 4,
  Flatten = 5,
};

const char* to_string(LayerKind kind);

/// One stage of a feed-forward network. Only conv2d and fully-connected
/// layers carry parameters; conv weights are [out, in, k, k], fc weights
/// are [out, in].
struct Layer {
  LayerKind kind = LayerKind::Relu;
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;
  std::size_t kernel = 0;  // conv kernel or avgpool window
  std::size_t stride = 1;
  std::size_t padding = 0;
  std::size_t in_features = 0;
  std::size_t out_features = 0;
  Tensor weight;
  Tensor bias;

  static Layer conv2d(std::size_t in_ch, std::size_t out_ch, std::size_t kernel, std::size_t stride = 1,
                      std::size_t padding = 0);
  static Layer fully_connected(std::size_t in, std::size_t out);
  static Layer relu();
  static Layer maxpool2x2();
  static Layer avgpool(std::size_t window);
  static Layer flatten();

  bool has_params() const { return kind == LayerKind::Conv2d || kind == LayerKind::FullyConnected; }
  std::size_t fan_in() const;
  std::size_t parameter_count() const { return weight.size() + bias.size(); }

  /// Output shape for a single-sample input shape ([C,H,W] or [F]).
  Shape output_shape(const Shape& input) const;

  friend bool operator==(const Layer&, const Layer&) = default;
};

/// Per-layer quantization state: weight params on parameterized layers,
/// activation params on ReLU layers. Unset until calibrated.
struct LayerQuant {
  std::optional<QuantParams> weight;
  std::optional<QuantParams> activation;
  friend bool operator==(const LayerQuant&, const LayerQuant&) = default;
};

class Model {
 public:
  std::string name;
  Shape input_shape;  // per sample, [C, H, W]
  std::size_t num_classes = 0;
  int bits = 4;             // weight precision: the faulted memory image
  int activation_bits = 8;  // post-ReLU activation precision
  std::vector<Layer> layers;
  std::vector<LayerQuant> quant;  // one per layer
  /// Set once weight and activation QuantParams are fixed for deployment.
  bool frozen = false;

  std::size_t parameter_count() const;
  std::vector<std::size_t> param_layers() const;
  /// Indices of ReLU layers, i.e. the activation-producing layers.
  std::vector<std::size_t> activation_layers() const;
  /// Per-sample shape entering each layer, plus the final output at the end.
  std::vector<Shape> layer_shapes() const;

  /// Shape-composition and parameter-shape checks. Throws ShapeError.
  void validate() const;

  bool has_frozen_quant() const;

  friend bool operator==(const Model&, const Model&) = default;
};

/// Canonical LeNet-5 for 28x28x1 input: conv 6@5x5 (pad 2) -> relu -> pool ->
/// conv 16@5x5 -> relu -> pool -> fc 120 -> relu -> fc 84 -> relu -> fc classes.
Model build_lenet5(std::size_t num_classes, std::uint64_t seed, int bits = 4, int activation_bits = 8);

struct SmallCnnConfig {
  Shape input_shape{3, 32, 32};
  std::size_t num_classes = 10;
  std::vector<std::size_t> channels{8, 16};  // one conv block per entry
  std::size_t kernel = 3;
  bool global_avgpool = true;
  int bits = 4;
  int activation_bits = 8;
};

/// conv(k, pad k/2) -> relu -> maxpool per block, then optional global average
/// pooling, flatten and a linear head. At most 8 blocks.
Model build_small_cnn(const SmallCnnConfig& config, std::uint64_t seed);

/// Kaiming-uniform (fan-in, ReLU gain) weights and zero biases.
void init_kaiming_uniform(Model& model, std::uint64_t seed);

}  // namespace qfault
