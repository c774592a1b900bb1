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

#include <cmath>
#include <stdexcept>

#include "qfault/model.hpp"
#include "qfault/rng.hpp"

namespace qfault {

std::size_t Model::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.parameter_count();
  return n;
}

std::vector<std::size_t> Model::param_layers() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (layers[i].has_params()) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> Model::activation_layers() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (layers[i].kind == LayerKind::Relu) out.push_back(i);
  }
  return out;
}

std::vector<Shape> Model::layer_shapes() const {
  std::vector<Shape> shapes{input_shape};
  shapes.reserve(layers.size() + 1);
  for (const auto& l : layers) shapes.push_back(l.output_shape(shapes.back()));
  return shapes;
}

void Model::validate() const {
  if (layers.empty()) throw ShapeError("model '" + name + "' has no layers");
  if (bits < 2 || bits > 16 || activation_bits < 2 || activation_bits > 16) {
    throw std::invalid_argument("model '" + name + "': bit widths must lie in [2, 16]");
  }
  if (quant.size() != layers.size()) throw ShapeError("model '" + name + "': quant table size mismatch");
  for (const auto& l : layers) {
    if (l.kind == LayerKind::Conv2d) {
      if (l.weight.shape() != Shape{l.out_channels, l.in_channels, l.kernel, l.kernel} ||
          l.bias.shape() != Shape{l.out_channels}) {
        throw ShapeError("conv2d parameter shapes inconsistent with declared channels");
      }
    } else if (l.kind == LayerKind::FullyConnected) {
      if (l.weight.shape() != Shape{l.out_features, l.in_features} || l.bias.shape() != Shape{l.out_features}) {
        throw ShapeError("fc parameter shapes inconsistent with declared features");
      }
    } else if (!l.weight.empty() || !l.bias.empty()) {
      throw ShapeError(std::string(to_string(l.kind)) + " layer must not carry parameters");
    }
  }
  const auto shapes = layer_shapes();
  if (shapes.back() != Shape{num_classes} || layers.back().kind != LayerKind::FullyConnected) {
    throw ShapeError("model '" + name + "' must end in an fc head with " + std::to_string(num_classes) + " logits");
  }
}

bool Model::has_frozen_quant() const {
  if (!frozen) return false;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (layers[i].has_params() && !quant[i].weight) return false;
    if (layers[i].kind == LayerKind::Relu && !quant[i].activation) return false;
  }
  return true;
}

void init_kaiming_uniform(Model& model, std::uint64_t seed) {
  std::uint64_t stream = 0;
  for (auto& l : model.layers) {
    if (!l.has_params()) continue;
    Rng rng(split_seed(seed, stream++));
    const double bound = std::sqrt(6.0 / static_cast<double>(l.fan_in()));
    for (float& w : l.weight.data()) w = static_cast<float>(rng.uniform(-bound, bound));
    l.bias.fill(0.0f);
  }
}

Model build_lenet5(std::size_t num_classes, std::uint64_t seed, int bits, int activation_bits) {
  if (num_classes < 2) throw std::invalid_argument("build_lenet5: need at least 2 classes");
  Model m;
  m.name = "lenet5";
  m.input_shape = {1, 28, 28};
  m.num_classes = num_classes;
  m.bits = bits;
  m.activation_bits = activation_bits;
  m.layers = {
      Layer::conv2d(1, 6, 5, 1, 2), Layer::relu(), Layer::maxpool2x2(),
      Layer::conv2d(6, 16, 5),      Layer::relu(), Layer::maxpool2x2(),
      Layer::flatten(),
      Layer::fully_connected(16 * 5 * 5, 120), Layer::relu(),
      Layer::fully_connected(120, 84),         Layer::relu(),
      Layer::fully_connected(84, num_classes),
  };
  m.quant.resize(m.layers.size());
  init_kaiming_uniform(m, seed);
  m.validate();
  return m;
}

Model build_small_cnn(const SmallCnnConfig& config, std::uint64_t seed) {
  if (config.channels.empty()) throw std::invalid_argument("build_small_cnn: depth must be at least 1 block");
  if (config.channels.size() > 8) throw std::invalid_argument("build_small_cnn: depth must be at most 8 blocks");
  if (config.num_classes < 2) throw std::invalid_argument("build_small_cnn: need at least 2 classes");
  if (config.input_shape.size() != 3 || shape_size(config.input_shape) == 0) {
    throw std::invalid_argument("build_small_cnn: input shape must be [C,H,W] with positive extents");
  }
  if (config.kernel == 0 || config.kernel % 2 == 0) {
    throw std::invalid_argument("build_small_cnn: kernel must be odd");
  }
  for (std::size_t c : config.channels) {
    if (c == 0) throw std::invalid_argument("build_small_cnn: channel widths must be positive");
  }

  Model m;
  m.name = "small_cnn";
  m.input_shape = config.input_shape;
  m.num_classes = config.num_classes;
  m.bits = config.bits;
  m.activation_bits = config.activation_bits;
  std::size_t ch = config.input_shape[0], h = config.input_shape[1], w = config.input_shape[2];
  for (std::size_t width : config.channels) {
    m.layers.push_back(Layer::conv2d(ch, width, config.kernel, 1, config.kernel / 2));
    m.layers.push_back(Layer::relu());
    ch = width;
    if (h >= 2 && w >= 2) {
      m.layers.push_back(Layer::maxpool2x2());
      h /= 2;
      w /= 2;
    }
  }
  if (config.global_avgpool && h == w && h > 1) {
    m.layers.push_back(Layer::avgpool(h));
    h = w = 1;
  }
  m.layers.push_back(Layer::flatten());
  m.layers.push_back(Layer::fully_connected(ch * h * w, config.num_classes));
  m.quant.resize(m.layers.size());
  init_kaiming_uniform(m, seed);
  m.validate();
  return m;
}

}  // namespace qfault
