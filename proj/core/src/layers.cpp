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

#include <stdexcept>

#include "qfault/model.hpp"

namespace qfault {

const char* to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::Conv2d: return "conv2d";
    case LayerKind::MaxPool2x2: return "maxpool2x2";
    case LayerKind::AvgPool: return "avgpool";
    case LayerKind::FullyConnected: return "fc";
    case LayerKind::Relu: return "relu";
    case LayerKind::Flatten: return "flatten";
  }
  return "unknown";
}

Layer Layer::conv2d(std::size_t in_ch, std::size_t out_ch, std::size_t kernel, std::size_t stride,
                    std::size_t padding) {
  if (in_ch == 0 || out_ch == 0 || kernel == 0 || stride == 0) {
    throw std::invalid_argument("conv2d: channels, kernel and stride must be positive");
  }
  Layer l;
  l.kind = LayerKind::Conv2d;
  l.in_channels = in_ch;
  l.out_channels = out_ch;
  l.kernel = kernel;
  l.stride = stride;
  l.padding = padding;
  l.weight = Tensor({out_ch, in_ch, kernel, kernel});
  l.bias = Tensor({out_ch});
  return l;
}

Layer Layer::fully_connected(std::size_t in, std::size_t out) {
  if (in == 0 || out == 0) throw std::invalid_argument("fully_connected: features must be positive");
  Layer l;
  l.kind = LayerKind::FullyConnected;
  l.in_features = in;
  l.out_features = out;
  l.weight = Tensor({out, in});
  l.bias = Tensor({out});
  return l;
}

Layer Layer::relu() { return Layer{}; }

Layer Layer::maxpool2x2() {
  Layer l;
  l.kind = LayerKind::MaxPool2x2;
  l.kernel = 2;
  l.stride = 2;
  return l;
}

Layer Layer::avgpool(std::size_t window) {
  if (window == 0) throw std::invalid_argument("avgpool: window must be positive");
  Layer l;
  l.kind = LayerKind::AvgPool;
  l.kernel = window;
  l.stride = window;
  return l;
}

Layer Layer::flatten() {
  Layer l;
  l.kind = LayerKind::Flatten;
  return l;
}

std::size_t Layer::fan_in() const {
  switch (kind) {
    case LayerKind::Conv2d: return in_channels * kernel * kernel;
    case LayerKind::FullyConnected: return in_features;
    default: return 0;
  }
}

Shape Layer::output_shape(const Shape& in) const {
  auto need_chw = [&] {
    if (in.size() != 3) throw ShapeError(std::string(to_string(kind)) + " expects [C,H,W], got " + shape_to_string(in));
  };
  switch (kind) {
    case LayerKind::Conv2d: {
      need_chw();
      if (in[0] != in_channels) {
        throw ShapeError("conv2d expects " + std::to_string(in_channels) + " channels, got " + shape_to_string(in));
      }
      const std::size_t h = in[1] + 2 * padding, w = in[2] + 2 * padding;
      if (h < kernel || w < kernel) throw ShapeError("conv2d kernel larger than padded input " + shape_to_string(in));
      return {out_channels, (h - kernel) / stride + 1, (w - kernel) / stride + 1};
    }
    case LayerKind::MaxPool2x2:
      need_chw();
      if (in[1] < 2 || in[2] < 2) throw ShapeError("maxpool2x2 on spatial extent below 2: " + shape_to_string(in));
      return {in[0], in[1] / 2, in[2] / 2};
    case LayerKind::AvgPool:
      need_chw();
      if (in[1] < kernel || in[2] < kernel) throw ShapeError("avgpool window larger than input " + shape_to_string(in));
      return {in[0], in[1] / kernel, in[2] / kernel};
    case LayerKind::FullyConnected:
      if (in.size() != 1 || in[0] != in_features) {
        throw ShapeError("fc expects [" + std::to_string(in_features) + "], got " + shape_to_string(in));
      }
      return {out_features};
    case LayerKind::Relu: return in;
    case LayerKind::Flatten: return {shape_size(in)};
  }
  throw ShapeError("unknown layer kind");
}

}  // namespace qfault
