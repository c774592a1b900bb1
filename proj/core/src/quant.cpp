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

#include "qfault/quant.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qfault {

void QuantParams::validate() const {
  if (bits < 2 || bits > 16) throw std::invalid_argument("quant bits must be in [2, 16], got " + std::to_string(bits));
  if (!(scale > 0.0f) || !std::isfinite(scale)) throw std::invalid_argument("quant scale must be positive and finite");
  if (zero_point < 0 || static_cast<std::uint32_t>(zero_point) > max_code()) {
    throw std::invalid_argument("zero point " + std::to_string(zero_point) + " outside code range");
  }
}

QuantParams calibrate(std::span<const float> values, int bits) {
  if (values.empty()) throw std::invalid_argument("calibrate: empty tensor");
  QuantParams p;
  p.bits = bits;
  const auto levels = static_cast<double>((std::uint32_t{1} << bits) - 1u);
  double lo = 0.0, hi = 0.0;
  for (float v : values) {
    if (!std::isfinite(v)) throw NonFiniteError("calibrate: non-finite input");
    lo = std::min(lo, static_cast<double>(v));
    hi = std::max(hi, static_cast<double>(v));
  }
  if (hi == lo) {
    // Only reachable when every value is zero, since the range always contains 0.
    p.scale = 1.0f;
    p.zero_point = static_cast<std::int32_t>((std::uint32_t{1} << bits) / 2);
    p.validate();
    return p;
  }
  p.scale = static_cast<float>((hi - lo) / levels);
  // -lo / s written without the rounded scale so that e.g. [-1, 1] at 4 bits
  // gives exactly 7.5 and rounds to 8.
  const double z = std::round(-lo * levels / (hi - lo));
  p.zero_point = static_cast<std::int32_t>(std::clamp(z, 0.0, levels));
  if (!(p.scale > 0.0f)) p.scale = 1.0f;  // subnormal range collapsed in float
  p.validate();
  return p;
}

QuantParams calibrate(const Tensor& tensor, int bits) { return calibrate(tensor.data(), bits); }

std::uint16_t quantize_value(float value, const QuantParams& params) {
  const float q = std::round(value / params.scale) + static_cast<float>(params.zero_point);
  return static_cast<std::uint16_t>(std::clamp(q, 0.0f, static_cast<float>(params.max_code())));
}

float dequantize_value(std::uint32_t code, const QuantParams& params) {
  return params.scale * static_cast<float>(static_cast<std::int32_t>(code) - params.zero_point);
}

CodeTensor quantize(const Tensor& tensor, const QuantParams& params) {
  params.validate();
  CodeTensor out{tensor.shape(), {}, params};
  out.codes.resize(tensor.size());
  const auto in = tensor.data();
  for (std::size_t i = 0; i < in.size(); ++i) out.codes[i] = quantize_value(in[i], params);
  return out;
}

Tensor dequantize(const CodeTensor& codes) {
  codes.params.validate();
  if (shape_size(codes.shape) != codes.codes.size()) throw ShapeError("dequantize: shape/code count mismatch");
  Tensor out(codes.shape);
  const auto max_code = codes.params.max_code();
  for (std::size_t i = 0; i < codes.codes.size(); ++i) {
    if (codes.codes[i] > max_code) {
      throw std::invalid_argument("dequantize: code " + std::to_string(codes.codes[i]) + " exceeds " +
                                  std::to_string(codes.params.bits) + "-bit range");
    }
    out[i] = dequantize_value(codes.codes[i], codes.params);
  }
  return out;
}

void fake_quant_inplace(std::span<float> values, const QuantParams& params, std::span<float> ste_mask) {
  const float s = params.scale;
  const float z = static_cast<float>(params.zero_point);
  const float qmax = static_cast<float>(params.max_code());
  const float lo = params.range_min();
  const float hi = params.range_max();
  const bool want_mask = !ste_mask.empty();
  for (std::size_t i = 0; i < values.size(); ++i) {
    const float x = values[i];
    const float q = std::clamp(std::round(x / s) + z, 0.0f, qmax);
    values[i] = s * (q - z);
    if (want_mask) ste_mask[i] = (x >= lo && x <= hi) ? 1.0f : 0.0f;
  }
}

Tensor fake_quant(const Tensor& tensor, const QuantParams& params) {
  params.validate();
  Tensor out = tensor;
  fake_quant_inplace(out.data(), params);
  return out;
}

Tensor fake_quant_grad_mask(const Tensor& tensor, const QuantParams& params) {
  params.validate();
  Tensor scratch = tensor;
  Tensor mask(tensor.shape());
  fake_quant_inplace(scratch.data(), params, mask.data());
  return mask;
}

std::size_t packed_size(std::size_t count, int bits) {
  return (count * static_cast<std::size_t>(bits) + 7) / 8;
}

std::vector<std::uint8_t> pack(const CodeTensor& codes) {
  codes.params.validate();
  const auto b = static_cast<std::size_t>(codes.params.bits);
  std::vector<std::uint8_t> bytes(packed_size(codes.codes.size(), codes.params.bits), 0);
  std::size_t bit = 0;
  for (std::uint16_t code : codes.codes) {
    if (code > codes.params.max_code()) throw std::invalid_argument("pack: code out of range");
    for (std::size_t j = 0; j < b; ++j, ++bit) {
      if ((code >> j) & 1u) bytes[bit >> 3] |= static_cast<std::uint8_t>(1u << (bit & 7u));
    }
  }
  return bytes;
}

CodeTensor unpack(std::span<const std::uint8_t> bytes, const Shape& shape, const QuantParams& params) {
  params.validate();
  const std::size_t count = shape_size(shape);
  if (bytes.size() != packed_size(count, params.bits)) {
    throw std::invalid_argument("unpack: expected " + std::to_string(packed_size(count, params.bits)) +
                                " bytes, got " + std::to_string(bytes.size()));
  }
  CodeTensor out{shape, std::vector<std::uint16_t>(count, 0), params};
  const auto b = static_cast<std::size_t>(params.bits);
  std::size_t bit = 0;
  for (std::size_t k = 0; k < count; ++k) {
    std::uint16_t code = 0;
    for (std::size_t j = 0; j < b; ++j, ++bit) {
      if ((bytes[bit >> 3] >> (bit & 7u)) & 1u) code |= static_cast<std::uint16_t>(1u << j);
    }
    out.codes[k] = code;
  }
  return out;
}

}  // namespace qfault
