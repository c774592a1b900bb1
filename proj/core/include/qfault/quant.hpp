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
#include <span>
#include <vector>

#include "qfault/tensor.hpp"

namespace qfault {

/// Affine code space for one tensor: real = scale * (code - zero_point),
/// codes in [0, 2^bits - 1].
struct QuantParams {
  int bits = 4;
  float scale = 1.0f;
  std::int32_t zero_point = 0;

  std::uint32_t max_code() const { return (std::uint32_t{1} << bits) - 1u; }
  /// Lowest and highest representable real values.
  float range_min() const { return scale * static_cast<float>(0 - zero_point); }
  float range_max() const { return scale * static_cast<float>(static_cast<std::int32_t>(max_code()) - zero_point); }

  /// Throws std::invalid_argument unless 2 <= bits <= 16, scale > 0 and finite,
  /// and zero_point lies inside the code range.
  void validate() const;

  friend bool operator==(const QuantParams&, const QuantParams&) = default;
};

struct CodeTensor {
  Shape shape;
  std::vector<std::uint16_t> codes;
  QuantParams params;

  std::size_t total_bits() const { return codes.size() * static_cast<std::size_t>(params.bits); }
  friend bool operator==(const CodeTensor&, const CodeTensor&) = default;
};

/// Min/max calibration with the range widened to include zero. All-equal
/// tensors get scale 1 and a mid-range zero point.
QuantParams calibrate(std::span<const float> values, int bits);
QuantParams calibrate(const Tensor& tensor, int bits);

/// code = clamp(round(r / s) + z, 0, 2^b - 1), round half away from zero.
std::uint16_t quantize_value(float value, const QuantParams& params);
float dequantize_value(std::uint32_t code, const QuantParams& params);

CodeTensor quantize(const Tensor& tensor, const QuantParams& params);
/// Rejects codes >= 2^bits.
Tensor dequantize(const CodeTensor& codes);

/// quantize followed by dequantize, in place over `values`. When `ste_mask` is
/// non-null it receives 1 where the input lay inside the representable range
/// (gradient passes) and 0 where it was clamped.
void fake_quant_inplace(std::span<float> values, const QuantParams& params, std::span<float> ste_mask = {});
Tensor fake_quant(const Tensor& tensor, const QuantParams& params);
/// Straight-through gradient multiplier: 1 inside [range_min, range_max], else 0.
Tensor fake_quant_grad_mask(const Tensor& tensor, const QuantParams& params);

/// Dense little-endian bit packing: logical bit k*b + j (j = 0 is the code's
/// LSB) lands in byte (k*b + j) / 8 at bit position (k*b + j) % 8.
std::vector<std::uint8_t> pack(const CodeTensor& codes);
std::size_t packed_size(std::size_t count, int bits);
/// Throws std::invalid_argument when `bytes` is not exactly packed_size(...).
CodeTensor unpack(std::span<const std::uint8_t> bytes, const Shape& shape, const QuantParams& params);

}  // namespace qfault
