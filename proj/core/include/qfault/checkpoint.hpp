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
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "qfault/model.hpp"

namespace qfault {

/// Checkpoint file layout (all integers little-endian):
///
///   magic        8 bytes  "QFLTCKPT"
///   version      u32      kCheckpointVersion
///   payload_size u64
///   crc32        u32      zlib CRC-32 of the payload
///   payload:
///     model header   name, input shape, num_classes, bits, activation_bits, frozen
///     layers         kind, geometry, f32 weights and biases, optional QuantParams
///     code image     packed weight codes of every parameterized layer, layer order
///     metadata       string key/value pairs
///
/// Strings are a u32 length followed by raw bytes.
inline constexpr std::uint32_t kCheckpointVersion = 1;
inline constexpr char kCheckpointMagic[8] = {'Q', 'F', 'L', 'T', 'C', 'K', 'P', 'T'};

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Metadata = std::map<std::string, std::string>;

struct Checkpoint {
  Model model;
  Metadata meta;
  std::vector<std::uint8_t> code_image;
};

/// Packed b-bit weight codes of all parameterized layers, each layer packed
/// on its own and concatenated. Empty when the model is not frozen.
std::vector<std::uint8_t> code_image(const Model& model);

std::vector<std::uint8_t> serialize_checkpoint(const Model& model, const Metadata& meta);
/// Throws CheckpointError on bad magic, version mismatch, truncation,
/// checksum failure, or a stored code image that disagrees with the weights.
Checkpoint parse_checkpoint(const std::vector<std::uint8_t>& bytes);

void save_checkpoint(const Model& model, const Metadata& meta, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// CRC-32 of the serialized model (no metadata), for provenance records.
std::uint32_t model_checksum(const Model& model);

}  // namespace qfault
