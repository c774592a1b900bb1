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
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qfault/tensor.hpp"

namespace qfault {

enum class Split { Train, Val, Test };
const char* to_string(Split split);

/// Images as [N, C, H, W] in [0, 1] plus integer class labels.
struct Dataset {
  std::string name;
  Split split = Split::Train;
  Tensor images;
  std::vector<std::uint8_t> labels;
  std::size_t num_classes = 10;

  std::size_t size() const { return labels.size(); }
  bool empty() const { return labels.empty(); }
  Shape sample_shape() const;

  /// Samples [begin, end) as a new dataset.
  Dataset slice(std::size_t begin, std::size_t end) const;
  /// Copies the images of `indices` into a [indices.size(), C, H, W] batch.
  Tensor gather(std::span<const std::size_t> indices) const;
  /// Contiguous batch [begin, end).
  Tensor batch(std::size_t begin, std::size_t end) const;

  /// Checks image/label counts, pixel range and label bounds.
  void validate() const;
};

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reads an IDX image file (magic 0x00000803) and label file (0x00000801).
/// Pixels are scaled by 1/255.
Dataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels,
                 std::string name = "idx", Split split = Split::Train);

struct TrainValSplit {
  Dataset train;
  Dataset val;
};

/// Deterministic split: the last `val_size` samples become validation.
TrainValSplit split_train_val(const Dataset& data, std::size_t val_size = 5000);

/// CIFAR-10 binary batches: records of 1 label byte + 3072 CHW pixel bytes.
Dataset load_cifar10_bin(const std::vector<std::filesystem::path>& batches, Split split = Split::Train);

}  // namespace qfault
