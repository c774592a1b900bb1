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

#include "qfault/dataset.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <iterator>

namespace qfault {
namespace {

constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t read_be32(const std::vector<std::uint8_t>& bytes, std::size_t offset, const std::filesystem::path& path) {
  if (offset + 4 > bytes.size()) throw FormatError(path.string() + ": truncated IDX header");
  return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

}  // namespace

const char* to_string(Split split) {
  switch (split) {
    case Split::Train: return "train";
    case Split::Val: return "val";
    case Split::Test: return "test";
  }
  return "unknown";
}

Shape Dataset::sample_shape() const {
  if (images.rank() < 2) return {};
  return Shape(images.shape().begin() + 1, images.shape().end());
}

Dataset Dataset::slice(std::size_t begin, std::size_t end) const {
  if (begin > end || end > size()) throw std::out_of_range("Dataset::slice: bad range");
  Dataset out;
  out.name = name;
  out.split = split;
  out.num_classes = num_classes;
  out.images = batch(begin, end);
  out.labels.assign(labels.begin() + static_cast<std::ptrdiff_t>(begin), labels.begin() + static_cast<std::ptrdiff_t>(end));
  return out;
}

Tensor Dataset::batch(std::size_t begin, std::size_t end) const {
  if (begin > end || end > size()) throw std::out_of_range("Dataset::batch: bad range");
  const std::size_t per = shape_size(sample_shape());
  Shape shape{end - begin};
  const Shape s = sample_shape();
  shape.insert(shape.end(), s.begin(), s.end());
  std::vector<float> data(images.raw() + begin * per, images.raw() + end * per);
  return Tensor(std::move(shape), std::move(data));
}

Tensor Dataset::gather(std::span<const std::size_t> indices) const {
  const std::size_t per = shape_size(sample_shape());
  Shape shape{indices.size()};
  const Shape s = sample_shape();
  shape.insert(shape.end(), s.begin(), s.end());
  Tensor out(std::move(shape));
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= size()) throw std::out_of_range("Dataset::gather: index out of range");
    std::memcpy(out.raw() + i * per, images.raw() + indices[i] * per, per * sizeof(float));
  }
  return out;
}

void Dataset::validate() const {
  if (images.rank() < 2 || images.dim(0) != labels.size()) {
    throw FormatError("dataset '" + name + "': " + std::to_string(labels.size()) + " labels for images " +
                      shape_to_string(images.shape()));
  }
  for (float v : images.data()) {
    if (!(v >= 0.0f && v <= 1.0f)) throw FormatError("dataset '" + name + "': pixel outside [0, 1]");
  }
  for (auto label : labels) {
    if (label >= num_classes) throw FormatError("dataset '" + name + "': label exceeds class count");
  }
}

Dataset load_idx(const std::filesystem::path& images_path, const std::filesystem::path& labels_path, std::string name,
                 Split split) {
  const auto img = read_file(images_path);
  const auto lbl = read_file(labels_path);

  if (read_be32(img, 0, images_path) != kIdxImagesMagic) {
    throw FormatError(images_path.string() + ": bad IDX image magic");
  }
  if (read_be32(lbl, 0, labels_path) != kIdxLabelsMagic) {
    throw FormatError(labels_path.string() + ": bad IDX label magic");
  }
  const std::size_t count = read_be32(img, 4, images_path);
  const std::size_t rows = read_be32(img, 8, images_path);
  const std::size_t cols = read_be32(img, 12, images_path);
  const std::size_t label_count = read_be32(lbl, 4, labels_path);
  if (count != label_count) {
    throw FormatError("IDX count mismatch: " + std::to_string(count) + " images vs " + std::to_string(label_count) +
                      " labels");
  }
  if (rows == 0 || cols == 0) throw FormatError(images_path.string() + ": zero image extent");
  const std::size_t pixels = count * rows * cols;
  if (img.size() != 16 + pixels) throw FormatError(images_path.string() + ": payload size does not match header");
  if (lbl.size() != 8 + count) throw FormatError(labels_path.string() + ": payload size does not match header");

  Dataset d;
  d.name = std::move(name);
  d.split = split;
  std::vector<float> data(pixels);
  for (std::size_t i = 0; i < pixels; ++i) data[i] = static_cast<float>(img[16 + i]) / 255.0f;
  d.images = Tensor({count, 1, rows, cols}, std::move(data));
  d.labels.assign(lbl.begin() + 8, lbl.end());
  const auto max_label = d.labels.empty() ? 0 : *std::max_element(d.labels.begin(), d.labels.end());
  d.num_classes = std::max<std::size_t>(10, static_cast<std::size_t>(max_label) + 1);
  d.validate();
  return d;
}

TrainValSplit split_train_val(const Dataset& data, std::size_t val_size) {
  if (val_size >= data.size()) throw std::invalid_argument("split_train_val: validation split consumes every sample");
  TrainValSplit out{data.slice(0, data.size() - val_size), data.slice(data.size() - val_size, data.size())};
  out.train.split = Split::Train;
  out.val.split = Split::Val;
  return out;
}

Dataset load_cifar10_bin(const std::vector<std::filesystem::path>& batches, Split split) {
  constexpr std::size_t kRecord = 1 + 3 * 32 * 32;
  std::vector<float> pixels;
  std::vector<std::uint8_t> labels;
  for (const auto& path : batches) {
    const auto bytes = read_file(path);
    if (bytes.empty() || bytes.size() % kRecord != 0) {
      throw FormatError(path.string() + ": size is not a multiple of the CIFAR-10 record length");
    }
    for (std::size_t off = 0; off < bytes.size(); off += kRecord) {
      if (bytes[off] >= 10) throw FormatError(path.string() + ": label exceeds 9");
      labels.push_back(bytes[off]);
      for (std::size_t k = 1; k < kRecord; ++k) pixels.push_back(static_cast<float>(bytes[off + k]) / 255.0f);
    }
  }
  Dataset d;
  d.name = "cifar10";
  d.split = split;
  d.num_classes = 10;
  const std::size_t n = labels.size();
  d.images = Tensor({n, 3, 32, 32}, std::move(pixels));
  d.labels = std::move(labels);
  d.validate();
  return d;
}

}  // namespace qfault
