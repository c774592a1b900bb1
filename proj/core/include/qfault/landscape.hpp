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
#include <string>
#include <vector>

#include "qfault/dataset.hpp"
#include "qfault/model.hpp"

namespace qfault {

/// Two filter-normalized random directions in weight space, indexed by layer
/// (empty on parameter-free layers). Bias components are zero and not stored.
struct DirectionPair {
  std::vector<Tensor> d1;
  std::vector<Tensor> d2;
  std::uint64_t seed = 0;
};

/// Gaussian directions rescaled so that every filter (conv output channel or
/// fc output row) has the norm of the corresponding weight filter. Filters
/// whose weights are all zero get a zero direction.
DirectionPair random_directions(const Model& model, std::uint64_t seed);

struct LossGrid {
  std::size_t resolution = 0;
  double range = 1.0;
  /// Row-major over (y, x): values[iy * resolution + ix].
  std::vector<double> values;
  double center_loss = 0.0;
  /// Set when some point produced a non-finite loss (stored as +inf).
  bool has_nonfinite = false;

  double coordinate(std::size_t index) const;
  double at(std::size_t ix, std::size_t iy) const { return values[iy * resolution + ix]; }
};

/// Loss of the model with weights w + x*d1 + y*d2 over an odd `resolution`
/// grid spanning [-range, range]^2. When `quantized` is set the perturbed
/// weights are fake-quantized with recalibrated weight params and the frozen
/// activation params. The source model is never modified.
LossGrid grid_loss(const Model& model, const DirectionPair& pair, std::size_t resolution, double range,
                   const Dataset& eval_batch, bool quantized = true);

/// x,y,loss
void write_grid_csv(const LossGrid& grid, const std::string& path);

struct SharpnessReport {
  double base_loss = 0.0;     // L(Q(w))
  double perturbed_loss = 0.0;  // L(Q(w) + eps)
  double signed_value = 0.0;  // perturbed_loss - base_loss
  double max_value = 0.0;     // max over +eps and -eps
  double grad_norm = 0.0;     // ||dL/dQ(w)||_2
  double rho = 0.0;
};

/// Sharpness proxy at the SAQ ascent step: loss increase when the quantized
/// weights move by eps = rho * g / ||g|| (g taken on eval_batch). Reported
/// raw and as the max over +/-eps. Zero for rho == 0 or a zero gradient.
/// Requires frozen quantization parameters.
SharpnessReport sharpness_proxy(const Model& model, double rho, const Dataset& eval_batch);

/// First `samples` entries of `data` (all of it when smaller).
Dataset evaluation_subset(const Dataset& data, std::size_t samples = 1024);

}  // namespace qfault
