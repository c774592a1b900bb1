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

struct LayerMacs {
  std::size_t layer = 0;  // index into Model::layers
  LayerKind kind = LayerKind::Conv2d;
  std::uint64_t total_macs = 0;  // per sample
  double nonzero_macs = 0.0;     // mean per sample, activation operand != 0
};

struct MacProfile {
  std::vector<LayerMacs> layers;
  std::size_t samples = 0;

  std::uint64_t total_macs() const;
  double nonzero_macs() const;
};

/// MAC counts of every conv and fc layer. A MAC is nonzero when its
/// activation operand is exactly nonzero; zero padding counts as zero.
/// Activations come from a quantized eval pass when `quantized` is set
/// (requires frozen params), otherwise from the float network.
MacProfile profile_macs(const Model& model, const Dataset& data, bool quantized = true, std::size_t batch_size = 250);

/// Nonzero-operand MAC count of a conv layer on one [C, H, W] input.
std::uint64_t conv_nonzero_macs(const Layer& conv, const float* input, std::size_t height, std::size_t width);

struct LayerLatency {
  std::size_t layer = 0;
  std::uint64_t total_macs = 0;
  double nonzero_macs = 0.0;
  std::uint64_t baseline_cycles = 0;
  std::uint64_t zeroskip_cycles = 0;
};

struct LatencyReport {
  std::vector<LayerLatency> layers;
  std::uint64_t baseline_cycles = 0;
  std::uint64_t zeroskip_cycles = 0;
  double normalized_latency = 1.0;
  std::size_t lanes = 16;
  double skip_efficiency = 0.85;
};

/// Zero-skipping accelerator model. Per layer, baseline = ceil(total / lanes)
/// and zeroskip = ceil((total - eta * (total - nonzero)) / lanes), floored at
/// one cycle so normalized latency stays in (0, 1].
LatencyReport model_latency(const MacProfile& profile, std::size_t lanes = 16, double skip_efficiency = 0.85);

/// layer,total_macs,nonzero_macs,baseline_cycles,zeroskip_cycles plus a
/// final "total" row.
void write_latency_csv(const LatencyReport& report, const std::string& path);

}  // namespace qfault
