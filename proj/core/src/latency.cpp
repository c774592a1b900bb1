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

#include "qfault/latency.hpp"

#include <cmath>
#include <stdexcept>

#include "qfault/csv.hpp"
#include "qfault/network.hpp"
#include "qfault/parallel.hpp"

namespace qfault {

std::uint64_t MacProfile::total_macs() const {
  std::uint64_t n = 0;
  for (const auto& l : layers) n += l.total_macs;
  return n;
}

double MacProfile::nonzero_macs() const {
  double n = 0.0;
  for (const auto& l : layers) n += l.nonzero_macs;
  return n;
}

namespace {

/// cover[h] = number of (output row, kernel row) pairs reading input row h.
std::vector<std::uint64_t> coverage(std::size_t in, std::size_t out, const Layer& conv) {
  std::vector<std::uint64_t> cover(in, 0);
  for (std::size_t o = 0; o < out; ++o) {
    for (std::size_t k = 0; k < conv.kernel; ++k) {
      const auto pos = static_cast<long long>(o * conv.stride + k) - static_cast<long long>(conv.padding);
      if (pos >= 0 && pos < static_cast<long long>(in)) cover[static_cast<std::size_t>(pos)]++;
    }
  }
  return cover;
}

std::size_t conv_out(std::size_t in, const Layer& conv) { return (in + 2 * conv.padding - conv.kernel) / conv.stride + 1; }

std::uint64_t total_macs_of(const Layer& l, const Shape& in) {
  if (l.kind == LayerKind::FullyConnected) return static_cast<std::uint64_t>(l.in_features) * l.out_features;
  const std::size_t oh = conv_out(in[1], l), ow = conv_out(in[2], l);
  return static_cast<std::uint64_t>(l.out_channels) * oh * ow * l.in_channels * l.kernel * l.kernel;
}

}  // namespace

std::uint64_t conv_nonzero_macs(const Layer& conv, const float* input, std::size_t height, std::size_t width) {
  const auto ch = coverage(height, conv_out(height, conv), conv);
  const auto cw = coverage(width, conv_out(width, conv), conv);
  std::uint64_t sum = 0;
  for (std::size_t c = 0; c < conv.in_channels; ++c) {
    const float* plane = input + c * height * width;
    for (std::size_t h = 0; h < height; ++h) {
      for (std::size_t w = 0; w < width; ++w) {
        if (plane[h * width + w] != 0.0f) sum += ch[h] * cw[w];
      }
    }
  }
  return sum * conv.out_channels;
}

MacProfile profile_macs(const Model& model, const Dataset& data, bool quantized, std::size_t batch_size) {
  if (data.empty()) throw std::invalid_argument("profile_macs: empty dataset");
  if (quantized && !model.has_frozen_quant()) {
    throw std::logic_error("profile_macs: model '" + model.name + "' has no frozen quantization parameters");
  }
  const auto shapes = model.layer_shapes();
  const auto params = model.param_layers();
  batch_size = std::max<std::size_t>(batch_size, 1);
  const std::size_t chunks = (data.size() + batch_size - 1) / batch_size;
  std::vector<std::vector<std::uint64_t>> counts(chunks, std::vector<std::uint64_t>(params.size(), 0));

  parallel_for(chunks, [&](std::size_t c) {
    const std::size_t begin = c * batch_size, end = std::min(data.size(), begin + batch_size);
    const auto tape = forward(model, data.batch(begin, end), {Mode::Eval, quantized, Record::Metrics, nullptr});
    for (std::size_t j = 0; j < params.size(); ++j) {
      const std::size_t i = params[j];
      const Layer& l = model.layers[i];
      const Tensor& x = tape.layers[i].input;
      const std::size_t per_sample = x.size() / (end - begin);
      for (std::size_t s = 0; s < end - begin; ++s) {
        const float* in = x.raw() + s * per_sample;
        if (l.kind == LayerKind::Conv2d) {
          counts[c][j] += conv_nonzero_macs(l, in, shapes[i][1], shapes[i][2]);
        } else {
          std::uint64_t nz = 0;
          for (std::size_t k = 0; k < per_sample; ++k) nz += in[k] != 0.0f ? 1 : 0;
          counts[c][j] += nz * l.out_features;
        }
      }
    }
  });

  MacProfile profile;
  profile.samples = data.size();
  for (std::size_t j = 0; j < params.size(); ++j) {
    const std::size_t i = params[j];
    std::uint64_t nz = 0;
    for (const auto& chunk : counts) nz += chunk[j];
    profile.layers.push_back({i, model.layers[i].kind, total_macs_of(model.layers[i], shapes[i]),
                              static_cast<double>(nz) / static_cast<double>(data.size())});
  }
  return profile;
}

LatencyReport model_latency(const MacProfile& profile, std::size_t lanes, double skip_efficiency) {
  if (lanes == 0) throw std::invalid_argument("model_latency: lanes must be >= 1");
  if (!(skip_efficiency >= 0.0 && skip_efficiency <= 1.0)) {
    throw std::invalid_argument("model_latency: skip efficiency must lie in [0, 1]");
  }
  LatencyReport report;
  report.lanes = lanes;
  report.skip_efficiency = skip_efficiency;
  const auto lanes_d = static_cast<double>(lanes);
  for (const auto& l : profile.layers) {
    if (l.nonzero_macs < 0.0 || l.nonzero_macs > static_cast<double>(l.total_macs)) {
      throw std::invalid_argument("model_latency: nonzero MACs outside [0, total]");
    }
    LayerLatency out{l.layer, l.total_macs, l.nonzero_macs, (l.total_macs + lanes - 1) / lanes, 0};
    const auto total = static_cast<double>(l.total_macs);
    const double work = total - skip_efficiency * (total - l.nonzero_macs);
    out.zeroskip_cycles = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(work / lanes_d)));
    out.zeroskip_cycles = std::min(out.zeroskip_cycles, std::max<std::uint64_t>(1, out.baseline_cycles));
    out.baseline_cycles = std::max<std::uint64_t>(1, out.baseline_cycles);
    report.baseline_cycles += out.baseline_cycles;
    report.zeroskip_cycles += out.zeroskip_cycles;
    report.layers.push_back(out);
  }
  report.normalized_latency = report.baseline_cycles == 0 ? 1.0
                                                          : static_cast<double>(report.zeroskip_cycles) /
                                                                static_cast<double>(report.baseline_cycles);
  return report;
}

void write_latency_csv(const LatencyReport& report, const std::string& path) {
  std::vector<CsvRow> rows;
  double nonzero = 0.0;
  std::uint64_t total = 0;
  for (const auto& l : report.layers) {
    rows.push_back({static_cast<std::uint64_t>(l.layer), l.total_macs, l.nonzero_macs, l.baseline_cycles,
                    l.zeroskip_cycles});
    nonzero += l.nonzero_macs;
    total += l.total_macs;
  }
  rows.push_back({std::string("total"), total, nonzero, report.baseline_cycles, report.zeroskip_cycles});
  write_csv(rows, {{"layer", "total_macs", "nonzero_macs", "baseline_cycles", "zeroskip_cycles"}}, path);
}

}  // namespace qfault
