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

#include <benchmark/benchmark.h>

#include "qfault/faults.hpp"
#include "qfault/model.hpp"
#include "qfault/network.hpp"
#include "qfault/rng.hpp"

namespace {

using namespace qfault;

void BM_GenerateMask(benchmark::State& state) {
  const auto bits = static_cast<std::size_t>(state.range(0));
  const double rate = static_cast<double>(state.range(1)) / 100.0;
  std::uint64_t trial = 0;
  for (auto _ : state) {
    const FaultMask mask = generate_mask(bits, rate, trial_seed(11, trial++));
    benchmark::DoNotOptimize(mask.size());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GenerateMask)->ArgsProduct({{245880, 1 << 24}, {1, 5}});

void BM_ApplyMask(benchmark::State& state) {
  const std::size_t weights = 61470;
  Tensor w({weights});
  Rng rng(3);
  for (float& v : w.data()) v = static_cast<float>(rng.uniform(-0.5, 0.5));
  const QuantParams p = calibrate(w, 4);
  const auto packed = pack(quantize(w, p));
  const FaultMask mask = generate_mask(weights * 4, 0.05, trial_seed(11, 0));
  const auto kind = static_cast<FaultKind>(state.range(0));
  for (auto _ : state) {
    auto bytes = packed;
    apply_mask(bytes, mask, kind);
    benchmark::DoNotOptimize(bytes.data());
  }
  state.SetLabel(to_string(kind));
}
BENCHMARK(BM_ApplyMask)->DenseRange(0, 2);

void BM_FaultyModel(benchmark::State& state) {
  Model model = build_lenet5(10, 1);
  Tensor calib({64, 1, 28, 28});
  Rng rng(4);
  for (float& v : calib.data()) v = static_cast<float>(rng.uniform(0.0, 1.0));
  Dataset data;
  data.images = calib;
  data.labels.assign(64, 0);
  freeze_quantization(model, data, 64);
  std::uint64_t trial = 0;
  for (auto _ : state) {
    Model faulty = faulty_model(model, {FaultKind::BitFlip, 0.03, 11}, trial_seed(11, trial++));
    benchmark::DoNotOptimize(faulty.layers.data());
  }
}
BENCHMARK(BM_FaultyModel)->Unit(benchmark::kMicrosecond);

}  // namespace
