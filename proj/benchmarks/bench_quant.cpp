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

#include "qfault/quant.hpp"
#include "qfault/rng.hpp"

namespace {

using namespace qfault;

Tensor random_weights(std::size_t n) {
  Tensor t({n});
  Rng rng(5);
  for (float& v : t.data()) v = static_cast<float>(rng.uniform(-0.5, 0.5));
  return t;
}

void BM_FakeQuant(benchmark::State& state) {
  const Tensor w = random_weights(static_cast<std::size_t>(state.range(0)));
  const QuantParams p = calibrate(w, 4);
  for (auto _ : state) {
    Tensor q = fake_quant(w, p);
    benchmark::DoNotOptimize(q.raw());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FakeQuant)->Arg(61470)->Arg(1 << 20);

void BM_QuantizePack(benchmark::State& state) {
  const Tensor w = random_weights(static_cast<std::size_t>(state.range(0)));
  const QuantParams p = calibrate(w, static_cast<int>(state.range(1)));
  for (auto _ : state) {
    const auto bytes = pack(quantize(w, p));
    benchmark::DoNotOptimize(bytes.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_QuantizePack)->ArgsProduct({{61470}, {3, 4, 8}});

void BM_UnpackDequantize(benchmark::State& state) {
  const Tensor w = random_weights(static_cast<std::size_t>(state.range(0)));
  const QuantParams p = calibrate(w, 4);
  const CodeTensor codes = quantize(w, p);
  const auto bytes = pack(codes);
  for (auto _ : state) {
    Tensor out = dequantize(unpack(bytes, codes.shape, p));
    benchmark::DoNotOptimize(out.raw());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_UnpackDequantize)->Arg(61470);

}  // namespace
