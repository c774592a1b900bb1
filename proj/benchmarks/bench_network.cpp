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

#include "qfault/model.hpp"
#include "qfault/network.hpp"
#include "qfault/rng.hpp"

namespace {

using namespace qfault;

Tensor random_batch(std::size_t n, std::uint64_t seed) {
  Tensor x({n, 1, 28, 28});
  Rng rng(seed);
  for (float& v : x.data()) v = static_cast<float>(rng.uniform(0.0, 1.0));
  return x;
}

std::vector<std::uint8_t> random_labels(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::uint8_t> labels(n);
  for (auto& l : labels) l = static_cast<std::uint8_t>(rng.below(10));
  return labels;
}

void BM_LenetForward(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const bool quantized = state.range(1) != 0;
  const Model model = build_lenet5(10, 1);
  const Tensor x = random_batch(n, 2);
  for (auto _ : state) {
    auto tape = forward(model, x, {Mode::Train, quantized, Record::Logits, nullptr});
    benchmark::DoNotOptimize(tape.logits.raw());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_LenetForward)->ArgsProduct({{1, 64, 256}, {0, 1}})->Unit(benchmark::kMicrosecond);

void BM_LenetForwardBackward(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Model model = build_lenet5(10, 1);
  const Tensor x = random_batch(n, 2);
  const auto labels = random_labels(n, 3);
  for (auto _ : state) {
    auto tape = forward(model, x, {Mode::Train, true, Record::Full, nullptr});
    const auto loss = softmax_cross_entropy(tape.logits, labels);
    auto grads = backward(model, tape, loss.grad);
    benchmark::DoNotOptimize(grads.weight.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_LenetForwardBackward)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace
