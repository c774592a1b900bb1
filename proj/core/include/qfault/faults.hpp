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
#include <string>
#include <vector>

#include "qfault/dataset.hpp"
#include "qfault/model.hpp"
#include "qfault/quant.hpp"

namespace qfault {

enum class FaultKind { BitFlip, StuckAt0, StuckAt1 };

const char* to_string(FaultKind kind);
/// Accepts "bitflip", "sa0", "sa1".
FaultKind parse_fault_kind(const std::string& text);

/// Whether `rate` is the probability that a bit is faulty, or that a weight
/// is faulty (with one uniformly chosen bit of it affected).
enum class RateUnit { PerBit, PerWeight };

const char* to_string(RateUnit unit);
RateUnit parse_rate_unit(const std::string& text);

struct FaultSpec {
  FaultKind kind = FaultKind::BitFlip;
  double rate = 0.0;
  std::uint64_t master_seed = 0;
  RateUnit unit = RateUnit::PerBit;
  /// Also route biases through the quantize/inject path (same bit width,
  /// params calibrated from the biases). Off by default: only weights are faulted.
  bool include_biases = false;

  void validate() const;
};

/// One indicator per bit of a packed code stream.
class FaultMask {
 public:
  FaultMask() = default;
  explicit FaultMask(std::size_t bits) : bits_(bits), words_((bits + 63) / 64, 0) {}

  std::size_t size() const { return bits_; }
  bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
  void set(std::size_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  std::size_t count() const;
  std::vector<std::size_t> positions() const;

  friend bool operator==(const FaultMask&, const FaultMask&) = default;

 private:
  std::size_t bits_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Trial seed for Monte Carlo trial `index` under `master_seed`.
std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t index);

/// Bit i (absolute index bit_offset + i) is faulty iff
/// to_unit(counter_hash(trial_seed, bit_offset + i)) < rate. Each bit is an
/// independent Bernoulli(rate) draw and the result is order-free.
FaultMask generate_mask(std::size_t total_bits, double rate, std::uint64_t trial_seed, std::size_t bit_offset = 0);

/// Per-weight convention: weight k (absolute index weight_offset + k) is
/// faulty with probability `rate`; one of its `bits` bits, chosen uniformly,
/// is marked.
FaultMask generate_weight_mask(std::size_t weights, int bits, double rate, std::uint64_t trial_seed,
                               std::size_t weight_offset = 0);

/// Applies the fault semantics to a packed stream: bit-flip XOR 1, SA0 AND 0, SA1 OR 1.
void apply_mask(std::span<std::uint8_t> packed, const FaultMask& mask, FaultKind kind);

/// pack -> apply mask -> unpack. `offset` positions this tensor inside the
/// model's memory image (bits for PerBit, weights for PerWeight).
CodeTensor inject(const CodeTensor& codes, const FaultSpec& spec, std::uint64_t trial_seed, std::size_t offset = 0);

/// Frozen copy of `model` whose weights went through quantize -> pack ->
/// inject -> unpack -> dequantize. Requires frozen QuantParams. The weights of
/// all parameterized layers form one memory image, laid out in layer order.
Model faulty_model(const Model& model, const FaultSpec& spec, std::uint64_t trial_seed);

struct SweepRow {
  FaultKind kind = FaultKind::BitFlip;
  double rate = 0.0;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  double accuracy = 0.0;

  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

struct SweepSummary {
  FaultKind kind = FaultKind::BitFlip;
  double rate = 0.0;
  double mean_acc = 0.0;
  double std_acc = 0.0;  // sample standard deviation (0 for a single trial)
  std::size_t trials = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;

  /// Mean/std per (kind, rate), in first-appearance order.
  std::vector<SweepSummary> summary() const;
  /// Summary entry for one cell; throws std::out_of_range when absent.
  SweepSummary cell(FaultKind kind, double rate) const;
};

/// Accuracy of `trials` faulty copies, trial i seeded by trial_seed(master, i).
/// Rows come back in trial order regardless of worker count.
SweepResult monte_carlo(const Model& model, const FaultSpec& spec, std::size_t trials, const Dataset& data);

struct SweepGrid {
  std::vector<FaultKind> kinds;
  std::vector<double> rates;
  std::size_t trials = 20;
  std::uint64_t master_seed = 0;
  RateUnit unit = RateUnit::PerBit;
  bool include_biases = false;
};

/// monte_carlo over kinds x rates, concatenated kind-major.
SweepResult sweep(const Model& model, const SweepGrid& grid, const Dataset& data);

/// kind,rate,trial,seed,accuracy
void write_sweep_csv(const SweepResult& result, const std::string& path);
/// kind,rate,mean_acc,std_acc,trials
void write_summary_csv(const SweepResult& result, const std::string& path);
SweepResult read_sweep_csv(const std::string& path);

}  // namespace qfault
