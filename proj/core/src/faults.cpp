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

#include "qfault/faults.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "qfault/csv.hpp"
#include "qfault/network.hpp"
#include "qfault/parallel.hpp"
#include "qfault/rng.hpp"

namespace qfault {

const char* to_string(FaultKind kind) {
  switch (kind) {
    case FaultKind::BitFlip: return "bitflip";
    case FaultKind::StuckAt0: return "sa0";
    case FaultKind::StuckAt1: return "sa1";
  }
  return "?";
}

FaultKind parse_fault_kind(const std::string& text) {
  if (text == "bitflip" || text == "bit_flip" || text == "flip") return FaultKind::BitFlip;
  if (text == "sa0" || text == "stuck_at_0") return FaultKind::StuckAt0;
  if (text == "sa1" || text == "stuck_at_1") return FaultKind::StuckAt1;
  throw std::invalid_argument("unknown fault kind '" + text + "' (expected bitflip, sa0 or sa1)");
}

const char* to_string(RateUnit unit) { return unit == RateUnit::PerBit ? "bit" : "weight"; }

RateUnit parse_rate_unit(const std::string& text) {
  if (text == "bit" || text == "per_bit") return RateUnit::PerBit;
  if (text == "weight" || text == "per_weight") return RateUnit::PerWeight;
  throw std::invalid_argument("unknown rate unit '" + text + "' (expected bit or weight)");
}

void FaultSpec::validate() const {
  if (!(rate >= 0.0 && rate <= 1.0)) {
    throw std::invalid_argument("fault rate must lie in [0, 1], got " + std::to_string(rate));
  }
}

std::size_t FaultMask::count() const {
  std::size_t n = 0;
  for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

std::vector<std::size_t> FaultMask::positions() const {
  std::vector<std::size_t> out;
  for (std::size_t w = 0; w < words_.size(); ++w) {
    for (std::uint64_t bits = words_[w]; bits != 0; bits &= bits - 1) {
      out.push_back(w * 64 + static_cast<std::size_t>(std::countr_zero(bits)));
    }
  }
  return out;
}

std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t index) { return split_seed(master_seed, index); }

namespace {

void check_rate(double rate) {
  if (!(rate >= 0.0 && rate <= 1.0)) {
    throw std::invalid_argument("fault rate must lie in [0, 1], got " + std::to_string(rate));
  }
}

}  // namespace

FaultMask generate_mask(std::size_t total_bits, double rate, std::uint64_t seed, std::size_t bit_offset) {
  check_rate(rate);
  FaultMask mask(total_bits);
  if (rate == 0.0) return mask;
  for (std::size_t i = 0; i < total_bits; ++i) {
    if (to_unit(counter_hash(seed, bit_offset + i)) < rate) mask.set(i);
  }
  return mask;
}

FaultMask generate_weight_mask(std::size_t weights, int bits, double rate, std::uint64_t seed,
                               std::size_t weight_offset) {
  check_rate(rate);
  if (bits < 1) throw std::invalid_argument("generate_weight_mask: bits must be positive");
  const auto b = static_cast<std::size_t>(bits);
  FaultMask mask(weights * b);
  if (rate == 0.0) return mask;
  for (std::size_t k = 0; k < weights; ++k) {
    const std::uint64_t counter = 2 * (weight_offset + k);
    if (to_unit(counter_hash(seed, counter)) < rate) {
      mask.set(k * b + counter_hash(seed, counter + 1) % b);
    }
  }
  return mask;
}

void apply_mask(std::span<std::uint8_t> packed, const FaultMask& mask, FaultKind kind) {
  if (mask.size() > packed.size() * 8) throw std::invalid_argument("apply_mask: mask longer than packed stream");
  for (std::size_t pos : mask.positions()) {
    const auto bit = static_cast<std::uint8_t>(1u << (pos % 8));
    std::uint8_t& byte = packed[pos / 8];
    switch (kind) {
      case FaultKind::BitFlip: byte ^= bit; break;
      case FaultKind::StuckAt0: byte &= static_cast<std::uint8_t>(~bit); break;
      case FaultKind::StuckAt1: byte |= bit; break;
    }
  }
}

CodeTensor inject(const CodeTensor& codes, const FaultSpec& spec, std::uint64_t seed, std::size_t offset) {
  spec.validate();
  const std::size_t n = codes.codes.size();
  const FaultMask mask = spec.unit == RateUnit::PerBit
                             ? generate_mask(codes.total_bits(), spec.rate, seed, offset)
                             : generate_weight_mask(n, codes.params.bits, spec.rate, seed, offset);
  auto bytes = pack(codes);
  apply_mask(bytes, mask, spec.kind);
  return unpack(bytes, codes.shape, codes.params);
}

Model faulty_model(const Model& model, const FaultSpec& spec, std::uint64_t seed) {
  spec.validate();
  if (!model.has_frozen_quant()) {
    throw std::logic_error("faulty_model: model '" + model.name + "' has no frozen quantization parameters");
  }
  Model out = model;
  std::size_t offset = 0;
  auto corrupt = [&](Tensor& values, const QuantParams& params) {
    const CodeTensor faulty = inject(quantize(values, params), spec, seed, offset);
    offset += spec.unit == RateUnit::PerBit ? faulty.total_bits() : faulty.codes.size();
    values = dequantize(faulty);
  };
  for (std::size_t i : out.param_layers()) corrupt(out.layers[i].weight, *out.quant[i].weight);
  if (spec.include_biases) {
    for (std::size_t i : out.param_layers()) {
      Layer& l = out.layers[i];
      corrupt(l.bias, calibrate(l.bias, model.bits));
    }
  }
  return out;
}

std::vector<SweepSummary> SweepResult::summary() const {
  std::vector<SweepSummary> out;
  std::vector<double> sums, sq;
  for (const auto& r : rows) {
    std::size_t j = 0;
    while (j < out.size() && !(out[j].kind == r.kind && out[j].rate == r.rate)) ++j;
    if (j == out.size()) {
      out.push_back({r.kind, r.rate, 0.0, 0.0, 0});
      sums.push_back(0.0);
    }
    out[j].trials++;
    sums[j] += r.accuracy;
  }
  sq.assign(out.size(), 0.0);
  for (std::size_t j = 0; j < out.size(); ++j) out[j].mean_acc = sums[j] / static_cast<double>(out[j].trials);
  for (const auto& r : rows) {
    for (std::size_t j = 0; j < out.size(); ++j) {
      if (out[j].kind == r.kind && out[j].rate == r.rate) {
        const double d = r.accuracy - out[j].mean_acc;
        sq[j] += d * d;
        break;
      }
    }
  }
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j].std_acc = out[j].trials > 1 ? std::sqrt(sq[j] / static_cast<double>(out[j].trials - 1)) : 0.0;
  }
  return out;
}

SweepSummary SweepResult::cell(FaultKind kind, double rate) const {
  for (const auto& s : summary()) {
    if (s.kind == kind && std::abs(s.rate - rate) <= 1e-12) return s;
  }
  throw std::out_of_range(std::string("sweep has no cell for ") + to_string(kind) + " at rate " +
                          format_number(rate));
}

SweepResult monte_carlo(const Model& model, const FaultSpec& spec, std::size_t trials, const Dataset& data) {
  spec.validate();
  if (trials == 0) throw std::invalid_argument("monte_carlo: need at least one trial");
  if (data.empty()) throw std::invalid_argument("monte_carlo: empty dataset");
  if (!model.has_frozen_quant()) {
    throw std::logic_error("monte_carlo: model '" + model.name + "' has no frozen quantization parameters");
  }
  SweepResult result;
  result.rows.resize(trials);
  parallel_for(trials, [&](std::size_t t) {
    const std::uint64_t seed = trial_seed(spec.master_seed, t);
    const Model faulty = faulty_model(model, spec, seed);
    result.rows[t] = {spec.kind, spec.rate, t, seed, accuracy(faulty, data, true)};
  });
  return result;
}

SweepResult sweep(const Model& model, const SweepGrid& grid, const Dataset& data) {
  SweepResult result;
  for (FaultKind kind : grid.kinds) {
    for (double rate : grid.rates) {
      FaultSpec spec{kind, rate, grid.master_seed, grid.unit, grid.include_biases};
      auto part = monte_carlo(model, spec, grid.trials, data);
      result.rows.insert(result.rows.end(), part.rows.begin(), part.rows.end());
    }
  }
  return result;
}

void write_sweep_csv(const SweepResult& result, const std::string& path) {
  std::vector<CsvRow> rows;
  rows.reserve(result.rows.size());
  for (const auto& r : result.rows) {
    rows.push_back({std::string(to_string(r.kind)), r.rate, static_cast<std::uint64_t>(r.trial), r.seed, r.accuracy});
  }
  write_csv(rows, {{"kind", "rate", "trial", "seed", "accuracy"}}, path);
}

void write_summary_csv(const SweepResult& result, const std::string& path) {
  std::vector<CsvRow> rows;
  for (const auto& s : result.summary()) {
    rows.push_back({std::string(to_string(s.kind)), s.rate, s.mean_acc, s.std_acc, static_cast<std::uint64_t>(s.trials)});
  }
  write_csv(rows, {{"kind", "rate", "mean_acc", "std_acc", "trials"}}, path);
}

SweepResult read_sweep_csv(const std::string& path) {
  const CsvTable table = read_csv(path);
  const std::size_t ck = table.column("kind"), cr = table.column("rate"), ct = table.column("trial"),
                    cs = table.column("seed"), ca = table.column("accuracy");
  SweepResult result;
  for (const auto& row : table.rows) {
    result.rows.push_back({parse_fault_kind(row[ck]), std::stod(row[cr]), std::stoull(row[ct]), std::stoull(row[cs]),
                           std::stod(row[ca])});
  }
  return result;
}

}  // namespace qfault
