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

#include "qfault/landscape.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "qfault/csv.hpp"
#include "qfault/network.hpp"
#include "qfault/parallel.hpp"
#include "qfault/quant.hpp"
#include "qfault/rng.hpp"
#include "qfault/training.hpp"

namespace qfault {

namespace {

std::vector<Tensor> filter_normalized_direction(const Model& model, std::uint64_t seed) {
  std::vector<Tensor> dir(model.layers.size());
  for (std::size_t i : model.param_layers()) {
    const Tensor& w = model.layers[i].weight;
    Rng rng(split_seed(seed, i));
    Tensor d(w.shape());
    for (float& v : d.data()) v = static_cast<float>(rng.normal());
    const std::size_t filters = w.dim(0);
    const std::size_t len = w.size() / filters;
    for (std::size_t f = 0; f < filters; ++f) {
      double wn = 0.0, dn = 0.0;
      for (std::size_t k = f * len; k < (f + 1) * len; ++k) {
        wn += static_cast<double>(w[k]) * w[k];
        dn += static_cast<double>(d[k]) * d[k];
      }
      const double scale = (wn == 0.0 || dn == 0.0) ? 0.0 : std::sqrt(wn) / std::sqrt(dn);
      for (std::size_t k = f * len; k < (f + 1) * len; ++k) d[k] = static_cast<float>(d[k] * scale);
    }
    dir[i] = std::move(d);
  }
  return dir;
}

double batch_loss(const Model& model, const Dataset& data, const ForwardOptions& options) {
  const auto tape = forward(model, data.images, options);
  return softmax_cross_entropy(tape.logits, data.labels).loss;
}

}  // namespace

DirectionPair random_directions(const Model& model, std::uint64_t seed) {
  return {filter_normalized_direction(model, split_seed(seed, 1)), filter_normalized_direction(model, split_seed(seed, 2)),
          seed};
}

double LossGrid::coordinate(std::size_t index) const {
  const double half = static_cast<double>(resolution / 2);
  return range * (static_cast<double>(index) - half) / half;
}

LossGrid grid_loss(const Model& model, const DirectionPair& pair, std::size_t resolution, double range,
                   const Dataset& eval_batch, bool quantized) {
  if (resolution < 3 || resolution % 2 == 0) throw std::invalid_argument("grid_loss: resolution must be odd and >= 3");
  if (!(range > 0.0) || !std::isfinite(range)) throw std::invalid_argument("grid_loss: range must be positive");
  if (eval_batch.empty()) throw std::invalid_argument("grid_loss: empty evaluation batch");
  if (pair.d1.size() != model.layers.size() || pair.d2.size() != model.layers.size()) {
    throw ShapeError("grid_loss: direction pair does not match the model");
  }
  if (quantized && !model.has_frozen_quant()) {
    throw std::logic_error("grid_loss: quantized landscape needs frozen quantization parameters");
  }

  LossGrid grid;
  grid.resolution = resolution;
  grid.range = range;
  grid.values.assign(resolution * resolution, 0.0);
  const auto params = model.param_layers();

  parallel_for(grid.values.size(), [&](std::size_t p) {
    const float x = static_cast<float>(grid.coordinate(p % resolution));
    const float y = static_cast<float>(grid.coordinate(p / resolution));
    Model local = model;
    for (std::size_t i : params) {
      auto w = local.layers[i].weight.data();
      const Tensor& a = pair.d1[i];
      const Tensor& b = pair.d2[i];
      for (std::size_t k = 0; k < w.size(); ++k) w[k] = w[k] + x * a[k] + y * b[k];
      if (quantized) local.quant[i].weight = calibrate(local.layers[i].weight, model.bits);
    }
    double loss;
    try {
      loss = evaluate_loss(local, eval_batch, quantized);
    } catch (const NonFiniteError&) {
      loss = std::numeric_limits<double>::infinity();
    }
    grid.values[p] = std::isfinite(loss) ? loss : std::numeric_limits<double>::infinity();
  });

  for (double v : grid.values) grid.has_nonfinite = grid.has_nonfinite || !std::isfinite(v);
  grid.center_loss = grid.at(resolution / 2, resolution / 2);
  return grid;
}

void write_grid_csv(const LossGrid& grid, const std::string& path) {
  std::vector<CsvRow> rows;
  rows.reserve(grid.values.size());
  for (std::size_t iy = 0; iy < grid.resolution; ++iy) {
    for (std::size_t ix = 0; ix < grid.resolution; ++ix) {
      rows.push_back({grid.coordinate(ix), grid.coordinate(iy), grid.at(ix, iy)});
    }
  }
  write_csv(rows, {{"x", "y", "loss"}}, path);
}

SharpnessReport sharpness_proxy(const Model& model, double rho, const Dataset& eval_batch) {
  if (!(rho >= 0.0) || !std::isfinite(rho)) throw std::invalid_argument("sharpness_proxy: rho must be >= 0");
  if (eval_batch.empty()) throw std::invalid_argument("sharpness_proxy: empty evaluation batch");
  if (!model.has_frozen_quant()) {
    throw std::logic_error("sharpness_proxy: model '" + model.name + "' has no frozen quantization parameters");
  }
  SharpnessReport report;
  report.rho = rho;

  auto tape = forward(model, eval_batch.images, {Mode::Eval, true, Record::Full, nullptr});
  const auto base = softmax_cross_entropy(tape.logits, eval_batch.labels);
  report.base_loss = base.loss;
  report.perturbed_loss = base.loss;
  const Gradients grads = backward(model, tape, base.grad);
  report.grad_norm = grads.weight_quantized_norm();
  if (rho == 0.0 || report.grad_norm == 0.0) return report;

  std::vector<Tensor> eps = saq_epsilon(grads, rho);
  report.perturbed_loss = batch_loss(model, eval_batch, {Mode::Eval, true, Record::Logits, &eps});
  for (auto& e : eps) {
    for (float& v : e.data()) v = -v;
  }
  const double opposite = batch_loss(model, eval_batch, {Mode::Eval, true, Record::Logits, &eps});
  report.signed_value = report.perturbed_loss - report.base_loss;
  report.max_value = std::max(report.signed_value, opposite - report.base_loss);
  return report;
}

Dataset evaluation_subset(const Dataset& data, std::size_t samples) {
  return data.slice(0, std::min(samples, data.size()));
}

}  // namespace qfault
