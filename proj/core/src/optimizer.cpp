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

#include "qfault/optimizer.hpp"

#include <stdexcept>

namespace qfault {
namespace {

void update(Tensor& param, const Tensor& grad, Tensor& velocity, float lr, float momentum, float decay) {
  if (grad.shape() != param.shape()) throw ShapeError("sgd: gradient shape does not match parameter");
  if (velocity.empty()) velocity = Tensor(param.shape());
  for (std::size_t k = 0; k < param.size(); ++k) {
    const float g = grad[k] + decay * param[k];
    velocity[k] = momentum * velocity[k] + g;
    param[k] -= lr * velocity[k];
  }
}

}  // namespace

Sgd::Sgd(double lr, double momentum, double weight_decay) : lr_(lr), momentum_(momentum), weight_decay_(weight_decay) {
  if (!(lr > 0.0)) throw std::invalid_argument("sgd: learning rate must be positive");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw std::invalid_argument("sgd: momentum must lie in [0, 1)");
  if (!(weight_decay >= 0.0)) throw std::invalid_argument("sgd: weight decay must be non-negative");
}

void Sgd::set_lr(double lr) {
  if (!(lr > 0.0)) throw std::invalid_argument("sgd: learning rate must be positive");
  lr_ = lr;
}

void Sgd::step(Model& model, const Gradients& grads) {
  if (grads.weight.size() != model.layers.size() || grads.bias.size() != model.layers.size()) {
    throw ShapeError("sgd: gradients do not mirror the model");
  }
  weight_velocity_.resize(model.layers.size());
  bias_velocity_.resize(model.layers.size());
  const auto lr = static_cast<float>(lr_);
  const auto mu = static_cast<float>(momentum_);
  const auto wd = static_cast<float>(weight_decay_);
  for (std::size_t i = 0; i < model.layers.size(); ++i) {
    Layer& l = model.layers[i];
    if (!l.has_params()) continue;
    update(l.weight, grads.weight[i], weight_velocity_[i], lr, mu, wd);
    update(l.bias, grads.bias[i], bias_velocity_[i], lr, mu, wd);
  }
}

void sgd_update(Model& model, const Gradients& grads, Sgd& optimizer) { optimizer.step(model, grads); }

}  // namespace qfault
