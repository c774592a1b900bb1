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

#include <vector>

#include "qfault/model.hpp"
#include "qfault/network.hpp"

namespace qfault {

/// SGD with heavy-ball momentum and L2 weight decay folded into the gradient:
///   v <- momentum * v + (g + weight_decay * w);  w <- w - lr * v
/// Velocity buffers live in the optimizer and persist across steps.
class Sgd {
 public:
  Sgd(double lr, double momentum = 0.0, double weight_decay = 0.0);

  void step(Model& model, const Gradients& grads);

  double lr() const { return lr_; }
  void set_lr(double lr);
  double momentum() const { return momentum_; }
  double weight_decay() const { return weight_decay_; }

 private:
  double lr_;
  double momentum_;
  double weight_decay_;
  std::vector<Tensor> weight_velocity_;
  std::vector<Tensor> bias_velocity_;
};

/// Free-function form of Sgd::step; momentum state lives in `optimizer`.
void sgd_update(Model& model, const Gradients& grads, Sgd& optimizer);

}  // namespace qfault
