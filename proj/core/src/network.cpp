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

#include "qfault/network.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "qfault/parallel.hpp"

namespace qfault {
namespace {

using MatRM = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapRM = Eigen::Map<MatRM>;
using CMapRM = Eigen::Map<const MatRM>;

std::atomic<std::uint64_t> g_forward_passes{0};
std::atomic<std::uint64_t> g_backward_passes{0};

struct ConvGeometry {
  std::size_t channels, height, width;
  std::size_t kernel, stride, padding;
  std::size_t out_h, out_w;

  std::size_t col_rows() const { return channels * kernel * kernel; }
  std::size_t positions() const { return out_h * out_w; }
};

ConvGeometry conv_geometry(const Layer& l, const Shape& in) {
  const Shape out = l.output_shape(in);
  return {in[0], in[1], in[2], l.kernel, l.stride, l.padding, out[1], out[2]};
}

// col is [C*k*k, OH*OW]; out-of-bounds (padding) taps are zero.
void im2col(const float* img, const ConvGeometry& g, float* col) {
  const std::size_t p = g.positions();
  for (std::size_t c = 0; c < g.channels; ++c) {
    for (std::size_t ky = 0; ky < g.kernel; ++ky) {
      for (std::size_t kx = 0; kx < g.kernel; ++kx) {
        float* row = col + ((c * g.kernel + ky) * g.kernel + kx) * p;
        for (std::size_t oy = 0; oy < g.out_h; ++oy) {
          const auto iy = static_cast<std::ptrdiff_t>(oy * g.stride + ky) - static_cast<std::ptrdiff_t>(g.padding);
          float* dst = row + oy * g.out_w;
          if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(g.height)) {
            std::fill(dst, dst + g.out_w, 0.0f);
            continue;
          }
          const float* src = img + (c * g.height + static_cast<std::size_t>(iy)) * g.width;
          for (std::size_t ox = 0; ox < g.out_w; ++ox) {
            const auto ix = static_cast<std::ptrdiff_t>(ox * g.stride + kx) - static_cast<std::ptrdiff_t>(g.padding);
            dst[ox] = (ix < 0 || ix >= static_cast<std::ptrdiff_t>(g.width)) ? 0.0f : src[ix];
          }
        }
      }
    }
  }
}

void col2im_add(const float* col, const ConvGeometry& g, float* img) {
  const std::size_t p = g.positions();
  for (std::size_t c = 0; c < g.channels; ++c) {
    for (std::size_t ky = 0; ky < g.kernel; ++ky) {
      for (std::size_t kx = 0; kx < g.kernel; ++kx) {
        const float* row = col + ((c * g.kernel + ky) * g.kernel + kx) * p;
        for (std::size_t oy = 0; oy < g.out_h; ++oy) {
          const auto iy = static_cast<std::ptrdiff_t>(oy * g.stride + ky) - static_cast<std::ptrdiff_t>(g.padding);
          if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(g.height)) continue;
          float* dst = img + (c * g.height + static_cast<std::size_t>(iy)) * g.width;
          for (std::size_t ox = 0; ox < g.out_w; ++ox) {
            const auto ix = static_cast<std::ptrdiff_t>(ox * g.stride + kx) - static_cast<std::ptrdiff_t>(g.padding);
            if (ix >= 0 && ix < static_cast<std::ptrdiff_t>(g.width)) dst[ix] += row[oy * g.out_w + ox];
          }
        }
      }
    }
  }
}

Tensor conv_forward(const Tensor& x, const Tensor& w, const Tensor& b, const ConvGeometry& g) {
  const std::size_t n = x.dim(0);
  const std::size_t k_out = w.dim(0);
  const std::size_t rows = g.col_rows(), p = g.positions();
  Tensor y({n, k_out, g.out_h, g.out_w});
  MatRM col(rows, p);
  const CMapRM wm(w.raw(), static_cast<Eigen::Index>(k_out), static_cast<Eigen::Index>(rows));
  const std::size_t in_stride = g.channels * g.height * g.width;
  for (std::size_t s = 0; s < n; ++s) {
    im2col(x.raw() + s * in_stride, g, col.data());
    MapRM ym(y.raw() + s * k_out * p, static_cast<Eigen::Index>(k_out), static_cast<Eigen::Index>(p));
    ym.noalias() = wm * col;
    for (std::size_t k = 0; k < k_out; ++k) ym.row(static_cast<Eigen::Index>(k)).array() += b[k];
  }
  return y;
}

void conv_backward(const Tensor& x, const Tensor& w, const Tensor& dy, const ConvGeometry& g, Tensor& dw, Tensor& db,
                   Tensor* dx) {
  const std::size_t n = x.dim(0);
  const std::size_t k_out = w.dim(0);
  const auto rows = static_cast<Eigen::Index>(g.col_rows());
  const auto p = static_cast<Eigen::Index>(g.positions());
  const auto ko = static_cast<Eigen::Index>(k_out);
  MatRM col(rows, p);
  MatRM dcol(rows, p);
  const CMapRM wm(w.raw(), ko, rows);
  MapRM dwm(dw.raw(), ko, rows);
  const std::size_t in_stride = g.channels * g.height * g.width;
  for (std::size_t s = 0; s < n; ++s) {
    im2col(x.raw() + s * in_stride, g, col.data());
    const CMapRM dym(dy.raw() + s * k_out * static_cast<std::size_t>(p), ko, p);
    dwm.noalias() += dym * col.transpose();
    for (std::size_t k = 0; k < k_out; ++k) db[k] += dym.row(static_cast<Eigen::Index>(k)).sum();
    if (dx != nullptr) {
      dcol.noalias() = wm.transpose() * dym;
      col2im_add(dcol.data(), g, dx->raw() + s * in_stride);
    }
  }
}

Tensor fc_forward(const Tensor& x, const Tensor& w, const Tensor& b) {
  const auto n = static_cast<Eigen::Index>(x.dim(0));
  const auto out = static_cast<Eigen::Index>(w.dim(0));
  const auto in = static_cast<Eigen::Index>(w.dim(1));
  Tensor y({x.dim(0), w.dim(0)});
  const CMapRM xm(x.raw(), n, in);
  const CMapRM wm(w.raw(), out, in);
  MapRM ym(y.raw(), n, out);
  ym.noalias() = xm * wm.transpose();
  const Eigen::Map<const Eigen::RowVectorXf> bv(b.raw(), out);
  ym.rowwise() += bv;
  return y;
}

void fc_backward(const Tensor& x, const Tensor& w, const Tensor& dy, Tensor& dw, Tensor& db, Tensor* dx) {
  const auto n = static_cast<Eigen::Index>(x.dim(0));
  const auto out = static_cast<Eigen::Index>(w.dim(0));
  const auto in = static_cast<Eigen::Index>(w.dim(1));
  const CMapRM xm(x.raw(), n, in);
  const CMapRM wm(w.raw(), out, in);
  const CMapRM dym(dy.raw(), n, out);
  MapRM dwm(dw.raw(), out, in);
  dwm.noalias() += dym.transpose() * xm;
  Eigen::Map<Eigen::RowVectorXf> dbv(db.raw(), out);
  dbv += dym.colwise().sum();
  if (dx != nullptr) {
    MapRM dxm(dx->raw(), n, in);
    dxm.noalias() = dym * wm;
  }
}

Tensor maxpool_forward(const Tensor& x, std::vector<std::uint32_t>* argmax) {
  const std::size_t n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
  const std::size_t oh = h / 2, ow = w / 2;
  Tensor y({n, c, oh, ow});
  if (argmax) argmax->resize(y.size());
  std::size_t o = 0;
  for (std::size_t plane = 0; plane < n * c; ++plane) {
    const float* src = x.raw() + plane * h * w;
    for (std::size_t oy = 0; oy < oh; ++oy) {
      for (std::size_t ox = 0; ox < ow; ++ox, ++o) {
        std::size_t best = (2 * oy) * w + 2 * ox;
        for (std::size_t dy = 0; dy < 2; ++dy) {
          for (std::size_t dx = 0; dx < 2; ++dx) {
            const std::size_t idx = (2 * oy + dy) * w + 2 * ox + dx;
            if (src[idx] > src[best]) best = idx;
          }
        }
        y[o] = src[best];
        if (argmax) (*argmax)[o] = static_cast<std::uint32_t>(plane * h * w + best);
      }
    }
  }
  return y;
}

Tensor avgpool_forward(const Tensor& x, std::size_t window) {
  const std::size_t n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
  const std::size_t oh = h / window, ow = w / window;
  Tensor y({n, c, oh, ow});
  const float inv = 1.0f / static_cast<float>(window * window);
  std::size_t o = 0;
  for (std::size_t plane = 0; plane < n * c; ++plane) {
    const float* src = x.raw() + plane * h * w;
    for (std::size_t oy = 0; oy < oh; ++oy) {
      for (std::size_t ox = 0; ox < ow; ++ox, ++o) {
        float acc = 0.0f;
        for (std::size_t dy = 0; dy < window; ++dy) {
          for (std::size_t dx = 0; dx < window; ++dx) acc += src[(oy * window + dy) * w + ox * window + dx];
        }
        y[o] = acc * inv;
      }
    }
  }
  return y;
}

Tensor avgpool_backward(const Tensor& dy, const Shape& in_shape, std::size_t window) {
  Tensor dx(in_shape);
  const std::size_t h = in_shape[2], w = in_shape[3];
  const std::size_t oh = dy.dim(2), ow = dy.dim(3);
  const float inv = 1.0f / static_cast<float>(window * window);
  std::size_t o = 0;
  for (std::size_t plane = 0; plane < in_shape[0] * in_shape[1]; ++plane) {
    float* dst = dx.raw() + plane * h * w;
    for (std::size_t oy = 0; oy < oh; ++oy) {
      for (std::size_t ox = 0; ox < ow; ++ox, ++o) {
        const float g = dy[o] * inv;
        for (std::size_t ddy = 0; ddy < window; ++ddy) {
          for (std::size_t ddx = 0; ddx < window; ++ddx) dst[(oy * window + ddy) * w + ox * window + ddx] += g;
        }
      }
    }
  }
  return dx;
}

Shape batched(std::size_t n, const Shape& sample) {
  Shape s{n};
  s.insert(s.end(), sample.begin(), sample.end());
  return s;
}

}  // namespace

Gradients Gradients::zeros_like(const Model& model) {
  Gradients g;
  g.weight.resize(model.layers.size());
  g.bias.resize(model.layers.size());
  g.weight_quantized.resize(model.layers.size());
  for (std::size_t i = 0; i < model.layers.size(); ++i) {
    const auto& l = model.layers[i];
    if (!l.has_params()) continue;
    g.weight[i] = Tensor(l.weight.shape());
    g.bias[i] = Tensor(l.bias.shape());
    g.weight_quantized[i] = Tensor(l.weight.shape());
  }
  return g;
}

double Gradients::weight_quantized_norm() const {
  double acc = 0.0;
  for (const auto& t : weight_quantized) {
    for (float v : t.data()) acc += static_cast<double>(v) * v;
  }
  return std::sqrt(acc);
}

bool Gradients::all_zero() const {
  auto zero = [](const std::vector<Tensor>& ts) {
    return std::all_of(ts.begin(), ts.end(), [](const Tensor& t) {
      return std::all_of(t.data().begin(), t.data().end(), [](float v) { return v == 0.0f; });
    });
  };
  return zero(weight) && zero(bias) && zero(weight_quantized);
}

PassCounts pass_counts() { return {g_forward_passes.load(), g_backward_passes.load()}; }

void reset_pass_counts() {
  g_forward_passes = 0;
  g_backward_passes = 0;
}

ForwardTape forward(const Model& model, const Tensor& batch, const ForwardOptions& opt) {
  if (batch.rank() != model.input_shape.size() + 1 ||
      !std::equal(model.input_shape.begin(), model.input_shape.end(), batch.shape().begin() + 1)) {
    throw ShapeError("forward: batch " + shape_to_string(batch.shape()) + " does not match model input " +
                     shape_to_string(model.input_shape));
  }
  if (opt.quantized && opt.mode == Mode::Eval && !model.has_frozen_quant()) {
    throw std::logic_error("forward: quantized eval requires frozen QuantParams on model '" + model.name + "'");
  }
  if (opt.weight_offsets != nullptr && opt.weight_offsets->size() != model.layers.size()) {
    throw ShapeError("forward: weight offsets must have one entry per layer");
  }
  ++g_forward_passes;

  const std::size_t n = batch.dim(0);
  ForwardTape tape;
  tape.mode = opt.mode;
  tape.quantized = opt.quantized;
  tape.record = opt.record;
  tape.batch_size = n;
  tape.layers.resize(model.layers.size());

  const bool full = opt.record == Record::Full;
  const bool metrics = opt.record != Record::Logits;
  Tensor x = batch;
  Shape sample = model.input_shape;

  for (std::size_t i = 0; i < model.layers.size(); ++i) {
    const Layer& l = model.layers[i];
    LayerRecord& rec = tape.layers[i];
    Tensor y;
    switch (l.kind) {
      case LayerKind::Conv2d:
      case LayerKind::FullyConnected: {
        const Tensor* w = &l.weight;
        Tensor effective;
        const Tensor* offset = nullptr;
        if (opt.weight_offsets != nullptr && !(*opt.weight_offsets)[i].empty()) {
          offset = &(*opt.weight_offsets)[i];
          if (offset->shape() != l.weight.shape()) throw ShapeError("forward: weight offset shape mismatch");
        }
        if (opt.quantized) {
          const QuantParams params = opt.mode == Mode::Train ? calibrate(l.weight, model.bits) : *model.quant[i].weight;
          effective = l.weight;
          if (full) rec.mask = Tensor(l.weight.shape());
          fake_quant_inplace(effective.data(), params, full ? rec.mask.data() : std::span<float>{});
          rec.weight_params = params;
        } else if (offset != nullptr || full) {
          effective = l.weight;
        }
        if (offset != nullptr) {
          for (std::size_t k = 0; k < effective.size(); ++k) effective[k] += (*offset)[k];
        }
        if (!effective.empty()) w = &effective;
        if (l.kind == LayerKind::Conv2d) {
          y = conv_forward(x, *w, l.bias, conv_geometry(l, sample));
        } else {
          y = fc_forward(x, *w, l.bias);
        }
        if (metrics) rec.input = std::move(x);
        if (full) rec.weight = effective.empty() ? l.weight : std::move(effective);
        break;
      }
      case LayerKind::Relu: {
        y = x;
        for (float& v : y.data()) v = v > 0.0f ? v : 0.0f;
        if (opt.quantized) {
          const QuantParams params =
              opt.mode == Mode::Train ? calibrate(y, model.activation_bits) : *model.quant[i].activation;
          rec.activation_params = params;
          if (full) {
            rec.mask = Tensor(y.shape());
            fake_quant_inplace(y.data(), params, rec.mask.data());
            for (std::size_t k = 0; k < x.size(); ++k) {
              if (!(x[k] > 0.0f)) rec.mask[k] = 0.0f;
            }
          } else {
            fake_quant_inplace(y.data(), params);
          }
        } else if (full) {
          rec.mask = Tensor(y.shape());
          for (std::size_t k = 0; k < x.size(); ++k) rec.mask[k] = x[k] > 0.0f ? 1.0f : 0.0f;
        }
        if (metrics) rec.output = y;
        break;
      }
      case LayerKind::MaxPool2x2:
        y = maxpool_forward(x, full ? &rec.argmax : nullptr);
        if (full) rec.input = Tensor(x.shape());  // shape only for backward
        break;
      case LayerKind::AvgPool:
        y = avgpool_forward(x, l.kernel);
        if (full) rec.input = Tensor(x.shape());
        break;
      case LayerKind::Flatten:
        y = x.reshaped({n, shape_size(sample)});
        break;
    }
    sample = l.output_shape(sample);
    if (!y.all_finite()) {
      throw NonFiniteError("forward: non-finite output at layer " + std::to_string(i) + " (" + to_string(l.kind) + ")");
    }
    x = std::move(y);
  }
  tape.logits = std::move(x);
  return tape;
}

Gradients backward(const Model& model, ForwardTape& tape, const Tensor& logits_grad,
                   const std::vector<Tensor>* output_grads) {
  if (tape.consumed) throw std::logic_error("backward: tape already consumed");
  if (tape.record != Record::Full) throw std::logic_error("backward: tape was not recorded with Record::Full");
  if (tape.layers.size() != model.layers.size()) throw ShapeError("backward: tape does not match model");
  if (logits_grad.shape() != tape.logits.shape()) {
    throw ShapeError("backward: loss gradient " + shape_to_string(logits_grad.shape()) + " vs logits " +
                     shape_to_string(tape.logits.shape()));
  }
  if (output_grads != nullptr && output_grads->size() != model.layers.size()) {
    throw ShapeError("backward: output gradients must have one entry per layer");
  }
  tape.consumed = true;
  ++g_backward_passes;

  const std::size_t n = tape.batch_size;
  const auto shapes = model.layer_shapes();
  Gradients grads = Gradients::zeros_like(model);
  Tensor dy = logits_grad;

  for (std::size_t i = model.layers.size(); i-- > 0;) {
    const Layer& l = model.layers[i];
    LayerRecord& rec = tape.layers[i];
    if (output_grads != nullptr && !(*output_grads)[i].empty()) {
      const Tensor& extra = (*output_grads)[i];
      if (extra.size() != dy.size()) throw ShapeError("backward: output gradient shape mismatch at layer " + std::to_string(i));
      for (std::size_t k = 0; k < dy.size(); ++k) dy[k] += extra[k];
    }
    const bool need_dx = i > 0;
    Tensor dx;
    switch (l.kind) {
      case LayerKind::Conv2d:
      case LayerKind::FullyConnected: {
        if (need_dx) dx = Tensor(rec.input.shape());
        Tensor& dwq = grads.weight_quantized[i];
        if (l.kind == LayerKind::Conv2d) {
          conv_backward(rec.input, rec.weight, dy, conv_geometry(l, shapes[i]), dwq, grads.bias[i],
                        need_dx ? &dx : nullptr);
        } else {
          fc_backward(rec.input, rec.weight, dy, dwq, grads.bias[i], need_dx ? &dx : nullptr);
        }
        Tensor& dw = grads.weight[i];
        if (tape.quantized) {
          for (std::size_t k = 0; k < dw.size(); ++k) dw[k] = dwq[k] * rec.mask[k];
        } else {
          dw = dwq;
        }
        break;
      }
      case LayerKind::Relu:
        dx = std::move(dy);
        for (std::size_t k = 0; k < dx.size(); ++k) dx[k] *= rec.mask[k];
        break;
      case LayerKind::MaxPool2x2:
        dx = Tensor(rec.input.shape());
        for (std::size_t k = 0; k < dy.size(); ++k) dx[rec.argmax[k]] += dy[k];
        break;
      case LayerKind::AvgPool:
        dx = avgpool_backward(dy, rec.input.shape(), l.kernel);
        break;
      case LayerKind::Flatten:
        dx = dy.reshaped(batched(n, shapes[i]));
        break;
    }
    rec = LayerRecord{};
    dy = std::move(dx);
  }
  for (std::size_t i = 0; i < model.layers.size(); ++i) {
    if (!model.layers[i].has_params()) continue;
    grads.weight[i].require_finite("weight gradient of layer " + std::to_string(i));
    grads.bias[i].require_finite("bias gradient of layer " + std::to_string(i));
  }
  return grads;
}

LossResult softmax_cross_entropy(const Tensor& logits, std::span<const std::uint8_t> labels) {
  if (logits.rank() != 2 || logits.dim(0) != labels.size()) {
    throw ShapeError("softmax_cross_entropy: logits " + shape_to_string(logits.shape()) + " vs " +
                     std::to_string(labels.size()) + " labels");
  }
  const std::size_t n = logits.dim(0), c = logits.dim(1);
  LossResult out{0.0, Tensor(logits.shape())};
  const float inv_n = 1.0f / static_cast<float>(n);
  for (std::size_t s = 0; s < n; ++s) {
    if (labels[s] >= c) throw std::out_of_range("softmax_cross_entropy: label exceeds class count");
    const float* z = logits.raw() + s * c;
    float* g = out.grad.raw() + s * c;
    const float zmax = *std::max_element(z, z + c);
    double denom = 0.0;
    for (std::size_t k = 0; k < c; ++k) {
      g[k] = std::exp(z[k] - zmax);
      denom += g[k];
    }
    const auto inv = static_cast<float>(1.0 / denom);
    for (std::size_t k = 0; k < c; ++k) g[k] *= inv;
    out.loss += -(static_cast<double>(z[labels[s]] - zmax) - std::log(denom));
    g[labels[s]] -= 1.0f;
    for (std::size_t k = 0; k < c; ++k) g[k] *= inv_n;
  }
  out.loss /= static_cast<double>(n);
  if (!std::isfinite(out.loss)) throw NonFiniteError("softmax_cross_entropy: non-finite loss");
  return out;
}

std::vector<std::size_t> argmax_rows(const Tensor& logits) {
  const std::size_t n = logits.dim(0), c = logits.dim(1);
  std::vector<std::size_t> out(n);
  for (std::size_t s = 0; s < n; ++s) {
    const float* z = logits.raw() + s * c;
    out[s] = static_cast<std::size_t>(std::max_element(z, z + c) - z);
  }
  return out;
}

namespace {

template <typename PerChunk>
void for_each_chunk(const Dataset& data, std::size_t batch_size, PerChunk&& fn) {
  if (data.empty()) throw std::invalid_argument("evaluation on an empty dataset");
  batch_size = std::max<std::size_t>(batch_size, 1);
  const std::size_t chunks = (data.size() + batch_size - 1) / batch_size;
  parallel_for(chunks, [&](std::size_t c) {
    const std::size_t begin = c * batch_size;
    fn(c, begin, std::min(begin + batch_size, data.size()));
  });
}

}  // namespace

double accuracy(const Model& model, const Dataset& data, bool quantized, std::size_t batch_size) {
  const std::size_t chunks = (data.size() + std::max<std::size_t>(batch_size, 1) - 1) / std::max<std::size_t>(batch_size, 1);
  std::vector<std::size_t> correct(chunks, 0);
  for_each_chunk(data, batch_size, [&](std::size_t c, std::size_t begin, std::size_t end) {
    const auto tape = forward(model, data.batch(begin, end), {Mode::Eval, quantized, Record::Logits, nullptr});
    const auto pred = argmax_rows(tape.logits);
    for (std::size_t s = 0; s < pred.size(); ++s) correct[c] += pred[s] == data.labels[begin + s] ? 1 : 0;
  });
  std::size_t total = 0;
  for (auto v : correct) total += v;
  return static_cast<double>(total) / static_cast<double>(data.size());
}

double evaluate_loss(const Model& model, const Dataset& data, bool quantized, std::size_t batch_size) {
  const std::size_t chunks = (data.size() + std::max<std::size_t>(batch_size, 1) - 1) / std::max<std::size_t>(batch_size, 1);
  std::vector<double> sums(chunks, 0.0);
  for_each_chunk(data, batch_size, [&](std::size_t c, std::size_t begin, std::size_t end) {
    const auto tape = forward(model, data.batch(begin, end), {Mode::Eval, quantized, Record::Logits, nullptr});
    const auto loss = softmax_cross_entropy(tape.logits, std::span(data.labels).subspan(begin, end - begin));
    sums[c] = loss.loss * static_cast<double>(end - begin);
  });
  double total = 0.0;
  for (double v : sums) total += v;
  return total / static_cast<double>(data.size());
}

void freeze_quantization(Model& model, const Dataset& calibration, std::size_t samples) {
  if (calibration.empty()) throw std::invalid_argument("freeze_quantization: empty calibration set");
  const std::size_t count = std::min(samples, calibration.size());
  const auto tape = forward(model, calibration.batch(0, count), {Mode::Train, true, Record::Metrics, nullptr});
  for (std::size_t i = 0; i < model.layers.size(); ++i) {
    model.quant[i] = LayerQuant{tape.layers[i].weight_params, tape.layers[i].activation_params};
  }
  model.frozen = true;
}

}  // namespace qfault
