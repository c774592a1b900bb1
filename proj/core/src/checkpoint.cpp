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

#include "qfault/checkpoint.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>

#include "qfault/quant.hpp"

namespace qfault {

namespace {

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v) { le(v, 4); }
  void u64(std::uint64_t v) { le(v, 8); }
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    out_.insert(out_.end(), s.begin(), s.end());
  }
  void bytes(const std::vector<std::uint8_t>& b) {
    u64(b.size());
    out_.insert(out_.end(), b.begin(), b.end());
  }
  void floats(const Tensor& t) {
    u64(t.size());
    for (float v : t.data()) f32(v);
  }
  void params(const std::optional<QuantParams>& p) {
    u8(p ? 1 : 0);
    if (!p) return;
    i32(p->bits);
    f32(p->scale);
    i32(p->zero_point);
  }
  std::vector<std::uint8_t>& buffer() { return out_; }

 private:
  void le(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  Reader(const std::uint8_t* data, std::size_t size) : p_(data), end_(data + size) {}

  std::uint8_t u8() { return take(1)[0]; }
  std::uint32_t u32() { return static_cast<std::uint32_t>(le(4)); }
  std::uint64_t u64() { return le(8); }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  float f32() { return std::bit_cast<float>(u32()); }
  std::string str() {
    const std::uint32_t n = u32();
    const auto* b = take(n);
    return {reinterpret_cast<const char*>(b), n};
  }
  std::vector<std::uint8_t> bytes() {
    const std::uint64_t n = u64();
    const auto* b = take(n);
    return {b, b + n};
  }
  std::vector<float> floats() {
    const std::uint64_t n = u64();
    if (n > remaining() / 4) throw CheckpointError("checkpoint truncated");
    std::vector<float> v(n);
    for (auto& x : v) x = f32();
    return v;
  }
  std::optional<QuantParams> params() {
    if (u8() == 0) return std::nullopt;
    QuantParams p;
    p.bits = i32();
    p.scale = f32();
    p.zero_point = i32();
    try {
      p.validate();
    } catch (const std::exception& e) {
      throw CheckpointError(std::string("checkpoint holds invalid quantization params: ") + e.what());
    }
    return p;
  }
  std::size_t remaining() const { return static_cast<std::size_t>(end_ - p_); }

 private:
  const std::uint8_t* take(std::uint64_t n) {
    if (n > remaining()) throw CheckpointError("checkpoint truncated");
    const auto* b = p_;
    p_ += n;
    return b;
  }
  std::uint64_t le(int n) {
    const auto* b = take(static_cast<std::uint64_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
  }
  const std::uint8_t* p_;
  const std::uint8_t* end_;
};

std::uint32_t crc32_of(const std::uint8_t* data, std::size_t size) {
  uLong crc = crc32(0L, Z_NULL, 0);
  while (size > 0) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(size, 1u << 30));
    crc = crc32(crc, data, chunk);
    data += chunk;
    size -= chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

void write_model(Writer& w, const Model& m) {
  w.str(m.name);
  w.u32(static_cast<std::uint32_t>(m.input_shape.size()));
  for (auto d : m.input_shape) w.u64(d);
  w.u64(m.num_classes);
  w.i32(m.bits);
  w.i32(m.activation_bits);
  w.u8(m.frozen ? 1 : 0);
  w.u32(static_cast<std::uint32_t>(m.layers.size()));
  for (std::size_t i = 0; i < m.layers.size(); ++i) {
    const Layer& l = m.layers[i];
    w.u8(static_cast<std::uint8_t>(l.kind));
    for (auto v : {l.in_channels, l.out_channels, l.kernel, l.stride, l.padding, l.in_features, l.out_features}) {
      w.u64(v);
    }
    w.floats(l.weight);
    w.floats(l.bias);
    w.params(m.quant[i].weight);
    w.params(m.quant[i].activation);
  }
}

Model read_model(Reader& r) {
  Model m;
  m.name = r.str();
  const std::uint32_t rank = r.u32();
  if (rank > 8) throw CheckpointError("checkpoint: implausible input rank");
  for (std::uint32_t i = 0; i < rank; ++i) m.input_shape.push_back(r.u64());
  m.num_classes = r.u64();
  m.bits = r.i32();
  m.activation_bits = r.i32();
  m.frozen = r.u8() != 0;
  const std::uint32_t count = r.u32();
  if (count > 4096) throw CheckpointError("checkpoint: implausible layer count");
  for (std::uint32_t i = 0; i < count; ++i) {
    Layer l;
    const std::uint8_t kind = r.u8();
    if (kind > static_cast<std::uint8_t>(LayerKind::Flatten)) throw CheckpointError("checkpoint: unknown layer kind");
    l.kind = static_cast<LayerKind>(kind);
    for (std::size_t* f : {&l.in_channels, &l.out_channels, &l.kernel, &l.stride, &l.padding, &l.in_features,
                           &l.out_features}) {
      *f = r.u64();
    }
    Shape ws, bs;
    if (l.kind == LayerKind::Conv2d) {
      ws = {l.out_channels, l.in_channels, l.kernel, l.kernel};
      bs = {l.out_channels};
    } else if (l.kind == LayerKind::FullyConnected) {
      ws = {l.out_features, l.in_features};
      bs = {l.out_features};
    }
    auto wv = r.floats();
    auto bv = r.floats();
    try {
      l.weight = ws.empty() && wv.empty() ? Tensor() : Tensor(ws, std::move(wv));
      l.bias = bs.empty() && bv.empty() ? Tensor() : Tensor(bs, std::move(bv));
    } catch (const ShapeError& e) {
      throw CheckpointError(std::string("checkpoint: ") + e.what());
    }
    m.layers.push_back(std::move(l));
    LayerQuant q;
    q.weight = r.params();
    q.activation = r.params();
    m.quant.push_back(q);
  }
  try {
    m.validate();
  } catch (const std::exception& e) {
    throw CheckpointError(std::string("checkpoint: inconsistent model: ") + e.what());
  }
  return m;
}

}  // namespace

std::vector<std::uint8_t> code_image(const Model& model) {
  std::vector<std::uint8_t> image;
  if (!model.has_frozen_quant()) return image;
  for (std::size_t i : model.param_layers()) {
    const auto packed = pack(quantize(model.layers[i].weight, *model.quant[i].weight));
    image.insert(image.end(), packed.begin(), packed.end());
  }
  return image;
}

std::vector<std::uint8_t> serialize_checkpoint(const Model& model, const Metadata& meta) {
  model.validate();
  Writer payload;
  write_model(payload, model);
  payload.bytes(code_image(model));
  payload.u32(static_cast<std::uint32_t>(meta.size()));
  for (const auto& [k, v] : meta) {
    payload.str(k);
    payload.str(v);
  }
  const auto& body = payload.buffer();

  Writer file;
  for (char c : kCheckpointMagic) file.u8(static_cast<std::uint8_t>(c));
  file.u32(kCheckpointVersion);
  file.u64(body.size());
  file.u32(crc32_of(body.data(), body.size()));
  auto out = std::move(file.buffer());
  out.insert(out.end(), body.begin(), body.end());
  return out;
}

Checkpoint parse_checkpoint(const std::vector<std::uint8_t>& bytes) {
  Reader header(bytes.data(), bytes.size());
  if (bytes.size() < 24 || std::memcmp(bytes.data(), kCheckpointMagic, 8) != 0) {
    throw CheckpointError("not a qfault checkpoint (bad magic)");
  }
  for (int i = 0; i < 8; ++i) header.u8();
  const std::uint32_t version = header.u32();
  if (version != kCheckpointVersion) {
    throw CheckpointError("checkpoint version " + std::to_string(version) + " unsupported (expected " +
                          std::to_string(kCheckpointVersion) + ")");
  }
  const std::uint64_t size = header.u64();
  const std::uint32_t crc = header.u32();
  if (size != header.remaining()) throw CheckpointError("checkpoint truncated or has trailing bytes");
  const std::uint8_t* body = bytes.data() + 24;
  if (crc32_of(body, size) != crc) throw CheckpointError("checkpoint checksum mismatch");

  Reader r(body, size);
  Checkpoint ck;
  ck.model = read_model(r);
  ck.code_image = r.bytes();
  const std::uint32_t entries = r.u32();
  for (std::uint32_t i = 0; i < entries; ++i) {
    std::string k = r.str();
    ck.meta[k] = r.str();
  }
  if (r.remaining() != 0) throw CheckpointError("checkpoint payload has trailing bytes");
  if (ck.code_image != code_image(ck.model)) {
    throw CheckpointError("checkpoint code image does not match quantize(weights)");
  }
  return ck;
}

void save_checkpoint(const Model& model, const Metadata& meta, const std::filesystem::path& path) {
  const auto bytes = serialize_checkpoint(model, meta);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw CheckpointError("cannot open " + tmp.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw CheckpointError("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_checkpoint(bytes);
}

std::uint32_t model_checksum(const Model& model) {
  Writer w;
  write_model(w, model);
  return crc32_of(w.buffer().data(), w.buffer().size());
}

}  // namespace qfault
