#ifndef TFNET_TRAIN_CHECKPOINT_HPP
#define TFNET_TRAIN_CHECKPOINT_HPP

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "tfnet/error.hpp"
#include "tfnet/nn/param.hpp"

namespace tfnet::train {

// Checkpoint layout, all integers and floats little-endian:
//   "TFNC" | u32 version | u32 param_count
//   per param: u32 name_len | name | u32 ndims | i64 dims... | f32 values...
// then optional tagged sections until EOF, each: 4-char tag | u64 len | payload
//   MODL  model config as key=value text
//   VOCB  u32 count, then per token u32 len | bytes (ids 1..l in order)
//   TRNS  trainer state: i64 epoch | i64 step | f64 best_dev_wer |
//         f64 beta1 | f64 beta2 | f64 eps | u32 rng_len | rng text |
//         per param f32 m values... then f32 v values...
// Values are stored as f32 regardless of training precision; the file is
// the canonical form and round-trips bit-exactly.

namespace io {

inline void put_u32(std::string& s, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
inline void put_u64(std::string& s, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
inline void put_i64(std::string& s, std::int64_t v) {
  put_u64(s, static_cast<std::uint64_t>(v));
}
inline void put_f32(std::string& s, float v) {
  std::uint32_t u;
  std::memcpy(&u, &v, 4);
  put_u32(s, u);
}
inline void put_f64(std::string& s, double v) {
  std::uint64_t u;
  std::memcpy(&u, &v, 8);
  put_u64(s, u);
}

class Reader {
 public:
  Reader(const char* data, size_t size) : p_(data), end_(data + size) {}
  size_t remaining() const { return static_cast<size_t>(end_ - p_); }

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(p_[i])) << (8 * i);
    p_ += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(p_[i])) << (8 * i);
    p_ += 8;
    return v;
  }
  std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
  float f32() {
    const std::uint32_t u = u32();
    float v;
    std::memcpy(&v, &u, 4);
    return v;
  }
  double f64() {
    const std::uint64_t u = u64();
    double v;
    std::memcpy(&v, &u, 8);
    return v;
  }
  std::string bytes(size_t n) {
    need(n);
    std::string s(p_, n);
    p_ += n;
    return s;
  }

 private:
  void need(size_t n) const {
    if (remaining() < n) throw ParseError("checkpoint: truncated file");
  }
  const char* p_;
  const char* end_;
};

}  // namespace io

struct CheckpointParam {
  std::string name;
  std::vector<long> shape;
  std::vector<float> values;
};

struct TrainStateBlob {
  std::int64_t epoch = 0;
  std::int64_t step = 0;
  double best_dev_wer = 0;
  double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  std::string rng;
  std::vector<std::vector<float>> m, v;  // per param, registration order
};

struct Checkpoint {
  std::vector<CheckpointParam> params;
  std::string model_kv;
  std::vector<std::string> vocab;
  bool has_train_state = false;
  TrainStateBlob train_state;

  std::string serialize() const {
    std::string s;
    s += "TFNC";
    io::put_u32(s, 1);
    io::put_u32(s, static_cast<std::uint32_t>(params.size()));
    for (const auto& p : params) {
      io::put_u32(s, static_cast<std::uint32_t>(p.name.size()));
      s += p.name;
      io::put_u32(s, static_cast<std::uint32_t>(p.shape.size()));
      long count = 1;
      for (long d : p.shape) {
        io::put_i64(s, d);
        count *= d;
      }
      if (static_cast<long>(p.values.size()) != count)
        throw ParseError("checkpoint: value count mismatch in '" + p.name + "'");
      for (float v : p.values) io::put_f32(s, v);
    }
    if (!model_kv.empty()) {
      s += "MODL";
      io::put_u64(s, model_kv.size());
      s += model_kv;
    }
    if (!vocab.empty()) {
      std::string body;
      io::put_u32(body, static_cast<std::uint32_t>(vocab.size()));
      for (const auto& tok : vocab) {
        io::put_u32(body, static_cast<std::uint32_t>(tok.size()));
        body += tok;
      }
      s += "VOCB";
      io::put_u64(s, body.size());
      s += body;
    }
    if (has_train_state) {
      std::string body;
      io::put_i64(body, train_state.epoch);
      io::put_i64(body, train_state.step);
      io::put_f64(body, train_state.best_dev_wer);
      io::put_f64(body, train_state.beta1);
      io::put_f64(body, train_state.beta2);
      io::put_f64(body, train_state.eps);
      io::put_u32(body, static_cast<std::uint32_t>(train_state.rng.size()));
      body += train_state.rng;
      for (const auto& mm : train_state.m)
        for (float v : mm) io::put_f32(body, v);
      for (const auto& vv : train_state.v)
        for (float v : vv) io::put_f32(body, v);
      s += "TRNS";
      io::put_u64(s, body.size());
      s += body;
    }
    return s;
  }

  void save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write checkpoint '" + path + "'");
    const std::string s = serialize();
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
    if (!out) throw IoError("short write to checkpoint '" + path + "'");
  }

  static Checkpoint deserialize(const std::string& data) {
    io::Reader r(data.data(), data.size());
    if (r.bytes(4) != "TFNC") throw ParseError("checkpoint: bad magic");
    const std::uint32_t version = r.u32();
    if (version != 1)
      throw ParseError("checkpoint: unsupported version " + std::to_string(version));
    Checkpoint ck;
    const std::uint32_t count = r.u32();
    for (std::uint32_t i = 0; i < count; ++i) {
      CheckpointParam p;
      p.name = r.bytes(r.u32());
      const std::uint32_t ndims = r.u32();
      long n = 1;
      for (std::uint32_t d = 0; d < ndims; ++d) {
        const long dim = static_cast<long>(r.i64());
        if (dim < 0) throw ParseError("checkpoint: negative dim in '" + p.name + "'");
        p.shape.push_back(dim);
        n *= dim;
      }
      p.values.resize(static_cast<size_t>(n));
      for (long j = 0; j < n; ++j) p.values[static_cast<size_t>(j)] = r.f32();
      ck.params.push_back(std::move(p));
    }
    while (r.remaining() > 0) {
      const std::string tag = r.bytes(4);
      const std::uint64_t len = r.u64();
      const std::string body = r.bytes(len);
      if (tag == "MODL") {
        ck.model_kv = body;
      } else if (tag == "VOCB") {
        io::Reader vr(body.data(), body.size());
        const std::uint32_t n = vr.u32();
        for (std::uint32_t i = 0; i < n; ++i) ck.vocab.push_back(vr.bytes(vr.u32()));
      } else if (tag == "TRNS") {
        io::Reader tr(body.data(), body.size());
        TrainStateBlob& ts = ck.train_state;
        ts.epoch = tr.i64();
        ts.step = tr.i64();
        ts.best_dev_wer = tr.f64();
        ts.beta1 = tr.f64();
        ts.beta2 = tr.f64();
        ts.eps = tr.f64();
        ts.rng = tr.bytes(tr.u32());
        for (int pass = 0; pass < 2; ++pass) {
          auto& dst = pass == 0 ? ts.m : ts.v;
          for (const auto& p : ck.params) {
            std::vector<float> vals(p.values.size());
            for (size_t j = 0; j < vals.size(); ++j) vals[j] = tr.f32();
            dst.push_back(std::move(vals));
          }
        }
        ck.has_train_state = true;
      }
      // unknown tags are skipped, they may come from newer writers
    }
    return ck;
  }

  static Checkpoint load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint '" + path + "'");
    std::string data((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    return deserialize(data);
  }
};

template <class Real>
void fill_params_from_store(Checkpoint& ck, nn::ParamStore<Real>& store) {
  ck.params.clear();
  for (size_t i = 0; i < store.count(); ++i) {
    const nn::ParamBuffer<Real>& p = store.at(i);
    CheckpointParam cp;
    cp.name = p.name;
    cp.shape = p.value.shape;
    cp.values.reserve(p.value.data.size());
    for (Real v : p.value.data) cp.values.push_back(static_cast<float>(v));
    ck.params.push_back(std::move(cp));
  }
}

template <class Real>
void apply_params_to_store(const Checkpoint& ck, nn::ParamStore<Real>& store) {
  if (ck.params.size() != store.count())
    throw ConfigError("checkpoint: holds " + std::to_string(ck.params.size()) +
                      " parameters, model expects " + std::to_string(store.count()));
  for (size_t i = 0; i < store.count(); ++i) {
    nn::ParamBuffer<Real>& p = store.at(i);
    const CheckpointParam& cp = ck.params[i];
    if (cp.name != p.name || cp.shape != p.value.shape)
      throw ConfigError("checkpoint: parameter " + std::to_string(i) +
                        " is '" + cp.name + "', model expects '" + p.name + "'");
    for (size_t j = 0; j < cp.values.size(); ++j)
      p.value.data[j] = static_cast<Real>(cp.values[j]);
  }
}

}  // namespace tfnet::train

#endif  // TFNET_TRAIN_CHECKPOINT_HPP
