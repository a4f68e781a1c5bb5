#ifndef TFNET_NN_OPS_HPP
#define TFNET_NN_OPS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "tfnet/error.hpp"
#include "tfnet/nn/param.hpp"
#include "tfnet/tensor.hpp"

// Forward/backward operator kernels. Every op caches what its adjoint
// needs during forward; backward consumes the cache, returns the input
// cotangent and accumulates parameter gradients. backward() is valid at
// most once per forward().
//
// Ops with non-smooth points (relu, maxpool) expose decision_hash() so a
// finite-difference harness can detect when a perturbation crossed a
// kink and skip that coordinate.

namespace tfnet::nn {

inline std::uint64_t mix_hash(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  return h;
}

// y = xW + b applied row-wise; x is T x Cin, W is Cin x Cout.
template <class Real>
class Linear {
 public:
  Linear(ParamBuffer<Real>& w, ParamBuffer<Real>& b) : w_(w), b_(b) {
    if (w_.value.rank() != 2 || b_.value.rank() != 1 ||
        b_.value.dim(0) != w_.value.dim(1))
      throw ShapeError("linear: bad parameter shapes");
  }

  long in_dim() const { return w_.value.dim(0); }
  long out_dim() const { return w_.value.dim(1); }

  Tensor<Real> forward(const Tensor<Real>& x) {
    if (x.rank() != 2 || x.dim(1) != in_dim())
      throw ShapeError("linear: input " + x.shape_str() + " does not match W " +
                       w_.value.shape_str());
    const long t_len = x.dim(0), ci = in_dim(), co = out_dim();
    Tensor<Real> y({t_len, co});
    for (long t = 0; t < t_len; ++t) {
      for (long o = 0; o < co; ++o) y.at(t, o) = b_.value.data[static_cast<size_t>(o)];
      for (long i = 0; i < ci; ++i) {
        const Real xv = x.at(t, i);
        const Real* wrow = w_.value.ptr() + i * co;
        Real* yrow = y.ptr() + t * co;
        for (long o = 0; o < co; ++o) yrow[o] += xv * wrow[o];
      }
    }
    x_ = x;
    has_cache_ = true;
    return y;
  }

  Tensor<Real> backward(const Tensor<Real>& dy) {
    if (!has_cache_) throw std::logic_error("linear: backward without forward");
    has_cache_ = false;
    const long t_len = x_.dim(0), ci = in_dim(), co = out_dim();
    require_shape(dy, {t_len, co}, "linear backward");
    Tensor<Real> dx({t_len, ci});
    for (long t = 0; t < t_len; ++t) {
      const Real* dyrow = dy.ptr() + t * co;
      for (long i = 0; i < ci; ++i) {
        const Real* wrow = w_.value.ptr() + i * co;
        Real* dwrow = w_.grad.ptr() + i * co;
        const Real xv = x_.at(t, i);
        Real acc = 0;
        for (long o = 0; o < co; ++o) {
          acc += dyrow[o] * wrow[o];
          dwrow[o] += xv * dyrow[o];
        }
        dx.at(t, i) = acc;
      }
      Real* db = b_.grad.ptr();
      for (long o = 0; o < co; ++o) db[o] += dyrow[o];
    }
    return dx;
  }

 private:
  ParamBuffer<Real>& w_;
  ParamBuffer<Real>& b_;
  Tensor<Real> x_;
  bool has_cache_ = false;
};

inline long conv_out_len(long t, long k, long s, long p, const char* who) {
  if (k < 1 || k % 2 == 0) throw ShapeError(std::string(who) + ": kernel must be odd");
  if (s < 1) throw ShapeError(std::string(who) + ": stride must be >= 1");
  if (t + 2 * p < k)
    throw ShapeError(std::string(who) + ": input length " + std::to_string(t) +
                     " too short, needs at least " + std::to_string(k - 2 * p));
  return (t + 2 * p - k) / s + 1;
}

// 1D convolution over time; x is T x Cin, W is Cout x Cin x k,
// zero padding p, stride s.
template <class Real>
class Conv1d {
 public:
  Conv1d(ParamBuffer<Real>& w, ParamBuffer<Real>& b, long stride, long pad)
      : w_(w), b_(b), s_(stride), p_(pad) {
    if (w_.value.rank() != 3 || b_.value.rank() != 1 ||
        b_.value.dim(0) != w_.value.dim(0))
      throw ShapeError("conv1d: bad parameter shapes");
  }

  long out_channels() const { return w_.value.dim(0); }
  long in_channels() const { return w_.value.dim(1); }
  long kernel() const { return w_.value.dim(2); }

  Tensor<Real> forward(const Tensor<Real>& x) {
    if (x.rank() != 2 || x.dim(1) != in_channels())
      throw ShapeError("conv1d: input " + x.shape_str() + " does not match W " +
                       w_.value.shape_str());
    const long t_in = x.dim(0), k = kernel(), ci = in_channels(), co = out_channels();
    const long t_out = conv_out_len(t_in, k, s_, p_, "conv1d");
    Tensor<Real> y({t_out, co});
    for (long to = 0; to < t_out; ++to) {
      const long t0 = to * s_ - p_;
      for (long o = 0; o < co; ++o) {
        Real acc = b_.value.data[static_cast<size_t>(o)];
        for (long j = 0; j < k; ++j) {
          const long t = t0 + j;
          if (t < 0 || t >= t_in) continue;
          const Real* xrow = x.ptr() + t * ci;
          const Real* wrow = w_.value.ptr() + (o * ci) * k + j;
          for (long i = 0; i < ci; ++i) acc += xrow[i] * wrow[i * k];
        }
        y.at(to, o) = acc;
      }
    }
    x_ = x;
    has_cache_ = true;
    return y;
  }

  Tensor<Real> backward(const Tensor<Real>& dy) {
    if (!has_cache_) throw std::logic_error("conv1d: backward without forward");
    has_cache_ = false;
    const long t_in = x_.dim(0), k = kernel(), ci = in_channels(), co = out_channels();
    const long t_out = (t_in + 2 * p_ - k) / s_ + 1;
    require_shape(dy, {t_out, co}, "conv1d backward");
    Tensor<Real> dx({t_in, ci});
    for (long to = 0; to < t_out; ++to) {
      const long t0 = to * s_ - p_;
      for (long o = 0; o < co; ++o) {
        const Real g = dy.at(to, o);
        b_.grad.data[static_cast<size_t>(o)] += g;
        for (long j = 0; j < k; ++j) {
          const long t = t0 + j;
          if (t < 0 || t >= t_in) continue;
          const Real* xrow = x_.ptr() + t * ci;
          Real* dxrow = dx.ptr() + t * ci;
          const Real* wrow = w_.value.ptr() + (o * ci) * k + j;
          Real* dwrow = w_.grad.ptr() + (o * ci) * k + j;
          for (long i = 0; i < ci; ++i) {
            dxrow[i] += g * wrow[i * k];
            dwrow[i * k] += g * xrow[i];
          }
        }
      }
    }
    return dx;
  }

 private:
  ParamBuffer<Real>& w_;
  ParamBuffer<Real>& b_;
  long s_, p_;
  Tensor<Real> x_;
  bool has_cache_ = false;
};

// 2D convolution; x is Cin x H x W, W is Cout x Cin x k x k.
template <class Real>
class Conv2d {
 public:
  Conv2d(ParamBuffer<Real>& w, ParamBuffer<Real>& b, long stride, long pad)
      : w_(w), b_(b), s_(stride), p_(pad) {
    if (w_.value.rank() != 4 || w_.value.dim(2) != w_.value.dim(3) ||
        b_.value.rank() != 1 || b_.value.dim(0) != w_.value.dim(0))
      throw ShapeError("conv2d: bad parameter shapes");
  }

  long out_channels() const { return w_.value.dim(0); }
  long in_channels() const { return w_.value.dim(1); }
  long kernel() const { return w_.value.dim(2); }

  Tensor<Real> forward(const Tensor<Real>& x) {
    if (x.rank() != 3 || x.dim(0) != in_channels())
      throw ShapeError("conv2d: input " + x.shape_str() + " does not match W " +
                       w_.value.shape_str());
    const long h_in = x.dim(1), w_in = x.dim(2), k = kernel();
    const long ci = in_channels(), co = out_channels();
    const long h_out = conv_out_len(h_in, k, s_, p_, "conv2d");
    const long w_out = conv_out_len(w_in, k, s_, p_, "conv2d");
    Tensor<Real> y({co, h_out, w_out});
    for (long o = 0; o < co; ++o) {
      const Real bias = b_.value.data[static_cast<size_t>(o)];
      for (long oy = 0; oy < h_out; ++oy) {
        const long y0 = oy * s_ - p_;
        for (long ox = 0; ox < w_out; ++ox) {
          const long x0 = ox * s_ - p_;
          Real acc = bias;
          for (long i = 0; i < ci; ++i) {
            for (long ky = 0; ky < k; ++ky) {
              const long yy = y0 + ky;
              if (yy < 0 || yy >= h_in) continue;
              const Real* xrow = x.ptr() + (i * h_in + yy) * w_in;
              const Real* wrow = w_.value.ptr() + ((o * ci + i) * k + ky) * k;
              for (long kx = 0; kx < k; ++kx) {
                const long xx = x0 + kx;
                if (xx < 0 || xx >= w_in) continue;
                acc += xrow[xx] * wrow[kx];
              }
            }
          }
          y.at(o, oy, ox) = acc;
        }
      }
    }
    x_ = x;
    has_cache_ = true;
    return y;
  }

  Tensor<Real> backward(const Tensor<Real>& dy) {
    if (!has_cache_) throw std::logic_error("conv2d: backward without forward");
    has_cache_ = false;
    const long h_in = x_.dim(1), w_in = x_.dim(2), k = kernel();
    const long ci = in_channels(), co = out_channels();
    const long h_out = (h_in + 2 * p_ - k) / s_ + 1;
    const long w_out = (w_in + 2 * p_ - k) / s_ + 1;
    require_shape(dy, {co, h_out, w_out}, "conv2d backward");
    Tensor<Real> dx({ci, h_in, w_in});
    for (long o = 0; o < co; ++o) {
      for (long oy = 0; oy < h_out; ++oy) {
        const long y0 = oy * s_ - p_;
        for (long ox = 0; ox < w_out; ++ox) {
          const long x0 = ox * s_ - p_;
          const Real g = dy.at(o, oy, ox);
          b_.grad.data[static_cast<size_t>(o)] += g;
          for (long i = 0; i < ci; ++i) {
            for (long ky = 0; ky < k; ++ky) {
              const long yy = y0 + ky;
              if (yy < 0 || yy >= h_in) continue;
              const Real* xrow = x_.ptr() + (i * h_in + yy) * w_in;
              Real* dxrow = dx.ptr() + (i * h_in + yy) * w_in;
              const Real* wrow = w_.value.ptr() + ((o * ci + i) * k + ky) * k;
              Real* dwrow = w_.grad.ptr() + ((o * ci + i) * k + ky) * k;
              for (long kx = 0; kx < k; ++kx) {
                const long xx = x0 + kx;
                if (xx < 0 || xx >= w_in) continue;
                dxrow[xx] += g * wrow[kx];
                dwrow[kx] += g * xrow[xx];
              }
            }
          }
        }
      }
    }
    return dx;
  }

 private:
  ParamBuffer<Real>& w_;
  ParamBuffer<Real>& b_;
  long s_, p_;
  Tensor<Real> x_;
  bool has_cache_ = false;
};

// Window max over time per channel, ties resolved to the lowest index so
// backward routing is deterministic.
template <class Real>
class MaxPool1d {
 public:
  explicit MaxPool1d(long k = 2, long s = 2) : k_(k), s_(s) {}

  Tensor<Real> forward(const Tensor<Real>& x) {
    if (x.rank() != 2) throw ShapeError("maxpool1d: input must be T x C");
    const long t_in = x.dim(0), c = x.dim(1);
    if (t_in < k_)
      throw ShapeError("maxpool1d: input length " + std::to_string(t_in) +
                       " shorter than window " + std::to_string(k_));
    const long t_out = (t_in - k_) / s_ + 1;
    Tensor<Real> y({t_out, c});
    argmax_.assign(static_cast<size_t>(t_out * c), 0);
    for (long to = 0; to < t_out; ++to) {
      for (long ch = 0; ch < c; ++ch) {
        long best = to * s_;
        Real bv = x.at(best, ch);
        for (long j = 1; j < k_; ++j) {
          const Real v = x.at(to * s_ + j, ch);
          if (v > bv) {
            bv = v;
            best = to * s_ + j;
          }
        }
        y.at(to, ch) = bv;
        argmax_[static_cast<size_t>(to * c + ch)] = best;
      }
    }
    t_in_ = t_in;
    has_cache_ = true;
    return y;
  }

  Tensor<Real> backward(const Tensor<Real>& dy) {
    if (!has_cache_) throw std::logic_error("maxpool1d: backward without forward");
    has_cache_ = false;
    const long t_out = dy.dim(0), c = dy.dim(1);
    Tensor<Real> dx({t_in_, c});
    for (long to = 0; to < t_out; ++to)
      for (long ch = 0; ch < c; ++ch)
        dx.at(argmax_[static_cast<size_t>(to * c + ch)], ch) += dy.at(to, ch);
    return dx;
  }

  std::uint64_t decision_hash() const {
    std::uint64_t h = 0;
    for (long a : argmax_) h = mix_hash(h, static_cast<std::uint64_t>(a));
    return h;
  }

 private:
  long k_, s_;
  long t_in_ = 0;
  std::vector<long> argmax_;
  bool has_cache_ = false;
};

template <class Real>
class Relu {
 public:
  Tensor<Real> forward(const Tensor<Real>& x) {
    Tensor<Real> y = x;
    mask_.assign(x.data.size(), 0);
    for (size_t i = 0; i < y.data.size(); ++i) {
      if (y.data[i] > Real(0)) {
        mask_[i] = 1;
      } else {
        y.data[i] = Real(0);
      }
    }
    has_cache_ = true;
    return y;
  }

  Tensor<Real> backward(const Tensor<Real>& dy) {
    if (!has_cache_) throw std::logic_error("relu: backward without forward");
    has_cache_ = false;
    Tensor<Real> dx = dy;
    for (size_t i = 0; i < dx.data.size(); ++i)
      if (!mask_[i]) dx.data[i] = Real(0);
    return dx;
  }

  std::uint64_t decision_hash() const {
    std::uint64_t h = 0, word = 0;
    int nbits = 0;
    for (size_t i = 0; i < mask_.size(); ++i) {
      word = (word << 1) | mask_[i];
      if (++nbits == 64) {
        h = mix_hash(h, word);
        word = 0;
        nbits = 0;
      }
    }
    if (nbits) h = mix_hash(h, word);
    return h;
  }

 private:
  std::vector<unsigned char> mask_;
  bool has_cache_ = false;
};

// Spatial mean, Cin x H x W -> Cin. Closes the per-frame CNN stack.
template <class Real>
class GlobalAvgPool2d {
 public:
  Tensor<Real> forward(const Tensor<Real>& x) {
    if (x.rank() != 3) throw ShapeError("gap2d: input must be C x H x W");
    const long c = x.dim(0), h = x.dim(1), w = x.dim(2);
    Tensor<Real> y({c});
    const Real inv = Real(1) / static_cast<Real>(h * w);
    for (long i = 0; i < c; ++i) {
      Real acc = 0;
      const Real* base = x.ptr() + i * h * w;
      for (long j = 0; j < h * w; ++j) acc += base[j];
      y.data[static_cast<size_t>(i)] = acc * inv;
    }
    c_ = c;
    h_ = h;
    w_ = w;
    has_cache_ = true;
    return y;
  }

  Tensor<Real> backward(const Tensor<Real>& dy) {
    if (!has_cache_) throw std::logic_error("gap2d: backward without forward");
    has_cache_ = false;
    Tensor<Real> dx({c_, h_, w_});
    const Real inv = Real(1) / static_cast<Real>(h_ * w_);
    for (long i = 0; i < c_; ++i) {
      const Real g = dy.data[static_cast<size_t>(i)] * inv;
      Real* base = dx.ptr() + i * h_ * w_;
      for (long j = 0; j < h_ * w_; ++j) base[j] = g;
    }
    return dx;
  }

 private:
  long c_ = 0, h_ = 0, w_ = 0;
  bool has_cache_ = false;
};

// Max-subtracted softmax over a contiguous row of n values.
template <class Real>
void softmax_row(const Real* x, Real* y, long n) {
  Real m = x[0];
  for (long i = 1; i < n; ++i) m = std::max(m, x[i]);
  Real z = 0;
  for (long i = 0; i < n; ++i) {
    y[i] = std::exp(x[i] - m);
    z += y[i];
  }
  const Real inv = Real(1) / z;
  for (long i = 0; i < n; ++i) y[i] *= inv;
}

template <class Real>
std::vector<Real> softmax(const std::vector<Real>& x) {
  for (Real v : x)
    if (!std::isfinite(static_cast<double>(v)))
      throw NumericError("softmax: non-finite input");
  std::vector<Real> y(x.size());
  softmax_row(x.data(), y.data(), static_cast<long>(x.size()));
  return y;
}

// log softmax of one row; safe for large magnitude logits.
template <class Real>
void log_softmax_row(const Real* x, Real* y, long n) {
  Real m = x[0];
  for (long i = 1; i < n; ++i) m = std::max(m, x[i]);
  Real z = 0;
  for (long i = 0; i < n; ++i) z += std::exp(x[i] - m);
  const Real lz = std::log(z) + m;
  for (long i = 0; i < n; ++i) y[i] = x[i] - lz;
}

// Row-wise log softmax of a T x N matrix.
template <class Real>
Tensor<Real> log_softmax(const Tensor<Real>& x) {
  if (x.rank() != 2) throw ShapeError("log_softmax: input must be 2-d");
  if (!x.all_finite()) throw NumericError("log_softmax: non-finite input");
  Tensor<Real> y(x.shape);
  for (long t = 0; t < x.dim(0); ++t)
    log_softmax_row(x.ptr() + t * x.dim(1), y.ptr() + t * x.dim(1), x.dim(1));
  return y;
}

}  // namespace tfnet::nn

#endif  // TFNET_NN_OPS_HPP
