#ifndef TFNET_NN_BILSTM_HPP
#define TFNET_NN_BILSTM_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include "tfnet/error.hpp"
#include "tfnet/nn/param.hpp"
#include "tfnet/tensor.hpp"

namespace tfnet::nn {

template <class Real>
inline Real sigmoid(Real x) {
  return Real(1) / (Real(1) + std::exp(-x));
}

// Single-direction LSTM. Parameter block rows are laid out in gate order
// (input, forget, candidate, output): w_ih is 4H x Cin, w_hh is 4H x H,
// b is 4H. Initial hidden and cell states are zero.
template <class Real>
class LstmCell {
 public:
  LstmCell(ParamBuffer<Real>& w_ih, ParamBuffer<Real>& w_hh, ParamBuffer<Real>& b)
      : w_ih_(w_ih), w_hh_(w_hh), b_(b) {
    if (w_ih_.value.rank() != 2 || w_hh_.value.rank() != 2 || b_.value.rank() != 1)
      throw ShapeError("lstm: bad parameter ranks");
    hidden_ = w_hh_.value.dim(1);
    if (w_ih_.value.dim(0) != 4 * hidden_ || w_hh_.value.dim(0) != 4 * hidden_ ||
        b_.value.dim(0) != 4 * hidden_)
      throw ShapeError("lstm: gate block rows must be 4*H");
  }

  long hidden() const { return hidden_; }
  long input_dim() const { return w_ih_.value.dim(1); }

  // x is T x Cin; returns T x H of hidden states.
  Tensor<Real> forward(const Tensor<Real>& x) {
    if (x.rank() != 2 || x.dim(1) != input_dim())
      throw ShapeError("lstm: input " + x.shape_str() + " does not match w_ih " +
                       w_ih_.value.shape_str());
    const long t_len = x.dim(0), h = hidden_, ci = input_dim();
    x_ = x;
    gates_ = Tensor<Real>({t_len, 4 * h});   // post-activation i,f,g,o
    cells_ = Tensor<Real>({t_len, h});       // c_t
    tanhc_ = Tensor<Real>({t_len, h});       // tanh(c_t)
    Tensor<Real> out({t_len, h});
    std::vector<Real> h_prev(static_cast<size_t>(h), Real(0));
    std::vector<Real> c_prev(static_cast<size_t>(h), Real(0));
    std::vector<Real> pre(static_cast<size_t>(4 * h));
    for (long t = 0; t < t_len; ++t) {
      for (long r = 0; r < 4 * h; ++r) {
        Real acc = b_.value.data[static_cast<size_t>(r)];
        const Real* wi = w_ih_.value.ptr() + r * ci;
        const Real* xr = x.ptr() + t * ci;
        for (long i = 0; i < ci; ++i) acc += wi[i] * xr[i];
        const Real* wh = w_hh_.value.ptr() + r * h;
        for (long i = 0; i < h; ++i) acc += wh[i] * h_prev[static_cast<size_t>(i)];
        pre[static_cast<size_t>(r)] = acc;
      }
      for (long j = 0; j < h; ++j) {
        const Real gi = sigmoid(pre[static_cast<size_t>(j)]);
        const Real gf = sigmoid(pre[static_cast<size_t>(h + j)]);
        const Real gg = std::tanh(pre[static_cast<size_t>(2 * h + j)]);
        const Real go = sigmoid(pre[static_cast<size_t>(3 * h + j)]);
        const Real c = gf * c_prev[static_cast<size_t>(j)] + gi * gg;
        const Real tc = std::tanh(c);
        gates_.at(t, j) = gi;
        gates_.at(t, h + j) = gf;
        gates_.at(t, 2 * h + j) = gg;
        gates_.at(t, 3 * h + j) = go;
        cells_.at(t, j) = c;
        tanhc_.at(t, j) = tc;
        out.at(t, j) = go * tc;
        h_prev[static_cast<size_t>(j)] = go * tc;
        c_prev[static_cast<size_t>(j)] = c;
      }
    }
    out_ = out;
    has_cache_ = true;
    return out;
  }

  // dy is T x H; returns T x Cin.
  Tensor<Real> backward(const Tensor<Real>& dy) {
    if (!has_cache_) throw std::logic_error("lstm: backward without forward");
    has_cache_ = false;
    const long t_len = x_.dim(0), h = hidden_, ci = input_dim();
    require_shape(dy, {t_len, h}, "lstm backward");
    Tensor<Real> dx({t_len, ci});
    std::vector<Real> dh_next(static_cast<size_t>(h), Real(0));
    std::vector<Real> dc_next(static_cast<size_t>(h), Real(0));
    std::vector<Real> da(static_cast<size_t>(4 * h));
    for (long t = t_len - 1; t >= 0; --t) {
      for (long j = 0; j < h; ++j) {
        const Real gi = gates_.at(t, j);
        const Real gf = gates_.at(t, h + j);
        const Real gg = gates_.at(t, 2 * h + j);
        const Real go = gates_.at(t, 3 * h + j);
        const Real tc = tanhc_.at(t, j);
        const Real c_prev = (t > 0) ? cells_.at(t - 1, j) : Real(0);
        const Real dh = dy.at(t, j) + dh_next[static_cast<size_t>(j)];
        const Real dgo = dh * tc;
        Real dc = dh * go * (Real(1) - tc * tc) + dc_next[static_cast<size_t>(j)];
        const Real dgi = dc * gg;
        const Real dgg = dc * gi;
        const Real dgf = dc * c_prev;
        dc_next[static_cast<size_t>(j)] = dc * gf;
        da[static_cast<size_t>(j)] = dgi * gi * (Real(1) - gi);
        da[static_cast<size_t>(h + j)] = dgf * gf * (Real(1) - gf);
        da[static_cast<size_t>(2 * h + j)] = dgg * (Real(1) - gg * gg);
        da[static_cast<size_t>(3 * h + j)] = dgo * go * (Real(1) - go);
      }
      std::fill(dh_next.begin(), dh_next.end(), Real(0));
      for (long r = 0; r < 4 * h; ++r) {
        const Real g = da[static_cast<size_t>(r)];
        b_.grad.data[static_cast<size_t>(r)] += g;
        const Real* xr = x_.ptr() + t * ci;
        Real* dwi = w_ih_.grad.ptr() + r * ci;
        const Real* wi = w_ih_.value.ptr() + r * ci;
        Real* dxr = dx.ptr() + t * ci;
        for (long i = 0; i < ci; ++i) {
          dwi[i] += g * xr[i];
          dxr[i] += g * wi[i];
        }
        Real* dwh = w_hh_.grad.ptr() + r * h;
        const Real* wh = w_hh_.value.ptr() + r * h;
        for (long i = 0; i < h; ++i) {
          if (t > 0) dwh[i] += g * out_.at(t - 1, i);
          dh_next[static_cast<size_t>(i)] += g * wh[i];
        }
      }
    }
    return dx;
  }

 private:
  ParamBuffer<Real>& w_ih_;
  ParamBuffer<Real>& w_hh_;
  ParamBuffer<Real>& b_;
  long hidden_ = 0;
  Tensor<Real> x_, gates_, cells_, tanhc_, out_;
  bool has_cache_ = false;
};

// Bidirectional wrapper: one cell runs the sequence forward, the other
// runs it reversed; per-step outputs are concatenated in original time
// order, giving T x 2H.
template <class Real>
class BiLstm {
 public:
  BiLstm(ParamBuffer<Real>& fw_ih, ParamBuffer<Real>& fw_hh, ParamBuffer<Real>& fw_b,
         ParamBuffer<Real>& bw_ih, ParamBuffer<Real>& bw_hh, ParamBuffer<Real>& bw_b)
      : fwd_(fw_ih, fw_hh, fw_b), bwd_(bw_ih, bw_hh, bw_b) {
    if (fwd_.hidden() != bwd_.hidden() || fwd_.input_dim() != bwd_.input_dim())
      throw ShapeError("bilstm: direction blocks disagree");
  }

  long hidden() const { return fwd_.hidden(); }
  long out_dim() const { return 2 * fwd_.hidden(); }

  Tensor<Real> forward(const Tensor<Real>& x) {
    const long t_len = x.dim(0), h = fwd_.hidden();
    Tensor<Real> xr = reversed(x);
    Tensor<Real> yf = fwd_.forward(x);
    Tensor<Real> yb = bwd_.forward(xr);
    Tensor<Real> y({t_len, 2 * h});
    for (long t = 0; t < t_len; ++t) {
      for (long j = 0; j < h; ++j) {
        y.at(t, j) = yf.at(t, j);
        y.at(t, h + j) = yb.at(t_len - 1 - t, j);
      }
    }
    return y;
  }

  Tensor<Real> backward(const Tensor<Real>& dy) {
    const long t_len = dy.dim(0), h = fwd_.hidden();
    if (dy.rank() != 2 || dy.dim(1) != 2 * h)
      throw ShapeError("bilstm backward: cotangent must be T x 2H");
    Tensor<Real> dyf({t_len, h});
    Tensor<Real> dyb({t_len, h});
    for (long t = 0; t < t_len; ++t) {
      for (long j = 0; j < h; ++j) {
        dyf.at(t, j) = dy.at(t, j);
        dyb.at(t_len - 1 - t, j) = dy.at(t, h + j);
      }
    }
    Tensor<Real> dxf = fwd_.backward(dyf);
    Tensor<Real> dxr = bwd_.backward(dyb);
    Tensor<Real> dx = dxf;
    const long ci = dxf.dim(1);
    for (long t = 0; t < t_len; ++t)
      for (long i = 0; i < ci; ++i) dx.at(t, i) += dxr.at(t_len - 1 - t, i);
    return dx;
  }

 private:
  static Tensor<Real> reversed(const Tensor<Real>& x) {
    Tensor<Real> r(x.shape);
    const long t_len = x.dim(0), c = x.dim(1);
    for (long t = 0; t < t_len; ++t)
      for (long i = 0; i < c; ++i) r.at(t, i) = x.at(t_len - 1 - t, i);
    return r;
  }

  LstmCell<Real> fwd_;
  LstmCell<Real> bwd_;
};

}  // namespace tfnet::nn

#endif  // TFNET_NN_BILSTM_HPP
