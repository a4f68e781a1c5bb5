#ifndef TFNET_MODEL_TFNET_HPP
#define TFNET_MODEL_TFNET_HPP

#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tfnet/error.hpp"
#include "tfnet/model/config.hpp"
#include "tfnet/nn/bilstm.hpp"
#include "tfnet/nn/ops.hpp"
#include "tfnet/nn/param.hpp"
#include "tfnet/rng.hpp"
#include "tfnet/tensor.hpp"

namespace tfnet::model {

// Per-channel magnitude spectrum along time: X[k] = sum_t x[t] e^{-i2pi kt/T},
// unnormalized, output |X[k]| with length T preserved. Phase is discarded;
// the adjoint projects the cotangent back through the cached real and
// imaginary parts.
template <class Real>
class DftMagnitude {
 public:
  Tensor<Real> forward(const Tensor<Real>& x) {
    if (x.rank() != 2) throw ShapeError("dft: input must be T x C");
    const long t_len = x.dim(0), c = x.dim(1);
    re_ = Tensor<double>({t_len, c});
    im_ = Tensor<double>({t_len, c});
    Tensor<Real> mag({t_len, c});
    for (long k = 0; k < t_len; ++k) {
      for (long ch = 0; ch < c; ++ch) {
        double re = 0, im = 0;
        for (long t = 0; t < t_len; ++t) {
          const double a = 2.0 * M_PI * static_cast<double>(k) *
                           static_cast<double>(t) / static_cast<double>(t_len);
          const double v = static_cast<double>(x.at(t, ch));
          re += v * std::cos(a);
          im -= v * std::sin(a);
        }
        re_.at(k, ch) = re;
        im_.at(k, ch) = im;
        mag.at(k, ch) = static_cast<Real>(std::sqrt(re * re + im * im));
      }
    }
    has_cache_ = true;
    return mag;
  }

  Tensor<Real> backward(const Tensor<Real>& dmag) {
    if (!has_cache_) throw std::logic_error("dft: backward without forward");
    has_cache_ = false;
    const long t_len = dmag.dim(0), c = dmag.dim(1);
    require_shape(dmag, {t_len, c}, "dft backward");
    Tensor<Real> dx({t_len, c});
    for (long t = 0; t < t_len; ++t) {
      for (long ch = 0; ch < c; ++ch) {
        double acc = 0;
        for (long k = 0; k < t_len; ++k) {
          const double re = re_.at(k, ch), im = im_.at(k, ch);
          const double m = std::sqrt(re * re + im * im);
          if (m == 0.0) continue;  // subgradient at the origin
          const double a = 2.0 * M_PI * static_cast<double>(k) *
                           static_cast<double>(t) / static_cast<double>(t_len);
          acc += static_cast<double>(dmag.at(k, ch)) *
                 (re * std::cos(a) - im * std::sin(a)) / m;
        }
        dx.at(t, ch) = static_cast<Real>(acc);
      }
    }
    return dx;
  }

 private:
  Tensor<double> re_, im_;
  bool has_cache_ = false;
};

// Time-frequency CSLR model: per-frame CNN features, a temporal and a
// spectral sequence branch (conv1d/relu/maxpool twice, then BiLSTM),
// elementwise-sum fusion and a shared linear classifier over l+1
// classes. Optional per-branch auxiliary classifiers feed the alignment
// losses during training.
template <class Real>
class TFNetModel {
 public:
  struct Forward {
    Tensor<Real> frame_features;  // T x C'
    Tensor<Real> spectral;        // T x C'
    Tensor<Real> temporal_feat;   // T' x C''
    Tensor<Real> freq_feat;       // T' x C''
    Tensor<Real> logits;          // T' x (l+1)
    Tensor<Real> aux_logits_t;
    Tensor<Real> aux_logits_f;
  };

  explicit TFNetModel(const ModelConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
    active_temporal_ = cfg_.temporal_branch;
    active_frequency_ = cfg_.frequency_branch;
    long cin = cfg_.input_channels;
    for (size_t i = 0; i < cfg_.frame_channels.size(); ++i) {
      const long cout = cfg_.frame_channels[i];
      const std::string p = "frame." + std::to_string(i);
      frame_w_.push_back(&params_.add(p + ".w", {cout, cin, 3, 3}));
      frame_b_.push_back(&params_.add(p + ".b", {cout}));
      cin = cout;
    }
    if (cfg_.temporal_branch) tbr_ = make_branch("temporal");
    if (cfg_.frequency_branch) fbr_ = make_branch("frequency");
    cls_w_ = &params_.add("classifier.w", {cfg_.branch_feature_dim(), cfg_.num_classes()});
    cls_b_ = &params_.add("classifier.b", {cfg_.num_classes()});
    if (cfg_.aux_classifier) {
      if (cfg_.temporal_branch) {
        aux_t_w_ = &params_.add("aux_t.w", {cfg_.branch_feature_dim(), cfg_.num_classes()});
        aux_t_b_ = &params_.add("aux_t.b", {cfg_.num_classes()});
      }
      if (cfg_.frequency_branch) {
        aux_f_w_ = &params_.add("aux_f.w", {cfg_.branch_feature_dim(), cfg_.num_classes()});
        aux_f_b_ = &params_.add("aux_f.b", {cfg_.num_classes()});
      }
    }
  }

  const ModelConfig& config() const { return cfg_; }
  nn::ParamStore<Real>& params() { return params_; }

  bool has_aux_temporal() const { return aux_t_w_ != nullptr; }
  bool has_aux_frequency() const { return aux_f_w_ != nullptr; }
  bool temporal_active() const { return active_temporal_; }
  bool frequency_active() const { return active_frequency_; }

  // Runtime branch masking for ablation on an already-built model.
  void set_active_branches(bool temporal, bool frequency) {
    if (temporal && !cfg_.temporal_branch)
      throw ConfigError("model has no temporal branch");
    if (frequency && !cfg_.frequency_branch)
      throw ConfigError("model has no frequency branch");
    if (!temporal && !frequency)
      throw ConfigError("at least one branch must stay active");
    active_temporal_ = temporal;
    active_frequency_ = frequency;
  }

  // Uniform +-1/sqrt(fan_in) for weights, zero biases, in registration
  // order so a seed pins every initial value.
  void init_params(Rng& rng) {
    for (size_t i = 0; i < params_.count(); ++i) {
      nn::ParamBuffer<Real>& p = params_.at(i);
      const auto& s = p.value.shape;
      if (s.size() == 1) {
        p.value.fill(Real(0));
        continue;
      }
      long fan_in = 1;
      if (s.size() == 2) fan_in = (p.name.find(".w_hh") != std::string::npos ||
                                   p.name.find(".w_ih") != std::string::npos)
                                      ? s[1]
                                      : s[0];
      else
        for (size_t d = 1; d < s.size(); ++d) fan_in *= s[d];
      p.init_uniform(rng, 1.0 / std::sqrt(static_cast<double>(fan_in)));
    }
  }

  // ---- spec operation surfaces (forward only) ----

  Tensor<Real> extract_frame_features(const Tensor<Real>& video) {
    Trace tr;
    return run_frames(video, tr);
  }

  static Tensor<Real> dft_time(const Tensor<Real>& f) {
    DftMagnitude<Real> op;
    return op.forward(f);
  }

  Tensor<Real> run_branch(bool frequency, const Tensor<Real>& x) {
    BranchParams& bp = frequency ? fbr_ : tbr_;
    if (!bp.present)
      throw ConfigError(std::string("model: ") +
                        (frequency ? "frequency" : "temporal") +
                        " branch not built");
    BranchTrace bt;
    return run_branch_trace(bp, x, bt);
  }

  Tensor<Real> fuse_classify(const Tensor<Real>& ft, const Tensor<Real>& ff) {
    if (!ft.same_shape(ff))
      throw ShapeError("fuse: branch features " + ft.shape_str() + " vs " +
                       ff.shape_str());
    Tensor<Real> sum = ft;
    for (size_t i = 0; i < sum.data.size(); ++i) sum.data[i] += ff.data[i];
    nn::Linear<Real> lin(*cls_w_, *cls_b_);
    return lin.forward(sum);
  }

  // ---- training path ----

  const Forward& forward(const Tensor<Real>& video) {
    trace_ = std::make_unique<Trace>();
    Trace& tr = *trace_;
    tr.out.frame_features = run_frames(video, tr);
    const long t_prime_check = tr.out.frame_features.dim(0);
    if (t_prime_check < 4)
      throw ShapeError("branch needs at least 4 frames (got " +
                       std::to_string(t_prime_check) +
                       "); pad the video temporally");
    Tensor<Real> fused;
    if (active_temporal_) {
      tr.tbt.emplace();
      tr.out.temporal_feat = run_branch_trace(tbr_, tr.out.frame_features, *tr.tbt);
      fused = tr.out.temporal_feat;
    }
    if (active_frequency_) {
      tr.out.spectral = tr.dft.forward(tr.out.frame_features);
      tr.fbt.emplace();
      tr.out.freq_feat = run_branch_trace(fbr_, tr.out.spectral, *tr.fbt);
      if (fused.size() == 0) {
        fused = tr.out.freq_feat;
      } else {
        if (!fused.same_shape(tr.out.freq_feat))
          throw ShapeError("fuse: branch outputs disagree");
        for (size_t i = 0; i < fused.data.size(); ++i)
          fused.data[i] += tr.out.freq_feat.data[i];
      }
    }
    tr.classifier.emplace(*cls_w_, *cls_b_);
    tr.out.logits = tr.classifier->forward(fused);
    if (aux_t_w_ && active_temporal_) {
      tr.aux_t.emplace(*aux_t_w_, *aux_t_b_);
      tr.out.aux_logits_t = tr.aux_t->forward(tr.out.temporal_feat);
    }
    if (aux_f_w_ && active_frequency_) {
      tr.aux_f.emplace(*aux_f_w_, *aux_f_b_);
      tr.out.aux_logits_f = tr.aux_f->forward(tr.out.freq_feat);
    }
    return tr.out;
  }

  // Cotangents for the main logits and (optionally) the two auxiliary
  // logit heads; accumulates parameter gradients for one video.
  void backward(const Tensor<Real>& dlogits, const Tensor<Real>* daux_t = nullptr,
                const Tensor<Real>* daux_f = nullptr) {
    if (!trace_) throw std::logic_error("model: backward without forward");
    Trace& tr = *trace_;
    Tensor<Real> dfused = tr.classifier->backward(dlogits);
    Tensor<Real> dtf, dff;
    if (active_temporal_) dtf = dfused;
    if (active_frequency_) dff = dfused;
    if (daux_t) {
      if (!tr.aux_t) throw ConfigError("model: no temporal aux head");
      Tensor<Real> d = tr.aux_t->backward(*daux_t);
      for (size_t i = 0; i < dtf.data.size(); ++i) dtf.data[i] += d.data[i];
    }
    if (daux_f) {
      if (!tr.aux_f) throw ConfigError("model: no frequency aux head");
      Tensor<Real> d = tr.aux_f->backward(*daux_f);
      for (size_t i = 0; i < dff.data.size(); ++i) dff.data[i] += d.data[i];
    }
    Tensor<Real> dframe(tr.out.frame_features.shape);
    if (active_temporal_) {
      Tensor<Real> d = branch_backward(*tr.tbt, dtf);
      for (size_t i = 0; i < dframe.data.size(); ++i) dframe.data[i] += d.data[i];
    }
    if (active_frequency_) {
      Tensor<Real> dspec = branch_backward(*tr.fbt, dff);
      Tensor<Real> d = tr.dft.backward(dspec);
      for (size_t i = 0; i < dframe.data.size(); ++i) dframe.data[i] += d.data[i];
    }
    const long t_len = dframe.dim(0);
    for (long t = t_len - 1; t >= 0; --t) {
      FrameTrace& ft = tr.frames[static_cast<size_t>(t)];
      Tensor<Real> g({cfg_.frame_feature_dim()});
      for (long c = 0; c < g.size(); ++c) g.data[static_cast<size_t>(c)] = dframe.at(t, c);
      Tensor<Real> d = ft.gap.backward(g);
      for (long b = static_cast<long>(ft.convs.size()) - 1; b >= 0; --b) {
        d = ft.relus[static_cast<size_t>(b)].backward(d);
        d = ft.convs[static_cast<size_t>(b)].backward(d);
      }
    }
    trace_.reset();
  }

  // Hash of every discrete decision (relu masks, pool argmaxes) taken in
  // the last forward; lets a finite-difference harness detect kink
  // crossings.
  std::uint64_t decision_signature() const {
    if (!trace_) throw std::logic_error("model: no forward trace");
    std::uint64_t h = 0;
    for (const FrameTrace& ft : trace_->frames)
      for (const auto& r : ft.relus) h = nn::mix_hash(h, r.decision_hash());
    for (const auto* bt : {trace_->tbt ? &*trace_->tbt : nullptr,
                           trace_->fbt ? &*trace_->fbt : nullptr}) {
      if (!bt) continue;
      for (const auto& r : bt->relus) h = nn::mix_hash(h, r.decision_hash());
      for (const auto& p : bt->pools) h = nn::mix_hash(h, p.decision_hash());
    }
    return h;
  }

 private:
  struct BranchParams {
    bool present = false;
    std::vector<nn::ParamBuffer<Real>*> cw, cb;
    nn::ParamBuffer<Real>*fw_ih = nullptr, *fw_hh = nullptr, *fw_b = nullptr;
    nn::ParamBuffer<Real>*bw_ih = nullptr, *bw_hh = nullptr, *bw_b = nullptr;
  };

  struct BranchTrace {
    std::vector<nn::Conv1d<Real>> convs;
    std::vector<nn::Relu<Real>> relus;
    std::vector<nn::MaxPool1d<Real>> pools;
    std::optional<nn::BiLstm<Real>> lstm;
  };

  struct FrameTrace {
    std::vector<nn::Conv2d<Real>> convs;
    std::vector<nn::Relu<Real>> relus;
    nn::GlobalAvgPool2d<Real> gap;
  };

  struct Trace {
    std::vector<FrameTrace> frames;
    DftMagnitude<Real> dft;
    std::optional<BranchTrace> tbt, fbt;
    std::optional<nn::Linear<Real>> classifier, aux_t, aux_f;
    Forward out;
  };

  BranchParams make_branch(const std::string& name) {
    BranchParams bp;
    bp.present = true;
    long cin = cfg_.frame_feature_dim();
    for (size_t i = 0; i < cfg_.conv1d_channels.size(); ++i) {
      const long cout = cfg_.conv1d_channels[i];
      const std::string p = name + ".conv" + std::to_string(i);
      bp.cw.push_back(&params_.add(p + ".w", {cout, cin, cfg_.conv1d_kernel[i]}));
      bp.cb.push_back(&params_.add(p + ".b", {cout}));
      cin = cout;
    }
    const long h = cfg_.hidden;
    bp.fw_ih = &params_.add(name + ".lstm.fw.w_ih", {4 * h, cin});
    bp.fw_hh = &params_.add(name + ".lstm.fw.w_hh", {4 * h, h});
    bp.fw_b = &params_.add(name + ".lstm.fw.b", {4 * h});
    bp.bw_ih = &params_.add(name + ".lstm.bw.w_ih", {4 * h, cin});
    bp.bw_hh = &params_.add(name + ".lstm.bw.w_hh", {4 * h, h});
    bp.bw_b = &params_.add(name + ".lstm.bw.b", {4 * h});
    return bp;
  }

  // Per-frame CNN stack; output is exactly T rows (one per frame).
  Tensor<Real> run_frames(const Tensor<Real>& video, Trace& tr) {
    if (video.rank() != 4)
      throw ShapeError("frame extractor: video must be T x C x H x W");
    if (video.dim(1) != cfg_.input_channels || video.dim(2) != cfg_.input_height ||
        video.dim(3) != cfg_.input_width)
      throw ShapeError("frame extractor: resolution " + video.shape_str() +
                       " does not match configured " +
                       std::to_string(cfg_.input_channels) + "x" +
                       std::to_string(cfg_.input_height) + "x" +
                       std::to_string(cfg_.input_width));
    const long t_len = video.dim(0);
    const long cpix = cfg_.input_channels * cfg_.input_height * cfg_.input_width;
    Tensor<Real> out({t_len, cfg_.frame_feature_dim()});
    tr.frames.clear();
    tr.frames.reserve(static_cast<size_t>(t_len));
    for (long t = 0; t < t_len; ++t) {
      FrameTrace ft;
      Tensor<Real> x({cfg_.input_channels, cfg_.input_height, cfg_.input_width});
      std::copy(video.data.begin() + t * cpix, video.data.begin() + (t + 1) * cpix,
                x.data.begin());
      for (size_t b = 0; b < frame_w_.size(); ++b) {
        ft.convs.emplace_back(*frame_w_[b], *frame_b_[b], 2, 1);
        x = ft.convs.back().forward(x);
        ft.relus.emplace_back();
        x = ft.relus.back().forward(x);
      }
      Tensor<Real> feat = ft.gap.forward(x);
      for (long c = 0; c < feat.size(); ++c)
        out.at(t, c) = feat.data[static_cast<size_t>(c)];
      tr.frames.push_back(std::move(ft));
    }
    return out;
  }

  Tensor<Real> run_branch_trace(BranchParams& bp, const Tensor<Real>& x,
                                BranchTrace& bt) {
    if (x.dim(0) < 4)
      throw ShapeError("branch needs at least 4 frames (got " +
                       std::to_string(x.dim(0)) + "); pad the video temporally");
    Tensor<Real> h = x;
    for (size_t i = 0; i < bp.cw.size(); ++i) {
      bt.convs.emplace_back(*bp.cw[i], *bp.cb[i], cfg_.conv1d_stride[i],
                            cfg_.conv1d_pad[i]);
      h = bt.convs.back().forward(h);
      bt.relus.emplace_back();
      h = bt.relus.back().forward(h);
      bt.pools.emplace_back(2, 2);
      h = bt.pools.back().forward(h);
    }
    bt.lstm.emplace(*bp.fw_ih, *bp.fw_hh, *bp.fw_b, *bp.bw_ih, *bp.bw_hh, *bp.bw_b);
    return bt.lstm->forward(h);
  }

  Tensor<Real> branch_backward(BranchTrace& bt, const Tensor<Real>& dy) {
    Tensor<Real> d = bt.lstm->backward(dy);
    for (long i = static_cast<long>(bt.convs.size()) - 1; i >= 0; --i) {
      d = bt.pools[static_cast<size_t>(i)].backward(d);
      d = bt.relus[static_cast<size_t>(i)].backward(d);
      d = bt.convs[static_cast<size_t>(i)].backward(d);
    }
    return d;
  }

  ModelConfig cfg_;
  nn::ParamStore<Real> params_;
  std::vector<nn::ParamBuffer<Real>*> frame_w_, frame_b_;
  BranchParams tbr_, fbr_;
  nn::ParamBuffer<Real>*cls_w_ = nullptr, *cls_b_ = nullptr;
  nn::ParamBuffer<Real>*aux_t_w_ = nullptr, *aux_t_b_ = nullptr;
  nn::ParamBuffer<Real>*aux_f_w_ = nullptr, *aux_f_b_ = nullptr;
  bool active_temporal_ = true, active_frequency_ = true;
  std::unique_ptr<Trace> trace_;
};

}  // namespace tfnet::model

#endif  // TFNET_MODEL_TFNET_HPP
