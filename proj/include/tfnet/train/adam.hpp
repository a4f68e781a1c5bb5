#ifndef TFNET_TRAIN_ADAM_HPP
#define TFNET_TRAIN_ADAM_HPP

#include <cmath>
#include <string>
#include <vector>

#include "tfnet/error.hpp"
#include "tfnet/nn/param.hpp"

namespace tfnet::train {

// Adam with bias correction and decoupled weight decay:
//   theta <- theta - lr * m_hat / (sqrt(v_hat) + eps) - lr * wd * theta
template <class Real>
class Adam {
 public:
  explicit Adam(nn::ParamStore<Real>& params, double beta1 = 0.9,
                double beta2 = 0.999, double eps = 1e-8)
      : params_(params), beta1_(beta1), beta2_(beta2), eps_(eps) {
    for (size_t i = 0; i < params_.count(); ++i) {
      m_.emplace_back(params_.at(i).value.shape);
      v_.emplace_back(params_.at(i).value.shape);
    }
  }

  long step_count() const { return step_; }
  double beta1() const { return beta1_; }
  double beta2() const { return beta2_; }
  double eps() const { return eps_; }

  void step(double lr, double weight_decay) {
    // validate first so a bad gradient aborts before touching any value
    for (size_t i = 0; i < params_.count(); ++i) {
      const nn::ParamBuffer<Real>& p = params_.at(i);
      if (!p.grad.all_finite())
        throw NumericError("adam: non-finite gradient in '" + p.name +
                           "' at step " + std::to_string(step_ + 1));
    }
    ++step_;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(step_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(step_));
    for (size_t i = 0; i < params_.count(); ++i) {
      nn::ParamBuffer<Real>& p = params_.at(i);
      Real* th = p.value.ptr();
      const Real* g = p.grad.ptr();
      Real* m = m_[i].ptr();
      Real* v = v_[i].ptr();
      const long n = p.value.size();
      for (long j = 0; j < n; ++j) {
        const double gj = static_cast<double>(g[j]);
        const double mj = beta1_ * static_cast<double>(m[j]) + (1.0 - beta1_) * gj;
        const double vj = beta2_ * static_cast<double>(v[j]) + (1.0 - beta2_) * gj * gj;
        m[j] = static_cast<Real>(mj);
        v[j] = static_cast<Real>(vj);
        const double m_hat = mj / bc1;
        const double v_hat = vj / bc2;
        double upd = lr * m_hat / (std::sqrt(v_hat) + eps_);
        upd += lr * weight_decay * static_cast<double>(th[j]);
        th[j] = static_cast<Real>(static_cast<double>(th[j]) - upd);
      }
    }
  }

  // moment access for checkpointing
  size_t slots() const { return m_.size(); }
  Tensor<Real>& moment1(size_t i) { return m_[i]; }
  Tensor<Real>& moment2(size_t i) { return v_[i]; }
  void set_step(long s) { step_ = s; }

 private:
  nn::ParamStore<Real>& params_;
  double beta1_, beta2_, eps_;
  long step_ = 0;
  std::vector<Tensor<Real>> m_, v_;
};

}  // namespace tfnet::train

#endif  // TFNET_TRAIN_ADAM_HPP
