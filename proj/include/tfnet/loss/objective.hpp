#ifndef TFNET_LOSS_OBJECTIVE_HPP
#define TFNET_LOSS_OBJECTIVE_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include "tfnet/error.hpp"
#include "tfnet/loss/ctc.hpp"
#include "tfnet/tensor.hpp"

namespace tfnet::objective {

struct LossBreakdown {
  double l_ctc = 0;
  double l_vae_t = 0;
  double l_vae_f = 0;
  double l_sum = 0;
};

struct LossToggles {
  bool vae_t = true;
  bool vae_f = true;
};

template <class Real>
struct AuxLossGrad {
  double loss = 0;        // aux CTC + mean-over-steps softened KL
  Tensor<Real> daux;      // w.r.t. the auxiliary logits
  Tensor<Real> dmain;     // w.r.t. the main logits (KL term only)
};

// Alignment loss for one branch: CTC on the branch's auxiliary
// classifier plus KL(softened main || softened aux), temperature tau,
// averaged over time steps. No stop-gradient: the KL term trains the
// main classifier too.
template <class Real>
AuxLossGrad<Real> aux_branch_loss(const Tensor<Real>& aux_logits,
                                  const Tensor<Real>& main_logits,
                                  const std::vector<long>& labels, double tau) {
  if (!aux_logits.same_shape(main_logits))
    throw ShapeError("aux loss: logit shapes disagree");
  if (tau <= 0) throw ConfigError("aux loss: temperature must be positive");
  CtcGrad<Real> ctc = ctc_loss(aux_logits, labels);

  const long t_len = aux_logits.dim(0), n = aux_logits.dim(1);
  AuxLossGrad<Real> out;
  out.daux = ctc.dlogits;
  out.dmain = Tensor<Real>({t_len, n});
  const double inv_t = 1.0 / static_cast<double>(t_len);
  double kl_total = 0;
  std::vector<double> lp(static_cast<size_t>(n)), lq(static_cast<size_t>(n));
  for (long t = 0; t < t_len; ++t) {
    // softened log distributions, main -> p, aux -> q
    auto softened = [&](const Tensor<Real>& m, std::vector<double>& dst) {
      double mx = kNegInf;
      for (long k = 0; k < n; ++k)
        mx = std::max(mx, static_cast<double>(m.at(t, k)) / tau);
      double z = 0;
      for (long k = 0; k < n; ++k)
        z += std::exp(static_cast<double>(m.at(t, k)) / tau - mx);
      const double lz = std::log(z) + mx;
      for (long k = 0; k < n; ++k)
        dst[static_cast<size_t>(k)] = static_cast<double>(m.at(t, k)) / tau - lz;
    };
    softened(main_logits, lp);
    softened(aux_logits, lq);
    double kl = 0;
    for (long k = 0; k < n; ++k) {
      const double p = std::exp(lp[static_cast<size_t>(k)]);
      kl += p * (lp[static_cast<size_t>(k)] - lq[static_cast<size_t>(k)]);
    }
    kl_total += kl;
    for (long k = 0; k < n; ++k) {
      const double p = std::exp(lp[static_cast<size_t>(k)]);
      const double q = std::exp(lq[static_cast<size_t>(k)]);
      out.dmain.at(t, k) = static_cast<Real>(
          inv_t / tau * p * (lp[static_cast<size_t>(k)] - lq[static_cast<size_t>(k)] - kl));
      out.daux.at(t, k) += static_cast<Real>(inv_t / tau * (q - p));
    }
  }
  out.loss = ctc.loss + kl_total * inv_t;
  return out;
}

template <class Real>
struct ObjectiveGrad {
  LossBreakdown breakdown;
  Tensor<Real> dlogits;          // main head, all terms combined
  Tensor<Real> daux_t, daux_f;   // empty when the term is disabled
  bool has_aux_t = false, has_aux_f = false;
};

// Total training loss: main CTC plus the enabled branch alignment
// losses, each with unit weight. Disabled terms contribute exactly zero
// loss and no gradient.
template <class Real>
ObjectiveGrad<Real> total_loss(const Tensor<Real>& logits,
                               const Tensor<Real>& aux_logits_t,
                               const Tensor<Real>& aux_logits_f,
                               const std::vector<long>& labels,
                               const LossToggles& toggles, double tau,
                               long pad_to = -1) {
  ObjectiveGrad<Real> out;
  const long t_len = logits.dim(0);
  CtcGrad<Real> main =
      ctc_loss_padded(logits, labels, pad_to < 0 ? t_len : pad_to);
  out.breakdown.l_ctc = main.loss;
  out.dlogits = main.dlogits;
  if (toggles.vae_t) {
    if (aux_logits_t.size() == 0)
      throw ConfigError("total_loss: temporal alignment loss enabled but no "
                        "auxiliary logits (aux classifier or branch missing)");
    AuxLossGrad<Real> at = aux_branch_loss(aux_logits_t, logits, labels, tau);
    out.breakdown.l_vae_t = at.loss;
    out.daux_t = std::move(at.daux);
    out.has_aux_t = true;
    for (size_t i = 0; i < out.dlogits.data.size(); ++i)
      out.dlogits.data[i] += at.dmain.data[i];
  }
  if (toggles.vae_f) {
    if (aux_logits_f.size() == 0)
      throw ConfigError("total_loss: frequency alignment loss enabled but no "
                        "auxiliary logits (aux classifier or branch missing)");
    AuxLossGrad<Real> af = aux_branch_loss(aux_logits_f, logits, labels, tau);
    out.breakdown.l_vae_f = af.loss;
    out.daux_f = std::move(af.daux);
    out.has_aux_f = true;
    for (size_t i = 0; i < out.dlogits.data.size(); ++i)
      out.dlogits.data[i] += af.dmain.data[i];
  }
  out.breakdown.l_sum =
      out.breakdown.l_ctc + out.breakdown.l_vae_t + out.breakdown.l_vae_f;
  return out;
}

}  // namespace tfnet::objective

#endif  // TFNET_LOSS_OBJECTIVE_HPP
