#ifndef TFNET_LOSS_CTC_HPP
#define TFNET_LOSS_CTC_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "tfnet/error.hpp"
#include "tfnet/tensor.hpp"

namespace tfnet::objective {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline double logaddexp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = a > b ? a : b;
  return m + std::log1p(std::exp(-std::fabs(a - b)));
}

// Minimum number of time steps that can carry the label sequence:
// its length plus one separating blank per adjacent repeat.
inline long ctc_min_steps(const std::vector<long>& labels) {
  long need = static_cast<long>(labels.size());
  for (size_t i = 1; i < labels.size(); ++i)
    if (labels[i] == labels[i - 1]) ++need;
  return need;
}

template <class Real>
struct CtcGrad {
  double loss = 0;          // per-sequence negative log likelihood
  Tensor<Real> dlogits;     // same shape as the logits passed in
};

// Log-space forward-backward over the blank-augmented label string.
// `pad_to` >= T appends virtual blank-certain steps (log-prob 0 for
// blank, -inf otherwise); they leave the likelihood unchanged, which is
// what makes rectangular batching safe. The gradient is the standard
// softmax-minus-posterior form and covers only the real logit rows.
template <class Real>
CtcGrad<Real> ctc_loss_padded(const Tensor<Real>& logits,
                              const std::vector<long>& labels, long pad_to) {
  if (logits.rank() != 2) throw ShapeError("ctc: logits must be T x (l+1)");
  const long t_valid = logits.dim(0), n = logits.dim(1);
  if (t_valid < 1) throw ShapeError("ctc: empty logit sequence");
  if (!logits.all_finite()) throw NumericError("ctc: non-finite logits");
  if (labels.empty()) throw InfeasibleLabelError("ctc: empty label sequence");
  for (long id : labels)
    if (id < 1 || id >= n)
      throw ConfigError("ctc: label id " + std::to_string(id) +
                        " outside 1.." + std::to_string(n - 1));
  if (pad_to < t_valid) throw ShapeError("ctc: pad_to shorter than logits");
  const long need = ctc_min_steps(labels);
  if (t_valid < need)
    throw InfeasibleLabelError(
        "ctc: label needs at least " + std::to_string(need) +
        " steps, sequence provides " + std::to_string(t_valid));

  const long t_len = pad_to;
  const long u = static_cast<long>(labels.size());
  const long s_len = 2 * u + 1;
  auto z = [&](long s) -> long {
    return (s % 2 == 0) ? 0 : labels[static_cast<size_t>(s / 2)];
  };

  // log probabilities, in double regardless of Real
  std::vector<double> lp(static_cast<size_t>(t_len * n), kNegInf);
  for (long t = 0; t < t_valid; ++t) {
    double m = static_cast<double>(logits.at(t, 0));
    for (long k = 1; k < n; ++k)
      m = std::max(m, static_cast<double>(logits.at(t, k)));
    double zsum = 0;
    for (long k = 0; k < n; ++k)
      zsum += std::exp(static_cast<double>(logits.at(t, k)) - m);
    const double lz = std::log(zsum) + m;
    for (long k = 0; k < n; ++k)
      lp[static_cast<size_t>(t * n + k)] = static_cast<double>(logits.at(t, k)) - lz;
  }
  for (long t = t_valid; t < t_len; ++t)
    lp[static_cast<size_t>(t * n + 0)] = 0.0;  // blank-certain padding

  auto lpz = [&](long t, long s) { return lp[static_cast<size_t>(t * n + z(s))]; };

  std::vector<double> alpha(static_cast<size_t>(t_len * s_len), kNegInf);
  std::vector<double> beta(static_cast<size_t>(t_len * s_len), kNegInf);
  auto a = [&](long t, long s) -> double& {
    return alpha[static_cast<size_t>(t * s_len + s)];
  };
  auto b = [&](long t, long s) -> double& {
    return beta[static_cast<size_t>(t * s_len + s)];
  };

  a(0, 0) = lpz(0, 0);
  if (s_len > 1) a(0, 1) = lpz(0, 1);
  for (long t = 1; t < t_len; ++t) {
    for (long s = 0; s < s_len; ++s) {
      double acc = a(t - 1, s);
      if (s >= 1) acc = logaddexp(acc, a(t - 1, s - 1));
      if (s >= 2 && z(s) != 0 && z(s) != z(s - 2))
        acc = logaddexp(acc, a(t - 1, s - 2));
      a(t, s) = (acc == kNegInf) ? kNegInf : acc + lpz(t, s);
    }
  }
  double log_p = a(t_len - 1, s_len - 1);
  if (s_len > 1) log_p = logaddexp(log_p, a(t_len - 1, s_len - 2));
  if (log_p == kNegInf || !std::isfinite(-log_p))
    throw NumericError("ctc: vanished path probability");

  b(t_len - 1, s_len - 1) = lpz(t_len - 1, s_len - 1);
  if (s_len > 1) b(t_len - 1, s_len - 2) = lpz(t_len - 1, s_len - 2);
  for (long t = t_len - 2; t >= 0; --t) {
    for (long s = 0; s < s_len; ++s) {
      double acc = b(t + 1, s);
      if (s + 1 < s_len) acc = logaddexp(acc, b(t + 1, s + 1));
      if (s + 2 < s_len && z(s + 2) != 0 && z(s + 2) != z(s))
        acc = logaddexp(acc, b(t + 1, s + 2));
      b(t, s) = (acc == kNegInf) ? kNegInf : acc + lpz(t, s);
    }
  }

  CtcGrad<Real> out;
  out.loss = -log_p;
  out.dlogits = Tensor<Real>({t_valid, n});
  // posterior mass per class, then dL/dlogit = softmax - posterior
  std::vector<double> logq(static_cast<size_t>(n), kNegInf);
  for (long t = 0; t < t_valid; ++t) {
    std::fill(logq.begin(), logq.end(), kNegInf);
    for (long s = 0; s < s_len; ++s) {
      const double g = a(t, s) + b(t, s) - lpz(t, s);
      if (g == kNegInf) continue;
      auto& slot = logq[static_cast<size_t>(z(s))];
      slot = logaddexp(slot, g);
    }
    for (long k = 0; k < n; ++k) {
      const double y = std::exp(lp[static_cast<size_t>(t * n + k)]);
      const double q = std::exp(logq[static_cast<size_t>(k)] - log_p);
      out.dlogits.at(t, k) = static_cast<Real>(y - q);
    }
  }
  return out;
}

// Per-sequence CTC loss (not length-normalized) and its logit gradient.
template <class Real>
CtcGrad<Real> ctc_loss(const Tensor<Real>& logits, const std::vector<long>& labels) {
  return ctc_loss_padded(logits, labels, logits.dim(0));
}

}  // namespace tfnet::objective

#endif  // TFNET_LOSS_CTC_HPP
