#ifndef TFNET_TESTS_ORACLES_HPP
#define TFNET_TESTS_ORACLES_HPP

// Test-only reference implementations, written independently of the
// library kernels they check: straight from the defining formulas, no
// shared code paths.

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <vector>

#include "tfnet/tensor.hpp"

namespace oracles {

using tfnet::Tensor;

// y = xW + b by three explicit loops.
inline Tensor<double> naive_linear(const Tensor<double>& x,
                                   const Tensor<double>& w,
                                   const Tensor<double>& b) {
  const long t = x.dim(0), ci = x.dim(1), co = w.dim(1);
  Tensor<double> y({t, co});
  for (long r = 0; r < t; ++r)
    for (long o = 0; o < co; ++o) {
      double acc = b.data[static_cast<size_t>(o)];
      for (long i = 0; i < ci; ++i) acc += x.at(r, i) * w.at(i, o);
      y.at(r, o) = acc;
    }
  return y;
}

// Sliding-window 1D convolution over an explicitly zero-padded copy.
inline Tensor<double> naive_conv1d(const Tensor<double>& x,
                                   const Tensor<double>& w,
                                   const Tensor<double>& b, long stride,
                                   long pad) {
  const long t = x.dim(0), ci = x.dim(1);
  const long co = w.dim(0), k = w.dim(2);
  Tensor<double> padded({t + 2 * pad, ci});
  for (long r = 0; r < t; ++r)
    for (long i = 0; i < ci; ++i) padded.at(r + pad, i) = x.at(r, i);
  const long t_out = (t + 2 * pad - k) / stride + 1;
  Tensor<double> y({t_out, co});
  for (long to = 0; to < t_out; ++to)
    for (long o = 0; o < co; ++o) {
      double acc = b.data[static_cast<size_t>(o)];
      for (long j = 0; j < k; ++j)
        for (long i = 0; i < ci; ++i)
          acc += padded.at(to * stride + j, i) * w.at(o, i, j);
      y.at(to, o) = acc;
    }
  return y;
}

// Explicit window max.
inline Tensor<double> naive_maxpool1d(const Tensor<double>& x, long k, long s) {
  const long t = x.dim(0), c = x.dim(1);
  const long t_out = (t - k) / s + 1;
  Tensor<double> y({t_out, c});
  for (long to = 0; to < t_out; ++to)
    for (long ch = 0; ch < c; ++ch) {
      double m = x.at(to * s, ch);
      for (long j = 1; j < k; ++j) m = std::max(m, x.at(to * s + j, ch));
      y.at(to, ch) = m;
    }
  return y;
}

// Zero-padded direct 2D convolution.
inline Tensor<double> naive_conv2d(const Tensor<double>& x,
                                   const Tensor<double>& w,
                                   const Tensor<double>& b, long stride,
                                   long pad) {
  const long ci = x.dim(0), h = x.dim(1), wd = x.dim(2);
  const long co = w.dim(0), k = w.dim(2);
  const long ho = (h + 2 * pad - k) / stride + 1;
  const long wo = (wd + 2 * pad - k) / stride + 1;
  Tensor<double> y({co, ho, wo});
  for (long o = 0; o < co; ++o)
    for (long oy = 0; oy < ho; ++oy)
      for (long ox = 0; ox < wo; ++ox) {
        double acc = b.data[static_cast<size_t>(o)];
        for (long i = 0; i < ci; ++i)
          for (long ky = 0; ky < k; ++ky)
            for (long kx = 0; kx < k; ++kx) {
              const long yy = oy * stride - pad + ky;
              const long xx = ox * stride - pad + kx;
              if (yy >= 0 && yy < h && xx >= 0 && xx < wd)
                acc += x.at(i, yy, xx) * w.at(o, i, ky, kx);
            }
        y.at(o, oy, ox) = acc;
      }
  return y;
}

// DFT magnitudes via std::complex accumulation.
inline Tensor<double> naive_dft_mag(const Tensor<double>& x) {
  const long t = x.dim(0), c = x.dim(1);
  Tensor<double> mag({t, c});
  for (long k = 0; k < t; ++k)
    for (long ch = 0; ch < c; ++ch) {
      std::complex<double> acc(0, 0);
      for (long n = 0; n < t; ++n)
        acc += x.at(n, ch) *
               std::exp(std::complex<double>(0, -2.0 * M_PI * k * n / t));
      mag.at(k, ch) = std::abs(acc);
    }
  return mag;
}

// CTC collapse: drop repeats, then blanks.
inline std::vector<long> collapse_path(const std::vector<long>& path) {
  std::vector<long> out;
  long prev = -1;
  for (long c : path) {
    if (c != prev && c != 0) out.push_back(c);
    prev = c;
  }
  return out;
}

// Brute-force CTC: enumerate every (l+1)-ary alignment string, keep the
// ones that collapse to the label, sum their path probabilities.
inline double brute_force_ctc_loss(const Tensor<double>& logits,
                                   const std::vector<long>& labels) {
  const long t = logits.dim(0), n = logits.dim(1);
  Tensor<double> probs({t, n});
  for (long r = 0; r < t; ++r) {
    double mx = logits.at(r, 0);
    for (long k = 1; k < n; ++k) mx = std::max(mx, logits.at(r, k));
    double z = 0;
    for (long k = 0; k < n; ++k) z += std::exp(logits.at(r, k) - mx);
    for (long k = 0; k < n; ++k)
      probs.at(r, k) = std::exp(logits.at(r, k) - mx) / z;
  }
  double total = 0;
  std::vector<long> path(static_cast<size_t>(t), 0);
  while (true) {
    if (collapse_path(path) == labels) {
      double p = 1;
      for (long r = 0; r < t; ++r) p *= probs.at(r, path[static_cast<size_t>(r)]);
      total += p;
    }
    long pos = t - 1;
    while (pos >= 0 && path[static_cast<size_t>(pos)] == n - 1) {
      path[static_cast<size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
    ++path[static_cast<size_t>(pos)];
  }
  return -std::log(total);
}

// Exhaustive marginalized decoding: probability mass of every collapsed
// string; ties to the lexicographically smaller string.
inline std::pair<std::vector<long>, double> exhaustive_decode(
    const Tensor<double>& logits) {
  const long t = logits.dim(0), n = logits.dim(1);
  Tensor<double> probs({t, n});
  for (long r = 0; r < t; ++r) {
    double mx = logits.at(r, 0);
    for (long k = 1; k < n; ++k) mx = std::max(mx, logits.at(r, k));
    double z = 0;
    for (long k = 0; k < n; ++k) z += std::exp(logits.at(r, k) - mx);
    for (long k = 0; k < n; ++k)
      probs.at(r, k) = std::exp(logits.at(r, k) - mx) / z;
  }
  std::map<std::vector<long>, double> mass;
  std::vector<long> path(static_cast<size_t>(t), 0);
  while (true) {
    double p = 1;
    for (long r = 0; r < t; ++r) p *= probs.at(r, path[static_cast<size_t>(r)]);
    mass[collapse_path(path)] += p;
    long pos = t - 1;
    while (pos >= 0 && path[static_cast<size_t>(pos)] == n - 1) {
      path[static_cast<size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
    ++path[static_cast<size_t>(pos)];
  }
  std::vector<long> best;
  double best_p = -1;
  for (const auto& [str, p] : mass) {
    if (p > best_p) {  // map order makes ties resolve to the smaller string
      best_p = p;
      best = str;
    }
  }
  return {best, std::log(best_p)};
}

// Exhaustive edit-script search: try every interleaving of operations,
// exponential but fine at the tested lengths.
inline long exhaustive_edit_cost(const std::vector<long>& ref,
                                 const std::vector<long>& hyp, size_t i = 0,
                                 size_t j = 0) {
  if (i == ref.size())
    return static_cast<long>(hyp.size() - j);  // leftover hyp: insertions
  if (j == hyp.size())
    return static_cast<long>(ref.size() - i);  // leftover ref: deletions
  const long match_sub =
      exhaustive_edit_cost(ref, hyp, i + 1, j + 1) + (ref[i] == hyp[j] ? 0 : 1);
  const long ins = exhaustive_edit_cost(ref, hyp, i, j + 1) + 1;
  const long del = exhaustive_edit_cost(ref, hyp, i + 1, j) + 1;
  return std::min({match_sub, ins, del});
}

// Scalar Adam recurrence from the update equations.
struct ScalarAdamOracle {
  double m = 0, v = 0;
  long t = 0;
  double step(double theta, double g, double lr, double wd, double b1,
              double b2, double eps) {
    ++t;
    m = b1 * m + (1 - b1) * g;
    v = b2 * v + (1 - b2) * g * g;
    const double mh = m / (1 - std::pow(b1, t));
    const double vh = v / (1 - std::pow(b2, t));
    return theta - lr * mh / (std::sqrt(vh) + eps) - lr * wd * theta;
  }
};

}  // namespace oracles

#endif  // TFNET_TESTS_ORACLES_HPP
