#ifndef TFNET_DECODE_DECODE_HPP
#define TFNET_DECODE_DECODE_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>
#include <vector>

#include "tfnet/error.hpp"
#include "tfnet/loss/ctc.hpp"
#include "tfnet/nn/ops.hpp"
#include "tfnet/tensor.hpp"

namespace tfnet::decode {

using objective::kNegInf;
using objective::logaddexp;

struct DecodeResult {
  std::vector<long> glosses;  // collapsed, blank-free
  double log_score = 0;
  long beam_width = 1;
};

// Per-step argmax (ties to the lowest id), collapse repeats, drop blanks.
template <class Real>
DecodeResult greedy_decode(const Tensor<Real>& logits) {
  if (logits.rank() != 2) throw ShapeError("greedy: logits must be T x (l+1)");
  if (!logits.all_finite()) throw NumericError("greedy: non-finite logits");
  const Tensor<Real> lp = nn::log_softmax(logits);
  DecodeResult res;
  long prev = -1;
  for (long t = 0; t < lp.dim(0); ++t) {
    long best = 0;
    for (long k = 1; k < lp.dim(1); ++k)
      if (lp.at(t, k) > lp.at(t, best)) best = k;
    res.log_score += static_cast<double>(lp.at(t, best));
    if (best != 0 && best != prev) res.glosses.push_back(best);
    prev = best;
  }
  return res;
}

// CTC prefix beam search in log space. Prefixes are keyed by their
// collapsed gloss string; each carries separate blank-ending and
// non-blank-ending masses. Pruning keeps the `width` prefixes with the
// largest combined mass, ties broken toward the lexicographically
// smaller prefix. With width at least the number of reachable prefixes
// this is exact marginalized decoding.
template <class Real>
DecodeResult beam_decode(const Tensor<Real>& logits, long width) {
  if (width < 1) throw ConfigError("beam: width must be >= 1");
  if (logits.rank() != 2) throw ShapeError("beam: logits must be T x (l+1)");
  if (!logits.all_finite()) throw NumericError("beam: non-finite logits");
  const Tensor<Real> lp = nn::log_softmax(logits);
  const long t_len = lp.dim(0), n = lp.dim(1);

  using Prefix = std::vector<long>;
  struct Mass {
    double pb = kNegInf;   // ending in blank
    double pnb = kNegInf;  // ending in the prefix's last symbol
    double total() const { return logaddexp(pb, pnb); }
  };
  std::map<Prefix, Mass> beams;
  beams[{}].pb = 0.0;

  for (long t = 0; t < t_len; ++t) {
    const Real* row = lp.ptr() + t * n;
    std::map<Prefix, Mass> next;
    for (const auto& [prefix, m] : beams) {
      const double tot = m.total();
      {
        Mass& dst = next[prefix];
        dst.pb = logaddexp(dst.pb, tot + static_cast<double>(row[0]));
      }
      for (long c = 1; c < n; ++c) {
        const double lpc = static_cast<double>(row[c]);
        if (!prefix.empty() && prefix.back() == c) {
          // same symbol again extends the run of the same prefix...
          Mass& same = next[prefix];
          same.pnb = logaddexp(same.pnb, m.pnb + lpc);
          // ...or starts a new token if a blank intervened
          Prefix grown = prefix;
          grown.push_back(c);
          Mass& dst = next[grown];
          dst.pnb = logaddexp(dst.pnb, m.pb + lpc);
        } else {
          Prefix grown = prefix;
          grown.push_back(c);
          Mass& dst = next[grown];
          dst.pnb = logaddexp(dst.pnb, tot + lpc);
        }
      }
    }
    if (static_cast<long>(next.size()) > width) {
      std::vector<std::pair<const Prefix*, double>> order;
      order.reserve(next.size());
      for (const auto& [prefix, m] : next) order.emplace_back(&prefix, m.total());
      std::sort(order.begin(), order.end(),
                [](const auto& a, const auto& b) {
                  if (a.second != b.second) return a.second > b.second;
                  return *a.first < *b.first;  // map iteration gives unique keys
                });
      std::map<Prefix, Mass> pruned;
      for (long i = 0; i < width; ++i)
        pruned[*order[static_cast<size_t>(i)].first] =
            next[*order[static_cast<size_t>(i)].first];
      next.swap(pruned);
    }
    beams.swap(next);
  }

  DecodeResult res;
  res.beam_width = width;
  res.log_score = kNegInf;
  for (const auto& [prefix, m] : beams) {
    const double tot = m.total();
    if (tot > res.log_score) {
      res.log_score = tot;
      res.glosses = prefix;
    }
    // ties keep the earlier (lexicographically smaller) prefix: map order
  }
  return res;
}

}  // namespace tfnet::decode

#endif  // TFNET_DECODE_DECODE_HPP
