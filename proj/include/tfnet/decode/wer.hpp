#ifndef TFNET_DECODE_WER_HPP
#define TFNET_DECODE_WER_HPP

#include <algorithm>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "tfnet/error.hpp"

namespace tfnet::decode {

struct WERReport {
  long ins = 0;  // extra tokens in the hypothesis
  long del = 0;  // reference tokens the hypothesis missed
  long sub = 0;
  long sum = 0;  // reference length
  double wer_percent = 0;

  long errors() const { return ins + del + sub; }
};

enum class EditOp : char { kMatch = '=', kSub = 'S', kIns = 'I', kDel = 'D' };

// Unit-cost Levenshtein DP with a backtrace that prefers substitution
// over insertion over deletion on equal cost, fixing the reported
// (ins, del, sub) decomposition. The total cost is decision-free.
inline std::vector<EditOp> edit_ops(
    long ref_len, long hyp_len,
    const std::function<bool(long, long)>& equal) {
  const long m = ref_len, n = hyp_len;
  std::vector<long> d(static_cast<size_t>((m + 1) * (n + 1)));
  auto at = [&](long i, long j) -> long& {
    return d[static_cast<size_t>(i * (n + 1) + j)];
  };
  for (long i = 0; i <= m; ++i) at(i, 0) = i;
  for (long j = 0; j <= n; ++j) at(0, j) = j;
  for (long i = 1; i <= m; ++i)
    for (long j = 1; j <= n; ++j)
      at(i, j) = std::min({at(i - 1, j - 1) + (equal(i - 1, j - 1) ? 0 : 1),
                           at(i, j - 1) + 1, at(i - 1, j) + 1});
  std::vector<EditOp> ops;
  long i = m, j = n;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 &&
        at(i, j) == at(i - 1, j - 1) + (equal(i - 1, j - 1) ? 0 : 1)) {
      ops.push_back(equal(i - 1, j - 1) ? EditOp::kMatch : EditOp::kSub);
      --i;
      --j;
    } else if (j > 0 && at(i, j) == at(i, j - 1) + 1) {
      ops.push_back(EditOp::kIns);
      --j;
    } else {
      ops.push_back(EditOp::kDel);
      --i;
    }
  }
  std::reverse(ops.begin(), ops.end());
  return ops;
}

inline WERReport wer_from_ops(const std::vector<EditOp>& ops, long ref_len) {
  WERReport r;
  r.sum = ref_len;
  for (EditOp op : ops) {
    switch (op) {
      case EditOp::kSub: ++r.sub; break;
      case EditOp::kIns: ++r.ins; break;
      case EditOp::kDel: ++r.del; break;
      case EditOp::kMatch: break;
    }
  }
  r.wer_percent = 100.0 * static_cast<double>(r.errors()) /
                  static_cast<double>(r.sum);
  return r;
}

// WER = 100 * (ins + del + sub) / |reference| over gloss ids.
inline WERReport wer(const std::vector<long>& reference,
                     const std::vector<long>& hypothesis) {
  if (reference.empty())
    throw ConfigError("wer: empty reference makes the rate undefined");
  const auto ops = edit_ops(
      static_cast<long>(reference.size()), static_cast<long>(hypothesis.size()),
      [&](long i, long j) {
        return reference[static_cast<size_t>(i)] == hypothesis[static_cast<size_t>(j)];
      });
  return wer_from_ops(ops, static_cast<long>(reference.size()));
}

struct AlignmentStep {
  EditOp op;
  std::string ref_tok;  // empty on insertions
  std::string hyp_tok;  // empty on deletions
};

struct AlignmentReport {
  std::vector<AlignmentStep> steps;
  WERReport report;
  std::string rendered;
};

// Token-aligned diff over gloss strings; errors are marked the way the
// qualitative tables mark them. The steps list is the machine-readable
// variant.
inline AlignmentReport alignment_report(const std::vector<std::string>& reference,
                                        const std::vector<std::string>& hypothesis) {
  if (reference.empty())
    throw ConfigError("alignment: empty reference");
  const auto ops = edit_ops(
      static_cast<long>(reference.size()), static_cast<long>(hypothesis.size()),
      [&](long i, long j) {
        return reference[static_cast<size_t>(i)] == hypothesis[static_cast<size_t>(j)];
      });
  AlignmentReport rep;
  rep.report = wer_from_ops(ops, static_cast<long>(reference.size()));
  size_t i = 0, j = 0;
  std::ostringstream os;
  for (EditOp op : ops) {
    AlignmentStep st;
    st.op = op;
    switch (op) {
      case EditOp::kMatch:
      case EditOp::kSub:
        st.ref_tok = reference[i++];
        st.hyp_tok = hypothesis[j++];
        break;
      case EditOp::kIns:
        st.hyp_tok = hypothesis[j++];
        break;
      case EditOp::kDel:
        st.ref_tok = reference[i++];
        break;
    }
    os << static_cast<char>(st.op) << '\t' << st.ref_tok << '\t' << st.hyp_tok
       << '\n';
    rep.steps.push_back(std::move(st));
  }
  std::ostringstream head;
  head.setf(std::ios::fixed);
  head.precision(1);
  head << "wer=" << rep.report.wer_percent << "% ins=" << rep.report.ins
       << " del=" << rep.report.del << " sub=" << rep.report.sub
       << " sum=" << rep.report.sum << '\n';
  rep.rendered = head.str() + os.str();
  return rep;
}

}  // namespace tfnet::decode

#endif  // TFNET_DECODE_WER_HPP
