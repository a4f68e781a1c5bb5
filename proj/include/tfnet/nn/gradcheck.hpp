#ifndef TFNET_NN_GRADCHECK_HPP
#define TFNET_NN_GRADCHECK_HPP

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "tfnet/error.hpp"
#include "tfnet/nn/param.hpp"
#include "tfnet/tensor.hpp"

namespace tfnet::nn {

// One scalar forward evaluation, plus the hash of all discrete decisions
// (relu masks, pool argmaxes) taken on the way. Two evaluations with
// different signatures straddle a kink, where central differences are
// meaningless.
struct EvalResult {
  double loss = 0;
  std::uint64_t signature = 0;
};

// Coordinates to check: raw value slots paired with their analytic
// gradient, snapshotted after one backward pass.
template <class Real>
struct CoordSet {
  std::vector<Real*> value;
  std::vector<double> analytic;

  void add(ParamBuffer<Real>& p) {
    for (size_t i = 0; i < p.value.data.size(); ++i) {
      value.push_back(&p.value.data[i]);
      analytic.push_back(static_cast<double>(p.grad.data[i]));
    }
  }
  void add(Tensor<Real>& x, const Tensor<Real>& dx) {
    if (x.shape != dx.shape) throw ShapeError("gradcheck: coord shape mismatch");
    for (size_t i = 0; i < x.data.size(); ++i) {
      value.push_back(&x.data[i]);
      analytic.push_back(static_cast<double>(dx.data[i]));
    }
  }
  size_t size() const { return value.size(); }
};

struct GradCheckReport {
  double max_rel_err = 0;
  long checked = 0;
  long skipped = 0;  // coordinates whose perturbation crossed a kink
  long worst = -1;

  bool ok(double tol) const { return checked > 0 && max_rel_err < tol; }
};

// Central differences (f(x+eps) - f(x-eps)) / (2 eps) against the
// analytic gradient snapshot; relative error uses the
// max(|analytic|, |numeric|, 1e-8) denominator.
template <class Real, class Eval>
GradCheckReport grad_check(Eval eval, CoordSet<Real>& coords, double eps = 1e-3) {
  GradCheckReport rep;
  for (size_t i = 0; i < coords.size(); ++i) {
    Real* slot = coords.value[i];
    const Real saved = *slot;
    *slot = saved + static_cast<Real>(eps);
    const EvalResult up = eval();
    *slot = saved - static_cast<Real>(eps);
    const EvalResult dn = eval();
    *slot = saved;
    if (!std::isfinite(up.loss) || !std::isfinite(dn.loss))
      throw NumericError("grad_check: non-finite loss at coordinate " +
                         std::to_string(i));
    if (up.signature != dn.signature) {
      ++rep.skipped;
      continue;
    }
    const double fd = (up.loss - dn.loss) / (2.0 * eps);
    const double an = coords.analytic[i];
    const double denom = std::max({std::fabs(fd), std::fabs(an), 1e-8});
    const double rel = std::fabs(fd - an) / denom;
    ++rep.checked;
    if (rel > rep.max_rel_err) {
      rep.max_rel_err = rel;
      rep.worst = static_cast<long>(i);
    }
  }
  return rep;
}

}  // namespace tfnet::nn

#endif  // TFNET_NN_GRADCHECK_HPP
