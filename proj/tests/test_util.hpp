#ifndef TFNET_TESTS_TEST_UTIL_HPP
#define TFNET_TESTS_TEST_UTIL_HPP

#include <cmath>
#include <vector>

#include "tfnet/rng.hpp"
#include "tfnet/tensor.hpp"

namespace testutil {

template <class Real>
tfnet::Tensor<Real> rand_tensor(std::vector<long> shape, tfnet::Rng& rng,
                                double scale = 1.0) {
  tfnet::Tensor<Real> t(std::move(shape));
  for (auto& v : t.data) v = static_cast<Real>(rng.normal() * scale);
  return t;
}

template <class Real>
double max_abs_diff(const tfnet::Tensor<Real>& a, const tfnet::Tensor<Real>& b) {
  double m = 0;
  for (size_t i = 0; i < a.data.size(); ++i)
    m = std::max(m, std::fabs(static_cast<double>(a.data[i]) -
                              static_cast<double>(b.data[i])));
  return m;
}

}  // namespace testutil

#endif  // TFNET_TESTS_TEST_UTIL_HPP
