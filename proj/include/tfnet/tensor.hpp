#ifndef TFNET_TENSOR_HPP
#define TFNET_TENSOR_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "tfnet/error.hpp"

namespace tfnet {

// Dense row-major tensor. All model data (videos, feature sequences,
// logits, parameters) lives in these; summation order in every operator
// is fixed, so forward passes are bit-deterministic.
template <class Real>
struct Tensor {
  std::vector<long> shape;
  std::vector<Real> data;

  Tensor() = default;
  explicit Tensor(std::vector<long> s) : shape(std::move(s)) {
    data.assign(static_cast<size_t>(count(shape)), Real(0));
  }
  Tensor(std::vector<long> s, std::vector<Real> d)
      : shape(std::move(s)), data(std::move(d)) {
    if (static_cast<long>(data.size()) != count(shape))
      throw ShapeError("tensor: data size does not match shape");
  }

  static long count(const std::vector<long>& s) {
    long n = 1;
    for (long d : s) {
      if (d < 0) throw ShapeError("tensor: negative dimension");
      n *= d;
    }
    return n;
  }

  long size() const { return static_cast<long>(data.size()); }
  int rank() const { return static_cast<int>(shape.size()); }
  long dim(int i) const { return shape[static_cast<size_t>(i)]; }

  Real* ptr() { return data.data(); }
  const Real* ptr() const { return data.data(); }

  // 2-d access, shape {R, C}
  Real& at(long r, long c) { return data[static_cast<size_t>(r * shape[1] + c)]; }
  Real at(long r, long c) const { return data[static_cast<size_t>(r * shape[1] + c)]; }

  // 3-d access, shape {A, B, C}
  Real& at(long a, long b, long c) {
    return data[static_cast<size_t>((a * shape[1] + b) * shape[2] + c)];
  }
  Real at(long a, long b, long c) const {
    return data[static_cast<size_t>((a * shape[1] + b) * shape[2] + c)];
  }

  // 4-d access, shape {A, B, C, D}
  Real& at(long a, long b, long c, long d) {
    return data[static_cast<size_t>(((a * shape[1] + b) * shape[2] + c) * shape[3] + d)];
  }
  Real at(long a, long b, long c, long d) const {
    return data[static_cast<size_t>(((a * shape[1] + b) * shape[2] + c) * shape[3] + d)];
  }

  void fill(Real v) { std::fill(data.begin(), data.end(), v); }

  bool all_finite() const {
    for (Real v : data)
      if (!std::isfinite(static_cast<double>(v))) return false;
    return true;
  }

  bool same_shape(const Tensor& o) const { return shape == o.shape; }

  std::string shape_str() const {
    std::ostringstream os;
    os << "[";
    for (size_t i = 0; i < shape.size(); ++i) os << (i ? "x" : "") << shape[i];
    os << "]";
    return os.str();
  }
};

inline std::string shape_to_str(const std::vector<long>& s) {
  std::ostringstream os;
  os << "[";
  for (size_t i = 0; i < s.size(); ++i) os << (i ? "x" : "") << s[i];
  os << "]";
  return os.str();
}

template <class Real>
void require_shape(const Tensor<Real>& t, const std::vector<long>& s,
                   const char* who) {
  if (t.shape != s)
    throw ShapeError(std::string(who) + ": expected shape " + shape_to_str(s) +
                     ", got " + t.shape_str());
}

}  // namespace tfnet

#endif  // TFNET_TENSOR_HPP
