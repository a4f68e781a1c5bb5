#ifndef TFNET_NN_PARAM_HPP
#define TFNET_NN_PARAM_HPP

#include <memory>
#include <string>
#include <vector>

#include "tfnet/rng.hpp"
#include "tfnet/tensor.hpp"

namespace tfnet::nn {

// One named learnable buffer: values plus a shape-equal gradient
// accumulator. Gradients accumulate across backward calls until
// zero_grad().
template <class Real>
struct ParamBuffer {
  std::string name;
  Tensor<Real> value;
  Tensor<Real> grad;

  ParamBuffer() = default;
  ParamBuffer(std::string n, std::vector<long> shape)
      : name(std::move(n)), value(shape), grad(shape) {}

  void zero_grad() { grad.fill(Real(0)); }

  void init_uniform(Rng& rng, double scale) {
    for (auto& v : value.data)
      v = static_cast<Real>(rng.uniform(-scale, scale));
  }
};

// Ordered registry of the parameters owned by a model. Buffers are
// heap-held so references handed to ops stay valid as the store grows.
// Registration order fixes both the optimizer iteration order and the
// checkpoint layout, so it must be deterministic.
template <class Real>
class ParamStore {
 public:
  ParamStore() = default;
  ParamStore(const ParamStore&) = delete;
  ParamStore& operator=(const ParamStore&) = delete;

  ParamBuffer<Real>& add(const std::string& name, std::vector<long> shape) {
    params_.push_back(
        std::make_unique<ParamBuffer<Real>>(name, std::move(shape)));
    return *params_.back();
  }

  size_t count() const { return params_.size(); }
  ParamBuffer<Real>& at(size_t i) { return *params_[i]; }
  const ParamBuffer<Real>& at(size_t i) const { return *params_[i]; }

  ParamBuffer<Real>* find(const std::string& name) {
    for (auto& p : params_)
      if (p->name == name) return p.get();
    return nullptr;
  }

  void zero_grad() {
    for (auto& p : params_) p->zero_grad();
  }

  long total_values() const {
    long n = 0;
    for (auto& p : params_) n += p->value.size();
    return n;
  }

 private:
  std::vector<std::unique_ptr<ParamBuffer<Real>>> params_;
};

}  // namespace tfnet::nn

#endif  // TFNET_NN_PARAM_HPP
