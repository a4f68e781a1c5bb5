#ifndef TFNET_MODEL_AUGMENT_HPP
#define TFNET_MODEL_AUGMENT_HPP

#include <algorithm>
#include <cmath>

#include "tfnet/error.hpp"
#include "tfnet/rng.hpp"
#include "tfnet/tensor.hpp"

namespace tfnet::model {

enum class AugmentMode { kTrain, kEval };

// The sampled decisions for one video. One crop offset and one flip
// decision apply to every frame; the temporal length is resampled by
// nearest-frame index mapping.
struct AugmentPlan {
  long crop_y = 0;
  long crop_x = 0;
  bool flip = false;
  long new_len = 0;
};

template <class Real>
AugmentPlan sample_augment_plan(const Tensor<Real>& video, long crop_h,
                                long crop_w, AugmentMode mode, Rng& rng) {
  if (video.rank() != 4) throw ShapeError("augment: video must be T x C x H x W");
  const long t = video.dim(0), h = video.dim(2), w = video.dim(3);
  if (crop_h > h || crop_w > w)
    throw ConfigError("augment: crop " + std::to_string(crop_h) + "x" +
                      std::to_string(crop_w) + " larger than frame " +
                      std::to_string(h) + "x" + std::to_string(w));
  AugmentPlan plan;
  if (mode == AugmentMode::kEval) {
    plan.crop_y = (h - crop_h) / 2;
    plan.crop_x = (w - crop_w) / 2;
    plan.flip = false;
    plan.new_len = t;
    return plan;
  }
  plan.crop_y = rng.uniform_int(0, h - crop_h);
  plan.crop_x = rng.uniform_int(0, w - crop_w);
  plan.flip = rng.bernoulli(0.5);
  const long lo = std::max<long>(1, static_cast<long>(std::ceil(0.8 * t)));
  const long hi = std::max(lo, static_cast<long>(std::floor(1.2 * t)));
  plan.new_len = rng.uniform_int(lo, hi);
  return plan;
}

// Nearest source frame for target index j when resampling T -> T_new,
// using the frame-center convention (identity when lengths match).
inline long resample_index(long j, long t_old, long t_new) {
  const long src = static_cast<long>(
      std::floor((static_cast<double>(j) + 0.5) * t_old / t_new));
  return std::min(t_old - 1, std::max<long>(0, src));
}

template <class Real>
Tensor<Real> apply_augment(const Tensor<Real>& video, const AugmentPlan& plan,
                           long crop_h, long crop_w) {
  const long t_old = video.dim(0), c = video.dim(1);
  const long t_new = plan.new_len;
  Tensor<Real> out({t_new, c, crop_h, crop_w});
  for (long j = 0; j < t_new; ++j) {
    const long src = resample_index(j, t_old, t_new);
    for (long ch = 0; ch < c; ++ch) {
      for (long y = 0; y < crop_h; ++y) {
        for (long x = 0; x < crop_w; ++x) {
          const long sx = plan.flip ? (plan.crop_x + crop_w - 1 - x) : (plan.crop_x + x);
          out.at(j, ch, y, x) = video.at(src, ch, plan.crop_y + y, sx);
        }
      }
    }
  }
  return out;
}

// Train mode: random crop, 0.5 horizontal flip, uniform temporal
// resample in [0.8T, 1.2T]. Eval mode: deterministic center crop only.
template <class Real>
Tensor<Real> augment(const Tensor<Real>& video, AugmentMode mode, long crop_h,
                     long crop_w, Rng& rng) {
  const AugmentPlan plan = sample_augment_plan(video, crop_h, crop_w, mode, rng);
  return apply_augment(video, plan, crop_h, crop_w);
}

}  // namespace tfnet::model

#endif  // TFNET_MODEL_AUGMENT_HPP
