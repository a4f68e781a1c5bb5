#ifndef TFNET_MODEL_CONFIG_HPP
#define TFNET_MODEL_CONFIG_HPP

#include <sstream>
#include <string>
#include <vector>

#include "tfnet/error.hpp"
#include "tfnet/kv.hpp"

namespace tfnet::model {

// Network structure. input_height/width is the post-crop resolution the
// network consumes. The frame extractor is a stack of 3x3 stride-2
// conv+relu blocks (one per frame_channels entry) closed by global
// average pooling, so C' = frame_channels.back(). Each branch is
// conv1d/relu/maxpool twice, then a BiLSTM; C'' = 2*hidden.
struct ModelConfig {
  long input_channels = 3;
  long input_height = 224;
  long input_width = 224;
  std::vector<long> frame_channels = {8, 16, 32, 64};
  std::vector<long> conv1d_channels = {64, 64};
  std::vector<long> conv1d_kernel = {5, 5};
  std::vector<long> conv1d_stride = {1, 1};
  std::vector<long> conv1d_pad = {2, 2};
  long hidden = 32;       // H_lstm
  long num_glosses = 0;   // l; classifier emits l+1 scores, class 0 = blank
  bool temporal_branch = true;
  bool frequency_branch = true;
  bool aux_classifier = true;

  long frame_feature_dim() const { return frame_channels.back(); }   // C'
  long branch_feature_dim() const { return 2 * hidden; }             // C''
  long num_classes() const { return num_glosses + 1; }

  // Branch shape law: conv1d then 2x maxpool per block. Returns the
  // logit sequence length for a T-frame input, or 0 when T is too short.
  long t_prime(long t) const {
    for (size_t i = 0; i < conv1d_channels.size(); ++i) {
      if (t + 2 * conv1d_pad[i] < conv1d_kernel[i]) return 0;
      t = (t + 2 * conv1d_pad[i] - conv1d_kernel[i]) / conv1d_stride[i] + 1;
      if (t < 2) return 0;
      t = t / 2;
    }
    return t;
  }

  void validate() const {
    if (input_channels < 1 || input_height < 1 || input_width < 1)
      throw ConfigError("model: bad input dimensions");
    if (frame_channels.empty()) throw ConfigError("model: no frame blocks");
    for (long c : frame_channels)
      if (c < 1) throw ConfigError("model: frame channel count must be >= 1");
    const size_t nb = conv1d_channels.size();
    if (nb == 0) throw ConfigError("model: no conv1d blocks");
    if (conv1d_kernel.size() != nb || conv1d_stride.size() != nb ||
        conv1d_pad.size() != nb)
      throw ConfigError("model: conv1d k/s/p lists must match channel list");
    for (size_t i = 0; i < nb; ++i) {
      if (conv1d_channels[i] < 1) throw ConfigError("model: bad conv1d channels");
      if (conv1d_kernel[i] < 1 || conv1d_kernel[i] % 2 == 0)
        throw ConfigError("model: conv1d kernels must be odd");
      if (conv1d_stride[i] < 1 || conv1d_pad[i] < 0)
        throw ConfigError("model: bad conv1d stride/pad");
    }
    if (hidden < 1) throw ConfigError("model: hidden must be >= 1");
    if (num_glosses < 1) throw ConfigError("model: num_glosses must be >= 1");
    if (!temporal_branch && !frequency_branch)
      throw ConfigError("model: at least one branch must be enabled");
  }

  static ModelConfig from_kv(const KvFile& kv) {
    ModelConfig c;
    c.input_channels = kv.get_long("input_channels", c.input_channels);
    c.input_height = kv.get_long("input_height", c.input_height);
    c.input_width = kv.get_long("input_width", c.input_width);
    c.frame_channels = kv.get_long_list("frame_channels", c.frame_channels);
    c.conv1d_channels = kv.get_long_list("conv1d_channels", c.conv1d_channels);
    c.conv1d_kernel = kv.get_long_list("conv1d_kernel", c.conv1d_kernel);
    c.conv1d_stride = kv.get_long_list("conv1d_stride", c.conv1d_stride);
    c.conv1d_pad = kv.get_long_list("conv1d_pad", c.conv1d_pad);
    c.hidden = kv.get_long("hidden", c.hidden);
    c.num_glosses = kv.get_long("num_glosses", c.num_glosses);
    c.temporal_branch = kv.get_bool("temporal_branch", c.temporal_branch);
    c.frequency_branch = kv.get_bool("frequency_branch", c.frequency_branch);
    c.aux_classifier = kv.get_bool("aux_classifier", c.aux_classifier);
    return c;
  }

  std::string to_kv_string() const {
    auto list = [](const std::vector<long>& v) {
      std::string s;
      for (size_t i = 0; i < v.size(); ++i)
        s += (i ? "," : "") + std::to_string(v[i]);
      return s;
    };
    std::ostringstream os;
    os << "input_channels=" << input_channels << "\n"
       << "input_height=" << input_height << "\n"
       << "input_width=" << input_width << "\n"
       << "frame_channels=" << list(frame_channels) << "\n"
       << "conv1d_channels=" << list(conv1d_channels) << "\n"
       << "conv1d_kernel=" << list(conv1d_kernel) << "\n"
       << "conv1d_stride=" << list(conv1d_stride) << "\n"
       << "conv1d_pad=" << list(conv1d_pad) << "\n"
       << "hidden=" << hidden << "\n"
       << "num_glosses=" << num_glosses << "\n"
       << "temporal_branch=" << (temporal_branch ? "true" : "false") << "\n"
       << "frequency_branch=" << (frequency_branch ? "true" : "false") << "\n"
       << "aux_classifier=" << (aux_classifier ? "true" : "false") << "\n";
    return os.str();
  }
};

}  // namespace tfnet::model

#endif  // TFNET_MODEL_CONFIG_HPP
