#ifndef TFNET_TRAIN_CONFIG_HPP
#define TFNET_TRAIN_CONFIG_HPP

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "tfnet/error.hpp"
#include "tfnet/kv.hpp"

namespace tfnet::train {

// Training hyperparameters. Defaults follow the published recipe:
// lr 1e-4, weight decay 1e-4, batch 2, 55 epochs with 80% LR drops
// entering epochs 35 and 45 (zero-based epoch index), beam width 10.
struct TrainConfig {
  double lr0 = 1e-4;
  double weight_decay = 1e-4;
  long batch_size = 2;
  long epochs = 55;
  std::vector<long> lr_drop_epochs = {35, 45};
  double lr_drop_factor = 0.2;
  long beam_width = 10;
  std::uint64_t seed = 0;
  bool vae_t = true;   // temporal branch alignment loss
  bool vae_f = true;   // frequency branch alignment loss
  double kl_temperature = 8.0;
  std::string precision = "f64";
  double beta1 = 0.9, beta2 = 0.999, adam_eps = 1e-8;

  void validate() const {
    if (epochs < 1) throw ConfigError("train: epochs must be >= 1");
    if (batch_size < 1) throw ConfigError("train: batch_size must be >= 1");
    if (!(lr0 > 0)) throw ConfigError("train: lr0 must be positive");
    if (lr_drop_factor <= 0 || lr_drop_factor >= 1)
      throw ConfigError("train: lr_drop_factor must be in (0,1)");
    for (long e : lr_drop_epochs)
      if (e < 0 || e >= epochs)
        throw ConfigError("train: lr drop epoch " + std::to_string(e) +
                          " outside 0.." + std::to_string(epochs - 1));
    if (beam_width < 1) throw ConfigError("train: beam_width must be >= 1");
    if (kl_temperature <= 0) throw ConfigError("train: temperature must be positive");
    if (precision != "f32" && precision != "f64")
      throw ConfigError("train: precision must be f32 or f64");
  }

  // Piecewise-constant schedule: lr0 times factor per drop boundary
  // already passed. Zero-based epochs; "drop at 35" means epoch 35 is
  // the first reduced one.
  double lr_at(long epoch) const {
    if (epoch < 0 || epoch >= epochs)
      throw ConfigError("lr_at: epoch " + std::to_string(epoch) +
                        " outside 0.." + std::to_string(epochs - 1));
    double lr = lr0;
    for (long d : lr_drop_epochs)
      if (epoch >= d) lr *= lr_drop_factor;
    return lr;
  }

  static TrainConfig from_kv(const KvFile& kv) {
    TrainConfig c;
    c.lr0 = kv.get_double("lr0", c.lr0);
    c.weight_decay = kv.get_double("weight_decay", c.weight_decay);
    c.batch_size = kv.get_long("batch_size", c.batch_size);
    c.epochs = kv.get_long("epochs", c.epochs);
    c.lr_drop_epochs = kv.get_long_list("lr_drop_epochs", c.lr_drop_epochs);
    c.lr_drop_factor = kv.get_double("lr_drop_factor", c.lr_drop_factor);
    c.beam_width = kv.get_long("beam_width", c.beam_width);
    c.seed = static_cast<std::uint64_t>(kv.get_long("seed", static_cast<long>(c.seed)));
    c.vae_t = kv.get_bool("vae_t", c.vae_t);
    c.vae_f = kv.get_bool("vae_f", c.vae_f);
    c.kl_temperature = kv.get_double("kl_temperature", c.kl_temperature);
    c.precision = kv.get_str("precision", c.precision);
    c.beta1 = kv.get_double("beta1", c.beta1);
    c.beta2 = kv.get_double("beta2", c.beta2);
    c.adam_eps = kv.get_double("adam_eps", c.adam_eps);
    c.validate();
    return c;
  }
};

}  // namespace tfnet::train

#endif  // TFNET_TRAIN_CONFIG_HPP
