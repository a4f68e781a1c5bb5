#ifndef TFNET_TRAIN_MODEL_IO_HPP
#define TFNET_TRAIN_MODEL_IO_HPP

#include <memory>
#include <string>

#include "tfnet/corpus/vocabulary.hpp"
#include "tfnet/error.hpp"
#include "tfnet/kv.hpp"
#include "tfnet/model/tfnet.hpp"
#include "tfnet/train/checkpoint.hpp"

namespace tfnet::train {

// A model rebuilt from a self-contained checkpoint (parameters plus the
// embedded model config and vocabulary).
template <class Real>
struct LoadedModel {
  model::ModelConfig cfg;
  corpus::GlossVocabulary vocab;
  std::unique_ptr<model::TFNetModel<Real>> net;
  Checkpoint checkpoint;
};

template <class Real>
LoadedModel<Real> load_model(const std::string& path) {
  LoadedModel<Real> lm;
  lm.checkpoint = Checkpoint::load(path);
  if (lm.checkpoint.model_kv.empty())
    throw ConfigError("checkpoint '" + path + "' carries no model config");
  lm.cfg = model::ModelConfig::from_kv(
      KvFile::parse(lm.checkpoint.model_kv, path + ":MODL"));
  if (lm.checkpoint.vocab.empty())
    throw ConfigError("checkpoint '" + path + "' carries no vocabulary");
  lm.vocab = corpus::GlossVocabulary(lm.checkpoint.vocab);
  if (lm.vocab.size() != lm.cfg.num_glosses)
    throw ConfigError("checkpoint '" + path + "': vocabulary size " +
                      std::to_string(lm.vocab.size()) +
                      " does not match model num_glosses " +
                      std::to_string(lm.cfg.num_glosses));
  lm.net = std::make_unique<model::TFNetModel<Real>>(lm.cfg);
  apply_params_to_store(lm.checkpoint, lm.net->params());
  return lm;
}

}  // namespace tfnet::train

#endif  // TFNET_TRAIN_MODEL_IO_HPP
