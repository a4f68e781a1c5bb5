#ifndef TFNET_TRAIN_TRAINER_HPP
#define TFNET_TRAIN_TRAINER_HPP

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "tfnet/corpus/frames.hpp"
#include "tfnet/corpus/manifest.hpp"
#include "tfnet/corpus/vocabulary.hpp"
#include "tfnet/decode/decode.hpp"
#include "tfnet/decode/wer.hpp"
#include "tfnet/error.hpp"
#include "tfnet/loss/objective.hpp"
#include "tfnet/model/augment.hpp"
#include "tfnet/model/tfnet.hpp"
#include "tfnet/train/adam.hpp"
#include "tfnet/train/checkpoint.hpp"
#include "tfnet/train/config.hpp"

namespace tfnet::train {

struct EpochMetrics {
  long epoch = 0;
  double lr = 0;
  double mean_l_sum = 0, mean_l_ctc = 0, mean_l_vae_t = 0, mean_l_vae_f = 0;
  double dev_wer = 0;
  double wall_seconds = 0;  // console only; kept out of metrics.txt so
                            // identical runs produce identical files
};

inline std::string format_metrics_line(const EpochMetrics& m) {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "epoch=%ld lr=%.12g l_sum=%.12g l_ctc=%.12g l_vae_t=%.12g "
                "l_vae_f=%.12g dev_wer=%.12g",
                m.epoch, m.lr, m.mean_l_sum, m.mean_l_ctc, m.mean_l_vae_t,
                m.mean_l_vae_f, m.dev_wer);
  return buf;
}

struct SentenceRecord {
  long id = 0;
  std::vector<std::string> ref, hyp;
  decode::WERReport wer;
  double log_score = 0;
};

struct EvalOutcome {
  std::vector<SentenceRecord> records;
  long ins = 0, del = 0, sub = 0, sum = 0;
  double wer_percent = 0;     // micro: total errors / total reference tokens
  double log_score_sum = 0;
};

// Shared frame cache: archives are immutable once generated, so load
// each entry's directory once per process.
class FrameCache {
 public:
  const corpus::FrameArchive& get(const std::string& root,
                                  const std::string& rel_path) {
    const std::string key =
        (!rel_path.empty() && rel_path.front() == '/') ? rel_path
                                                       : root + "/" + rel_path;
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    return cache_.emplace(key, corpus::read_frame_archive(key)).first->second;
  }

 private:
  std::unordered_map<std::string, corpus::FrameArchive> cache_;
};

// Deterministic evaluation of one split: center crop, beam decode,
// micro-aggregated WER.
template <class Real>
EvalOutcome evaluate(model::TFNetModel<Real>& net,
                     const corpus::GlossVocabulary& vocab,
                     const std::vector<corpus::CorpusEntry>& entries,
                     const std::string& root, long beam_width,
                     FrameCache* cache = nullptr) {
  EvalOutcome out;
  FrameCache local;
  FrameCache& fc = cache ? *cache : local;
  Rng dummy(0);  // eval-mode augmentation draws nothing
  for (const corpus::CorpusEntry& e : entries) {
    SentenceRecord rec;
    rec.id = e.id;
    rec.ref = e.glosses;
    std::vector<long> ref_ids;
    for (const std::string& tok : e.glosses) {
      const long id = vocab.id_of(tok);
      if (id < 0)
        throw ConfigError("evaluate: gloss '" + tok + "' of entry " +
                          std::to_string(e.id) +
                          " is not in the checkpoint vocabulary");
      ref_ids.push_back(id);
    }
    const corpus::FrameArchive& a = fc.get(root, e.frames_path);
    Tensor<Real> video = corpus::to_video_tensor<Real>(a);
    video = model::augment(video, model::AugmentMode::kEval,
                           net.config().input_height, net.config().input_width,
                           dummy);
    const auto& fw = net.forward(video);
    const decode::DecodeResult dr = decode::beam_decode(fw.logits, beam_width);
    rec.log_score = dr.log_score;
    for (long id : dr.glosses) rec.hyp.push_back(vocab.token(id));
    rec.wer = decode::wer(ref_ids, dr.glosses);
    out.ins += rec.wer.ins;
    out.del += rec.wer.del;
    out.sub += rec.wer.sub;
    out.sum += rec.wer.sum;
    out.log_score_sum += dr.log_score;
    out.records.push_back(std::move(rec));
  }
  out.wer_percent =
      out.sum > 0 ? 100.0 * static_cast<double>(out.ins + out.del + out.sub) /
                        static_cast<double>(out.sum)
                  : 0.0;
  return out;
}

inline std::string format_eval_record(const SentenceRecord& r) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(1);
  os << "id=" << r.id << " ref=" << corpus::join(r.ref, '/')
     << " hyp=" << corpus::join(r.hyp, '/') << " ins=" << r.wer.ins
     << " del=" << r.wer.del << " sub=" << r.wer.sub
     << " wer=" << r.wer.wer_percent;
  return os.str();
}

inline std::string format_eval_summary(const EvalOutcome& o, const char* split) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(2);
  os << "split=" << split << " sentences=" << o.records.size()
     << " ins=" << o.ins << " del=" << o.del << " sub=" << o.sub
     << " sum=" << o.sum << " wer=" << o.wer_percent;
  return os.str();
}

// Training driver: seeded shuffling, size-B batches padded to the batch
// max T' with blank-certain logit rows, augmentation in train mode,
// Adam with the piecewise LR schedule, dev WER per epoch,
// best-dev checkpoint retention.
template <class Real>
class Trainer {
 public:
  Trainer(std::vector<corpus::CorpusEntry> entries, std::string root,
          model::ModelConfig mcfg, TrainConfig tcfg)
      : root_(std::move(root)), mcfg_(std::move(mcfg)), tcfg_(tcfg) {
    tcfg_.validate();
    for (auto& e : entries) {
      if (e.split == corpus::Split::kTrain) train_.push_back(e);
      else if (e.split == corpus::Split::kDev) dev_.push_back(e);
    }
    if (train_.empty()) throw ConfigError("trainer: no train entries");
    vocab_ = corpus::build_vocabulary(train_);
    mcfg_.num_glosses = vocab_.size();
    net_ = std::make_unique<model::TFNetModel<Real>>(mcfg_);
    if (tcfg_.vae_t && !net_->has_aux_temporal())
      throw ConfigError("trainer: vae_t enabled but the model has no temporal "
                        "auxiliary classifier");
    if (tcfg_.vae_f && !net_->has_aux_frequency())
      throw ConfigError("trainer: vae_f enabled but the model has no frequency "
                        "auxiliary classifier");
  }

  model::TFNetModel<Real>& net() { return *net_; }
  const corpus::GlossVocabulary& vocab() const { return vocab_; }
  const std::vector<EpochMetrics>& metrics() const { return metrics_; }

  // Trains to completion; returns best dev WER. Writes metrics.txt and
  // best.tfnc under outdir.
  double run(const std::string& outdir, std::ostream& log) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(outdir, ec);
    if (ec) throw IoError("cannot create outdir '" + outdir + "'");
    std::ofstream mout(outdir + "/metrics.txt", std::ios::binary);
    if (!mout) throw IoError("cannot write metrics in '" + outdir + "'");

    rng_ = Rng(tcfg_.seed);
    net_->init_params(rng_);
    adam_ = std::make_unique<Adam<Real>>(net_->params(), tcfg_.beta1,
                                         tcfg_.beta2, tcfg_.adam_eps);
    double best_wer = -1;
    std::vector<size_t> order(train_.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (long epoch = 0; epoch < tcfg_.epochs; ++epoch) {
      const auto t0 = std::chrono::steady_clock::now();
      const double lr = tcfg_.lr_at(epoch);
      rng_.shuffle(order);
      double sum_l = 0, sum_ctc = 0, sum_t = 0, sum_f = 0;
      long counted = 0;
      for (size_t start = 0; start < order.size(); start += tcfg_.batch_size) {
        const size_t stop = std::min(order.size(), start + tcfg_.batch_size);
        counted += train_batch(order, start, stop, lr, log, sum_l, sum_ctc,
                               sum_t, sum_f);
      }
      EpochMetrics m;
      m.epoch = epoch;
      m.lr = lr;
      if (counted > 0) {
        m.mean_l_sum = sum_l / counted;
        m.mean_l_ctc = sum_ctc / counted;
        m.mean_l_vae_t = sum_t / counted;
        m.mean_l_vae_f = sum_f / counted;
      }
      if (!dev_.empty()) {
        const EvalOutcome dev =
            evaluate(*net_, vocab_, dev_, root_, tcfg_.beam_width, &cache_);
        m.dev_wer = dev.wer_percent;
      }
      m.wall_seconds = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - t0)
                           .count();
      metrics_.push_back(m);
      mout << format_metrics_line(m) << "\n";
      mout.flush();
      log << format_metrics_line(m) << " wall_s="
          << static_cast<long>(m.wall_seconds + 0.5) << "\n";
      if (best_wer < 0 || m.dev_wer < best_wer) {
        best_wer = m.dev_wer;
        save_checkpoint(outdir + "/best.tfnc", epoch, best_wer);
      }
    }
    return best_wer;
  }

  void save_checkpoint(const std::string& path, long epoch, double best_wer) {
    Checkpoint ck;
    fill_params_from_store(ck, net_->params());
    ck.model_kv = mcfg_.to_kv_string();
    ck.vocab = vocab_.tokens();
    ck.has_train_state = true;
    ck.train_state.epoch = epoch;
    ck.train_state.step = adam_ ? adam_->step_count() : 0;
    ck.train_state.best_dev_wer = best_wer;
    ck.train_state.beta1 = tcfg_.beta1;
    ck.train_state.beta2 = tcfg_.beta2;
    ck.train_state.eps = tcfg_.adam_eps;
    ck.train_state.rng = rng_.serialize();
    if (adam_) {
      for (size_t i = 0; i < adam_->slots(); ++i) {
        std::vector<float> m, v;
        for (Real x : adam_->moment1(i).data) m.push_back(static_cast<float>(x));
        for (Real x : adam_->moment2(i).data) v.push_back(static_cast<float>(x));
        ck.train_state.m.push_back(std::move(m));
        ck.train_state.v.push_back(std::move(v));
      }
    }
    ck.save(path);
  }

 private:
  // Returns the number of entries that contributed to the batch.
  long train_batch(const std::vector<size_t>& order, size_t start, size_t stop,
                   double lr, std::ostream& log, double& sum_l, double& sum_ctc,
                   double& sum_t, double& sum_f) {
    struct Item {
      const corpus::CorpusEntry* entry;
      Tensor<Real> video;
      std::vector<long> labels;
      long t_prime;
    };
    std::vector<Item> batch;
    for (size_t idx = start; idx < stop; ++idx) {
      const corpus::CorpusEntry& e = train_[order[idx]];
      const corpus::FrameArchive& a = cache_.get(root_, e.frames_path);
      Tensor<Real> video = corpus::to_video_tensor<Real>(a);
      video = model::augment(video, model::AugmentMode::kTrain,
                             mcfg_.input_height, mcfg_.input_width, rng_);
      std::vector<long> labels = vocab_.encode(e.glosses);
      const long tp = mcfg_.t_prime(video.dim(0));
      if (tp < objective::ctc_min_steps(labels)) {
        log << "warning: entry id=" << e.id << " infeasible (T'=" << tp
            << " for " << labels.size() << " labels), skipped\n";
        continue;
      }
      batch.push_back(Item{&e, std::move(video), std::move(labels), tp});
    }
    if (batch.empty()) return 0;
    long pad_to = 0;
    for (const Item& it : batch) pad_to = std::max(pad_to, it.t_prime);
    net_->params().zero_grad();
    const double inv_b = 1.0 / static_cast<double>(batch.size());
    for (Item& it : batch) {
      const auto& fw = net_->forward(it.video);
      objective::LossToggles toggles{tcfg_.vae_t, tcfg_.vae_f};
      objective::ObjectiveGrad<Real> obj;
      try {
        obj = objective::total_loss(fw.logits, fw.aux_logits_t, fw.aux_logits_f,
                                    it.labels, toggles, tcfg_.kl_temperature,
                                    pad_to);
      } catch (const NumericError& err) {
        throw NumericError("entry id=" + std::to_string(it.entry->id) + ": " +
                           err.what());
      }
      if (!std::isfinite(obj.breakdown.l_sum))
        throw NumericError("entry id=" + std::to_string(it.entry->id) +
                           ": non-finite loss");
      sum_l += obj.breakdown.l_sum;
      sum_ctc += obj.breakdown.l_ctc;
      sum_t += obj.breakdown.l_vae_t;
      sum_f += obj.breakdown.l_vae_f;
      for (auto& g : obj.dlogits.data) g = static_cast<Real>(g * inv_b);
      if (obj.has_aux_t)
        for (auto& g : obj.daux_t.data) g = static_cast<Real>(g * inv_b);
      if (obj.has_aux_f)
        for (auto& g : obj.daux_f.data) g = static_cast<Real>(g * inv_b);
      net_->backward(obj.dlogits, obj.has_aux_t ? &obj.daux_t : nullptr,
                     obj.has_aux_f ? &obj.daux_f : nullptr);
    }
    adam_->step(lr, tcfg_.weight_decay);
    return static_cast<long>(batch.size());
  }

  std::string root_;
  model::ModelConfig mcfg_;
  TrainConfig tcfg_;
  std::vector<corpus::CorpusEntry> train_, dev_;
  corpus::GlossVocabulary vocab_;
  std::unique_ptr<model::TFNetModel<Real>> net_;
  std::unique_ptr<Adam<Real>> adam_;
  Rng rng_{0};
  FrameCache cache_;
  std::vector<EpochMetrics> metrics_;
};

}  // namespace tfnet::train

#endif  // TFNET_TRAIN_TRAINER_HPP
