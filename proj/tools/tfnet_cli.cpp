// Command line front end: corpus statistics, synthetic corpus
// generation, training, evaluation and single-video decoding.

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tfnet/corpus/manifest.hpp"
#include "tfnet/corpus/stats.hpp"
#include "tfnet/corpus/synth.hpp"
#include "tfnet/corpus/vocabulary.hpp"
#include "tfnet/decode/decode.hpp"
#include "tfnet/error.hpp"
#include "tfnet/kv.hpp"
#include "tfnet/model/augment.hpp"
#include "tfnet/model/config.hpp"
#include "tfnet/train/config.hpp"
#include "tfnet/train/model_io.hpp"
#include "tfnet/train/trainer.hpp"

namespace {

struct GlobalOpts {
  long seed = -1;  // <0: keep config value
  std::string precision;
  long beam_width = 0;  // 0: keep config value
  bool no_temporal = false;
  bool no_frequency = false;
  bool no_vae_t = false;
  bool no_vae_f = false;
};

std::string manifest_root(const std::string& manifest_path) {
  const auto parent = std::filesystem::path(manifest_path).parent_path();
  return parent.empty() ? std::string(".") : parent.string();
}

int cmd_stats(const std::string& manifest) {
  using namespace tfnet::corpus;
  const std::vector<CorpusEntry> entries = load_manifest(manifest);
  std::vector<CorpusEntry> train;
  for (const auto& e : entries)
    if (e.split == Split::kTrain) train.push_back(e);
  const GlossVocabulary vocab = build_vocabulary(train);
  const CorpusStats stats = compute_stats(entries, vocab);
  std::cout << format_stats(stats);
  return 0;
}

int cmd_gen_synth(const std::string& config, const std::string& outdir,
                  const GlobalOpts& g) {
  using namespace tfnet::corpus;
  SynthConfig cfg = SynthConfig::from_kv(tfnet::KvFile::load(config));
  if (g.seed >= 0) cfg.seed = static_cast<std::uint64_t>(g.seed);
  const auto entries = generate_synthetic(cfg, outdir, &std::cerr);
  std::cout << "generated " << entries.size() << " entries under " << outdir
            << "\n";
  return 0;
}

template <class Real>
int run_train(const std::string& manifest, tfnet::model::ModelConfig mcfg,
              tfnet::train::TrainConfig tcfg, const std::string& outdir) {
  auto entries = tfnet::corpus::load_manifest(manifest);
  tfnet::train::Trainer<Real> trainer(std::move(entries),
                                      manifest_root(manifest), mcfg, tcfg);
  const double best = trainer.run(outdir, std::cout);
  std::cout << "best_dev_wer=" << best << "\n";
  return 0;
}

int cmd_train(const std::string& manifest, const std::string& model_cfg,
              const std::string& train_cfg, const std::string& outdir,
              const GlobalOpts& g) {
  auto mcfg = tfnet::model::ModelConfig::from_kv(tfnet::KvFile::load(model_cfg));
  auto tcfg = tfnet::train::TrainConfig::from_kv(tfnet::KvFile::load(train_cfg));
  if (g.seed >= 0) tcfg.seed = static_cast<std::uint64_t>(g.seed);
  if (!g.precision.empty()) tcfg.precision = g.precision;
  if (g.beam_width > 0) tcfg.beam_width = g.beam_width;
  if (g.no_temporal) {
    mcfg.temporal_branch = false;
    tcfg.vae_t = false;
  }
  if (g.no_frequency) {
    mcfg.frequency_branch = false;
    tcfg.vae_f = false;
  }
  if (g.no_vae_t) tcfg.vae_t = false;
  if (g.no_vae_f) tcfg.vae_f = false;
  tcfg.validate();
  if (!mcfg.temporal_branch && !mcfg.frequency_branch)
    throw tfnet::ConfigError("both branches disabled");
  if (tcfg.precision == "f32")
    return run_train<float>(manifest, mcfg, tcfg, outdir);
  return run_train<double>(manifest, mcfg, tcfg, outdir);
}

template <class Real>
int run_eval(const std::string& manifest, const std::string& split_name,
             const std::string& checkpoint, const GlobalOpts& g) {
  using namespace tfnet;
  auto lm = train::load_model<Real>(checkpoint);
  if (g.no_temporal || g.no_frequency)
    lm.net->set_active_branches(!g.no_temporal && lm.cfg.temporal_branch,
                                !g.no_frequency && lm.cfg.frequency_branch);
  const corpus::Split split = corpus::parse_split(split_name);
  std::vector<corpus::CorpusEntry> entries;
  for (auto& e : corpus::load_manifest(manifest))
    if (e.split == split) entries.push_back(std::move(e));
  const long width = g.beam_width > 0 ? g.beam_width : 10;
  const auto out = train::evaluate(*lm.net, lm.vocab, entries,
                                   manifest_root(manifest), width);
  for (const auto& rec : out.records)
    std::cout << train::format_eval_record(rec) << "\n";
  std::cout << train::format_eval_summary(out, split_name.c_str()) << "\n";
  return 0;
}

template <class Real>
int run_decode(const std::string& frames_dir, const std::string& checkpoint,
               const GlobalOpts& g) {
  using namespace tfnet;
  auto lm = train::load_model<Real>(checkpoint);
  if (g.no_temporal || g.no_frequency)
    lm.net->set_active_branches(!g.no_temporal && lm.cfg.temporal_branch,
                                !g.no_frequency && lm.cfg.frequency_branch);
  const corpus::FrameArchive a = corpus::read_frame_archive(frames_dir);
  Tensor<Real> video = corpus::to_video_tensor<Real>(a);
  Rng dummy(0);
  video = model::augment(video, model::AugmentMode::kEval,
                         lm.cfg.input_height, lm.cfg.input_width, dummy);
  const auto& fw = lm.net->forward(video);
  const long width = g.beam_width > 0 ? g.beam_width : 10;
  const auto res = decode::beam_decode(fw.logits, width);
  std::vector<std::string> toks;
  for (long id : res.glosses) toks.push_back(lm.vocab.token(id));
  std::cout << "glosses=" << corpus::join(toks, '/')
            << " log_score=" << res.log_score << " beam_width=" << width
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"TFNet continuous sign language recognition toolkit"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--seed", g.seed, "override RNG seed");
  app.add_option("--precision", g.precision, "f32 or f64")
      ->check(CLI::IsMember({"f32", "f64"}));
  app.add_option("--beam-width", g.beam_width, "beam width for decoding");
  app.add_flag("--no-temporal-branch", g.no_temporal, "disable the temporal branch");
  app.add_flag("--no-frequency-branch", g.no_frequency, "disable the frequency branch");
  app.add_flag("--no-vae-t", g.no_vae_t, "disable the temporal alignment loss");
  app.add_flag("--no-vae-f", g.no_vae_f, "disable the frequency alignment loss");

  std::string manifest, config, outdir, model_cfg, train_cfg, split, checkpoint,
      frames_dir;

  auto* stats = app.add_subcommand("stats", "corpus statistics from a manifest");
  stats->add_option("manifest", manifest)->required();

  auto* gen = app.add_subcommand("gen-synth", "generate a synthetic corpus");
  gen->add_option("config", config)->required();
  gen->add_option("outdir", outdir)->required();

  auto* train = app.add_subcommand("train", "train a model");
  train->add_option("manifest", manifest)->required();
  train->add_option("model-cfg", model_cfg)->required();
  train->add_option("train-cfg", train_cfg)->required();
  train->add_option("outdir", outdir)->required();

  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint on a split");
  eval->add_option("manifest", manifest)->required();
  eval->add_option("split", split)->required();
  eval->add_option("checkpoint", checkpoint)->required();

  auto* dec = app.add_subcommand("decode", "decode one frame archive");
  dec->add_option("frames", frames_dir)->required();
  dec->add_option("checkpoint", checkpoint)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (stats->parsed()) return cmd_stats(manifest);
    if (gen->parsed()) return cmd_gen_synth(config, outdir, g);
    if (train->parsed()) return cmd_train(manifest, model_cfg, train_cfg, outdir, g);
    if (eval->parsed()) {
      if (g.precision == "f32") return run_eval<float>(manifest, split, checkpoint, g);
      return run_eval<double>(manifest, split, checkpoint, g);
    }
    if (dec->parsed()) {
      if (g.precision == "f32") return run_decode<float>(frames_dir, checkpoint, g);
      return run_decode<double>(frames_dir, checkpoint, g);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::cerr << "error: no subcommand\n";
  return 1;
}
