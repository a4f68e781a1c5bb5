#ifndef TFNET_CORPUS_SYNTH_HPP
#define TFNET_CORPUS_SYNTH_HPP

#include <cmath>
#include <cstdint>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "tfnet/corpus/frames.hpp"
#include "tfnet/corpus/manifest.hpp"
#include "tfnet/error.hpp"
#include "tfnet/kv.hpp"
#include "tfnet/rng.hpp"

namespace tfnet::corpus {

struct SynthConfig {
  long vocab_size = 12;
  long sentence_len_min = 2;
  long sentence_len_max = 5;
  long frames_per_gloss_min = 8;
  long frames_per_gloss_max = 12;
  long frame_height = 32;
  long frame_width = 32;
  long channels = 1;
  double clutter_level = 0.3;
  long train_count = 200;
  long dev_count = 40;
  long test_count = 40;
  std::uint64_t seed = 1;

  void validate() const {
    if (vocab_size < 2) throw ConfigError("synth: vocab_size must be >= 2");
    if (sentence_len_min < 1 || sentence_len_min > sentence_len_max)
      throw ConfigError("synth: bad sentence length range");
    if (frames_per_gloss_min < 1 || frames_per_gloss_min > frames_per_gloss_max)
      throw ConfigError("synth: bad frames-per-gloss range");
    if (frame_height < 8 || frame_width < 8)
      throw ConfigError("synth: frame size must be at least 8x8");
    if (channels < 1) throw ConfigError("synth: channels must be >= 1");
    if (clutter_level < 0.0 || clutter_level > 1.0)
      throw ConfigError("synth: clutter_level must be in [0,1]");
    if (train_count < 1 || dev_count < 1 || test_count < 1)
      throw ConfigError("synth: split counts must be >= 1");
  }

  static SynthConfig from_kv(const KvFile& kv) {
    SynthConfig c;
    c.vocab_size = kv.get_long("vocab_size", c.vocab_size);
    c.sentence_len_min = kv.get_long("sentence_len_min", c.sentence_len_min);
    c.sentence_len_max = kv.get_long("sentence_len_max", c.sentence_len_max);
    c.frames_per_gloss_min = kv.get_long("frames_per_gloss_min", c.frames_per_gloss_min);
    c.frames_per_gloss_max = kv.get_long("frames_per_gloss_max", c.frames_per_gloss_max);
    c.frame_height = kv.get_long("frame_height", c.frame_height);
    c.frame_width = kv.get_long("frame_width", c.frame_width);
    c.channels = kv.get_long("channels", c.channels);
    c.clutter_level = kv.get_double("clutter_level", c.clutter_level);
    c.train_count = kv.get_long("train_count", c.train_count);
    c.dev_count = kv.get_long("dev_count", c.dev_count);
    c.test_count = kv.get_long("test_count", c.test_count);
    c.seed = static_cast<std::uint64_t>(kv.get_long("seed", static_cast<long>(c.seed)));
    c.validate();
    return c;
  }
};

// 4x4 binary glyph masks, one per gloss id. Regenerated until distinct
// from every earlier glyph and its horizontal mirror, so flip
// augmentation cannot alias two glosses.
inline std::vector<std::uint16_t> make_glyph_masks(long vocab_size) {
  if (vocab_size > 20000)
    throw ConfigError("synth: at most 20000 distinct glyphs are available");
  Rng rng(0x676c797068u);  // fixed: glyph patterns independent of corpus seed
  auto mirror = [](std::uint16_t m) {
    std::uint16_t r = 0;
    for (int y = 0; y < 4; ++y)
      for (int x = 0; x < 4; ++x)
        if (m & (1u << (y * 4 + x))) r |= static_cast<std::uint16_t>(1u << (y * 4 + (3 - x)));
    return r;
  };
  std::set<std::uint16_t> used;
  std::vector<std::uint16_t> glyphs;
  while (static_cast<long>(glyphs.size()) < vocab_size) {
    std::uint16_t m = static_cast<std::uint16_t>(rng.next_u64() & 0xffff);
    int bits = 0;
    for (int i = 0; i < 16; ++i) bits += (m >> i) & 1;
    if (bits < 5 || bits > 11) continue;
    if (used.count(m) || used.count(mirror(m))) continue;
    used.insert(m);
    used.insert(mirror(m));
    glyphs.push_back(m);
  }
  return glyphs;
}

// Renders one sentence: each gloss paints its glyph for a random span of
// frames over a clutter background. clutter_level 0 leaves the
// background exactly constant.
inline FrameArchive render_entry(const SynthConfig& cfg,
                                 const std::vector<std::uint16_t>& glyphs,
                                 const std::vector<long>& gloss_ids, Rng& rng) {
  const long h = cfg.frame_height, w = cfg.frame_width, c = cfg.channels;
  const long cell = std::max<long>(1, (std::min(h, w) * 3 / 4) / 4);
  const long glyph_px = 4 * cell;
  FrameArchive a;
  a.c = c;
  a.h = h;
  a.w = w;
  const std::uint8_t base = 64;
  for (long gi : gloss_ids) {
    const std::uint16_t mask = glyphs[static_cast<size_t>(gi - 1)];
    const long span =
        rng.uniform_int(cfg.frames_per_gloss_min, cfg.frames_per_gloss_max);
    const long oy = rng.uniform_int(0, h - glyph_px);
    const long ox = rng.uniform_int(0, w - glyph_px);
    for (long f = 0; f < span; ++f) {
      std::vector<std::uint8_t> frame(static_cast<size_t>(h * w * c));
      for (long y = 0; y < h; ++y) {
        for (long x = 0; x < w; ++x) {
          double v = base;
          if (cfg.clutter_level > 0.0) {
            const double noise = rng.uniform(0.0, 255.0);
            v = (1.0 - cfg.clutter_level) * base + cfg.clutter_level * noise;
          }
          const long gy = (y - oy) / cell, gx = (x - ox) / cell;
          if (y >= oy && x >= ox && gy < 4 && gx < 4 &&
              (mask & (1u << (gy * 4 + gx))))
            v = 230.0;
          const auto byte = static_cast<std::uint8_t>(std::lround(v));
          for (long ch = 0; ch < c; ++ch)
            frame[static_cast<size_t>((y * w + x) * c + ch)] = byte;
        }
      }
      a.frames.push_back(std::move(frame));
    }
  }
  a.t = static_cast<long>(a.frames.size());
  return a;
}

// Deterministic synthetic corpus: manifest plus one frame archive per
// entry under <outdir>/frames/<id>. Returns the generated entries.
inline std::vector<CorpusEntry> generate_synthetic(const SynthConfig& cfg,
                                                   const std::string& outdir,
                                                   std::ostream* warn = nullptr) {
  cfg.validate();

  // diversity warning: more sentences requested than expressible
  double expressible = 0;
  for (long len = cfg.sentence_len_min; len <= cfg.sentence_len_max; ++len)
    expressible += static_cast<double>(cfg.vocab_size) *
                   std::pow(static_cast<double>(cfg.vocab_size - 1), len - 1);
  const long requested = cfg.train_count + cfg.dev_count + cfg.test_count;
  if (warn && expressible < static_cast<double>(requested))
    *warn << "warning: requested " << requested
          << " sentences but the vocabulary can only express about "
          << static_cast<long>(expressible) << " distinct ones\n";

  int width = 1;
  for (long v = cfg.vocab_size; v >= 10; v /= 10) ++width;
  std::vector<std::string> tokens;
  for (long i = 1; i <= cfg.vocab_size; ++i) {
    std::string digits = std::to_string(i);
    while (static_cast<int>(digits.size()) < width) digits.insert(0, 1, '0');
    tokens.push_back("g" + digits);
  }
  const std::vector<std::uint16_t> glyphs = make_glyph_masks(cfg.vocab_size);
  static const char* kSigners[4] = {"sA", "sB", "sC", "sD"};

  Rng rng(cfg.seed);
  std::vector<CorpusEntry> entries;
  long next_id = 1;
  const struct {
    Split split;
    long count;
  } plan[3] = {{Split::kTrain, cfg.train_count},
               {Split::kDev, cfg.dev_count},
               {Split::kTest, cfg.test_count}};
  for (const auto& p : plan) {
    for (long n = 0; n < p.count; ++n) {
      CorpusEntry e;
      e.id = next_id++;
      e.signer = kSigners[e.id % 4];
      e.split = p.split;
      const long len = rng.uniform_int(cfg.sentence_len_min, cfg.sentence_len_max);
      std::vector<long> ids;
      for (long j = 0; j < len; ++j) {
        long g = rng.uniform_int(1, cfg.vocab_size);
        // adjacent repeats would demand extra CTC steps; resample
        while (j > 0 && g == ids.back())
          g = rng.uniform_int(1, cfg.vocab_size);
        ids.push_back(g);
      }
      for (long g : ids) e.glosses.push_back(tokens[static_cast<size_t>(g - 1)]);
      e.sentence = join(e.glosses, ' ');
      if (rng.bernoulli(0.25))
        e.notes.push_back(e.glosses[static_cast<size_t>(
            rng.uniform_int(0, len - 1))]);
      FrameArchive a = render_entry(cfg, glyphs, ids, rng);
      e.frame_count = a.t;
      e.fps = 25.0;
      e.frames_path = "frames/" + std::to_string(e.id);
      write_frame_archive(outdir + "/" + e.frames_path, a);
      entries.push_back(std::move(e));
    }
  }
  write_manifest(outdir + "/manifest.txt", entries);
  return entries;
}

}  // namespace tfnet::corpus

#endif  // TFNET_CORPUS_SYNTH_HPP
