#ifndef TFNET_CORPUS_STATS_HPP
#define TFNET_CORPUS_STATS_HPP

#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "tfnet/corpus/manifest.hpp"
#include "tfnet/corpus/vocabulary.hpp"

namespace tfnet::corpus {

struct SplitStats {
  long signers = 0;          // distinct signer labels
  double duration_hours = 0; // sum of frame_count / fps, in hours
  long frames = 0;
  long sentences = 0;
  long vocabulary_size = 0;  // distinct tokens within the split
  long oov_count = 0;        // distinct tokens absent from train vocabulary
};

struct CorpusStats {
  SplitStats train, dev, test;
  std::string resolution = "varying";

  SplitStats& by_split(Split s) {
    switch (s) {
      case Split::kTrain: return train;
      case Split::kDev: return dev;
      case Split::kTest: return test;
    }
    return train;
  }
  const SplitStats& by_split(Split s) const {
    return const_cast<CorpusStats*>(this)->by_split(s);
  }
};

// Per-split counts in the layout of the dataset's summary table. OOV is
// counted over distinct dev/test tokens against the train vocabulary;
// the train split reports 0 by construction.
inline CorpusStats compute_stats(const std::vector<CorpusEntry>& entries,
                                 const GlossVocabulary& train_vocab) {
  CorpusStats stats;
  std::set<std::string> signers[3];
  std::set<std::string> vocab[3];
  for (const CorpusEntry& e : entries) {
    const int k = static_cast<int>(e.split);
    SplitStats& s = stats.by_split(e.split);
    s.sentences += 1;
    s.frames += e.frame_count;
    s.duration_hours += static_cast<double>(e.frame_count) / e.fps / 3600.0;
    signers[k].insert(e.signer);
    vocab[k].insert(e.glosses.begin(), e.glosses.end());
  }
  for (Split sp : {Split::kTrain, Split::kDev, Split::kTest}) {
    const int k = static_cast<int>(sp);
    SplitStats& s = stats.by_split(sp);
    s.signers = static_cast<long>(signers[k].size());
    s.vocabulary_size = static_cast<long>(vocab[k].size());
    if (sp != Split::kTrain)
      for (const std::string& tok : vocab[k])
        if (!train_vocab.contains(tok)) s.oov_count += 1;
  }
  return stats;
}

inline std::string format_stats(const CorpusStats& st) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  auto row = [&os](const char* name, auto get) {
    os << name;
    os << "\t" << get(0) << "\t" << get(1) << "\t" << get(2) << "\n";
  };
  const SplitStats* s[3] = {&st.train, &st.dev, &st.test};
  os << "split\ttrain\tdev\ttest\n";
  row("signers", [&](int i) { return s[i]->signers; });
  os.precision(2);
  row("duration_h", [&](int i) { return s[i]->duration_hours; });
  row("frames", [&](int i) { return s[i]->frames; });
  row("sentences", [&](int i) { return s[i]->sentences; });
  row("vocabulary_size", [&](int i) { return s[i]->vocabulary_size; });
  row("oov", [&](int i) { return s[i]->oov_count; });
  os << "resolution\t" << st.resolution << "\t" << st.resolution << "\t"
     << st.resolution << "\n";
  return os.str();
}

}  // namespace tfnet::corpus

#endif  // TFNET_CORPUS_STATS_HPP
