#ifndef TFNET_CORPUS_VOCABULARY_HPP
#define TFNET_CORPUS_VOCABULARY_HPP

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "tfnet/corpus/manifest.hpp"
#include "tfnet/error.hpp"

namespace tfnet::corpus {

// Gloss <-> id mapping. Id 0 is the reserved CTC blank; real glosses get
// ids 1..l in lexicographic byte order, which makes the assignment
// independent of entry order and platform.
class GlossVocabulary {
 public:
  static constexpr long kBlankId = 0;

  GlossVocabulary() = default;
  explicit GlossVocabulary(std::vector<std::string> sorted_tokens)
      : tokens_(std::move(sorted_tokens)) {
    for (size_t i = 0; i < tokens_.size(); ++i)
      index_[tokens_[i]] = static_cast<long>(i) + 1;
    if (index_.size() != tokens_.size())
      throw ConfigError("vocabulary: duplicate tokens");
  }

  long size() const { return static_cast<long>(tokens_.size()); }  // l
  long num_classes() const { return size() + 1; }                  // l + blank

  long id_of(const std::string& tok) const {
    auto it = index_.find(tok);
    return it == index_.end() ? -1 : it->second;
  }

  const std::string& token(long id) const {
    if (id < 1 || id > size())
      throw ConfigError("vocabulary: id " + std::to_string(id) + " out of range");
    return tokens_[static_cast<size_t>(id - 1)];
  }

  const std::vector<std::string>& tokens() const { return tokens_; }

  bool contains(const std::string& tok) const { return index_.count(tok) > 0; }

  std::vector<long> encode(const std::vector<std::string>& glosses) const {
    std::vector<long> ids;
    ids.reserve(glosses.size());
    for (const std::string& g : glosses) {
      const long id = id_of(g);
      if (id < 0) throw ConfigError("vocabulary: unknown gloss '" + g + "'");
      ids.push_back(id);
    }
    return ids;
  }

 private:
  std::vector<std::string> tokens_;
  std::map<std::string, long> index_;
};

inline GlossVocabulary build_vocabulary(const std::vector<CorpusEntry>& entries) {
  std::set<std::string> distinct;
  for (const CorpusEntry& e : entries)
    distinct.insert(e.glosses.begin(), e.glosses.end());
  return GlossVocabulary(std::vector<std::string>(distinct.begin(), distinct.end()));
}

}  // namespace tfnet::corpus

#endif  // TFNET_CORPUS_VOCABULARY_HPP
