#ifndef TFNET_CORPUS_MANIFEST_HPP
#define TFNET_CORPUS_MANIFEST_HPP

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "tfnet/error.hpp"

namespace tfnet::corpus {

enum class Split { kTrain, kDev, kTest };

inline const char* split_name(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kDev: return "dev";
    case Split::kTest: return "test";
  }
  return "?";
}

inline Split parse_split(const std::string& s) {
  if (s == "train") return Split::kTrain;
  if (s == "dev") return Split::kDev;
  if (s == "test") return Split::kTest;
  throw ParseError("unknown split label '" + s + "'");
}

// One annotated video record. Gloss tokens keep their directional "(...)"
// and turn "[...]" suffixes as well as trailing punctuation tokens; the
// note list marks regional-sign tokens and is always a subset of glosses.
struct CorpusEntry {
  long id = 0;
  std::string signer;
  Split split = Split::kTrain;
  std::string sentence;                // unsegmented spoken translation
  std::vector<std::string> glosses;
  std::vector<std::string> notes;
  long frame_count = 1;
  double fps = 25.0;
  std::string frames_path;
};

inline std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

inline std::vector<std::string> split_on(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

// Splits a gloss field on "/" and validates the tokens.
inline std::vector<std::string> tokenize_gloss(const std::string& field) {
  std::vector<std::string> tokens;
  for (const std::string& raw : split_on(field, '/')) {
    std::string tok = trim(raw);
    if (tok.empty()) throw ParseError("empty gloss token");
    tokens.push_back(tok);
  }
  return tokens;
}

// Manifest line format (UTF-8, one record per line):
//   id|signer|split|sentence|gloss|note[|frame_count[|fps[|frames_path]]]
// The three trailing fields are optional and default to 1, 25, "".
inline CorpusEntry parse_manifest_line(const std::string& line, long lineno) {
  const std::vector<std::string> f = split_on(line, '|');
  auto fail = [lineno](const std::string& why) -> ParseError {
    return ParseError("manifest line " + std::to_string(lineno) + ": " + why);
  };
  if (f.size() < 6 || f.size() > 9)
    throw fail("expected 6..9 '|' fields, got " + std::to_string(f.size()));
  CorpusEntry e;
  try {
    e.id = std::stol(trim(f[0]));
  } catch (const std::exception&) {
    throw fail("bad id '" + f[0] + "'");
  }
  e.signer = trim(f[1]);
  if (e.signer.empty()) throw fail("empty signer");
  try {
    e.split = parse_split(trim(f[2]));
  } catch (const ParseError& pe) {
    throw fail(pe.what());
  }
  e.sentence = trim(f[3]);
  const std::string gloss_field = trim(f[4]);
  if (gloss_field.empty()) throw fail("empty gloss field");
  try {
    e.glosses = tokenize_gloss(gloss_field);
  } catch (const ParseError& pe) {
    throw fail(pe.what());
  }
  const std::string note_field = trim(f[5]);
  if (!note_field.empty()) {
    for (const std::string& raw : split_on(note_field, '/')) {
      const std::string tok = trim(raw);
      if (tok.empty()) throw fail("empty note token");
      if (std::find(e.glosses.begin(), e.glosses.end(), tok) == e.glosses.end())
        throw fail("note token '" + tok + "' not among glosses");
      e.notes.push_back(tok);
    }
  }
  if (f.size() > 6) {
    try {
      e.frame_count = std::stol(trim(f[6]));
    } catch (const std::exception&) {
      throw fail("bad frame_count '" + f[6] + "'");
    }
    if (e.frame_count < 1) throw fail("frame_count must be >= 1");
  }
  if (f.size() > 7) {
    try {
      e.fps = std::stod(trim(f[7]));
    } catch (const std::exception&) {
      throw fail("bad fps '" + f[7] + "'");
    }
    if (!(e.fps > 0)) throw fail("fps must be positive");
  }
  if (f.size() > 8) e.frames_path = trim(f[8]);
  return e;
}

inline std::vector<CorpusEntry> load_manifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open manifest '" + path + "'");
  std::vector<CorpusEntry> entries;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    entries.push_back(parse_manifest_line(line, lineno));
  }
  return entries;
}

inline std::string join(const std::vector<std::string>& v, char sep) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    out += v[i];
  }
  return out;
}

inline std::string format_manifest_line(const CorpusEntry& e) {
  std::ostringstream os;
  os << e.id << '|' << e.signer << '|' << split_name(e.split) << '|'
     << e.sentence << '|' << join(e.glosses, '/') << '|' << join(e.notes, '/')
     << '|' << e.frame_count << '|' << e.fps << '|' << e.frames_path;
  return os.str();
}

inline void write_manifest(const std::string& path,
                           const std::vector<CorpusEntry>& entries) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write manifest '" + path + "'");
  for (const CorpusEntry& e : entries) out << format_manifest_line(e) << '\n';
  if (!out) throw IoError("short write to manifest '" + path + "'");
}

}  // namespace tfnet::corpus

#endif  // TFNET_CORPUS_MANIFEST_HPP
