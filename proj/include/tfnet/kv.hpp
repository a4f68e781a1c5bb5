#ifndef TFNET_KV_HPP
#define TFNET_KV_HPP

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "tfnet/error.hpp"

namespace tfnet {

// Plain key=value text files; '#' starts a comment, blank lines ignored.
// All config surfaces (model, training, synthetic corpus) use this.
class KvFile {
 public:
  KvFile() = default;

  static KvFile load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    return parse(text, path);
  }

  static KvFile parse(const std::string& text, const std::string& origin = "<string>") {
    KvFile kv;
    std::istringstream is(text);
    std::string line;
    long lineno = 0;
    while (std::getline(is, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      const size_t hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      std::string t = strip(line);
      if (t.empty()) continue;
      const size_t eq = t.find('=');
      if (eq == std::string::npos)
        throw ParseError(origin + ":" + std::to_string(lineno) +
                         ": expected key=value");
      const std::string key = strip(t.substr(0, eq));
      if (key.empty())
        throw ParseError(origin + ":" + std::to_string(lineno) + ": empty key");
      kv.values_[key] = strip(t.substr(eq + 1));
    }
    return kv;
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string get_str(const std::string& key, const std::string& dflt) const {
    auto it = values_.find(key);
    return it == values_.end() ? dflt : it->second;
  }

  long get_long(const std::string& key, long dflt) const {
    auto it = values_.find(key);
    if (it == values_.end()) return dflt;
    try {
      return std::stol(it->second);
    } catch (const std::exception&) {
      throw ParseError("config key '" + key + "': bad integer '" + it->second + "'");
    }
  }

  double get_double(const std::string& key, double dflt) const {
    auto it = values_.find(key);
    if (it == values_.end()) return dflt;
    try {
      return std::stod(it->second);
    } catch (const std::exception&) {
      throw ParseError("config key '" + key + "': bad number '" + it->second + "'");
    }
  }

  bool get_bool(const std::string& key, bool dflt) const {
    auto it = values_.find(key);
    if (it == values_.end()) return dflt;
    if (it->second == "true" || it->second == "1") return true;
    if (it->second == "false" || it->second == "0") return false;
    throw ParseError("config key '" + key + "': bad bool '" + it->second + "'");
  }

  std::vector<long> get_long_list(const std::string& key,
                                  const std::vector<long>& dflt) const {
    auto it = values_.find(key);
    if (it == values_.end()) return dflt;
    std::vector<long> out;
    std::istringstream is(it->second);
    std::string item;
    while (std::getline(is, item, ',')) {
      try {
        out.push_back(std::stol(strip(item)));
      } catch (const std::exception&) {
        throw ParseError("config key '" + key + "': bad list item '" + item + "'");
      }
    }
    if (out.empty())
      throw ParseError("config key '" + key + "': empty list");
    return out;
  }

  const std::map<std::string, std::string>& raw() const { return values_; }

 private:
  static std::string strip(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && (s[a] == ' ' || s[a] == '\t')) ++a;
    while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t')) --b;
    return s.substr(a, b - a);
  }

  std::map<std::string, std::string> values_;
};

}  // namespace tfnet

#endif  // TFNET_KV_HPP
