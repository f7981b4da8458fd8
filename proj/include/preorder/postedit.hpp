// Copyright 2026 The preorder Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Corpus pre/post-processing: declarative end-of-sentence marker removal
// and restoration, and dictionary substitution of passed-through source words.

#include <filesystem>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "preorder/corpus_io.hpp"
#include "preorder/text.hpp"

namespace preorder {

/// Terminal tokens treated as declarative sentence ends. "?" and "!" are
/// never accepted.
class EosMarkers {
 public:
  EosMarkers() : markers_{"."} {}
  explicit EosMarkers(std::vector<std::string> markers) {
    for (auto& m : markers) add(std::move(m));
  }

  void add(std::string marker) {
    if (marker.empty() || marker == "?" || marker == "!") {
      throw UsageError("'" + marker + "' cannot be a declarative end-of-sentence marker");
    }
    markers_.insert(std::move(marker));
  }

  bool contains(const std::string& tok) const { return markers_.count(tok) != 0; }
  const std::set<std::string>& all() const { return markers_; }

 private:
  std::set<std::string> markers_;
};

struct EosRecord {
  std::size_t sentence_index = 0;
  std::string removed_marker;
  bool operator==(const EosRecord&) const = default;
};

/// Drops a final declarative marker. A sentence made only of the marker is
/// left alone.
inline std::pair<Sentence, std::optional<EosRecord>> strip_eos(const Sentence& sentence,
                                                               std::size_t index = 0,
                                                               const EosMarkers& markers = {}) {
  if (sentence.size() < 2 || !markers.contains(sentence.back())) return {sentence, std::nullopt};
  Sentence out(sentence.begin(), sentence.end() - 1);
  return {std::move(out), EosRecord{index, sentence.back()}};
}

inline Sentence restore_eos(const Sentence& sentence, const std::optional<EosRecord>& record) {
  Sentence out = sentence;
  if (record) out.push_back(record->removed_marker);
  return out;
}

/// Sidecar lines "index<TAB>marker".
inline std::vector<std::string> eos_records_to_lines(const std::vector<EosRecord>& records) {
  std::vector<std::string> lines;
  lines.reserve(records.size());
  for (const auto& r : records) lines.push_back(std::to_string(r.sentence_index) + "\t" + r.removed_marker);
  return lines;
}

inline std::vector<EosRecord> eos_records_from_lines(const std::vector<std::string>& lines,
                                                     const std::string& name = "records") {
  std::vector<EosRecord> out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    auto fields = split_on(lines[i], "\t");
    auto idx = fields.size() == 2 ? parse_int(fields[0]) : std::nullopt;
    if (!idx || *idx < 0 || fields[1].empty()) {
      throw InputError(location(name, i + 1) + ": expected index<TAB>marker");
    }
    out.push_back({static_cast<std::size_t>(*idx), fields[1]});
  }
  return out;
}

/// Restores a whole corpus; records may arrive in any order but must be in range.
inline std::vector<Sentence> restore_eos_corpus(const std::vector<Sentence>& corpus,
                                                const std::vector<EosRecord>& records) {
  std::vector<std::optional<EosRecord>> by_index(corpus.size());
  for (const auto& r : records) {
    if (r.sentence_index >= corpus.size()) {
      throw InputError("end-of-sentence record for sentence " + std::to_string(r.sentence_index) +
                       " but corpus has " + std::to_string(corpus.size()) + " sentences");
    }
    by_index[r.sentence_index] = r;
  }
  std::vector<Sentence> out;
  out.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) out.push_back(restore_eos(corpus[i], by_index[i]));
  return out;
}

using Vocabulary = std::set<std::string>;

/// Positions whose token is missing from the target vocabulary but known on
/// the source side, i.e. words the system passed through untranslated.
inline std::vector<int> detect_oov(const Sentence& output, const Vocabulary& target_vocab,
                                   const Vocabulary& source_vocab) {
  std::vector<int> out;
  for (std::size_t i = 0; i < output.size(); ++i) {
    if (!target_vocab.count(output[i]) && source_vocab.count(output[i])) out.push_back(static_cast<int>(i));
  }
  return out;
}

enum class OovAction { kReplaced, kTransliterated, kKept };

inline const char* oov_action_name(OovAction a) {
  switch (a) {
    case OovAction::kReplaced: return "replaced";
    case OovAction::kTransliterated: return "transliterated";
    case OovAction::kKept: return "kept";
  }
  return "?";
}

struct OovEntry {
  int position = 0;
  std::string source_token;
  OovAction action = OovAction::kKept;
  std::string target;  // replacement text; the original token when kept
  bool operator==(const OovEntry&) const = default;
};

using OovReport = std::vector<OovEntry>;

using Lemmatizer = std::function<std::string(const std::string&)>;
using Transliterator = std::function<std::string(const std::string&)>;

/// Crude English suffix stripper: -ies -> -y, -s, -ing, -ed.
inline std::string suffix_lemma(const std::string& token) {
  auto ends = [&](const char* suf) {
    std::string s(suf);
    return token.size() > s.size() && token.compare(token.size() - s.size(), s.size(), s) == 0;
  };
  if (token.size() > 4 && ends("ies")) return token.substr(0, token.size() - 3) + "y";
  if (token.size() > 5 && ends("ing")) return token.substr(0, token.size() - 3);
  if (token.size() > 4 && ends("ed")) return token.substr(0, token.size() - 2);
  if (token.size() > 3 && ends("s") && !ends("ss")) return token.substr(0, token.size() - 1);
  return token;
}

/// Replaces flagged tokens with the preferred dictionary translation of
/// their root. The token itself is tried first, then lemmatizer(token).
/// Misses go to the transliterator when one is given, otherwise stay as is.
inline std::pair<Sentence, OovReport> substitute_oov(const Sentence& output, const std::vector<int>& positions,
                                                     const BilingualDictionary& dict,
                                                     const Lemmatizer& lemmatizer = suffix_lemma,
                                                     const Transliterator& transliterator = nullptr) {
  Sentence out = output;
  OovReport report;
  int last = -1;
  for (int pos : positions) {
    if (pos <= last || pos < 0 || static_cast<std::size_t>(pos) >= output.size()) {
      throw InputError("OOV positions must be increasing and inside the sentence");
    }
    last = pos;
    const auto& tok = output[static_cast<std::size_t>(pos)];
    const auto* hit = dict.lookup(tok);
    if (hit == nullptr && lemmatizer) hit = dict.lookup(lemmatizer(tok));
    OovEntry e{pos, tok, OovAction::kKept, tok};
    if (hit != nullptr) {
      e.action = OovAction::kReplaced;
      e.target = hit->front();
    } else if (transliterator) {
      e.action = OovAction::kTransliterated;
      e.target = transliterator(tok);
    }
    out[static_cast<std::size_t>(pos)] = e.target;
    report.push_back(std::move(e));
  }
  return {std::move(out), std::move(report)};
}

/// Report lines "sentence<TAB>position<TAB>token<TAB>action<TAB>target".
inline std::vector<std::string> oov_report_lines(std::size_t sentence_index, const OovReport& report) {
  std::vector<std::string> lines;
  for (const auto& e : report) {
    lines.push_back(std::to_string(sentence_index) + "\t" + std::to_string(e.position) + "\t" + e.source_token +
                    "\t" + oov_action_name(e.action) + "\t" + e.target);
  }
  return lines;
}

/// Every whitespace-separated token in a file (a word list or a corpus).
inline Vocabulary read_vocabulary(const std::filesystem::path& path) {
  Vocabulary v;
  for (const auto& line : read_lines(path)) {
    for (auto& t : split_ws(line)) v.insert(std::move(t));
  }
  return v;
}

}  // namespace preorder
