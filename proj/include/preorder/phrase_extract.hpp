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

#include <algorithm>
#include <array>
#include <compare>
#include <cstdlib>
#include <map>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "preorder/alignment.hpp"
#include "preorder/corpus_io.hpp"
#include "preorder/parallel.hpp"
#include "preorder/text.hpp"

namespace preorder {

/// Inclusive token range.
struct Span {
  int start = 0;
  int end = 0;
  int length() const { return end - start + 1; }
  auto operator<=>(const Span&) const = default;
};

struct PhrasePair {
  Span src;
  Span tgt;
  Sentence src_tokens;
  Sentence tgt_tokens;

  bool operator==(const PhrasePair&) const = default;
};

struct ExtractConfig {
  int max_phrase_len = 7;

  void validate() const {
    if (max_phrase_len < 1) throw InputError("max_phrase_len must be >= 1");
  }
};

enum class Orientation { kMono = 0, kSwap = 1, kDiscontinuous = 2 };

inline const char* orientation_name(Orientation o) {
  switch (o) {
    case Orientation::kMono: return "mono";
    case Orientation::kSwap: return "swap";
    case Orientation::kDiscontinuous: return "discontinuous";
  }
  return "?";
}

struct OrientationCounts {
  std::array<long long, 3> with_prev{};
  std::array<long long, 3> with_next{};

  void add(Orientation prev, Orientation next) {
    ++with_prev[static_cast<std::size_t>(prev)];
    ++with_next[static_cast<std::size_t>(next)];
  }
  bool operator==(const OrientationCounts&) const = default;
};

struct PhraseStats {
  long long count = 0;
  double p_tgt_given_src = 0.0;
  double p_src_given_tgt = 0.0;
  OrientationCounts orientation;
};

/// Keyed on (source phrase, target phrase), each as space-joined tokens.
using PhraseKey = std::pair<std::string, std::string>;

struct PhraseTable {
  std::map<PhraseKey, PhraseStats> entries;

  std::size_t size() const { return entries.size(); }

  /// One line per entry:
  ///   src ||| tgt ||| p(t|s) p(s|t) ||| mp sp dp mn sn dn ||| count
  /// sorted bytewise.
  std::vector<std::string> to_lines() const {
    std::vector<std::string> lines;
    lines.reserve(entries.size());
    for (const auto& [key, st] : entries) {
      std::string l = key.first + " ||| " + key.second + " ||| " +
                      format_double(st.p_tgt_given_src) + " " + format_double(st.p_src_given_tgt) +
                      " |||";
      for (auto c : st.orientation.with_prev) l += " " + std::to_string(c);
      for (auto c : st.orientation.with_next) l += " " + std::to_string(c);
      l += " ||| " + std::to_string(st.count);
      lines.push_back(std::move(l));
    }
    std::sort(lines.begin(), lines.end());
    return lines;
  }
};

/// Source jump between consecutive phrases; 0 when the current phrase starts
/// right after the previous one.
inline int distortion(int prev_src_end, int cur_src_start) {
  return std::abs(cur_src_start - (prev_src_end + 1));
}

/// All alignment-consistent phrase pairs with both sides no longer than
/// cfg.max_phrase_len, sorted by (src.start, src.end, tgt.start, tgt.end).
///
/// A rectangle qualifies when it holds at least one link and no link
/// connects a word inside one span to a word outside the other. Target spans
/// therefore range over the tight span plus any unaligned neighbours.
inline std::vector<PhrasePair> extract_phrase_pairs(const Sentence& src, const Sentence& tgt,
                                                    const AlignmentSet& align,
                                                    const ExtractConfig& cfg = {}) {
  cfg.validate();
  const int sl = static_cast<int>(src.size());
  const int tl = static_cast<int>(tgt.size());
  if (align.src_len() != sl || align.tgt_len() != tl) {
    throw InputError("alignment shape does not match sentence lengths");
  }
  const int max_len = cfg.max_phrase_len;
  const auto tgt_al = align.tgt_aligned();

  // Links by source word.
  std::vector<std::vector<int>> by_src(static_cast<std::size_t>(sl));
  for (auto p : align) by_src[static_cast<std::size_t>(p.src)].push_back(p.tgt);

  std::vector<PhrasePair> out;
  for (int s1 = 0; s1 < sl; ++s1) {
    int tmin = tl, tmax = -1;
    for (int s2 = s1; s2 < sl && s2 - s1 < max_len; ++s2) {
      for (int t : by_src[static_cast<std::size_t>(s2)]) {
        tmin = std::min(tmin, t);
        tmax = std::max(tmax, t);
      }
      if (tmax < 0) continue;
      if (tmax - tmin + 1 > max_len) continue;
      bool consistent = true;
      for (auto p : align) {
        if (p.tgt >= tmin && p.tgt <= tmax && (p.src < s1 || p.src > s2)) {
          consistent = false;
          break;
        }
      }
      if (!consistent) continue;
      for (int t1 = tmin; t1 >= 0 && (t1 == tmin || !tgt_al[static_cast<std::size_t>(t1)]); --t1) {
        for (int t2 = tmax; t2 < tl && (t2 == tmax || !tgt_al[static_cast<std::size_t>(t2)]);
             ++t2) {
          if (t2 - t1 + 1 > max_len) break;
          PhrasePair pp;
          pp.src = {s1, s2};
          pp.tgt = {t1, t2};
          pp.src_tokens.assign(src.begin() + s1, src.begin() + s2 + 1);
          pp.tgt_tokens.assign(tgt.begin() + t1, tgt.begin() + t2 + 1);
          out.push_back(std::move(pp));
        }
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const PhrasePair& a, const PhrasePair& b) {
    return std::tie(a.src, a.tgt) < std::tie(b.src, b.tgt);
  });
  return out;
}

/// Orientation of a phrase relative to its target-side neighbours.
///
/// prev: mono if a link sits at (src.start-1, tgt.start-1), swap if at
/// (src.end+1, tgt.start-1), else discontinuous. next: mono at
/// (src.end+1, tgt.end+1), swap at (src.start-1, tgt.end+1). A phrase
/// touching the first (last) target word is mono toward prev (next).
inline std::pair<Orientation, Orientation> phrase_orientation(const AlignmentSet& align,
                                                              const PhrasePair& phrase) {
  const auto& s = phrase.src;
  const auto& t = phrase.tgt;
  Orientation prev = Orientation::kDiscontinuous;
  if (t.start == 0 || align.contains(s.start - 1, t.start - 1)) {
    prev = Orientation::kMono;
  } else if (align.contains(s.end + 1, t.start - 1)) {
    prev = Orientation::kSwap;
  }
  Orientation next = Orientation::kDiscontinuous;
  if (t.end == align.tgt_len() - 1 || align.contains(s.end + 1, t.end + 1)) {
    next = Orientation::kMono;
  } else if (align.contains(s.start - 1, t.end + 1)) {
    next = Orientation::kSwap;
  }
  return {prev, next};
}

/// Relative-frequency phrase table with orientation counts.
/// Extraction runs per sentence on `workers` threads; the merge is in corpus order.
inline PhraseTable estimate_phrase_table(const ParallelCorpus& corpus, const ExtractConfig& cfg = {},
                                         int workers = 1) {
  cfg.validate();
  struct Extracted {
    PhraseKey key;
    Orientation prev, next;
  };
  auto per_sentence = parallel_map(corpus.pairs, workers, [&](const SentencePair& sp) {
    std::vector<Extracted> out;
    for (auto& pp : extract_phrase_pairs(sp.source.tokens, sp.target.tokens, sp.alignment, cfg)) {
      auto [prev, next] = phrase_orientation(sp.alignment, pp);
      out.push_back({{join(pp.src_tokens), join(pp.tgt_tokens)}, prev, next});
    }
    return out;
  });

  PhraseTable table;
  std::map<std::string, long long> src_totals, tgt_totals;
  for (const auto& sent : per_sentence) {
    for (const auto& e : sent) {
      auto& st = table.entries[e.key];
      ++st.count;
      st.orientation.add(e.prev, e.next);
      ++src_totals[e.key.first];
      ++tgt_totals[e.key.second];
    }
  }
  for (auto& [key, st] : table.entries) {
    st.p_tgt_given_src = static_cast<double>(st.count) / static_cast<double>(src_totals[key.first]);
    st.p_src_given_tgt = static_cast<double>(st.count) / static_cast<double>(tgt_totals[key.second]);
  }
  return table;
}

}  // namespace preorder
