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
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "preorder/text.hpp"

namespace preorder {

struct NgramMatch {
  long long matched = 0;
  long long total = 0;
  bool operator==(const NgramMatch&) const = default;
};

struct BleuReport {
  std::vector<double> precisions;  // p_1..p_N
  std::vector<NgramMatch> counts;
  double brevity_penalty = 0.0;
  double score = 0.0;  // in [0, 1]
  long long hyp_len = 0;
  long long ref_len = 0;

  /// BLEU = 57.89 (100.0/75.0/66.7/50.0, BP=0.819, ratio=0.833, hyp_len=5, ref_len=6)
  std::string to_string() const {
    std::string p;
    for (std::size_t i = 0; i < precisions.size(); ++i) {
      if (i) p += '/';
      p += format_fixed(100.0 * precisions[i], 1);
    }
    double ratio = ref_len == 0 ? 0.0 : static_cast<double>(hyp_len) / static_cast<double>(ref_len);
    return "BLEU = " + format_fixed(100.0 * score, 2) + " (" + p + ", BP=" + format_fixed(brevity_penalty, 3) +
           ", ratio=" + format_fixed(ratio, 3) + ", hyp_len=" + std::to_string(hyp_len) +
           ", ref_len=" + std::to_string(ref_len) + ")";
  }
};

namespace detail {
inline std::map<std::vector<std::string>, long long> ngram_counts(const Sentence& s, int n) {
  std::map<std::vector<std::string>, long long> out;
  if (static_cast<int>(s.size()) < n) return out;
  for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= s.size(); ++i) {
    ++out[std::vector<std::string>(s.begin() + static_cast<long>(i), s.begin() + static_cast<long>(i) + n)];
  }
  return out;
}

inline NgramMatch segment_match(const Sentence& hyp, const Sentence& ref, int n) {
  NgramMatch m;
  auto hc = ngram_counts(hyp, n);
  auto rc = ngram_counts(ref, n);
  for (const auto& [g, c] : hc) {
    m.total += c;
    auto it = rc.find(g);
    if (it != rc.end()) m.matched += std::min(c, it->second);
  }
  return m;
}

inline double brevity_penalty(long long hyp_len, long long ref_len) {
  if (hyp_len == 0) return 0.0;
  if (hyp_len >= ref_len) return 1.0;
  return std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(hyp_len));
}
}  // namespace detail

/// Corpus-level clipped n-gram matches, one reference per segment.
inline NgramMatch modified_precision(const std::vector<Sentence>& hyps, const std::vector<Sentence>& refs,
                                     int n) {
  if (hyps.size() != refs.size()) {
    throw InputError("hypothesis/reference count mismatch: " + std::to_string(hyps.size()) + " vs " +
                     std::to_string(refs.size()));
  }
  NgramMatch total;
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    auto m = detail::segment_match(hyps[i], refs[i], n);
    total.matched += m.matched;
    total.total += m.total;
  }
  return total;
}

inline BleuReport corpus_bleu(const std::vector<Sentence>& hyps, const std::vector<Sentence>& refs,
                              int max_n = 4) {
  if (max_n < 1) throw InputError("max_n must be >= 1");
  if (hyps.empty()) throw InputError("BLEU of an empty corpus");
  BleuReport r;
  for (int n = 1; n <= max_n; ++n) {
    auto m = modified_precision(hyps, refs, n);
    r.counts.push_back(m);
    // An order with no hypothesis n-grams at all is vacuous (p = 1); this keeps
    // corpus_bleu(X, X) = 1 for corpora of short segments. Length is still
    // charged through the brevity penalty.
    r.precisions.push_back(m.total == 0 ? 1.0
                                        : static_cast<double>(m.matched) / static_cast<double>(m.total));
  }
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    r.hyp_len += static_cast<long long>(hyps[i].size());
    r.ref_len += static_cast<long long>(refs[i].size());
  }
  r.brevity_penalty = detail::brevity_penalty(r.hyp_len, r.ref_len);
  double log_sum = 0.0;
  bool zero = false;
  for (double p : r.precisions) {
    if (p <= 0.0) {
      zero = true;
      break;
    }
    log_sum += std::log(p);
  }
  r.score = zero ? 0.0 : r.brevity_penalty * std::exp(log_sum / max_n);
  return r;
}

/// Sentence BLEU with add-one smoothing on p_n for n >= 2 (p_1 unsmoothed).
inline double sentence_bleu_smoothed(const Sentence& hyp, const Sentence& ref, int max_n = 4) {
  if (max_n < 1) throw InputError("max_n must be >= 1");
  double log_sum = 0.0;
  for (int n = 1; n <= max_n; ++n) {
    auto m = detail::segment_match(hyp, ref, n);
    double num = static_cast<double>(m.matched);
    double den = static_cast<double>(m.total);
    if (n >= 2) {
      num += 1.0;
      den += 1.0;
    }
    if (num <= 0.0 || den <= 0.0) return 0.0;
    log_sum += std::log(num / den);
  }
  double bp = detail::brevity_penalty(static_cast<long long>(hyp.size()), static_cast<long long>(ref.size()));
  return bp * std::exp(log_sum / max_n);
}

}  // namespace preorder
