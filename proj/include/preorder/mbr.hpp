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
#include <string>
#include <vector>

#include "preorder/bleu.hpp"
#include "preorder/text.hpp"

namespace preorder {

struct NBestEntry {
  Sentence hypothesis;
  double model_score = 0.0;  // log domain
};

struct NBestList {
  long long segment_id = 0;
  std::vector<NBestEntry> entries;
};

/// softmax(alpha * scores), max-shifted.
inline std::vector<double> posterior_from_scores(const std::vector<double>& scores, double alpha = 1.0) {
  if (!(alpha > 0.0)) throw InputError("MBR scale alpha must be positive");
  if (scores.empty()) throw InputError("posterior of an empty n-best list");
  double top = *std::max_element(scores.begin(), scores.end());
  std::vector<double> w;
  w.reserve(scores.size());
  double z = 0.0;
  for (double s : scores) {
    w.push_back(std::exp(alpha * (s - top)));
    z += w.back();
  }
  for (auto& x : w) x /= z;
  return w;
}

/// 1 - smoothed sentence BLEU; exactly 0 for identical token sequences.
inline double bleu_loss(const Sentence& hyp, const Sentence& evidence) {
  if (hyp == evidence) return 0.0;
  return 1.0 - sentence_bleu_smoothed(hyp, evidence);
}

struct MbrResult {
  std::size_t selected = 0;
  std::vector<double> expected_loss;
};

/// Hypothesis minimising expected BLEU loss against the list itself; ties
/// go to the earliest entry.
inline MbrResult mbr_select(const NBestList& nbest, double alpha = 1.0) {
  if (nbest.entries.empty()) throw InputError("empty n-best list for segment " + std::to_string(nbest.segment_id));
  std::vector<double> scores;
  scores.reserve(nbest.entries.size());
  for (const auto& e : nbest.entries) scores.push_back(e.model_score);
  auto post = posterior_from_scores(scores, alpha);

  const std::size_t n = nbest.entries.size();
  MbrResult r;
  r.expected_loss.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      acc += post[j] * bleu_loss(nbest.entries[i].hypothesis, nbest.entries[j].hypothesis);
    }
    r.expected_loss[i] = acc;
    if (acc < r.expected_loss[r.selected]) r.selected = i;
  }
  return r;
}

/// "segment_id ||| hypothesis tokens ||| model_score" lines; segments must be contiguous.
inline std::vector<NBestList> parse_nbest_lines(const std::vector<std::string>& lines,
                                                const std::string& name = "nbest") {
  std::vector<NBestList> out;
  std::vector<long long> seen;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    auto where = location(name, i + 1);
    auto fields = split_on(lines[i], "|||");
    if (fields.size() < 3) throw InputError(where + ": expected 'id ||| hypothesis ||| score'");
    auto id = parse_int(trim(fields[0]));
    auto score = parse_double(trim(fields.back()));
    if (!id || !score) throw InputError(where + ": bad segment id or score");
    if (out.empty() || out.back().segment_id != *id) {
      if (std::find(seen.begin(), seen.end(), *id) != seen.end()) {
        throw InputError(where + ": segment " + std::to_string(*id) + " is not contiguous");
      }
      seen.push_back(*id);
      out.push_back({*id, {}});
    }
    out.back().entries.push_back({split_ws(fields[1]), *score});
  }
  return out;
}

}  // namespace preorder
