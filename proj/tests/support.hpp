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

// Random generators and brute-force oracles shared by the unit and
// acceptance tests. Oracles are written independently of the library code.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "preorder/preorder.hpp"

namespace preorder::testing {

namespace fs = std::filesystem;

inline AlignmentSet random_alignment(std::mt19937_64& rng, int sl, int tl, double density) {
  AlignmentSet a(sl, tl);
  std::bernoulli_distribution coin(density);
  for (int s = 0; s < sl; ++s)
    for (int t = 0; t < tl; ++t)
      if (coin(rng)) a.insert({s, t});
  return a;
}

inline Sentence numbered(const std::string& prefix, int n) {
  Sentence s;
  for (int i = 0; i < n; ++i) s.push_back(prefix + std::to_string(i));
  return s;
}

/// Every rectangle checked directly against the consistency predicate.
inline std::vector<std::tuple<int, int, int, int>> brute_force_phrases(const AlignmentSet& a, int max_len) {
  std::vector<std::tuple<int, int, int, int>> out;
  const int sl = a.src_len(), tl = a.tgt_len();
  for (int s1 = 0; s1 < sl; ++s1)
    for (int s2 = s1; s2 < sl; ++s2)
      for (int t1 = 0; t1 < tl; ++t1)
        for (int t2 = t1; t2 < tl; ++t2) {
          if (s2 - s1 + 1 > max_len || t2 - t1 + 1 > max_len) continue;
          bool inside = false, violated = false;
          for (int s = 0; s < sl; ++s)
            for (int t = 0; t < tl; ++t) {
              if (!a.contains(s, t)) continue;
              bool in_s = s >= s1 && s <= s2;
              bool in_t = t >= t1 && t <= t2;
              if (in_s && in_t) inside = true;
              if (in_s != in_t) violated = true;
            }
          if (inside && !violated) out.emplace_back(s1, s2, t1, t2);
        }
  return out;
}

/// Random valid head array: nodes attach to a random earlier node of a
/// random ordering, so the result is always a single-rooted tree.
inline std::vector<int> random_heads(std::mt19937_64& rng, int n) {
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i + 1;
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> heads(static_cast<std::size_t>(n) + 1, 0);
  for (int k = 1; k < n; ++k) {
    std::uniform_int_distribution<int> pick(0, k - 1);
    heads[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] = order[static_cast<std::size_t>(pick(rng))];
  }
  return heads;  // heads[id], index 0 unused
}

/// Random projective head array: every subtree covers a contiguous span.
inline std::vector<int> random_projective_heads(std::mt19937_64& rng, int n) {
  std::vector<int> heads(static_cast<std::size_t>(n) + 1, 0);
  // Attach span [lo, hi] (1-based ids) under `parent`.
  std::function<void(int, int, int)> grow = [&](int lo, int hi, int parent) {
    if (lo > hi) return;
    int root = std::uniform_int_distribution<int>(lo, hi)(rng);
    heads[static_cast<std::size_t>(root)] = parent;
    for (auto [a, b] : {std::pair{lo, root - 1}, std::pair{root + 1, hi}}) {
      // split each side into consecutive dependent spans
      while (a <= b) {
        int end = std::uniform_int_distribution<int>(a, b)(rng);
        grow(a, end, root);
        a = end + 1;
      }
    }
  };
  grow(1, n, 0);
  return heads;
}

inline DepTree tree_from_heads(const std::vector<int>& heads, const std::vector<std::string>& tags) {
  std::vector<DepNode> nodes;
  for (std::size_t i = 1; i < heads.size(); ++i) {
    nodes.push_back({"w" + std::to_string(i - 1), tags[i - 1], heads[i], heads[i] == 0 ? "root" : "dep"});
  }
  return DepTree::build(std::move(nodes));
}

/// Naive corpus BLEU straight from the textbook definition.
inline double oracle_corpus_bleu(const std::vector<Sentence>& hyps, const std::vector<Sentence>& refs, int max_n) {
  double log_sum = 0.0;
  long long hl = 0, rl = 0;
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    hl += static_cast<long long>(hyps[i].size());
    rl += static_cast<long long>(refs[i].size());
  }
  for (int n = 1; n <= max_n; ++n) {
    long long m = 0, tot = 0;
    for (std::size_t i = 0; i < hyps.size(); ++i) {
      std::multiset<std::vector<std::string>> r;
      for (std::size_t k = 0; k + static_cast<std::size_t>(n) <= refs[i].size(); ++k)
        r.insert({refs[i].begin() + static_cast<long>(k), refs[i].begin() + static_cast<long>(k) + n});
      for (std::size_t k = 0; k + static_cast<std::size_t>(n) <= hyps[i].size(); ++k) {
        std::vector<std::string> g(hyps[i].begin() + static_cast<long>(k), hyps[i].begin() + static_cast<long>(k) + n);
        ++tot;
        auto it = r.find(g);
        if (it != r.end()) {
          ++m;
          r.erase(it);
        }
      }
    }
    if (tot == 0) continue;  // no n-grams of this order: vacuous
    if (m == 0) return 0.0;
    log_sum += std::log(static_cast<double>(m) / static_cast<double>(tot));
  }
  if (hl == 0) return 0.0;
  double bp = hl >= rl ? 1.0 : std::exp(1.0 - static_cast<double>(rl) / static_cast<double>(hl));
  return bp * std::exp(log_sum / max_n);
}

/// Expected-loss argmin with a plain (unshifted) softmax and its own
/// smoothed sentence BLEU.
inline std::size_t oracle_mbr(const std::vector<Sentence>& hyps, const std::vector<double>& scores, double alpha) {
  auto sbleu = [](const Sentence& h, const Sentence& r) {
    if (h == r) return 1.0;
    double ls = 0.0;
    for (int n = 1; n <= 4; ++n) {
      std::map<std::vector<std::string>, int> hc, rc;
      for (std::size_t k = 0; k + static_cast<std::size_t>(n) <= h.size(); ++k)
        ++hc[{h.begin() + static_cast<long>(k), h.begin() + static_cast<long>(k) + n}];
      for (std::size_t k = 0; k + static_cast<std::size_t>(n) <= r.size(); ++k)
        ++rc[{r.begin() + static_cast<long>(k), r.begin() + static_cast<long>(k) + n}];
      double m = 0, t = 0;
      for (auto& [g, c] : hc) {
        t += c;
        m += std::min(c, rc.count(g) ? rc[g] : 0);
      }
      if (n > 1) {
        m += 1;
        t += 1;
      }
      if (m == 0) return 0.0;
      ls += std::log(m / t);
    }
    double bp = h.size() >= r.size() ? 1.0 : std::exp(1.0 - double(r.size()) / double(h.size()));
    return bp * std::exp(ls / 4);
  };
  double z = 0.0;
  std::vector<double> w;
  for (double s : scores) {
    w.push_back(std::exp(alpha * s));
    z += w.back();
  }
  std::size_t best = 0;
  double best_loss = 1e300;
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    double e = 0.0;
    for (std::size_t j = 0; j < hyps.size(); ++j) e += w[j] / z * (1.0 - sbleu(hyps[i], hyps[j]));
    if (e < best_loss - 1e-12) {
      best_loss = e;
      best = i;
    }
  }
  return best;
}

/// Fresh empty directory under the system temp dir.
inline fs::path scratch_dir(const std::string& name) {
  auto p = fs::temp_directory_path() / ("preorder-test-" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

inline std::string slurp(const fs::path& p) {
  std::string out;
  for (const auto& l : read_lines(p)) out += l + "\n";
  return out;
}

inline std::map<std::string, std::string> slurp_dir(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file()) out[e.path().filename().string()] = slurp(e.path());
  }
  return out;
}

}  // namespace preorder::testing
