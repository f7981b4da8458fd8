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
#include <limits>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "preorder/text.hpp"

namespace preorder {

inline constexpr std::string_view kBos = "<s>";
inline constexpr std::string_view kEos = "</s>";
inline constexpr std::string_view kUnk = "<unk>";

enum class Smoothing { kMle, kWittenBell };

inline Smoothing parse_smoothing(std::string_view s) {
  if (s == "mle") return Smoothing::kMle;
  if (s == "wb" || s == "witten-bell") return Smoothing::kWittenBell;
  throw UsageError("unknown smoothing '" + std::string(s) + "' (expected mle or wb)");
}

inline const char* smoothing_name(Smoothing s) {
  return s == Smoothing::kMle ? "mle" : "witten-bell";
}

struct PerplexityResult {
  double log10_prob = 0.0;
  long long predicted = 0;  // tokens plus one </s> per sentence
  long long oov = 0;
  double perplexity = 0.0;
};

/// Back-off n-gram model stored in ARPA form: log10 probabilities per
/// n-gram and log10 back-off weights per context.
///
/// Witten-Bell is interpolated,
///   P(w|h) = (c(h,w) + T(h) P(w|h')) / (c(h) + T(h)),
/// bottoming out in a uniform distribution over the predictable vocabulary
/// (every training token, </s> and <unk>). Storing the interpolated value for
/// seen n-grams and T(h)/(c(h)+T(h)) as the back-off weight of h makes plain
/// ARPA back-off reproduce the interpolated model exactly.
///
/// MLE keeps only seen n-grams at full order; anything else scores -inf.
class NGramLM {
 public:
  static NGramLM train(const std::vector<Sentence>& corpus, int order,
                       Smoothing smoothing = Smoothing::kWittenBell) {
    if (order < 1) throw InputError("language model order must be >= 1");
    if (corpus.empty()) throw InputError("cannot train a language model on an empty corpus");

    NGramLM lm;
    lm.order_ = order;
    lm.smoothing_ = smoothing;
    lm.probs_.assign(static_cast<std::size_t>(order), {});
    lm.backoffs_.assign(static_cast<std::size_t>(order), {});
    lm.vocab_ = {std::string(kBos), std::string(kEos), std::string(kUnk)};

    // counts[n-1][h][w], h = space-joined (n-1)-token history
    std::vector<std::map<std::string, std::map<std::string, long long>>> counts(
        static_cast<std::size_t>(order));
    for (const auto& sent : corpus) {
      for (const auto& tok : sent) lm.vocab_.insert(tok);
      auto padded = pad(sent, order);
      for (std::size_t i = static_cast<std::size_t>(order - 1); i < padded.size(); ++i) {
        for (int n = 1; n <= order; ++n) {
          std::string h = history_key(padded, i, n - 1);
          ++counts[static_cast<std::size_t>(n - 1)][h][padded[i]];
        }
      }
    }

    if (smoothing == Smoothing::kMle) {
      for (int n = 1; n <= order; ++n) {
        for (const auto& [h, conts] : counts[static_cast<std::size_t>(n - 1)]) {
          long long total = 0;
          for (const auto& [w, c] : conts) total += c;
          for (const auto& [w, c] : conts) {
            lm.probs_[static_cast<std::size_t>(n - 1)][ngram_key(h, w)] =
                std::log10(static_cast<double>(c) / static_cast<double>(total));
          }
        }
      }
      return lm;
    }

    // Witten-Bell, lowest order first so lower-order queries are ready.
    const double uniform = 1.0 / static_cast<double>(lm.predictable_vocab().size());
    {
      const auto& conts = counts[0][""];
      long long total = 0;
      for (const auto& [w, c] : conts) total += c;
      const double types = static_cast<double>(conts.size());
      for (const auto& w : lm.predictable_vocab()) {
        auto it = conts.find(w);
        double c = it == conts.end() ? 0.0 : static_cast<double>(it->second);
        lm.probs_[0][w] = std::log10((c + types * uniform) / (static_cast<double>(total) + types));
      }
    }
    for (int n = 2; n <= order; ++n) {
      auto& level = lm.probs_[static_cast<std::size_t>(n - 1)];
      for (const auto& [h, conts] : counts[static_cast<std::size_t>(n - 1)]) {
        long long total = 0;
        for (const auto& [w, c] : conts) total += c;
        const double types = static_cast<double>(conts.size());
        const double denom = static_cast<double>(total) + types;
        auto lower_h = drop_first(h);
        for (const auto& [w, c] : conts) {
          double lower = std::pow(10.0, lm.query(w, lower_h, n - 2));
          level[ngram_key(h, w)] = std::log10((static_cast<double>(c) + types * lower) / denom);
        }
        lm.backoffs_[static_cast<std::size_t>(n - 2)][h] = std::log10(types / denom);
      }
    }
    return lm;
  }

  int order() const { return order_; }
  Smoothing smoothing() const { return smoothing_; }
  const std::set<std::string>& vocab() const { return vocab_; }

  /// Vocabulary that can be predicted: everything except <s>.
  std::vector<std::string> predictable_vocab() const {
    std::vector<std::string> out;
    for (const auto& w : vocab_) {
      if (w != kBos) out.push_back(w);
    }
    return out;
  }

  /// log10 P(word | context). Only the last order-1 context tokens matter;
  /// the caller supplies <s> padding. Unknown words are scored as <unk>.
  double log10_prob(std::string_view word, const std::vector<std::string>& context) const {
    std::string w = vocab_.count(std::string(word)) ? std::string(word) : std::string(kUnk);
    const int k = std::min<int>(order_ - 1, static_cast<int>(context.size()));
    std::string h;
    for (std::size_t i = context.size() - static_cast<std::size_t>(k); i < context.size(); ++i) {
      const auto& t = vocab_.count(context[i]) ? context[i] : std::string(kUnk);
      if (!h.empty()) h += ' ';
      h += t;
    }
    if (smoothing_ == Smoothing::kMle && k < order_ - 1) return kNegInf;
    return query(w, h, k);
  }

  double sequence_log10_prob(const Sentence& sentence) const {
    auto padded = pad(sentence, order_);
    double total = 0.0;
    std::vector<std::string> ctx(padded.begin(), padded.begin() + (order_ - 1));
    for (std::size_t i = static_cast<std::size_t>(order_ - 1); i < padded.size(); ++i) {
      total += log10_prob(padded[i], ctx);
      ctx.push_back(padded[i]);
      if (static_cast<int>(ctx.size()) > order_ - 1) ctx.erase(ctx.begin());
    }
    return total;
  }

  PerplexityResult perplexity(const std::vector<Sentence>& corpus) const {
    PerplexityResult r;
    for (const auto& s : corpus) {
      r.log10_prob += sequence_log10_prob(s);
      r.predicted += static_cast<long long>(s.size()) + 1;
      for (const auto& t : s) {
        if (!vocab_.count(t)) ++r.oov;
      }
    }
    if (r.predicted == 0) throw InputError("perplexity of an empty corpus");
    r.perplexity = std::isinf(r.log10_prob)
                       ? std::numeric_limits<double>::infinity()
                       : std::pow(10.0, -r.log10_prob / static_cast<double>(r.predicted));
    return r;
  }

  /// ARPA text. A leading comment records the smoothing, which decides how
  /// missing n-grams are scored when the file is read back.
  std::vector<std::string> to_arpa_lines() const {
    std::vector<std::string> lines;
    lines.push_back(std::string("# preorder order=") + std::to_string(order_) +
                    " smoothing=" + smoothing_name(smoothing_));
    lines.emplace_back("");
    lines.emplace_back("\\data\\");
    std::vector<std::set<std::string>> keys(static_cast<std::size_t>(order_));
    for (int n = 1; n <= order_; ++n) {
      auto& ks = keys[static_cast<std::size_t>(n - 1)];
      for (const auto& [k, v] : probs_[static_cast<std::size_t>(n - 1)]) ks.insert(k);
      for (const auto& [k, v] : backoffs_[static_cast<std::size_t>(n - 1)]) ks.insert(k);
      lines.push_back("ngram " + std::to_string(n) + "=" + std::to_string(ks.size()));
    }
    for (int n = 1; n <= order_; ++n) {
      lines.emplace_back("");
      lines.push_back("\\" + std::to_string(n) + "-grams:");
      const auto& probs = probs_[static_cast<std::size_t>(n - 1)];
      const auto& bows = backoffs_[static_cast<std::size_t>(n - 1)];
      for (const auto& k : keys[static_cast<std::size_t>(n - 1)]) {
        auto p = probs.find(k);
        std::string line = (p == probs.end() ? std::string("-99") : format_double(p->second)) + "\t" + k;
        auto b = bows.find(k);
        if (b != bows.end()) line += "\t" + format_double(b->second);
        lines.push_back(std::move(line));
      }
    }
    lines.emplace_back("");
    lines.emplace_back("\\end\\");
    return lines;
  }

  static NGramLM from_arpa_lines(const std::vector<std::string>& lines, const std::string& name = "lm") {
    NGramLM lm;
    lm.smoothing_ = Smoothing::kWittenBell;
    std::map<int, long long> declared;
    int section = 0;
    bool in_data = false, ended = false;
    for (std::size_t i = 0; i < lines.size() && !ended; ++i) {
      auto line = trim(lines[i]);
      auto where = location(name, i + 1);
      if (line.empty()) continue;
      if (!in_data && section == 0) {
        if (line.rfind("# preorder", 0) == 0 && line.find("smoothing=mle") != std::string_view::npos) {
          lm.smoothing_ = Smoothing::kMle;
        }
        if (line == "\\data\\") in_data = true;
        continue;
      }
      if (line == "\\end\\") {
        ended = true;
        break;
      }
      if (line.size() > 8 && line.front() == '\\' && line.substr(line.size() - 7) == "-grams:") {
        auto n = parse_int(line.substr(1, line.size() - 8));
        if (!n || *n < 1) throw InputError(where + ": bad section header");
        section = static_cast<int>(*n);
        in_data = false;
        if (section > lm.order_) {
          lm.order_ = section;
          lm.probs_.resize(static_cast<std::size_t>(section));
          lm.backoffs_.resize(static_cast<std::size_t>(section));
        }
        continue;
      }
      if (in_data) {
        if (line.rfind("ngram ", 0) != 0) throw InputError(where + ": expected 'ngram N=count'");
        auto eq = line.find('=');
        auto n = parse_int(trim(line.substr(6, eq - 6)));
        auto c = parse_int(trim(line.substr(eq + 1)));
        if (eq == std::string_view::npos || !n || !c) throw InputError(where + ": bad ngram count");
        declared[static_cast<int>(*n)] = *c;
        continue;
      }
      auto fields = split_on(line, "\t");
      if (fields.size() < 2 || fields.size() > 3) throw InputError(where + ": malformed n-gram entry");
      auto p = parse_double(fields[0]);
      if (!p) throw InputError(where + ": bad probability");
      auto words = split_ws(fields[1]);
      if (static_cast<int>(words.size()) != section) throw InputError(where + ": n-gram length mismatch");
      std::string key = join(words);
      if (*p > -99.0) lm.probs_[static_cast<std::size_t>(section - 1)][key] = *p;
      if (fields.size() == 3) {
        auto b = parse_double(fields[2]);
        if (!b) throw InputError(where + ": bad back-off weight");
        lm.backoffs_[static_cast<std::size_t>(section - 1)][key] = *b;
      }
      if (section == 1) lm.vocab_.insert(key);
    }
    if (!ended) throw InputError(name + ": missing \\end\\");
    if (lm.order_ < 1) throw InputError(name + ": no n-gram sections");
    for (const auto& [n, c] : declared) {
      if (n < 1 || n > lm.order_) throw InputError(name + ": declared order " + std::to_string(n) + " has no section");
      std::set<std::string> ks;
      for (const auto& [k, v] : lm.probs_[static_cast<std::size_t>(n - 1)]) ks.insert(k);
      for (const auto& [k, v] : lm.backoffs_[static_cast<std::size_t>(n - 1)]) ks.insert(k);
      if (static_cast<long long>(ks.size()) != c) {
        throw InputError(name + ": " + std::to_string(n) + "-gram count mismatch");
      }
    }
    lm.vocab_.insert(std::string(kBos));
    lm.vocab_.insert(std::string(kEos));
    lm.vocab_.insert(std::string(kUnk));
    return lm;
  }

  bool operator==(const NGramLM&) const = default;

 private:
  static constexpr double kNegInf = -std::numeric_limits<double>::infinity();

  static std::vector<std::string> pad(const Sentence& s, int order) {
    std::vector<std::string> out(static_cast<std::size_t>(order - 1), std::string(kBos));
    out.insert(out.end(), s.begin(), s.end());
    out.emplace_back(kEos);
    return out;
  }

  static std::string history_key(const std::vector<std::string>& padded, std::size_t i, int len) {
    std::string h;
    for (std::size_t j = i - static_cast<std::size_t>(len); j < i; ++j) {
      if (!h.empty()) h += ' ';
      h += padded[j];
    }
    return h;
  }

  static std::string ngram_key(const std::string& h, const std::string& w) {
    return h.empty() ? w : h + " " + w;
  }

  static std::string drop_first(const std::string& h) {
    auto sp = h.find(' ');
    return sp == std::string::npos ? std::string() : h.substr(sp + 1);
  }

  // h has exactly `len` tokens.
  double query(const std::string& w, const std::string& h, int len) const {
    const auto& level = probs_[static_cast<std::size_t>(len)];
    auto it = level.find(ngram_key(h, w));
    if (it != level.end()) return it->second;
    if (smoothing_ == Smoothing::kMle || len == 0) return kNegInf;
    double bow = 0.0;
    const auto& bows = backoffs_[static_cast<std::size_t>(len - 1)];
    if (auto b = bows.find(h); b != bows.end()) bow = b->second;
    return bow + query(w, drop_first(h), len - 1);
  }

  int order_ = 0;
  Smoothing smoothing_ = Smoothing::kWittenBell;
  std::set<std::string> vocab_;
  std::vector<std::map<std::string, double>> probs_;     // [n-1]: n-gram -> log10 p
  std::vector<std::map<std::string, double>> backoffs_;  // [n-1]: n-token context -> log10 bow
};

}  // namespace preorder
