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

// Head-local source reordering rules learned from dependency parses.
//
// For every head node the "local sequence" is the head token plus one unit
// per dependent subtree, in source order. A rule maps the POS pattern of a
// local sequence to the order those units take on the target side:
//
//   IN~1_NN&_VB~2 ==> NN&_IN~1_VB~2
//
// `X&` is the head token with tag X, `X~k` the k-th dependent subtree (left
// to right) whose own head has tag X.

#include <algorithm>
#include <climits>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "preorder/alignment.hpp"
#include "preorder/corpus_io.hpp"
#include "preorder/dep_tree.hpp"
#include "preorder/parallel.hpp"
#include "preorder/text.hpp"

namespace preorder {

enum class UnitKind { kHead, kSubtree };

struct RuleElement {
  std::string pos;
  UnitKind kind = UnitKind::kHead;
  int slot = 0;  // 1-based among subtrees; 0 for the head

  std::string to_string() const {
    return kind == UnitKind::kHead ? pos + "&" : pos + "~" + std::to_string(slot);
  }

  static RuleElement parse(std::string_view text) {
    if (text.size() >= 2 && text.back() == '&') {
      return {std::string(text.substr(0, text.size() - 1)), UnitKind::kHead, 0};
    }
    auto tilde = text.rfind('~');
    if (tilde != std::string_view::npos && tilde > 0 && tilde + 1 < text.size()) {
      auto slot = parse_int(text.substr(tilde + 1));
      if (slot && *slot >= 1) {
        return {std::string(text.substr(0, tilde)), UnitKind::kSubtree, static_cast<int>(*slot)};
      }
    }
    throw InputError("malformed rule element '" + std::string(text) + "'");
  }

  auto operator<=>(const RuleElement&) const = default;
};

namespace detail {
inline std::string pattern_string(const std::vector<RuleElement>& elems) {
  std::string out;
  for (const auto& e : elems) {
    if (!out.empty()) out += '_';
    out += e.to_string();
  }
  return out;
}

inline std::vector<RuleElement> parse_pattern(std::string_view text) {
  std::vector<RuleElement> out;
  for (const auto& piece : split_on(trim(text), "_")) out.push_back(RuleElement::parse(piece));
  return out;
}

inline void check_tag(const std::string& pos) {
  if (pos.empty()) throw InputError("empty POS tag in rule");
  for (char c : pos) {
    if (c == '_' || is_space(c)) {
      throw InputError("POS tag '" + pos + "' contains '_' or whitespace; not representable in rules");
    }
  }
}
}  // namespace detail

class ReorderRule {
 public:
  /// Validates: one head per side, lhs subtree slots 1..m in order, rhs a
  /// permutation of lhs.
  static ReorderRule make(std::vector<RuleElement> lhs, std::vector<RuleElement> rhs) {
    if (lhs.empty()) throw InputError("empty rule");
    int heads = 0, next_slot = 1;
    for (const auto& e : lhs) {
      detail::check_tag(e.pos);
      if (e.kind == UnitKind::kHead) {
        ++heads;
      } else if (e.slot != next_slot++) {
        throw InputError("rule lhs subtree slots must be 1..m left to right: " +
                         detail::pattern_string(lhs));
      }
    }
    if (heads != 1) throw InputError("rule lhs needs exactly one head: " + detail::pattern_string(lhs));
    auto a = lhs, b = rhs;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a != b) {
      throw InputError("rule rhs is not a permutation of lhs: " + detail::pattern_string(lhs) +
                       " ==> " + detail::pattern_string(rhs));
    }
    ReorderRule r;
    r.lhs_ = std::move(lhs);
    r.rhs_ = std::move(rhs);
    return r;
  }

  /// Parses "LHS ==> RHS".
  static ReorderRule parse(std::string_view text) {
    auto arrow = text.find("==>");
    if (arrow == std::string_view::npos) throw InputError("rule without '==>': " + std::string(text));
    return make(detail::parse_pattern(text.substr(0, arrow)),
                detail::parse_pattern(text.substr(arrow + 3)));
  }

  const std::vector<RuleElement>& lhs() const { return lhs_; }
  const std::vector<RuleElement>& rhs() const { return rhs_; }
  std::string lhs_key() const { return detail::pattern_string(lhs_); }
  std::string rhs_key() const { return detail::pattern_string(rhs_); }
  std::string to_string() const { return lhs_key() + " ==> " + rhs_key(); }
  bool is_identity() const { return lhs_ == rhs_; }

  /// order[i] = index into lhs of the element at rhs position i.
  std::vector<int> rhs_order() const {
    std::vector<int> order;
    order.reserve(rhs_.size());
    for (const auto& e : rhs_) {
      order.push_back(static_cast<int>(std::find(lhs_.begin(), lhs_.end(), e) - lhs_.begin()));
    }
    return order;
  }

  bool operator==(const ReorderRule&) const = default;

 private:
  std::vector<RuleElement> lhs_;
  std::vector<RuleElement> rhs_;
};

struct RuleEntry {
  ReorderRule rule;
  long long count = 0;
  double probability = 0.0;
};

/// Scored rules grouped by lhs pattern.
struct RuleTable {
  std::map<std::string, std::vector<RuleEntry>> rules;  // lhs key -> entries sorted by rhs key
  long long min_count = 2;
  double min_prob = 0.5;

  bool empty() const { return rules.empty(); }

  std::size_t rule_count() const {
    std::size_t n = 0;
    for (const auto& [k, v] : rules) n += v.size();
    return n;
  }

  /// Highest probability, then higher count, then smallest rhs string.
  const RuleEntry* best(const std::string& lhs_key) const {
    auto it = rules.find(lhs_key);
    if (it == rules.end() || it->second.empty()) return nullptr;
    const RuleEntry* top = nullptr;
    for (const auto& e : it->second) {
      if (top == nullptr || e.probability > top->probability ||
          (e.probability == top->probability &&
           (e.count > top->count ||
            (e.count == top->count && e.rule.rhs_key() < top->rule.rhs_key())))) {
        top = &e;
      }
    }
    return top;
  }

  const RuleEntry* find(const std::string& rule_text) const {
    auto rule = ReorderRule::parse(rule_text);
    auto it = rules.find(rule.lhs_key());
    if (it == rules.end()) return nullptr;
    for (const auto& e : it->second) {
      if (e.rule == rule) return &e;
    }
    return nullptr;
  }

  /// "LHS ==> RHS<TAB>count<TAB>probability", sorted by lhs then rhs.
  std::vector<std::string> to_lines() const {
    std::vector<std::string> lines;
    for (const auto& [key, entries] : rules) {
      for (const auto& e : entries) {
        lines.push_back(e.rule.to_string() + "\t" + std::to_string(e.count) + "\t" +
                        format_double(e.probability));
      }
    }
    return lines;
  }

  static RuleTable from_lines(const std::vector<std::string>& lines, const std::string& name = "rules") {
    RuleTable t;
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (trim(lines[i]).empty()) continue;
      auto fields = split_on(lines[i], "\t");
      auto where = location(name, i + 1);
      if (fields.size() != 3) throw InputError(where + ": expected RULE<TAB>count<TAB>probability");
      RuleEntry e;
      try {
        e.rule = ReorderRule::parse(fields[0]);
      } catch (const InputError& err) {
        throw InputError(where + ": " + err.what());
      }
      auto c = parse_int(trim(fields[1]));
      auto p = parse_double(trim(fields[2]));
      if (!c || *c < 1 || !p || *p < 0.0 || *p > 1.0) throw InputError(where + ": bad count or probability");
      e.count = *c;
      e.probability = *p;
      t.rules[e.rule.lhs_key()].push_back(std::move(e));
    }
    for (auto& [k, v] : t.rules) {
      std::sort(v.begin(), v.end(), [](const RuleEntry& a, const RuleEntry& b) {
        return a.rule.rhs_key() < b.rule.rhs_key();
      });
    }
    return t;
  }
};

/// Output order of a reordering: mapping[i] is the source index placed at
/// output position i.
struct Permutation {
  std::vector<int> mapping;

  static Permutation identity(std::size_t n) {
    Permutation p;
    p.mapping.resize(n);
    std::iota(p.mapping.begin(), p.mapping.end(), 0);
    return p;
  }

  std::size_t size() const { return mapping.size(); }

  bool is_bijection() const {
    std::vector<bool> seen(mapping.size(), false);
    for (int m : mapping) {
      if (m < 0 || static_cast<std::size_t>(m) >= mapping.size() || seen[static_cast<std::size_t>(m)]) {
        return false;
      }
      seen[static_cast<std::size_t>(m)] = true;
    }
    return true;
  }

  bool is_identity() const {
    for (std::size_t i = 0; i < mapping.size(); ++i) {
      if (mapping[i] != static_cast<int>(i)) return false;
    }
    return true;
  }

  /// inverse()[src] = output position of source index src.
  std::vector<int> inverse() const {
    std::vector<int> inv(mapping.size());
    for (std::size_t i = 0; i < mapping.size(); ++i) inv[static_cast<std::size_t>(mapping[i])] = static_cast<int>(i);
    return inv;
  }

  template <typename T>
  std::vector<T> apply(const std::vector<T>& items) const {
    std::vector<T> out;
    out.reserve(mapping.size());
    for (int m : mapping) out.push_back(items.at(static_cast<std::size_t>(m)));
    return out;
  }

  std::string to_string() const {
    std::string out;
    for (int m : mapping) {
      if (!out.empty()) out += ' ';
      out += std::to_string(m);
    }
    return out;
  }

  bool operator==(const Permutation&) const = default;
};

/// Renumbers the source side of an alignment after reordering the source.
inline AlignmentSet permute_source(const AlignmentSet& align, const Permutation& perm) {
  auto inv = perm.inverse();
  AlignmentSet out(align.src_len(), align.tgt_len());
  for (auto p : align) out.insert({inv.at(static_cast<std::size_t>(p.src)), p.tgt});
  return out;
}

/// One element of a head's local sequence.
struct LocalUnit {
  UnitKind kind = UnitKind::kHead;
  int node = 0;             // 1-based id: the head itself or the dependent
  std::vector<int> tokens;  // 0-based token indices covered, sorted
};

/// Head token and dependent subtrees of `head_id`, ordered by the position
/// of each unit's own node.
inline std::vector<LocalUnit> local_units(const DepTree& tree, int head_id) {
  std::vector<LocalUnit> units;
  units.push_back({UnitKind::kHead, head_id, {head_id - 1}});
  for (int d : tree.dependents(head_id)) {
    units.push_back({UnitKind::kSubtree, d, tree.subtree_tokens(d)});
  }
  std::sort(units.begin(), units.end(),
            [](const LocalUnit& a, const LocalUnit& b) { return a.node < b.node; });
  return units;
}

/// Tags used for rule patterns: the POS sidecar when present, else the parse's own tags.
inline std::vector<std::string> source_tags(const TaggedSentence& sentence, const DepTree& tree) {
  if (sentence.has_pos()) return sentence.pos;
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(tree.size()));
  for (const auto& n : tree.nodes()) out.push_back(n.pos);
  return out;
}

/// Pattern elements for a local sequence, slots numbered left to right.
inline std::vector<RuleElement> local_pattern(const std::vector<LocalUnit>& units,
                                              const std::vector<std::string>& tags) {
  std::vector<RuleElement> out;
  out.reserve(units.size());
  int slot = 0;
  for (const auto& u : units) {
    const auto& tag = tags.at(static_cast<std::size_t>(u.node - 1));
    detail::check_tag(tag);
    if (u.kind == UnitKind::kHead) {
      out.push_back({tag, UnitKind::kHead, 0});
    } else {
      out.push_back({tag, UnitKind::kSubtree, ++slot});
    }
  }
  return out;
}

struct ProjectedUnit {
  LocalUnit unit;
  int rank = INT_MAX;  // lower median of linked target indices; INT_MAX when unlinked
  int source_index = 0;  // position in the source-ordered local sequence
};

/// Units of `head_id` sorted by (target rank, source position).
inline std::vector<ProjectedUnit> project_subtree_positions(const DepTree& tree, int head_id,
                                                            const AlignmentSet& align) {
  std::vector<std::vector<int>> links(static_cast<std::size_t>(align.src_len()));
  for (auto p : align) links[static_cast<std::size_t>(p.src)].push_back(p.tgt);

  auto units = local_units(tree, head_id);
  std::vector<ProjectedUnit> out;
  out.reserve(units.size());
  for (std::size_t i = 0; i < units.size(); ++i) {
    std::vector<int> tgt;
    for (int tok : units[i].tokens) {
      if (static_cast<std::size_t>(tok) < links.size()) {
        const auto& l = links[static_cast<std::size_t>(tok)];
        tgt.insert(tgt.end(), l.begin(), l.end());
      }
    }
    ProjectedUnit pu{std::move(units[i]), INT_MAX, static_cast<int>(i)};
    if (!tgt.empty()) {
      std::sort(tgt.begin(), tgt.end());
      pu.rank = tgt[(tgt.size() - 1) / 2];
    }
    out.push_back(std::move(pu));
  }
  std::stable_sort(out.begin(), out.end(), [](const ProjectedUnit& a, const ProjectedUnit& b) {
    return a.rank < b.rank;
  });
  return out;
}

/// One rule instance per head with at least one dependent, in node-id order.
/// Identity instances are included.
inline std::vector<ReorderRule> extract_rule_instances(const DepTree& tree,
                                                       const std::vector<std::string>& tags,
                                                       const AlignmentSet& align) {
  std::vector<ReorderRule> out;
  for (int h = 1; h <= tree.size(); ++h) {
    if (tree.dependents(h).empty()) continue;
    auto projected = project_subtree_positions(tree, h, align);
    std::vector<LocalUnit> source_order(projected.size());
    for (const auto& pu : projected) source_order[static_cast<std::size_t>(pu.source_index)] = pu.unit;
    auto lhs = local_pattern(source_order, tags);
    std::vector<RuleElement> rhs;
    rhs.reserve(lhs.size());
    for (const auto& pu : projected) rhs.push_back(lhs[static_cast<std::size_t>(pu.source_index)]);
    out.push_back(ReorderRule::make(std::move(lhs), std::move(rhs)));
  }
  return out;
}

inline std::vector<ReorderRule> extract_rules(const ParallelCorpus& corpus, int workers = 1) {
  auto per_sentence = parallel_map_index(corpus.size(), workers, [&](std::size_t i) {
    const auto& sp = corpus.pairs[i];
    if (!sp.source_tree) throw InputError("sentence " + std::to_string(i) + " has no dependency tree");
    try {
      return extract_rule_instances(*sp.source_tree, source_tags(sp.source, *sp.source_tree),
                                    sp.alignment);
    } catch (const InputError& e) {
      throw InputError("sentence " + std::to_string(i) + ": " + e.what());
    }
  });
  std::vector<ReorderRule> out;
  for (auto& v : per_sentence) {
    for (auto& r : v) out.push_back(std::move(r));
  }
  return out;
}

/// Relative frequency of each rhs given its lhs pattern. Entries seen fewer
/// than min_count times are dropped afterwards; survivors keep their probability.
inline RuleTable score_rules(const std::vector<ReorderRule>& instances, long long min_count = 2,
                             double min_prob = 0.5) {
  std::map<std::string, std::map<std::string, RuleEntry>> grouped;
  std::map<std::string, long long> totals;
  for (const auto& r : instances) {
    auto lhs = r.lhs_key();
    auto& e = grouped[lhs][r.rhs_key()];
    if (e.count == 0) e.rule = r;
    ++e.count;
    ++totals[lhs];
  }
  RuleTable table;
  table.min_count = min_count;
  table.min_prob = min_prob;
  for (auto& [lhs, by_rhs] : grouped) {
    std::vector<RuleEntry> kept;
    for (auto& [rhs, e] : by_rhs) {
      e.probability = static_cast<double>(e.count) / static_cast<double>(totals[lhs]);
      if (e.count >= min_count) kept.push_back(std::move(e));
    }
    if (!kept.empty()) table.rules[lhs] = std::move(kept);
  }
  return table;
}

struct ReorderResult {
  Sentence tokens;
  Permutation permutation;
};

namespace detail {
// Token order for the subtree of `h`. Without an applicable rule every unit
// keeps the source positions it occupied, so an empty table is the identity
// even on non-projective trees. With a rule, units are concatenated in rhs order.
inline std::vector<int> reorder_subtree(const DepTree& tree, int h, const std::vector<std::string>& tags,
                                        const RuleTable& table, double min_prob) {
  if (tree.dependents(h).empty()) return {h - 1};
  auto units = local_units(tree, h);
  std::vector<std::vector<int>> unit_orders;
  unit_orders.reserve(units.size());
  for (const auto& u : units) {
    unit_orders.push_back(u.kind == UnitKind::kHead ? std::vector<int>{h - 1}
                                                    : reorder_subtree(tree, u.node, tags, table, min_prob));
  }

  const RuleEntry* best = table.empty() ? nullptr : table.best(pattern_string(local_pattern(units, tags)));
  std::vector<int> out;
  if (best != nullptr && best->probability >= min_prob && !best->rule.is_identity()) {
    for (int idx : best->rule.rhs_order()) {
      const auto& part = unit_orders[static_cast<std::size_t>(idx)];
      out.insert(out.end(), part.begin(), part.end());
    }
    return out;
  }

  auto slots = tree.subtree_tokens(h);
  out.assign(slots.size(), -1);
  for (std::size_t u = 0; u < units.size(); ++u) {
    const auto& own = units[u].tokens;
    for (std::size_t k = 0; k < own.size(); ++k) {
      auto pos = std::lower_bound(slots.begin(), slots.end(), own[k]) - slots.begin();
      out[static_cast<std::size_t>(pos)] = unit_orders[u][k];
    }
  }
  return out;
}
}  // namespace detail

/// Reorders one source sentence top-down with the best rule at each head.
/// A rule fires when its probability is at least `min_prob` (table.min_prob
/// when unset) and it is not the identity.
inline ReorderResult apply_rules(const TaggedSentence& sentence, const DepTree& tree,
                                 const RuleTable& table, std::optional<double> min_prob = std::nullopt) {
  if (static_cast<int>(sentence.tokens.size()) != tree.size()) {
    throw InputError("sentence has " + std::to_string(sentence.tokens.size()) + " tokens but tree has " +
                     std::to_string(tree.size()) + " nodes");
  }
  if (sentence.has_pos() && sentence.pos.size() != sentence.tokens.size()) {
    throw InputError("POS count does not match token count");
  }
  auto tags = source_tags(sentence, tree);
  ReorderResult res;
  res.permutation.mapping =
      detail::reorder_subtree(tree, tree.root(), tags, table, min_prob.value_or(table.min_prob));
  res.tokens = res.permutation.apply(sentence.tokens);
  return res;
}

/// Fraction of link pairs with s1 < s2 whose targets are inverted (t1 > t2).
/// 0 when no such pair exists.
inline double crossing_score(const AlignmentSet& align) {
  std::vector<AlignPoint> pts(align.begin(), align.end());
  long long pairs = 0, crossed = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      if (pts[i].src == pts[j].src) continue;
      ++pairs;
      if (pts[i].tgt > pts[j].tgt) ++crossed;
    }
  }
  return pairs == 0 ? 0.0 : static_cast<double>(crossed) / static_cast<double>(pairs);
}

}  // namespace preorder
