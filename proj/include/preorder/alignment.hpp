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
#include <compare>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "preorder/text.hpp"

namespace preorder {

struct AlignPoint {
  int src = 0;
  int tgt = 0;
  auto operator<=>(const AlignPoint&) const = default;
};

/// Word links of one sentence pair. Points are kept sorted by (src, tgt)
/// and are always inside [0, src_len) x [0, tgt_len).
class AlignmentSet {
 public:
  AlignmentSet() = default;
  AlignmentSet(int src_len, int tgt_len) : src_len_(src_len), tgt_len_(tgt_len) {
    if (src_len < 0 || tgt_len < 0) throw InputError("negative alignment dimension");
  }

  int src_len() const { return src_len_; }
  int tgt_len() const { return tgt_len_; }

  bool in_bounds(AlignPoint p) const {
    return p.src >= 0 && p.src < src_len_ && p.tgt >= 0 && p.tgt < tgt_len_;
  }

  /// Returns false when the point was already present.
  bool insert(AlignPoint p) {
    if (!in_bounds(p)) {
      throw InputError("alignment point " + std::to_string(p.src) + "-" + std::to_string(p.tgt) +
                       " outside " + std::to_string(src_len_) + "x" + std::to_string(tgt_len_));
    }
    return points_.insert(p).second;
  }

  bool contains(AlignPoint p) const { return points_.count(p) != 0; }
  bool contains(int s, int t) const { return contains(AlignPoint{s, t}); }
  bool empty() const { return points_.empty(); }
  std::size_t size() const { return points_.size(); }

  const std::set<AlignPoint>& points() const { return points_; }
  auto begin() const { return points_.begin(); }
  auto end() const { return points_.end(); }

  /// Per-word "has at least one link" flags.
  std::vector<bool> src_aligned() const {
    std::vector<bool> f(static_cast<std::size_t>(src_len_), false);
    for (auto p : points_) f[static_cast<std::size_t>(p.src)] = true;
    return f;
  }
  std::vector<bool> tgt_aligned() const {
    std::vector<bool> f(static_cast<std::size_t>(tgt_len_), false);
    for (auto p : points_) f[static_cast<std::size_t>(p.tgt)] = true;
    return f;
  }

  bool same_shape(const AlignmentSet& o) const {
    return src_len_ == o.src_len_ && tgt_len_ == o.tgt_len_;
  }

  /// "i-j" pairs, sorted by (src, tgt), single spaces.
  std::string to_string() const {
    std::string out;
    for (auto p : points_) {
      if (!out.empty()) out += ' ';
      out += std::to_string(p.src);
      out += '-';
      out += std::to_string(p.tgt);
    }
    return out;
  }

  bool operator==(const AlignmentSet&) const = default;

 private:
  int src_len_ = 0;
  int tgt_len_ = 0;
  std::set<AlignPoint> points_;
};

/// Parses one line of 0-based "i-j" pairs. `where` prefixes error messages
/// (typically "file:line").
inline AlignmentSet parse_alignment_line(std::string_view line, int src_len, int tgt_len,
                                         std::string_view where = "") {
  AlignmentSet out(src_len, tgt_len);
  auto fail = [&](const std::string& tok, const std::string& why) -> InputError {
    std::string prefix = where.empty() ? std::string() : std::string(where) + ": ";
    return InputError(prefix + why + " '" + tok + "'");
  };
  for (const auto& tok : split_ws(line)) {
    auto dash = tok.find('-');
    if (dash == std::string::npos || dash == 0 || dash + 1 == tok.size()) {
      throw fail(tok, "malformed alignment pair");
    }
    auto s = parse_int(std::string_view(tok).substr(0, dash));
    auto t = parse_int(std::string_view(tok).substr(dash + 1));
    if (!s || !t) throw fail(tok, "malformed alignment pair");
    AlignPoint p{static_cast<int>(*s), static_cast<int>(*t)};
    if (*s < 0 || *t < 0 || !out.in_bounds(p)) {
      throw fail(tok, "alignment index out of bounds for " + std::to_string(src_len) + "x" +
                          std::to_string(tgt_len) + " pair:");
    }
    out.insert(p);
  }
  return out;
}

/// Same as above but with dimensions inferred as 1 + the largest index seen.
inline AlignmentSet parse_alignment_line_unbounded(std::string_view line, std::string_view where = "") {
  int ms = 0, mt = 0;
  for (const auto& tok : split_ws(line)) {
    auto dash = tok.find('-');
    if (dash == std::string::npos) continue;
    auto s = parse_int(std::string_view(tok).substr(0, dash));
    auto t = parse_int(std::string_view(tok).substr(dash + 1));
    if (s && t) {
      ms = std::max<int>(ms, static_cast<int>(*s) + 1);
      mt = std::max<int>(mt, static_cast<int>(*t) + 1);
    }
  }
  return parse_alignment_line(line, ms, mt, where);
}

/// Swaps the roles of source and target.
inline AlignmentSet transpose(const AlignmentSet& a) {
  AlignmentSet out(a.tgt_len(), a.src_len());
  for (auto p : a) out.insert({p.tgt, p.src});
  return out;
}

}  // namespace preorder
