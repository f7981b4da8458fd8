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

#include <string>
#include <string_view>

#include "preorder/alignment.hpp"

namespace preorder {

enum class SymmetrizeMode { kGrowDiagFinal, kGrowDiagFinalAnd };

inline SymmetrizeMode parse_symmetrize_mode(std::string_view s) {
  if (s == "gdf" || s == "grow-diag-final") return SymmetrizeMode::kGrowDiagFinal;
  if (s == "gdfa" || s == "grow-diag-final-and") return SymmetrizeMode::kGrowDiagFinalAnd;
  throw UsageError("unknown symmetrization mode '" + std::string(s) + "' (expected gdf or gdfa)");
}

namespace detail {
inline void require_same_shape(const AlignmentSet& a, const AlignmentSet& b) {
  if (!a.same_shape(b)) {
    throw InputError("alignment dimension mismatch: " + std::to_string(a.src_len()) + "x" +
                     std::to_string(a.tgt_len()) + " vs " + std::to_string(b.src_len()) + "x" +
                     std::to_string(b.tgt_len()));
  }
}
}  // namespace detail

/// Both inputs are source-major (b2a already transposed).
inline AlignmentSet intersect(const AlignmentSet& a2b, const AlignmentSet& b2a) {
  detail::require_same_shape(a2b, b2a);
  AlignmentSet out(a2b.src_len(), a2b.tgt_len());
  for (auto p : a2b) {
    if (b2a.contains(p)) out.insert(p);
  }
  return out;
}

inline AlignmentSet union_align(const AlignmentSet& a2b, const AlignmentSet& b2a) {
  detail::require_same_shape(a2b, b2a);
  AlignmentSet out = a2b;
  for (auto p : b2a) out.insert(p);
  return out;
}

/// grow-diag-final(-and). Starts from the intersection and grows toward the
/// union. Every sweep visits candidates in (src, tgt) order and a point added
/// during a sweep is visible to the rest of that sweep.
inline AlignmentSet grow_diag_final(const AlignmentSet& a2b, const AlignmentSet& b2a,
                                    SymmetrizeMode mode = SymmetrizeMode::kGrowDiagFinal) {
  AlignmentSet cur = intersect(a2b, b2a);
  const AlignmentSet uni = union_align(a2b, b2a);

  auto src_al = cur.src_aligned();
  auto tgt_al = cur.tgt_aligned();
  auto add = [&](AlignPoint p) {
    cur.insert(p);
    src_al[static_cast<std::size_t>(p.src)] = true;
    tgt_al[static_cast<std::size_t>(p.tgt)] = true;
  };
  auto has_neighbor = [&](AlignPoint p) {
    for (int ds = -1; ds <= 1; ++ds) {
      for (int dt = -1; dt <= 1; ++dt) {
        if (ds == 0 && dt == 0) continue;
        if (cur.contains(p.src + ds, p.tgt + dt)) return true;
      }
    }
    return false;
  };

  // grow-diag
  for (bool added = true; added;) {
    added = false;
    for (auto p : uni) {
      if (cur.contains(p)) continue;
      if (!src_al[static_cast<std::size_t>(p.src)] || !tgt_al[static_cast<std::size_t>(p.tgt)]) {
        if (has_neighbor(p)) {
          add(p);
          added = true;
        }
      }
    }
  }

  // final
  for (auto p : uni) {
    if (cur.contains(p)) continue;
    bool s_free = !src_al[static_cast<std::size_t>(p.src)];
    bool t_free = !tgt_al[static_cast<std::size_t>(p.tgt)];
    bool take = mode == SymmetrizeMode::kGrowDiagFinalAnd ? (s_free && t_free) : (s_free || t_free);
    if (take) add(p);
  }
  return cur;
}

}  // namespace preorder
