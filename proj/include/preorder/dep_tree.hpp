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
#include <string>
#include <utility>
#include <vector>

#include "preorder/text.hpp"

namespace preorder {

struct DepNode {
  std::string form;
  std::string pos;
  int head = 0;  // 0 = artificial root, otherwise a 1-based node id
  std::string label;

  bool operator==(const DepNode&) const = default;
};

/// A validated dependency parse. Node ids are 1-based; token index = id - 1.
///
/// Construction checks head ranges, acyclicity, a unique root and full
/// reachability, so every DepTree in existence is a well-formed tree.
class DepTree {
 public:
  DepTree() = default;

  static DepTree build(std::vector<DepNode> nodes) {
    DepTree t;
    t.nodes_ = std::move(nodes);
    t.validate();
    t.index_children();
    return t;
  }

  int size() const { return static_cast<int>(nodes_.size()); }
  const std::vector<DepNode>& nodes() const { return nodes_; }
  const DepNode& node(int id) const { return nodes_.at(static_cast<std::size_t>(id - 1)); }
  int root() const { return root_; }

  /// Direct dependents of `id` (0 for the artificial root), in increasing id order.
  const std::vector<int>& dependents(int id) const {
    return children_.at(static_cast<std::size_t>(id));
  }

  /// 0-based token indices of `id` and all its descendants, sorted.
  std::vector<int> subtree_tokens(int id) const {
    std::vector<int> out;
    std::vector<int> stack{id};
    while (!stack.empty()) {
      int cur = stack.back();
      stack.pop_back();
      out.push_back(cur - 1);
      for (int c : dependents(cur)) stack.push_back(c);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  bool operator==(const DepTree& o) const { return nodes_ == o.nodes_; }

 private:
  void validate() {
    const int n = size();
    if (n == 0) throw InputError("empty dependency tree");
    for (int i = 1; i <= n; ++i) {
      int h = node(i).head;
      if (h < 0 || h > n) {
        throw InputError("node " + std::to_string(i) + " has head " + std::to_string(h) +
                         " outside 0.." + std::to_string(n));
      }
    }
    // Every head chain must end at 0.
    std::vector<int> state(static_cast<std::size_t>(n + 1), 0);  // 0 new, 1 on path, 2 done
    for (int i = 1; i <= n; ++i) {
      std::vector<int> path;
      int cur = i;
      while (cur != 0 && state[static_cast<std::size_t>(cur)] == 0) {
        state[static_cast<std::size_t>(cur)] = 1;
        path.push_back(cur);
        cur = node(cur).head;
      }
      if (cur != 0 && state[static_cast<std::size_t>(cur)] == 1) {
        throw InputError("cycle through node " + std::to_string(cur));
      }
      for (int p : path) state[static_cast<std::size_t>(p)] = 2;
    }
    root_ = 0;
    for (int i = 1; i <= n; ++i) {
      if (node(i).head != 0) continue;
      if (root_ != 0) {
        throw InputError("multiple roots (nodes " + std::to_string(root_) + " and " +
                         std::to_string(i) + ")");
      }
      root_ = i;
    }
    if (root_ == 0) throw InputError("no root node");
  }

  void index_children() {
    const int n = size();
    children_.assign(static_cast<std::size_t>(n + 1), {});
    for (int i = 1; i <= n; ++i) children_[static_cast<std::size_t>(node(i).head)].push_back(i);
    // Every node must be reachable from the artificial root.
    std::vector<bool> seen(static_cast<std::size_t>(n + 1), false);
    std::vector<int> stack{0};
    int visited = 0;
    while (!stack.empty()) {
      int cur = stack.back();
      stack.pop_back();
      for (int c : children_[static_cast<std::size_t>(cur)]) {
        if (seen[static_cast<std::size_t>(c)]) continue;
        seen[static_cast<std::size_t>(c)] = true;
        ++visited;
        stack.push_back(c);
      }
    }
    if (visited != n) throw InputError("unreachable node in dependency tree");
  }

  std::vector<DepNode> nodes_;
  std::vector<std::vector<int>> children_;
  int root_ = 0;
};

}  // namespace preorder
