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

// Readers and writers for every on-disk format the toolkit consumes:
//
//   text corpus   one sentence per line, tokens separated by spaces
//   alignment     one line per pair, 0-based "i-j" links, source first
//   POS sidecar   one line of tags per sentence, aligned with the tokens
//   dependencies  blank-line-separated blocks of ID FORM POS HEAD DEPREL
//   dictionary    source_root<TAB>target_root
//
// All readers validate fully and throw InputError naming file and line.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "preorder/alignment.hpp"
#include "preorder/dep_tree.hpp"
#include "preorder/text.hpp"

namespace preorder {

struct TaggedSentence {
  Sentence tokens;
  std::vector<std::string> pos;  // empty when no tags were supplied

  bool has_pos() const { return !pos.empty(); }
  bool operator==(const TaggedSentence&) const = default;
};

struct SentencePair {
  TaggedSentence source;
  TaggedSentence target;
  AlignmentSet alignment;
  std::optional<DepTree> source_tree;
};

struct ParallelCorpus {
  std::vector<SentencePair> pairs;

  std::size_t size() const { return pairs.size(); }
};

struct CorpusPaths {
  std::filesystem::path src;
  std::filesystem::path tgt;
  std::filesystem::path align;
  std::optional<std::filesystem::path> src_pos;
  std::optional<std::filesystem::path> tgt_pos;
  std::optional<std::filesystem::path> src_dep;
};

/// One tokenized sentence per line. Empty lines are rejected unless
/// `allow_empty` is set (system output may legitimately be empty).
inline std::vector<Sentence> read_sentences(const std::filesystem::path& path,
                                            bool allow_empty = false) {
  auto lines = read_lines(path);
  std::vector<Sentence> out;
  out.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto toks = split_ws(lines[i]);
    if (toks.empty() && !allow_empty) {
      throw InputError(location(path, i + 1) + ": empty sentence");
    }
    out.push_back(std::move(toks));
  }
  return out;
}

inline void write_sentences(const std::filesystem::path& path, const std::vector<Sentence>& sents) {
  std::vector<std::string> lines;
  lines.reserve(sents.size());
  for (const auto& s : sents) lines.push_back(join(s));
  write_lines(path, lines);
}

inline void write_alignments(const std::filesystem::path& path,
                             const std::vector<AlignmentSet>& aligns) {
  std::vector<std::string> lines;
  lines.reserve(aligns.size());
  for (const auto& a : aligns) lines.push_back(a.to_string());
  write_lines(path, lines);
}

/// Parses dependency blocks from already-read lines. `name` is used in errors.
inline std::vector<DepTree> parse_dependency_lines(const std::vector<std::string>& lines,
                                                   const std::string& name = "dependencies") {
  std::vector<DepTree> trees;
  std::vector<DepNode> block;
  std::size_t block_start = 0;
  auto flush = [&]() {
    if (block.empty()) return;
    try {
      trees.push_back(DepTree::build(std::move(block)));
    } catch (const InputError& e) {
      throw InputError(location(name, block_start) + ": sentence " + std::to_string(trees.size()) +
                       ": " + e.what());
    }
    block.clear();
  };
  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto t = trim(lines[i]);
    if (t.empty()) {
      flush();
      continue;
    }
    if (block.empty()) block_start = i + 1;
    auto fields = t.find('\t') != std::string_view::npos ? split_on(t, "\t") : split_ws(t);
    for (auto& f : fields) f = std::string(trim(f));
    std::string where = location(name, i + 1) + ": sentence " + std::to_string(trees.size());
    if (fields.size() != 5) {
      throw InputError(where + ": expected 5 fields (ID FORM POS HEAD DEPREL), got " +
                       std::to_string(fields.size()));
    }
    auto id = parse_int(fields[0]);
    auto head = parse_int(fields[3]);
    if (!id || !head) throw InputError(where + ": non-integer ID or HEAD");
    if (*id != static_cast<long long>(block.size()) + 1) {
      throw InputError(where + ": non-contiguous node id " + fields[0]);
    }
    if (fields[1].empty() || fields[2].empty()) throw InputError(where + ": empty FORM or POS");
    block.push_back(DepNode{fields[1], fields[2], static_cast<int>(*head), fields[4]});
  }
  flush();
  return trees;
}

inline std::vector<DepTree> read_dependency_file(const std::filesystem::path& path) {
  return parse_dependency_lines(read_lines(path), path.string());
}

inline void write_dependency_file(const std::filesystem::path& path,
                                  const std::vector<DepTree>& trees) {
  std::vector<std::string> lines;
  for (const auto& t : trees) {
    for (int i = 1; i <= t.size(); ++i) {
      const auto& n = t.node(i);
      lines.push_back(std::to_string(i) + "\t" + n.form + "\t" + n.pos + "\t" +
                      std::to_string(n.head) + "\t" + n.label);
    }
    lines.emplace_back();
  }
  write_lines(path, lines);
}

/// Reads all files named in `paths` and cross-checks every length invariant.
inline ParallelCorpus read_parallel_corpus(const CorpusPaths& paths) {
  auto src = read_lines(paths.src);
  auto tgt = read_lines(paths.tgt);
  auto align = read_lines(paths.align);

  auto check_count = [&](const std::filesystem::path& other, std::size_t n) {
    if (n != src.size()) {
      throw InputError("line count mismatch: " + paths.src.string() + " has " +
                       std::to_string(src.size()) + " sentences, " + other.string() + " has " +
                       std::to_string(n));
    }
  };
  check_count(paths.tgt, tgt.size());
  check_count(paths.align, align.size());

  std::vector<std::string> src_pos, tgt_pos;
  if (paths.src_pos) {
    src_pos = read_lines(*paths.src_pos);
    check_count(*paths.src_pos, src_pos.size());
  }
  if (paths.tgt_pos) {
    tgt_pos = read_lines(*paths.tgt_pos);
    check_count(*paths.tgt_pos, tgt_pos.size());
  }
  std::vector<DepTree> trees;
  if (paths.src_dep) {
    trees = read_dependency_file(*paths.src_dep);
    check_count(*paths.src_dep, trees.size());
  }

  ParallelCorpus corpus;
  corpus.pairs.reserve(src.size());
  for (std::size_t i = 0; i < src.size(); ++i) {
    SentencePair pair;
    pair.source.tokens = split_ws(src[i]);
    pair.target.tokens = split_ws(tgt[i]);
    if (pair.source.tokens.empty()) throw InputError(location(paths.src, i + 1) + ": empty sentence");
    if (pair.target.tokens.empty()) throw InputError(location(paths.tgt, i + 1) + ": empty sentence");
    const int sl = static_cast<int>(pair.source.tokens.size());
    const int tl = static_cast<int>(pair.target.tokens.size());

    auto tags = [&](const std::vector<std::string>& lines, const std::filesystem::path& p,
                    std::size_t expected) {
      auto t = split_ws(lines[i]);
      if (t.size() != expected) {
        throw InputError(location(p, i + 1) + ": " + std::to_string(t.size()) + " tags for " +
                         std::to_string(expected) + " tokens");
      }
      return t;
    };
    if (paths.src_pos) pair.source.pos = tags(src_pos, *paths.src_pos, pair.source.tokens.size());
    if (paths.tgt_pos) pair.target.pos = tags(tgt_pos, *paths.tgt_pos, pair.target.tokens.size());

    pair.alignment = parse_alignment_line(align[i], sl, tl, location(paths.align, i + 1));

    if (paths.src_dep) {
      if (trees[i].size() != sl) {
        throw InputError(paths.src_dep->string() + ": sentence " + std::to_string(i) + " has " +
                         std::to_string(trees[i].size()) + " nodes for " + std::to_string(sl) +
                         " tokens in " + location(paths.src, i + 1));
      }
      pair.source_tree = std::move(trees[i]);
    }
    corpus.pairs.push_back(std::move(pair));
  }
  return corpus;
}

/// Source root -> target roots, first entry preferred. Keys are case-folded.
class BilingualDictionary {
 public:
  void add(std::string_view source_root, std::string target_root) {
    entries_[case_fold(source_root)].push_back(std::move(target_root));
  }

  /// nullptr on miss.
  const std::vector<std::string>* lookup(std::string_view source_root) const {
    auto it = entries_.find(case_fold(source_root));
    return it == entries_.end() ? nullptr : &it->second;
  }

  std::size_t size() const { return entries_.size(); }
  const std::map<std::string, std::vector<std::string>>& entries() const { return entries_; }

 private:
  std::map<std::string, std::vector<std::string>> entries_;
};

inline BilingualDictionary read_dictionary(const std::filesystem::path& path) {
  auto lines = read_lines(path);
  BilingualDictionary dict;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    auto tab = lines[i].find('\t');
    if (tab == std::string::npos) throw InputError(location(path, i + 1) + ": missing TAB");
    auto src = trim(std::string_view(lines[i]).substr(0, tab));
    auto tgt = trim(std::string_view(lines[i]).substr(tab + 1));
    if (src.empty() || tgt.empty()) throw InputError(location(path, i + 1) + ": empty field");
    dict.add(src, std::string(tgt));
  }
  return dict;
}

}  // namespace preorder
