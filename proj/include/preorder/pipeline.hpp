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

// Config-driven end-to-end run:
//
//   [symmetrize] -> strip-eos -> learn-rules -> apply-rules -> extract-phrases
//   -> train-lm -> [mbr-rerank] -> score-bleu -> oov-substitute -> restore-eos
//
// Every intermediate is written to out_dir. Output bytes depend only on the
// input files and the config; the worker count changes wall time only.

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "preorder/bleu.hpp"
#include "preorder/corpus_io.hpp"
#include "preorder/mbr.hpp"
#include "preorder/ngram_lm.hpp"
#include "preorder/parallel.hpp"
#include "preorder/phrase_extract.hpp"
#include "preorder/postedit.hpp"
#include "preorder/reorder_rules.hpp"
#include "preorder/symmetrize.hpp"
#include "preorder/text.hpp"

namespace preorder {

namespace fs = std::filesystem;

struct PipelineConfig {
  fs::path src, tgt, dep;
  std::optional<fs::path> align, a2b, b2a;
  std::optional<fs::path> src_pos, tgt_pos;
  std::optional<fs::path> hyp, ref, nbest, reference_reordering, dict;
  fs::path out_dir;

  int max_phrase_len = 7;
  int lm_order = 5;
  Smoothing smoothing = Smoothing::kWittenBell;
  long long rule_min_count = 2;
  double rule_min_prob = 0.5;
  SymmetrizeMode symmetrize_mode = SymmetrizeMode::kGrowDiagFinal;
  std::vector<std::string> eos_markers{"."};
  double mbr_alpha = 1.0;
  int distortion_limit = 6;  // recorded only; no decoder consumes it
  int workers = 1;

  /// key=value lines, '#' comments. Relative paths resolve against `base_dir`.
  static PipelineConfig parse(const std::vector<std::string>& lines, const fs::path& base_dir,
                              const std::string& name = "config") {
    PipelineConfig c;
    auto path_of = [&](const std::string& v) {
      fs::path p(v);
      return p.is_absolute() ? p : base_dir / p;
    };
    for (std::size_t i = 0; i < lines.size(); ++i) {
      std::string_view line = lines[i];
      if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
      line = trim(line);
      if (line.empty()) continue;
      auto where = location(name, i + 1);
      auto eq = line.find('=');
      if (eq == std::string_view::npos) throw InputError(where + ": expected key=value");
      std::string key(trim(line.substr(0, eq)));
      std::string val(trim(line.substr(eq + 1)));
      auto as_int = [&]() {
        auto v = parse_int(val);
        if (!v) throw InputError(where + ": " + key + " must be an integer");
        return *v;
      };
      auto as_double = [&]() {
        auto v = parse_double(val);
        if (!v) throw InputError(where + ": " + key + " must be a number");
        return *v;
      };
      try {
        if (key == "src") c.src = path_of(val);
        else if (key == "tgt") c.tgt = path_of(val);
        else if (key == "dep") c.dep = path_of(val);
        else if (key == "align") c.align = path_of(val);
        else if (key == "a2b") c.a2b = path_of(val);
        else if (key == "b2a") c.b2a = path_of(val);
        else if (key == "src_pos") c.src_pos = path_of(val);
        else if (key == "tgt_pos") c.tgt_pos = path_of(val);
        else if (key == "hyp") c.hyp = path_of(val);
        else if (key == "ref") c.ref = path_of(val);
        else if (key == "nbest") c.nbest = path_of(val);
        else if (key == "reference_reordering") c.reference_reordering = path_of(val);
        else if (key == "dict") c.dict = path_of(val);
        else if (key == "out_dir") c.out_dir = path_of(val);
        else if (key == "max_phrase_len") c.max_phrase_len = static_cast<int>(as_int());
        else if (key == "lm_order") c.lm_order = static_cast<int>(as_int());
        else if (key == "smoothing") c.smoothing = parse_smoothing(val);
        else if (key == "rule_min_count") c.rule_min_count = as_int();
        else if (key == "rule_min_prob") c.rule_min_prob = as_double();
        else if (key == "symmetrize_mode") c.symmetrize_mode = parse_symmetrize_mode(val);
        else if (key == "eos_markers") c.eos_markers = split_ws(val);
        else if (key == "mbr_alpha") c.mbr_alpha = as_double();
        else if (key == "distortion_limit") c.distortion_limit = static_cast<int>(as_int());
        else if (key == "workers") c.workers = static_cast<int>(as_int());
        else throw InputError(where + ": unknown key '" + key + "'");
      } catch (const UsageError& e) {
        throw InputError(where + ": " + e.what());
      }
    }
    return c;
  }

  static PipelineConfig load(const fs::path& path) {
    return parse(read_lines(path), path.parent_path(), path.string());
  }

  /// Range checks and file existence; runs before any stage.
  void validate() const {
    auto need = [](const fs::path& p, const char* key) {
      if (p.empty()) throw InputError(std::string("config: missing required key '") + key + "'");
      if (!fs::exists(p)) throw InputError(std::string("config: ") + key + " file not found: " + p.string());
    };
    auto opt = [](const std::optional<fs::path>& p, const char* key) {
      if (p && !fs::exists(*p)) throw InputError(std::string("config: ") + key + " file not found: " + p->string());
    };
    need(src, "src");
    need(tgt, "tgt");
    need(dep, "dep");
    if (align) {
      opt(align, "align");
    } else if (a2b && b2a) {
      opt(a2b, "a2b");
      opt(b2a, "b2a");
    } else {
      throw InputError("config: need either align or both a2b and b2a");
    }
    opt(src_pos, "src_pos");
    opt(tgt_pos, "tgt_pos");
    opt(hyp, "hyp");
    opt(ref, "ref");
    opt(nbest, "nbest");
    opt(reference_reordering, "reference_reordering");
    opt(dict, "dict");
    if (hyp && nbest) throw InputError("config: hyp and nbest are mutually exclusive");
    if (out_dir.empty()) throw InputError("config: missing required key 'out_dir'");
    if (max_phrase_len < 1) throw InputError("config: max_phrase_len must be >= 1");
    if (lm_order < 1) throw InputError("config: lm_order must be >= 1");
    if (rule_min_count < 1) throw InputError("config: rule_min_count must be >= 1");
    if (rule_min_prob < 0.0 || rule_min_prob > 1.0) throw InputError("config: rule_min_prob must be in [0, 1]");
    if (!(mbr_alpha > 0.0)) throw InputError("config: mbr_alpha must be > 0");
    if (distortion_limit < -1) throw InputError("config: distortion_limit must be >= 0 or -1 (unlimited)");
    if (workers < 1) throw InputError("config: workers must be >= 1");
    try {
      EosMarkers m(eos_markers);
    } catch (const UsageError& e) {
      throw InputError(std::string("config: ") + e.what());
    }
  }
};

struct StageReport {
  std::string name;
  double seconds = 0.0;
  std::vector<std::string> details;  // "key: value"
};

struct PipelineReport {
  std::vector<StageReport> stages;  // execution order
  std::size_t rules_learned = 0;
  std::size_t phrases_extracted = 0;
  std::size_t oovs_replaced = 0;
  std::optional<BleuReport> final_bleu;

  /// Deterministic text (no timings).
  std::vector<std::string> to_lines() const {
    std::vector<std::string> lines;
    for (const auto& s : stages) {
      lines.push_back("[" + s.name + "]");
      for (const auto& d : s.details) lines.push_back("  " + d);
    }
    lines.push_back("rules_learned: " + std::to_string(rules_learned));
    lines.push_back("phrases_extracted: " + std::to_string(phrases_extracted));
    lines.push_back("oovs_replaced: " + std::to_string(oovs_replaced));
    lines.push_back("final_bleu: " + (final_bleu ? final_bleu->to_string() : std::string("n/a")));
    return lines;
  }
};

namespace detail {

/// Removes the final token of a pair's source or target side when it is a
/// declarative marker, keeping alignment, tags and tree consistent. Source
/// markers that are not leaves of the parse are left in place.
struct StrippedPair {
  SentencePair pair;
  std::optional<EosRecord> src_record, tgt_record;
};

inline StrippedPair strip_pair(const SentencePair& in, std::size_t index, const EosMarkers& markers) {
  StrippedPair out{in, std::nullopt, std::nullopt};
  auto& p = out.pair;

  auto [src_tokens, src_rec] = strip_eos(in.source.tokens, index, markers);
  if (src_rec && in.source_tree) {
    const int last = in.source_tree->size();
    if (in.source_tree->node(last).head == 0 || !in.source_tree->dependents(last).empty()) src_rec.reset();
  }
  if (src_rec) {
    p.source.tokens = std::move(src_tokens);
    if (p.source.has_pos()) p.source.pos.pop_back();
    if (p.source_tree) {
      auto nodes = p.source_tree->nodes();
      nodes.pop_back();
      p.source_tree = DepTree::build(std::move(nodes));
    }
    out.src_record = src_rec;
  }

  auto [tgt_tokens, tgt_rec] = strip_eos(in.target.tokens, index, markers);
  if (tgt_rec) {
    p.target.tokens = std::move(tgt_tokens);
    if (p.target.has_pos()) p.target.pos.pop_back();
    out.tgt_record = tgt_rec;
  }

  AlignmentSet a(static_cast<int>(p.source.tokens.size()), static_cast<int>(p.target.tokens.size()));
  for (auto pt : in.alignment) {
    if (pt.src < a.src_len() && pt.tgt < a.tgt_len()) a.insert(pt);
  }
  p.alignment = std::move(a);
  return out;
}

inline std::vector<std::string> pos_lines(const std::vector<SentencePair>& pairs, bool source) {
  std::vector<std::string> out;
  for (const auto& p : pairs) out.push_back(join(source ? p.source.pos : p.target.pos));
  return out;
}

inline std::vector<Sentence> strip_corpus(const std::vector<Sentence>& corpus, const EosMarkers& markers) {
  std::vector<Sentence> out;
  out.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) out.push_back(strip_eos(corpus[i], i, markers).first);
  return out;
}

}  // namespace detail

inline PipelineReport run_pipeline(const PipelineConfig& cfg) {
  cfg.validate();
  fs::create_directories(cfg.out_dir);
  const auto& out = cfg.out_dir;
  const EosMarkers markers(cfg.eos_markers);
  PipelineReport report;

  auto stage = [&](const std::string& name, const std::function<std::vector<std::string>()>& body) {
    auto t0 = std::chrono::steady_clock::now();
    std::vector<std::string> details;
    try {
      details = body();
    } catch (const std::exception& e) {
      throw InputError("pipeline stage '" + name + "' failed: " + e.what());
    }
    auto t1 = std::chrono::steady_clock::now();
    report.stages.push_back({name, std::chrono::duration<double>(t1 - t0).count(), std::move(details)});
  };

  stage("config", [&] {
    return std::vector<std::string>{
        "max_phrase_len: " + std::to_string(cfg.max_phrase_len),
        "lm_order: " + std::to_string(cfg.lm_order),
        std::string("smoothing: ") + smoothing_name(cfg.smoothing),
        "rule_min_count: " + std::to_string(cfg.rule_min_count),
        "rule_min_prob: " + format_double(cfg.rule_min_prob),
        std::string("symmetrize_mode: ") +
            (cfg.symmetrize_mode == SymmetrizeMode::kGrowDiagFinal ? "grow-diag-final" : "grow-diag-final-and"),
        "eos_markers: " + join(cfg.eos_markers),
        "mbr_alpha: " + format_double(cfg.mbr_alpha),
        "distortion_limit: " + std::to_string(cfg.distortion_limit)};
  });

  fs::path align_path = cfg.align.value_or(out / "sym.align");
  if (!cfg.align) {
    stage("symmetrize", [&] {
      auto src = read_sentences(cfg.src);
      auto tgt = read_sentences(cfg.tgt);
      auto a2b = read_lines(*cfg.a2b);
      auto b2a = read_lines(*cfg.b2a);
      if (a2b.size() != src.size() || b2a.size() != src.size() || tgt.size() != src.size()) {
        throw InputError("a2b/b2a/src/tgt sentence counts differ");
      }
      auto merged = parallel_map_index(src.size(), cfg.workers, [&](std::size_t i) {
        int sl = static_cast<int>(src[i].size()), tl = static_cast<int>(tgt[i].size());
        auto a = parse_alignment_line(a2b[i], sl, tl, location(*cfg.a2b, i + 1));
        auto b = parse_alignment_line(b2a[i], sl, tl, location(*cfg.b2a, i + 1));
        return grow_diag_final(a, b, cfg.symmetrize_mode);
      });
      write_alignments(align_path, merged);
      std::size_t links = 0;
      for (const auto& m : merged) links += m.size();
      return std::vector<std::string>{"links: " + std::to_string(links)};
    });
  }

  ParallelCorpus corpus;
  std::vector<EosRecord> src_records, tgt_records;
  stage("strip-eos", [&] {
    CorpusPaths paths{cfg.src, cfg.tgt, align_path, cfg.src_pos, cfg.tgt_pos, cfg.dep};
    auto raw = read_parallel_corpus(paths);
    for (std::size_t i = 0; i < raw.size(); ++i) {
      auto s = detail::strip_pair(raw.pairs[i], i, markers);
      if (s.src_record) src_records.push_back(*s.src_record);
      if (s.tgt_record) tgt_records.push_back(*s.tgt_record);
      corpus.pairs.push_back(std::move(s.pair));
    }
    std::vector<Sentence> s, t;
    std::vector<AlignmentSet> a;
    std::vector<DepTree> d;
    for (const auto& p : corpus.pairs) {
      s.push_back(p.source.tokens);
      t.push_back(p.target.tokens);
      a.push_back(p.alignment);
      d.push_back(*p.source_tree);
    }
    write_sentences(out / "train.src", s);
    write_sentences(out / "train.tgt", t);
    write_alignments(out / "train.align", a);
    write_dependency_file(out / "train.dep", d);
    if (cfg.src_pos) write_lines(out / "train.src.pos", detail::pos_lines(corpus.pairs, true));
    if (cfg.tgt_pos) write_lines(out / "train.tgt.pos", detail::pos_lines(corpus.pairs, false));
    write_lines(out / "eos.src.records", eos_records_to_lines(src_records));
    write_lines(out / "eos.tgt.records", eos_records_to_lines(tgt_records));
    return std::vector<std::string>{"sentences: " + std::to_string(corpus.size()),
                                    "source_markers_removed: " + std::to_string(src_records.size()),
                                    "target_markers_removed: " + std::to_string(tgt_records.size())};
  });

  RuleTable rules;
  stage("learn-rules", [&] {
    auto instances = extract_rules(corpus, cfg.workers);
    rules = score_rules(instances, cfg.rule_min_count, cfg.rule_min_prob);
    write_lines(out / "rules.txt", rules.to_lines());
    std::size_t non_identity = 0;
    for (const auto& [k, v] : rules.rules) {
      for (const auto& e : v) non_identity += e.rule.is_identity() ? 0 : 1;
    }
    report.rules_learned = rules.rule_count();
    return std::vector<std::string>{"instances: " + std::to_string(instances.size()),
                                    "rules: " + std::to_string(rules.rule_count()),
                                    "non_identity_rules: " + std::to_string(non_identity)};
  });

  ParallelCorpus reordered = corpus;
  stage("apply-rules", [&] {
    auto results = parallel_map(corpus.pairs, cfg.workers, [&](const SentencePair& p) {
      return apply_rules(p.source, *p.source_tree, rules);
    });
    std::vector<Sentence> toks;
    std::vector<std::string> perms;
    std::vector<AlignmentSet> aligns;
    std::size_t changed = 0;
    double before = 0.0, after = 0.0;
    for (std::size_t i = 0; i < results.size(); ++i) {
      auto& rp = reordered.pairs[i];
      rp.source.tokens = results[i].tokens;
      if (rp.source.has_pos()) rp.source.pos = results[i].permutation.apply(rp.source.pos);
      rp.alignment = permute_source(corpus.pairs[i].alignment, results[i].permutation);
      rp.source_tree.reset();
      toks.push_back(results[i].tokens);
      perms.push_back(results[i].permutation.to_string());
      aligns.push_back(rp.alignment);
      if (!results[i].permutation.is_identity()) ++changed;
      before += crossing_score(corpus.pairs[i].alignment);
      after += crossing_score(rp.alignment);
    }
    write_sentences(out / "reordered.src", toks);
    write_lines(out / "reordered.perm", perms);
    write_alignments(out / "reordered.align", aligns);
    const double n = static_cast<double>(std::max<std::size_t>(1, results.size()));
    return std::vector<std::string>{"sentences_reordered: " + std::to_string(changed),
                                    "mean_crossing_before: " + format_fixed(before / n, 6),
                                    "mean_crossing_after: " + format_fixed(after / n, 6)};
  });

  stage("extract-phrases", [&] {
    auto table = estimate_phrase_table(reordered, ExtractConfig{cfg.max_phrase_len}, cfg.workers);
    write_lines(out / "phrase-table.txt", table.to_lines());
    report.phrases_extracted = table.size();
    return std::vector<std::string>{"phrase_pairs: " + std::to_string(table.size())};
  });

  stage("train-lm", [&] {
    std::vector<Sentence> text;
    for (const auto& p : corpus.pairs) text.push_back(p.target.tokens);
    auto lm = NGramLM::train(text, cfg.lm_order, cfg.smoothing);
    write_lines(out / "lm.arpa", lm.to_arpa_lines());
    auto ppl = lm.perplexity(text);
    return std::vector<std::string>{"order: " + std::to_string(cfg.lm_order),
                                    "train_perplexity: " + format_fixed(ppl.perplexity, 6)};
  });

  std::optional<std::vector<Sentence>> hyps;
  if (cfg.hyp) hyps = read_sentences(*cfg.hyp, true);
  if (cfg.nbest) {
    stage("mbr-rerank", [&] {
      auto lists = parse_nbest_lines(read_lines(*cfg.nbest), cfg.nbest->string());
      auto picks = parallel_map(lists, cfg.workers, [&](const NBestList& l) { return mbr_select(l, cfg.mbr_alpha); });
      hyps.emplace();
      for (std::size_t i = 0; i < lists.size(); ++i) hyps->push_back(lists[i].entries[picks[i].selected].hypothesis);
      write_sentences(out / "mbr.hyp", *hyps);
      return std::vector<std::string>{"segments: " + std::to_string(lists.size())};
    });
  }

  std::optional<std::vector<Sentence>> refs;
  if (cfg.ref) refs = read_sentences(*cfg.ref);

  stage("score-bleu", [&] {
    std::vector<std::string> details;
    if (hyps && refs) {
      auto r = corpus_bleu(*hyps, detail::strip_corpus(*refs, markers));
      details.push_back("hyp_vs_ref: " + r.to_string());
    }
    if (cfg.reference_reordering) {
      auto target_order = detail::strip_corpus(read_sentences(*cfg.reference_reordering), markers);
      std::vector<Sentence> orig, reord;
      for (std::size_t i = 0; i < corpus.size(); ++i) {
        orig.push_back(corpus.pairs[i].source.tokens);
        reord.push_back(reordered.pairs[i].source.tokens);
      }
      details.push_back("source_vs_reference_order: " + corpus_bleu(orig, target_order).to_string());
      details.push_back("reordered_vs_reference_order: " + corpus_bleu(reord, target_order).to_string());
    }
    if (details.empty()) details.emplace_back("skipped: no hypothesis/reference pair configured");
    write_lines(out / "bleu.txt", details);
    return details;
  });

  stage("oov-substitute", [&] {
    if (!hyps || !cfg.dict) return std::vector<std::string>{"skipped: needs hyp (or nbest) and dict"};
    auto dict = read_dictionary(*cfg.dict);
    Vocabulary src_vocab, tgt_vocab;
    for (const auto& p : corpus.pairs) {
      src_vocab.insert(p.source.tokens.begin(), p.source.tokens.end());
      tgt_vocab.insert(p.target.tokens.begin(), p.target.tokens.end());
    }
    std::vector<std::string> report_lines;
    std::size_t replaced = 0, flagged = 0;
    for (std::size_t i = 0; i < hyps->size(); ++i) {
      auto positions = detect_oov((*hyps)[i], tgt_vocab, src_vocab);
      flagged += positions.size();
      auto [sent, rep] = substitute_oov((*hyps)[i], positions, dict);
      for (const auto& e : rep) replaced += e.action == OovAction::kReplaced ? 1 : 0;
      for (auto& l : oov_report_lines(i, rep)) report_lines.push_back(std::move(l));
      (*hyps)[i] = std::move(sent);
    }
    write_sentences(out / "hyp.oov", *hyps);
    write_lines(out / "oov.report", report_lines);
    report.oovs_replaced = replaced;
    return std::vector<std::string>{"flagged: " + std::to_string(flagged), "replaced: " + std::to_string(replaced)};
  });

  stage("restore-eos", [&] {
    if (!hyps) return std::vector<std::string>{"skipped: no hypothesis"};
    if (hyps->size() != corpus.size()) {
      throw InputError("hypothesis count " + std::to_string(hyps->size()) + " differs from source count " +
                       std::to_string(corpus.size()));
    }
    auto restored = restore_eos_corpus(*hyps, src_records);
    write_sentences(out / "hyp.final", restored);
    std::vector<std::string> details{"markers_restored: " + std::to_string(src_records.size())};
    if (refs) {
      report.final_bleu = corpus_bleu(restored, *refs);
      details.push_back("final: " + report.final_bleu->to_string());
    }
    return details;
  });

  write_lines(out / "report.txt", report.to_lines());
  return report;
}

}  // namespace preorder
