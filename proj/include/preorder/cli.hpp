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

// Subcommand front-end. Exit codes: 0 success, 1 invalid input, 2 usage error.
// Diagnostics go to `err`; data goes to files or `out`.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "preorder/preorder.hpp"

namespace preorder {

namespace cli_detail {

namespace fs = std::filesystem;

inline void emit(const std::optional<std::string>& path, const std::vector<std::string>& lines, std::ostream& out) {
  if (path) {
    write_lines(*path, lines);
  } else {
    for (const auto& l : lines) out << l << '\n';
  }
}

inline std::vector<DepTree> read_trees_for(const std::vector<Sentence>& sents, const std::string& sent_path,
                                           const std::string& dep_path) {
  auto trees = read_dependency_file(dep_path);
  if (trees.size() != sents.size()) {
    throw InputError("line count mismatch: " + sent_path + " has " + std::to_string(sents.size()) +
                     " sentences, " + dep_path + " has " + std::to_string(trees.size()));
  }
  for (std::size_t i = 0; i < sents.size(); ++i) {
    if (static_cast<std::size_t>(trees[i].size()) != sents[i].size()) {
      throw InputError(location(sent_path, i + 1) + ": " + std::to_string(sents[i].size()) + " tokens but " +
                       dep_path + " sentence " + std::to_string(i) + " has " + std::to_string(trees[i].size()) +
                       " nodes");
    }
  }
  return trees;
}

}  // namespace cli_detail

inline int run_subcommand(int argc, const char* const* argv, std::ostream& out = std::cout,
                          std::ostream& err = std::cerr) {
  namespace fs = std::filesystem;
  using cli_detail::emit;

  CLI::App app{"preorder: syntactic preordering and SMT corpus toolkit"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for all subcommands");

  int workers = 1;

  // symmetrize
  std::string a2b_path, b2a_path, sym_mode = "gdf";
  std::optional<std::string> sym_out, sym_src, sym_tgt;
  bool b2a_target_first = false;
  auto* sym = app.add_subcommand("symmetrize", "Merge two directional alignments");
  sym->add_option("--a2b", a2b_path, "Source-to-target alignment file")->required();
  sym->add_option("--b2a", b2a_path, "Target-to-source alignment file (i-j, source first)")->required();
  sym->add_option("--mode", sym_mode, "gdf | gdfa | intersect | union")->capture_default_str();
  sym->add_option("--out", sym_out, "Output alignment file (default: stdout)");
  sym->add_option("--src", sym_src, "Source corpus, for index bounds");
  sym->add_option("--tgt", sym_tgt, "Target corpus, for index bounds");
  sym->add_flag("--b2a-target-first", b2a_target_first, "b2a pairs are written j-i");

  // extract-phrases
  std::string ex_src, ex_tgt, ex_align;
  int max_len = 7;
  std::optional<std::string> ex_out;
  auto* ext = app.add_subcommand("extract-phrases", "Extract a phrase table with orientation counts");
  ext->add_option("--src", ex_src)->required();
  ext->add_option("--tgt", ex_tgt)->required();
  ext->add_option("--align", ex_align)->required();
  ext->add_option("--max-len", max_len, "Maximum phrase length")->capture_default_str();
  ext->add_option("--out", ex_out, "Phrase table file (default: stdout)");
  ext->add_option("--workers", workers)->capture_default_str();

  // learn-rules
  std::string lr_src, lr_tgt, lr_align, lr_dep;
  std::optional<std::string> lr_src_pos, lr_out;
  long long min_count = 2;
  double lr_min_prob = 0.5;
  auto* learn = app.add_subcommand("learn-rules", "Learn head-local reordering rules");
  learn->add_option("--src", lr_src)->required();
  learn->add_option("--tgt", lr_tgt)->required();
  learn->add_option("--align", lr_align)->required();
  learn->add_option("--dep", lr_dep, "Source dependency parses")->required();
  learn->add_option("--src-pos", lr_src_pos, "Source POS sidecar (default: tags from the parse)");
  learn->add_option("--min-count", min_count)->capture_default_str();
  learn->add_option("--min-prob", lr_min_prob)->capture_default_str();
  learn->add_option("--out", lr_out, "Rule table file (default: stdout)");
  learn->add_option("--workers", workers)->capture_default_str();

  // apply-rules
  std::string ap_src, ap_dep, ap_rules;
  std::optional<std::string> ap_src_pos, ap_out, ap_perm;
  double ap_min_prob = 0.5;
  auto* apply = app.add_subcommand("apply-rules", "Reorder source sentences with a rule table");
  apply->add_option("--src", ap_src)->required();
  apply->add_option("--dep", ap_dep)->required();
  apply->add_option("--rules", ap_rules)->required();
  apply->add_option("--src-pos", ap_src_pos);
  apply->add_option("--min-prob", ap_min_prob)->capture_default_str();
  apply->add_option("--out", ap_out, "Reordered text (default: stdout)");
  apply->add_option("--perm", ap_perm, "Permutation sidecar file");
  apply->add_option("--workers", workers)->capture_default_str();

  // train-lm
  std::string lm_text, lm_smoothing = "wb";
  int lm_order = 5;
  std::optional<std::string> lm_out;
  auto* train = app.add_subcommand("train-lm", "Train an n-gram language model");
  train->add_option("--text", lm_text)->required();
  train->add_option("--order", lm_order)->capture_default_str();
  train->add_option("--smoothing", lm_smoothing, "wb | mle")->capture_default_str();
  train->add_option("--out", lm_out, "ARPA file (default: stdout)");

  // ppl
  std::string ppl_lm, ppl_text;
  auto* ppl = app.add_subcommand("ppl", "Score a corpus with a language model");
  ppl->add_option("--lm", ppl_lm)->required();
  ppl->add_option("--text", ppl_text)->required();

  // score-bleu
  std::string bl_hyp, bl_ref;
  int max_n = 4;
  auto* bleu = app.add_subcommand("score-bleu", "Corpus BLEU against a single reference");
  bleu->add_option("--hyp", bl_hyp)->required();
  bleu->add_option("--ref", bl_ref)->required();
  bleu->add_option("--max-n", max_n)->capture_default_str();

  // strip-eos / restore-eos
  std::string se_in, se_out, se_records;
  std::vector<std::string> se_markers;
  auto* strip = app.add_subcommand("strip-eos", "Remove declarative end-of-sentence markers");
  strip->add_option("--in", se_in)->required();
  strip->add_option("--out", se_out)->required();
  strip->add_option("--records", se_records, "Sidecar index<TAB>marker file")->required();
  strip->add_option("--marker", se_markers, "Declarative marker (repeatable; default '.')");

  std::string re_in, re_out, re_records;
  auto* restore = app.add_subcommand("restore-eos", "Re-append removed end-of-sentence markers");
  restore->add_option("--in", re_in)->required();
  restore->add_option("--records", re_records)->required();
  restore->add_option("--out", re_out)->required();

  // oov-substitute
  std::string oov_in, oov_dict, oov_src_vocab, oov_tgt_vocab, oov_out;
  std::optional<std::string> oov_report;
  auto* oov = app.add_subcommand("oov-substitute", "Translate passed-through source words with a dictionary");
  oov->add_option("--in", oov_in)->required();
  oov->add_option("--dict", oov_dict)->required();
  oov->add_option("--src-vocab", oov_src_vocab, "Source word list or corpus")->required();
  oov->add_option("--tgt-vocab", oov_tgt_vocab, "Target word list or corpus")->required();
  oov->add_option("--out", oov_out)->required();
  oov->add_option("--report", oov_report, "Action report file");

  // mbr-rerank
  std::string mbr_nbest;
  double alpha = 1.0;
  std::optional<std::string> mbr_out;
  auto* mbr = app.add_subcommand("mbr-rerank", "Minimum Bayes-risk selection from an n-best list");
  mbr->add_option("--nbest", mbr_nbest)->required();
  mbr->add_option("--alpha", alpha, "Posterior scale")->capture_default_str();
  mbr->add_option("--out", mbr_out, "Selected hypotheses (default: stdout)");

  // pipeline
  std::string config_path;
  std::optional<int> pipe_workers;
  auto* pipe = app.add_subcommand("pipeline", "Run the end-to-end pipeline from a config file");
  pipe->add_option("--config", config_path)->required();
  pipe->add_option("--workers", pipe_workers, "Override the config's worker count");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (*sym) {
      auto a_lines = read_lines(a2b_path);
      auto b_lines = read_lines(b2a_path);
      if (a_lines.size() != b_lines.size()) {
        throw InputError("line count mismatch: " + a2b_path + " has " + std::to_string(a_lines.size()) + ", " +
                         b2a_path + " has " + std::to_string(b_lines.size()));
      }
      std::optional<std::vector<Sentence>> src, tgt;
      if (sym_src) src = read_sentences(*sym_src);
      if (sym_tgt) tgt = read_sentences(*sym_tgt);
      if ((src && src->size() != a_lines.size()) || (tgt && tgt->size() != a_lines.size())) {
        throw InputError("corpus and alignment line counts differ");
      }
      std::vector<std::string> lines;
      for (std::size_t i = 0; i < a_lines.size(); ++i) {
        auto wa = location(a2b_path, i + 1), wb = location(b2a_path, i + 1);
        auto a = parse_alignment_line_unbounded(a_lines[i], wa);
        auto b = parse_alignment_line_unbounded(b_lines[i], wb);
        if (b2a_target_first) b = transpose(b);
        int sl = std::max(a.src_len(), b.src_len()), tl = std::max(a.tgt_len(), b.tgt_len());
        if (src) sl = static_cast<int>((*src)[i].size());
        if (tgt) tl = static_cast<int>((*tgt)[i].size());
        auto reshape = [&](const AlignmentSet& x, const std::string& where) {
          AlignmentSet y(sl, tl);
          for (auto p : x) {
            if (!y.in_bounds(p)) throw InputError(where + ": link " + std::to_string(p.src) + "-" +
                                                  std::to_string(p.tgt) + " outside sentence bounds");
            y.insert(p);
          }
          return y;
        };
        a = reshape(a, wa);
        b = reshape(b, wb);
        AlignmentSet m;
        if (sym_mode == "intersect") m = intersect(a, b);
        else if (sym_mode == "union") m = union_align(a, b);
        else m = grow_diag_final(a, b, parse_symmetrize_mode(sym_mode));
        lines.push_back(m.to_string());
      }
      emit(sym_out, lines, out);
    } else if (*ext) {
      CorpusPaths paths{ex_src, ex_tgt, ex_align, std::nullopt, std::nullopt, std::nullopt};
      auto corpus = read_parallel_corpus(paths);
      emit(ex_out, estimate_phrase_table(corpus, ExtractConfig{max_len}, workers).to_lines(), out);
    } else if (*learn) {
      CorpusPaths paths{lr_src, lr_tgt, lr_align, std::nullopt, std::nullopt, lr_dep};
      if (lr_src_pos) paths.src_pos = *lr_src_pos;
      auto corpus = read_parallel_corpus(paths);
      auto table = score_rules(extract_rules(corpus, workers), min_count, lr_min_prob);
      emit(lr_out, table.to_lines(), out);
      err << "learned " << table.rule_count() << " rules from " << corpus.size() << " sentences\n";
    } else if (*apply) {
      auto sents = read_sentences(ap_src);
      auto trees = cli_detail::read_trees_for(sents, ap_src, ap_dep);
      std::vector<std::vector<std::string>> tags(sents.size());
      if (ap_src_pos) {
        auto lines = read_lines(*ap_src_pos);
        if (lines.size() != sents.size()) throw InputError("line count mismatch: " + *ap_src_pos);
        for (std::size_t i = 0; i < lines.size(); ++i) {
          tags[i] = split_ws(lines[i]);
          if (tags[i].size() != sents[i].size()) throw InputError(location(*ap_src_pos, i + 1) + ": tag count mismatch");
        }
      }
      auto table = RuleTable::from_lines(read_lines(ap_rules), ap_rules);
      auto results = parallel_map_index(sents.size(), workers, [&](std::size_t i) {
        return apply_rules(TaggedSentence{sents[i], tags[i]}, trees[i], table, ap_min_prob);
      });
      std::vector<std::string> text, perms;
      for (const auto& r : results) {
        text.push_back(join(r.tokens));
        perms.push_back(r.permutation.to_string());
      }
      emit(ap_out, text, out);
      if (ap_perm) write_lines(*ap_perm, perms);
    } else if (*train) {
      if (lm_order < 1) throw InputError("--order must be >= 1");
      auto lm = NGramLM::train(read_sentences(lm_text, true), lm_order, parse_smoothing(lm_smoothing));
      emit(lm_out, lm.to_arpa_lines(), out);
    } else if (*ppl) {
      auto lm = NGramLM::from_arpa_lines(read_lines(ppl_lm), ppl_lm);
      auto r = lm.perplexity(read_sentences(ppl_text, true));
      out << "logprob=" << format_fixed(r.log10_prob, 4) << " ppl=" << format_fixed(r.perplexity, 4)
          << " predicted=" << r.predicted << " oov=" << r.oov << '\n';
    } else if (*bleu) {
      auto hyps = read_sentences(bl_hyp, true);
      auto refs = read_sentences(bl_ref, true);
      out << corpus_bleu(hyps, refs, max_n).to_string() << '\n';
    } else if (*strip) {
      EosMarkers markers = se_markers.empty() ? EosMarkers{} : EosMarkers{se_markers};
      auto sents = read_sentences(se_in, true);
      std::vector<Sentence> stripped;
      std::vector<EosRecord> records;
      for (std::size_t i = 0; i < sents.size(); ++i) {
        auto [s, rec] = strip_eos(sents[i], i, markers);
        stripped.push_back(std::move(s));
        if (rec) records.push_back(*rec);
      }
      write_sentences(se_out, stripped);
      write_lines(se_records, eos_records_to_lines(records));
    } else if (*restore) {
      auto sents = read_sentences(re_in, true);
      auto records = eos_records_from_lines(read_lines(re_records), re_records);
      write_sentences(re_out, restore_eos_corpus(sents, records));
    } else if (*oov) {
      auto sents = read_sentences(oov_in, true);
      auto dict = read_dictionary(oov_dict);
      auto src_vocab = read_vocabulary(oov_src_vocab);
      auto tgt_vocab = read_vocabulary(oov_tgt_vocab);
      std::vector<Sentence> rewritten;
      std::vector<std::string> report;
      for (std::size_t i = 0; i < sents.size(); ++i) {
        auto [s, rep] = substitute_oov(sents[i], detect_oov(sents[i], tgt_vocab, src_vocab), dict);
        rewritten.push_back(std::move(s));
        for (auto& l : oov_report_lines(i, rep)) report.push_back(std::move(l));
      }
      write_sentences(oov_out, rewritten);
      if (oov_report) write_lines(*oov_report, report);
    } else if (*mbr) {
      auto lists = parse_nbest_lines(read_lines(mbr_nbest), mbr_nbest);
      std::vector<std::string> lines;
      for (const auto& l : lists) lines.push_back(join(l.entries[mbr_select(l, alpha).selected].hypothesis));
      emit(mbr_out, lines, out);
    } else if (*pipe) {
      auto cfg = PipelineConfig::load(config_path);
      if (pipe_workers) cfg.workers = *pipe_workers;
      auto report = run_pipeline(cfg);
      for (const auto& s : report.stages) {
        err << "stage " << s.name << ": " << format_fixed(s.seconds, 3) << "s\n";
      }
      for (const auto& l : report.to_lines()) out << l << '\n';
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace preorder
