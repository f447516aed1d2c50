// Copyright 2026 The wfstd Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

// wfstd: command-line front end. Every subcommand reads and writes the
// text formats of the core library; failures exit nonzero with the
// subcommand name as the stage tag.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wfstd/decoder.h"
#include "wfstd/error.h"
#include "wfstd/graph_build.h"
#include "wfstd/metrics.h"
#include "wfstd/ngram.h"
#include "wfstd/pipeline.h"

namespace {

using namespace wfstd;

std::ifstream OpenIn(const std::string &path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path);
  return is;
}

std::ofstream OpenOut(const std::string &path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path);
  return os;
}

std::vector<std::string> Tokens(const std::string &line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  for (std::string t; ss >> t;) out.push_back(t);
  return out;
}

std::vector<Sentence> ReadCorpus(const std::string &path) {
  auto is = OpenIn(path);
  std::vector<Sentence> corpus;
  for (std::string line; std::getline(is, line);) {
    auto toks = Tokens(line);
    if (!toks.empty()) corpus.push_back(std::move(toks));
  }
  return corpus;
}

// "utt_id morpheme ..." per line, keyed by id.
std::map<std::string, Sentence> ReadTranscripts(const std::string &path) {
  auto is = OpenIn(path);
  std::map<std::string, Sentence> out;
  size_t lineno = 0;
  for (std::string line; std::getline(is, line);) {
    ++lineno;
    auto toks = Tokens(line);
    if (toks.empty()) continue;
    std::string id = toks.front();
    toks.erase(toks.begin());
    if (!out.emplace(id, std::move(toks)).second)
      throw ParseError("duplicate utterance id " + id, lineno);
  }
  return out;
}

// Best-path lines "utt<TAB>morphemes<TAB>cost"; the cost is ignored.
std::map<std::string, Sentence> ReadHypotheses(const std::string &path) {
  auto is = OpenIn(path);
  std::map<std::string, Sentence> out;
  size_t lineno = 0;
  for (std::string line; std::getline(is, line);) {
    ++lineno;
    if (line.empty()) continue;
    auto tab1 = line.find('\t');
    if (tab1 == std::string::npos) throw ParseError("expected tab-separated fields", lineno);
    auto tab2 = line.find('\t', tab1 + 1);
    std::string id = line.substr(0, tab1);
    out[id] = Tokens(line.substr(tab1 + 1, tab2 == std::string::npos
                                               ? std::string::npos
                                               : tab2 - tab1 - 1));
  }
  return out;
}

NGramModel ReadArpa(const std::string &path) {
  auto is = OpenIn(path);
  return parse_arpa(is);
}

Lexicon ReadLexicon(const std::string &path) {
  auto is = OpenIn(path);
  return read_lexicon(is);
}

void WriteSymbols(const SymbolTable &syms, const std::string &path) {
  if (path.empty()) return;
  auto os = OpenOut(path);
  syms.WriteText(os);
}

struct MakeTaskArgs {
  ToyTaskOptions task;
  size_t sentences = 5000;
  uint64_t corpus_seed = 11;
  size_t utterances = 20;
  size_t phones = 100;
  uint64_t test_seed = 23;
  std::string out_dir = ".";
};

void RunMakeTask(const MakeTaskArgs &a) {
  ToyTask task = make_toy_task(a.task);
  {
    auto os = OpenOut(a.out_dir + "/lexicon.txt");
    write_lexicon(task.lexicon, os);
  }
  {
    auto os = OpenOut(a.out_dir + "/corpus.txt");
    for (const Sentence &s : task.SampleCorpus(a.sentences, a.corpus_seed)) {
      for (size_t i = 0; i < s.size(); ++i) os << (i ? " " : "") << s[i];
      os << '\n';
    }
  }
  auto os = OpenOut(a.out_dir + "/test.txt");
  for (size_t i = 0; i < a.utterances; ++i) {
    char id[32];
    std::snprintf(id, sizeof(id), "utt%03zu", i);
    os << id;
    for (const std::string &m : task.SampleUtterance(a.phones, a.test_seed + i)) os << ' ' << m;
    os << '\n';
  }
}

struct GraphBuildArgs {
  std::string lexicon, lm, mode = "#0", out, isyms_out, osyms_out;
  std::vector<std::string> vocab_lms;
  bool lm_only = false;
  bool negate = false;
};

void RunGraphBuild(const GraphBuildArgs &a) {
  Lexicon lex = ReadLexicon(a.lexicon);
  NGramModel lm = ReadArpa(a.lm);
  std::vector<NGramModel> extra;
  for (const auto &p : a.vocab_lms) extra.push_back(ReadArpa(p));
  std::vector<const NGramModel *> models{&lm};
  for (const auto &m : extra) models.push_back(&m);
  GraphSymbols syms = make_graph_symbols(lex, models);
  if (a.mode != "#0" && a.mode != "eps")
    throw ValidationError("--backoff-mode must be eps or #0");
  BackoffMode mode = a.mode == "eps" ? BackoffMode::kEpsilon : BackoffMode::kDisambiguation;
  Fst out;
  if (a.lm_only) {
    out = lm_to_fst(lm, syms.words, mode).fst;
    if (a.negate) out = negate_weights(out);
    WriteSymbols(*syms.words, a.isyms_out);
  } else {
    if (mode != BackoffMode::kDisambiguation)
      throw ValidationError("search graphs are built with --backoff-mode #0");
    out = build_search_graph(lex, lm, syms);
    if (a.negate) out = negate_weights(out);
    WriteSymbols(*syms.phones, a.isyms_out);
  }
  WriteSymbols(*syms.words, a.osyms_out);
  auto os = OpenOut(a.out);
  write_text_fst(out, os);
  std::cerr << "states=" << out.NumStates() << " arcs=" << out.NumArcs() << '\n';
}

struct SynthArgs {
  std::string lexicon, transcripts, out;
  SynthesisOptions opts;
};

void RunSynth(const SynthArgs &a) {
  Lexicon lex = ReadLexicon(a.lexicon);
  GraphSymbols syms = make_graph_symbols(lex, {});
  std::map<std::string, const Pronunciation *> prons;
  for (const auto &p : lex.entries) prons.emplace(p.morpheme, &p);
  auto os = OpenOut(a.out);
  size_t index = 0;
  for (const auto &[id, morphemes] : ReadTranscripts(a.transcripts)) {
    std::vector<Label> phones;
    for (const std::string &m : morphemes) {
      auto it = prons.find(m);
      if (it == prons.end()) throw OovError(m);
      for (const auto &ph : it->second->phones) phones.push_back(*syms.phones->Find(ph));
    }
    SynthesisOptions opts = a.opts;
    opts.seed = a.opts.seed + index++;
    write_acoustic_matrix(
        synthesize_utterance(id, phones, syms.phones->NumSymbols() - 1, opts), os);
  }
}

struct DecodeArgs {
  std::string lexicon, lm, small_lm, acoustics, out, lattice_dir, strategy = "onthefly";
  double prune_threshold = kDefaultPruneThreshold;
  int max_order = 3;
  size_t frames_per_phone = 1;
  DecodeOptions opts;
};

void RunDecode(const DecodeArgs &a) {
  Strategy strategy = ParseStrategy(a.strategy);
  Lexicon lex = ReadLexicon(a.lexicon);
  NGramModel big = ReadArpa(a.lm);
  NGramModel small = a.small_lm.empty()
                         ? prune_to_small_lm(big, a.prune_threshold, a.max_order)
                         : ReadArpa(a.small_lm);
  LexiconOptions lexopts;
  lexopts.self_loops = a.frames_per_phone > 1;
  DecodingGraphs graphs = build_decoding_graphs(lex, big, small,
                                                strategy == Strategy::kStatic, lexopts);
  std::ifstream is = OpenIn(a.acoustics);
  std::ofstream os;
  std::ostream *out = &std::cout;
  if (!a.out.empty()) {
    os = OpenOut(a.out);
    out = &os;
  }
  for (AcousticMatrix &m : read_acoustic_matrices(is)) {
    TestUtterance utt{m.UttId(), {}, std::move(m)};
    DecodeStats st;
    Lattice lat;
    switch (strategy) {
      case Strategy::kOnTheFly:
        lat = decode(graphs.OnTheFly(), utt.acoustics, a.opts, &st);
        break;
      case Strategy::kStatic:
        lat = decode(graphs.StaticBig(), utt.acoustics, a.opts, &st);
        break;
      case Strategy::kRescore:
        lat = decode(graphs.StaticSmall(), utt.acoustics, a.opts, &st);
        lat = rescore_lattice(lat, graphs.small_lm_neg, graphs.big_lm.fst, &st.febabos);
        break;
    }
    *out << format_best_path(utt.utt_id, best_path(lat), *graphs.syms.words) << '\n';
    if (!a.lattice_dir.empty()) {
      auto ls = OpenOut(a.lattice_dir + "/" + utt.utt_id + ".lat");
      write_lattice(lat, ls);
    }
  }
}

struct ScoreArgs {
  std::string ref, hyp;
  bool morphemes = false;
};

void RunScore(const ScoreArgs &a) {
  auto refs = ReadTranscripts(a.ref);
  auto hyps = ReadHypotheses(a.hyp);
  std::vector<WerResult> parts;
  for (const auto &[id, ref] : refs) {
    auto it = hyps.find(id);
    Sentence hyp = it == hyps.end() ? Sentence{} : it->second;
    parts.push_back(a.morphemes ? wer_score(ref, hyp)
                                : wer_score(morphemes_to_words(ref), morphemes_to_words(hyp)));
  }
  WerResult w = accumulate_wer(parts);
  std::printf("wer=%.2f substitutions=%zu insertions=%zu deletions=%zu reference=%zu\n",
              w.wer, w.substitutions, w.insertions, w.deletions, w.reference_tokens);
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"WFST toolkit and one-pass decoder"};
  app.require_subcommand(1);

  MakeTaskArgs mt;
  auto *make_task = app.add_subcommand("make-task", "Write a synthetic lexicon, corpus and test transcripts");
  make_task->add_option("--out-dir", mt.out_dir)->required();
  make_task->add_option("--stems", mt.task.num_stems);
  make_task->add_option("--suffixes", mt.task.num_suffixes);
  make_task->add_option("--phones", mt.task.num_phones);
  make_task->add_option("--successors", mt.task.successors_per_stem);
  make_task->add_option("--seed", mt.task.seed);
  make_task->add_option("--sentences", mt.sentences);
  make_task->add_option("--corpus-seed", mt.corpus_seed);
  make_task->add_option("--utterances", mt.utterances);
  make_task->add_option("--utterance-phones", mt.phones);
  make_task->add_option("--test-seed", mt.test_seed);

  std::string corpus_path, lm_out;
  int order = 4;
  auto *lm_build = app.add_subcommand("lm-build", "Estimate a Witten-Bell back-off model (ARPA)");
  lm_build->add_option("--corpus", corpus_path)->required();
  lm_build->add_option("--order", order)->check(CLI::Range(1, 9));
  lm_build->add_option("--out", lm_out)->required();

  std::string prune_in, prune_out;
  double threshold = kDefaultPruneThreshold;
  int max_order = 3;
  auto *lm_prune = app.add_subcommand("lm-prune", "Prune a model to a small LM");
  lm_prune->add_option("--lm", prune_in)->required();
  lm_prune->add_option("--prune-threshold", threshold);
  lm_prune->add_option("--max-order", max_order)->check(CLI::Range(1, 9));
  lm_prune->add_option("--out", prune_out)->required();

  GraphBuildArgs gb;
  auto *graph_build = app.add_subcommand("graph-build", "Compile a search graph or an LM acceptor");
  graph_build->add_option("--lexicon", gb.lexicon)->required();
  graph_build->add_option("--lm", gb.lm)->required();
  graph_build->add_option("--backoff-mode", gb.mode)->check(CLI::IsMember({"eps", "#0"}));
  graph_build->add_option("--vocab-lm", gb.vocab_lms, "Further models sharing the word table");
  graph_build->add_flag("--lm-only", gb.lm_only, "Write the LM acceptor instead of L o G");
  graph_build->add_flag("--negate", gb.negate, "Negate every weight");
  graph_build->add_option("--out", gb.out)->required();
  graph_build->add_option("--isymbols-out", gb.isyms_out);
  graph_build->add_option("--osymbols-out", gb.osyms_out);

  SynthArgs sy;
  auto *synth = app.add_subcommand("synth", "Synthesize acoustic cost matrices");
  synth->add_option("--lexicon", sy.lexicon)->required();
  synth->add_option("--transcripts", sy.transcripts)->required();
  synth->add_option("--noise", sy.opts.noise)->check(CLI::NonNegativeNumber);
  synth->add_option("--margin", sy.opts.margin);
  synth->add_option("--seed", sy.opts.seed);
  synth->add_option("--frames-per-phone", sy.opts.frames_per_phone)->check(CLI::PositiveNumber);
  synth->add_option("--out", sy.out)->required();

  DecodeArgs de;
  auto *dec = app.add_subcommand("decode", "Decode acoustic matrices");
  dec->add_option("--lexicon", de.lexicon)->required();
  dec->add_option("--lm", de.lm, "Big LM (G4)")->required();
  dec->add_option("--small-lm", de.small_lm, "Small LM (G3); pruned from --lm when absent");
  dec->add_option("--prune-threshold", de.prune_threshold);
  dec->add_option("--max-order", de.max_order);
  dec->add_option("--acoustics", de.acoustics)->required();
  dec->add_option("--strategy", de.strategy)->check(CLI::IsMember({"onthefly", "static", "rescore"}));
  dec->add_option("--beam", de.opts.beam);
  dec->add_option("--max-active", de.opts.max_active);
  dec->add_option("--lattice-beam", de.opts.lattice_beam);
  dec->add_option("--acoustic-scale", de.opts.acoustic_scale);
  dec->add_option("--frames-per-phone", de.frames_per_phone)->check(CLI::PositiveNumber);
  dec->add_option("--out", de.out);
  dec->add_option("--lattice-dir", de.lattice_dir);

  ScoreArgs sc;
  auto *score = app.add_subcommand("score", "Word error rate of best-path lines");
  score->add_option("--ref", sc.ref)->required();
  score->add_option("--hyp", sc.hyp)->required();
  score->add_flag("--morphemes", sc.morphemes, "Score morphemes instead of words");

  PipelineConfig pc;
  std::vector<std::string> strategies{"onthefly", "static", "rescore"};
  std::string report_out;
  bool no_timing = false;
  auto *report = app.add_subcommand("report", "Run the three-strategy comparison on a synthetic task");
  report->add_option("--stems", pc.task.num_stems);
  report->add_option("--suffixes", pc.task.num_suffixes);
  report->add_option("--phones", pc.task.num_phones);
  report->add_option("--successors", pc.task.successors_per_stem);
  report->add_option("--task-seed", pc.task.seed);
  report->add_option("--sentences", pc.corpus_sentences);
  report->add_option("--corpus-seed", pc.corpus_seed);
  report->add_option("--order", pc.order);
  report->add_option("--prune-threshold", pc.prune_threshold);
  report->add_option("--max-order", pc.small_order);
  report->add_option("--utterances", pc.test_utterances);
  report->add_option("--utterance-phones", pc.utterance_phones);
  report->add_option("--test-seed", pc.test_seed);
  report->add_option("--noise", pc.synthesis.noise)->check(CLI::NonNegativeNumber);
  report->add_option("--margin", pc.synthesis.margin);
  report->add_option("--seed", pc.synthesis.seed);
  report->add_option("--frames-per-phone", pc.synthesis.frames_per_phone)->check(CLI::PositiveNumber);
  report->add_option("--strategy", strategies)->check(CLI::IsMember({"onthefly", "static", "rescore"}));
  report->add_option("--beam", pc.decode.beam);
  report->add_option("--max-active", pc.decode.max_active);
  report->add_option("--lattice-beam", pc.decode.lattice_beam);
  report->add_option("--acoustic-scale", pc.decode.acoustic_scale);
  report->add_flag("--no-timing", no_timing, "Leave clock-dependent lines out");
  report->add_option("--out", report_out);

  CLI11_PARSE(app, argc, argv);
  const std::string stage = app.get_subcommands().front()->get_name();
  try {
    if (*make_task) {
      RunMakeTask(mt);
    } else if (*lm_build) {
      NGramModel m = estimate_witten_bell(ReadCorpus(corpus_path), order);
      auto os = OpenOut(lm_out);
      write_arpa(m, os);
    } else if (*lm_prune) {
      NGramModel m = prune_to_small_lm(ReadArpa(prune_in), threshold, max_order);
      auto os = OpenOut(prune_out);
      write_arpa(m, os);
    } else if (*graph_build) {
      RunGraphBuild(gb);
    } else if (*synth) {
      RunSynth(sy);
    } else if (*dec) {
      RunDecode(de);
    } else if (*score) {
      RunScore(sc);
    } else if (*report) {
      pc.strategies.clear();
      for (const auto &s : strategies) pc.strategies.push_back(ParseStrategy(s));
      pc.timing = !no_timing;
      std::string text = run_pipeline(pc).Format();
      if (report_out.empty()) {
        std::cout << text;
      } else {
        auto os = OpenOut(report_out);
        os << text;
      }
    }
  } catch (const StageError &e) {
    std::cerr << "wfstd " << stage << ": " << e.what() << '\n';
    return 1;
  } catch (const std::exception &e) {
    std::cerr << "wfstd " << stage << ": " << e.what() << '\n';
    return 1;
  }
  return 0;
}
