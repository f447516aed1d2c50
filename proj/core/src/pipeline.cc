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

#include "wfstd/pipeline.h"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>

#include "wfstd/error.h"

namespace wfstd {

std::string_view StrategyName(Strategy s) {
  switch (s) {
    case Strategy::kOnTheFly: return "onthefly";
    case Strategy::kStatic: return "static";
    case Strategy::kRescore: return "rescore";
  }
  return "unknown";
}

Strategy ParseStrategy(std::string_view name) {
  if (name == "onthefly") return Strategy::kOnTheFly;
  if (name == "static") return Strategy::kStatic;
  if (name == "rescore") return Strategy::kRescore;
  throw ValidationError("unknown strategy '" + std::string(name) +
                        "' (expected onthefly, static or rescore)");
}

namespace {

size_t Uniform(std::mt19937_64 &rng, size_t n) {
  return std::uniform_int_distribution<size_t>(0, n - 1)(rng);
}

double Unit(std::mt19937_64 &rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

std::vector<size_t> Choose(std::mt19937_64 &rng, size_t n, size_t k) {
  std::vector<size_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(std::min(k, n));
  std::sort(all.begin(), all.end());
  return all;
}

std::string Name(const char *prefix, size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%03zu", prefix, i);
  return buf;
}

}  // namespace

ToyTask make_toy_task(const ToyTaskOptions &opts) {
  if (opts.num_phones < 4 || opts.num_stems == 0)
    throw ValidationError("toy task needs at least 4 phones and one stem");
  std::mt19937_64 rng(opts.seed);
  ToyTask task;
  task.suffix_probability = opts.suffix_probability;
  task.end_probability = opts.end_probability;

  // Codes starting with one of the first `half` phones have length 2,
  // the others length 3, so no code is a prefix of another.
  const size_t p = opts.num_phones, half = p / 2;
  const size_t total = opts.num_stems + opts.num_suffixes;
  std::vector<std::string> phones;
  for (size_t i = 0; i < p; ++i) phones.push_back(Name("p", i));
  std::set<std::vector<size_t>> used;
  auto new_code = [&]() {
    while (true) {
      std::vector<size_t> code;
      bool two = Unit(rng) < 0.5;
      if (two && used.size() >= half * p) two = false;
      code.push_back(two ? Uniform(rng, half) : half + Uniform(rng, p - half));
      code.push_back(Uniform(rng, p));
      if (!two) code.push_back(Uniform(rng, p));
      if (used.insert(code).second) return code;
    }
  };
  if (total > half * p + (p - half) * p * p)
    throw ValidationError("toy task: too many morphemes for the phone set");
  for (size_t i = 0; i < total; ++i) {
    bool stem = i < opts.num_stems;
    std::string m = stem ? Name("m", i) : Name("+x", i - opts.num_stems);
    (stem ? task.stems : task.suffixes).push_back(m);
    Pronunciation pron{m, {}};
    for (size_t ph : new_code()) pron.phones.push_back(phones[ph]);
    task.lexicon.entries.push_back(std::move(pron));
  }
  for (size_t s = 0; s < opts.num_stems; ++s) {
    task.successors.push_back(Choose(rng, opts.num_stems, opts.successors_per_stem));
    task.stem_suffixes.push_back(opts.num_suffixes
                                     ? Choose(rng, opts.num_suffixes, opts.suffixes_per_stem)
                                     : std::vector<size_t>{});
  }
  return task;
}

namespace {

// Appends one word (stem plus optional suffix); returns the stem index.
size_t AppendWord(const ToyTask &task, std::mt19937_64 &rng, std::optional<size_t> prev,
                  Sentence *out) {
  size_t stem = prev ? task.successors[*prev][Uniform(rng, task.successors[*prev].size())]
                     : Uniform(rng, task.stems.size());
  out->push_back(task.stems[stem]);
  const auto &sfx = task.stem_suffixes[stem];
  if (!sfx.empty() && Unit(rng) < task.suffix_probability)
    out->push_back(task.suffixes[sfx[Uniform(rng, sfx.size())]]);
  return stem;
}

}  // namespace

std::vector<Sentence> ToyTask::SampleCorpus(size_t sentences, uint64_t seed) const {
  std::mt19937_64 rng(seed);
  std::vector<Sentence> corpus;
  corpus.reserve(sentences);
  for (size_t i = 0; i < sentences; ++i) {
    Sentence s;
    std::optional<size_t> prev;
    do {
      prev = AppendWord(*this, rng, prev, &s);
    } while (Unit(rng) >= end_probability);
    corpus.push_back(std::move(s));
  }
  return corpus;
}

Sentence ToyTask::SampleUtterance(size_t min_phones, uint64_t seed) const {
  std::mt19937_64 rng(seed);
  Sentence s;
  std::optional<size_t> prev;
  do {
    prev = AppendWord(*this, rng, prev, &s);
  } while (PhonesOf(s).size() < min_phones);
  return s;
}

std::vector<std::string> ToyTask::PhonesOf(const Sentence &morphemes) const {
  std::unordered_map<std::string, const Pronunciation *> prons;
  for (const Pronunciation &p : lexicon.entries) prons.emplace(p.morpheme, &p);
  std::vector<std::string> out;
  for (const std::string &m : morphemes) {
    auto it = prons.find(m);
    if (it == prons.end()) throw OovError(m);
    out.insert(out.end(), it->second->phones.begin(), it->second->phones.end());
  }
  return out;
}

SearchGraphs DecodingGraphs::OnTheFly() const {
  return SearchGraphs{&hclg_small, &small_lm_neg, &big_lm.fst, kEpsilon};
}

SearchGraphs DecodingGraphs::StaticBig() const {
  if (!hclg_big) throw StructuralError("static graph was not built");
  return SearchGraphs{&*hclg_big, nullptr, nullptr, kEpsilon};
}

SearchGraphs DecodingGraphs::StaticSmall() const {
  return SearchGraphs{&hclg_small, nullptr, nullptr, kEpsilon};
}

DecodingGraphs build_decoding_graphs(const Lexicon &lex, const NGramModel &big,
                                     const NGramModel &small, bool with_static,
                                     const LexiconOptions &lexicon_options) {
  DecodingGraphs g;
  g.syms = make_graph_symbols(lex, {&big, &small});
  g.lexicon_options = lexicon_options;
  SearchGraphOptions sg{lexicon_options};
  g.hclg_small = build_search_graph(lex, small, g.syms, sg);
  g.small_lm = lm_to_fst(small, g.syms.words, BackoffMode::kEpsilon);
  g.small_lm_neg = negate_weights(g.small_lm.fst);
  g.big_lm = lm_to_fst(big, g.syms.words, BackoffMode::kEpsilon);
  if (with_static) g.hclg_big = build_search_graph(lex, big, g.syms, sg);
  return g;
}

std::vector<TestUtterance> make_test_set(const ToyTask &task, const GraphSymbols &syms,
                                         size_t count, size_t min_phones,
                                         uint64_t seed, const SynthesisOptions &synth) {
  std::vector<TestUtterance> out;
  const size_t num_symbols = syms.phones->NumSymbols() - 1;
  for (size_t i = 0; i < count; ++i) {
    TestUtterance utt;
    utt.utt_id = Name("utt", i);
    if (count > 1000) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "utt%06zu", i);
      utt.utt_id = buf;
    }
    utt.reference = task.SampleUtterance(min_phones, seed + i);
    std::vector<Label> phones;
    for (const std::string &ph : task.PhonesOf(utt.reference)) {
      auto id = syms.phones->Find(ph);
      if (!id) throw OovError(ph);
      phones.push_back(*id);
    }
    SynthesisOptions opts = synth;
    opts.seed = synth.seed + i;
    utt.acoustics = synthesize_utterance(utt.utt_id, phones, num_symbols, opts);
    out.push_back(std::move(utt));
  }
  return out;
}

UtteranceResult decode_utterance(Strategy strategy, const DecodingGraphs &graphs,
                                 const TestUtterance &utt, const DecodeOptions &opts,
                                 DecodeStats *stats) {
  DecodeStats local;
  DecodeStats &st = stats ? *stats : local;
  Lattice lat;
  switch (strategy) {
    case Strategy::kOnTheFly:
      lat = decode(graphs.OnTheFly(), utt.acoustics, opts, &st);
      break;
    case Strategy::kStatic:
      lat = decode(graphs.StaticBig(), utt.acoustics, opts, &st);
      break;
    case Strategy::kRescore:
      lat = decode(graphs.StaticSmall(), utt.acoustics, opts, &st);
      lat = rescore_lattice(lat, graphs.small_lm_neg, graphs.big_lm.fst, &st.febabos);
      break;
  }
  BestPath best = best_path(lat);
  UtteranceResult r;
  r.utt_id = utt.utt_id;
  r.reference = utt.reference;
  for (Label l : best.olabels) r.hypothesis.push_back(graphs.syms.words->Symbol(l));
  r.cost = best.cost;
  r.wer = wer_score(morphemes_to_words(r.reference), morphemes_to_words(r.hypothesis));
  return r;
}

const StrategyReport *DecodeReport::Find(Strategy s) const {
  for (const StrategyReport &r : strategies)
    if (r.strategy == s) return &r;
  return nullptr;
}

std::optional<double> DecodeReport::SizeRatio() const {
  const StrategyReport *st = Find(Strategy::kStatic);
  const StrategyReport *otf = Find(Strategy::kOnTheFly);
  if (!st || !otf || otf->total.arcs == 0) return std::nullopt;
  return static_cast<double>(st->total.arcs) / static_cast<double>(otf->total.arcs);
}

namespace {

std::string Fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string Join(const std::vector<std::string> &v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += v[i];
  }
  return out;
}

}  // namespace

std::string DecodeReport::Format() const {
  std::ostringstream os;
  for (const StrategyReport &r : strategies) {
    const std::string name(StrategyName(r.strategy));
    os << "# strategy " << name << '\n';
    for (const UtteranceResult &u : r.utterances)
      os << name << '\t' << u.utt_id << '\t' << Join(u.hypothesis) << '\t'
         << Fixed(u.cost, 6) << "\terrors=" << u.wer.Errors() << '\n';
    os << "# machines " << name << '\n';
    for (const SizeRow &m : r.machines)
      os << "#   " << m.name << " states=" << m.states << " arcs=" << m.arcs
         << " bytes=" << m.bytes << '\n';
  }
  os << "# summary\n";
  os << "vocabulary=" << vocabulary << '\n';
  os << "big_lm_entries=" << big_lm_entries << '\n';
  os << "small_lm_entries=" << small_lm_entries << '\n';
  for (const StrategyReport &r : strategies) {
    const std::string k = "strategy." + std::string(StrategyName(r.strategy)) + '.';
    os << k << "utterances=" << r.utterances.size() << '\n';
    os << k << "wer=" << Fixed(r.wer.wer, 2) << '\n';
    os << k << "substitutions=" << r.wer.substitutions << '\n';
    os << k << "insertions=" << r.wer.insertions << '\n';
    os << k << "deletions=" << r.wer.deletions << '\n';
    os << k << "reference_words=" << r.wer.reference_tokens << '\n';
    os << k << "audio_seconds=" << Fixed(r.audio_seconds, 2) << '\n';
    if (timing) {
      os << k << "decode_seconds=" << Fixed(r.decode_seconds, 3) << '\n';
      os << k << "rtf=" << Fixed(r.Rtf(), 4) << '\n';
    }
    os << k << "peak_tokens=" << r.peak_tokens << '\n';
    os << k << "graph_states=" << r.total.states << '\n';
    os << k << "graph_arcs=" << r.total.arcs << '\n';
    os << k << "graph_bytes=" << r.total.bytes << '\n';
    if (r.strategy != Strategy::kStatic) {
      os << k << "match_attempts=" << r.febabos.match_attempts << '\n';
      os << k << "failed_matches=" << r.febabos.failed_matches << '\n';
      os << k << "backoff_hops=" << r.febabos.backoff_hops << '\n';
      os << k << "dead_relays=" << r.febabos.dead_relays << '\n';
      os << k << "epsilon_match_attempts=" << r.febabos.epsilon_match_attempts << '\n';
    }
  }
  if (auto ratio = SizeRatio()) os << "size_ratio=" << Fixed(*ratio, 4) << '\n';
  return os.str();
}

DecodeReport run_strategies(const std::vector<Strategy> &strategies,
                            const DecodingGraphs &graphs,
                            const std::vector<TestUtterance> &test,
                            const DecodeOptions &opts, double frame_shift,
                            bool timing) {
  DecodeReport report;
  report.timing = timing;
  for (Strategy s : strategies) {
    const std::string stage = "decode:" + std::string(StrategyName(s));
    StrategyReport r;
    r.strategy = s;
    if (s == Strategy::kStatic) {
      if (!graphs.hclg_big) throw StageError(stage, "static graph was not built");
      r.machines = size_report({{"HCLG4", &*graphs.hclg_big}});
    } else {
      r.machines = size_report({{"HCLG3", &graphs.hclg_small},
                                {"G3neg", &graphs.small_lm_neg},
                                {"G4", &graphs.big_lm.fst}});
    }
    r.total = sum_rows("total", r.machines);
    std::vector<WerResult> wers;
    auto t0 = std::chrono::steady_clock::now();
    for (const TestUtterance &utt : test) {
      DecodeStats st;
      try {
        r.utterances.push_back(decode_utterance(s, graphs, utt, opts, &st));
      } catch (const Error &e) {
        throw StageError(stage, e.what());
      }
      r.febabos += st.febabos;
      r.peak_tokens = std::max(r.peak_tokens, st.peak_tokens);
      r.audio_seconds += static_cast<double>(utt.acoustics.NumFrames()) * frame_shift;
      wers.push_back(r.utterances.back().wer);
    }
    r.decode_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.wer = accumulate_wer(wers);
    report.strategies.push_back(std::move(r));
  }
  return report;
}

DecodeReport run_pipeline(const PipelineConfig &config) {
  auto stage = [](const char *name, auto &&fn) {
    try {
      return fn();
    } catch (const StageError &) {
      throw;
    } catch (const std::exception &e) {
      throw StageError(name, e.what());
    }
  };
  ToyTask task = stage("corpus", [&] { return make_toy_task(config.task); });
  std::vector<Sentence> corpus = stage("corpus", [&] {
    return task.SampleCorpus(config.corpus_sentences, config.corpus_seed);
  });
  NGramModel big = stage("lm-build", [&] {
    return estimate_witten_bell(corpus, config.order);
  });
  NGramModel small = stage("lm-prune", [&] {
    return prune_to_small_lm(big, config.prune_threshold, config.small_order);
  });
  const bool with_static =
      std::find(config.strategies.begin(), config.strategies.end(), Strategy::kStatic) !=
      config.strategies.end();
  LexiconOptions lexopts;
  lexopts.self_loops = config.synthesis.frames_per_phone > 1;
  DecodingGraphs graphs = stage("graph-build", [&] {
    return build_decoding_graphs(task.lexicon, big, small, with_static, lexopts);
  });
  std::vector<TestUtterance> test = stage("synth", [&] {
    return make_test_set(task, graphs.syms, config.test_utterances,
                         config.utterance_phones, config.test_seed, config.synthesis);
  });
  stage("decode", [&] {
    config.decode.Validate();
    return 0;
  });
  DecodeReport report = run_strategies(config.strategies, graphs, test, config.decode,
                                       config.frame_shift, config.timing);
  report.vocabulary = task.lexicon.entries.size();
  report.big_lm_entries = big.NumEntries();
  report.small_lm_entries = small.NumEntries();
  return report;
}

}  // namespace wfstd
