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

#ifndef WFSTD_PIPELINE_H_
#define WFSTD_PIPELINE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wfstd/acoustic.h"
#include "wfstd/decoder.h"
#include "wfstd/graph_build.h"
#include "wfstd/metrics.h"
#include "wfstd/ngram.h"

namespace wfstd {

enum class Strategy { kOnTheFly, kStatic, kRescore };

std::string_view StrategyName(Strategy s);
// Accepts "onthefly", "static" and "rescore"; throws ValidationError.
Strategy ParseStrategy(std::string_view name);

// A synthetic morpheme language: stems, "+"-marked suffixes, a sparse
// stem-to-stem successor relation and per-stem suffix sets.
struct ToyTaskOptions {
  size_t num_phones = 24;
  size_t num_stems = 30;
  size_t num_suffixes = 20;
  size_t successors_per_stem = 3;
  size_t suffixes_per_stem = 2;
  double suffix_probability = 0.5;
  double end_probability = 0.15;  // after each word
  uint64_t seed = 1;
};

struct ToyTask {
  Lexicon lexicon;  // prefix-free: phone strings segment uniquely
  std::vector<std::string> stems;
  std::vector<std::string> suffixes;
  std::vector<std::vector<size_t>> successors;     // stem -> stems
  std::vector<std::vector<size_t>> stem_suffixes;  // stem -> suffixes
  double suffix_probability = 0.5;
  double end_probability = 0.15;

  // Sentences of the grammar as morpheme strings.
  std::vector<Sentence> SampleCorpus(size_t sentences, uint64_t seed) const;
  // One sentence grown until it spans at least min_phones phones.
  Sentence SampleUtterance(size_t min_phones, uint64_t seed) const;
  // Phone string of a morpheme sentence.
  std::vector<std::string> PhonesOf(const Sentence &morphemes) const;
};

ToyTask make_toy_task(const ToyTaskOptions &opts);

// Every machine the three strategies need. The small-LM graph and the LM
// acceptors are always built; the big-LM static graph only on request.
struct DecodingGraphs {
  GraphSymbols syms;
  LexiconOptions lexicon_options;
  Fst hclg_small;
  LmFst small_lm;   // epsilon back-off arcs
  Fst small_lm_neg;
  LmFst big_lm;     // epsilon back-off arcs
  std::optional<Fst> hclg_big;

  SearchGraphs OnTheFly() const;
  SearchGraphs StaticBig() const;
  SearchGraphs StaticSmall() const;
};

DecodingGraphs build_decoding_graphs(const Lexicon &lex, const NGramModel &big,
                                     const NGramModel &small, bool with_static,
                                     const LexiconOptions &lexicon_options = {});

struct TestUtterance {
  std::string utt_id;
  Sentence reference;  // morphemes
  AcousticMatrix acoustics;
};

struct UtteranceResult {
  std::string utt_id;
  std::vector<std::string> reference;   // morphemes
  std::vector<std::string> hypothesis;  // morphemes
  double cost = 0.0;
  WerResult wer;  // on reconstructed words
};

// Decodes one utterance with one strategy; stats accumulate.
UtteranceResult decode_utterance(Strategy strategy, const DecodingGraphs &graphs,
                                 const TestUtterance &utt, const DecodeOptions &opts,
                                 DecodeStats *stats = nullptr);

struct PipelineConfig {
  ToyTaskOptions task;
  size_t corpus_sentences = 5000;
  uint64_t corpus_seed = 11;
  int order = 4;
  double prune_threshold = kDefaultPruneThreshold;
  int small_order = 3;
  size_t test_utterances = 200;
  size_t utterance_phones = 100;
  uint64_t test_seed = 23;
  SynthesisOptions synthesis{1, 0.0, 10.0, 37};
  std::vector<Strategy> strategies = {Strategy::kOnTheFly, Strategy::kStatic,
                                      Strategy::kRescore};
  DecodeOptions decode;
  double frame_shift = 0.01;  // seconds per frame
  bool timing = true;         // false leaves clock-dependent lines out
};

struct StrategyReport {
  Strategy strategy = Strategy::kOnTheFly;
  std::vector<UtteranceResult> utterances;
  WerResult wer;
  double decode_seconds = 0.0;
  double audio_seconds = 0.0;
  size_t peak_tokens = 0;
  FebabosStats febabos;
  std::vector<SizeRow> machines;
  SizeRow total;

  double Rtf() const { return audio_seconds > 0 ? decode_seconds / audio_seconds : 0.0; }
};

struct DecodeReport {
  std::vector<StrategyReport> strategies;
  size_t vocabulary = 0;
  size_t big_lm_entries = 0;
  size_t small_lm_entries = 0;
  bool timing = true;

  const StrategyReport *Find(Strategy s) const;
  // Static graph arcs over the summed arcs of the on-the-fly machines;
  // nullopt unless both strategies ran.
  std::optional<double> SizeRatio() const;
  // Per-utterance lines, per-strategy tables and a key=value summary.
  std::string Format() const;
};

// Builds G4 from a generated corpus, prunes it to G3, compiles the graphs,
// synthesizes the test set and decodes it with every requested strategy.
// Failures are rethrown as StageError naming the stage.
DecodeReport run_pipeline(const PipelineConfig &config);

// The same run over caller-provided pieces.
DecodeReport run_strategies(const std::vector<Strategy> &strategies,
                            const DecodingGraphs &graphs,
                            const std::vector<TestUtterance> &test,
                            const DecodeOptions &opts, double frame_shift,
                            bool timing);

std::vector<TestUtterance> make_test_set(const ToyTask &task, const GraphSymbols &syms,
                                         size_t count, size_t min_phones,
                                         uint64_t seed, const SynthesisOptions &synth);

}  // namespace wfstd

#endif  // WFSTD_PIPELINE_H_
