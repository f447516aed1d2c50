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

#ifndef WFSTD_GRAPH_BUILD_H_
#define WFSTD_GRAPH_BUILD_H_

#include <istream>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "wfstd/fst.h"
#include "wfstd/ngram.h"

namespace wfstd {

inline constexpr std::string_view kBackoffSymbol = "#0";

struct Pronunciation {
  std::string morpheme;
  std::vector<std::string> phones;
};

struct Lexicon {
  std::vector<Pronunciation> entries;  // one per pronunciation, file order
  // When set, a silence phone may be inserted between morphemes at the
  // given cost.
  std::optional<std::string> silence_phone;
  double silence_cost = 0.0;
};

// "morpheme<TAB>phone phone ..." one pronunciation per line.
Lexicon read_lexicon(std::istream &is);
void write_lexicon(const Lexicon &lex, std::ostream &os);

// Phone and morpheme tables shared by every machine of one decoding setup.
// The word table always binds "#0".
struct GraphSymbols {
  std::shared_ptr<const SymbolTable> phones;
  std::shared_ptr<const SymbolTable> words;
};

// Phones come from the lexicon (plus its silence phone), words from the
// union of the lexicon and every model's event space, in sorted order.
GraphSymbols make_graph_symbols(const Lexicon &lex,
                                const std::vector<const NGramModel *> &models);

enum class BackoffMode {
  kEpsilon,        // back-off arcs read epsilon (on-the-fly use)
  kDisambiguation  // back-off arcs read #0 (static composition)
};

// An LM acceptor plus the n-gram context each state stands for.
struct LmFst {
  Fst fst;
  std::vector<Ngram> state_contexts;  // model word ids, indexed by state
  std::unordered_map<Ngram, StateId, NgramHash> context_states;
  Label backoff_label = kEpsilon;

  // State for the longest suffix of `history` that has a state.
  StateId StateForHistory(std::span<const WordId> history) const;
};

// One state per context (an entry below the top order that predicts
// something or carries a back-off weight), plus the empty context. Word
// arcs cost -ln P(w|context); the back-off arc costs -ln bow(context);
// final weights are -ln P(</s>|context) with back-off applied. The initial
// state is the <s> context.
LmFst lm_to_fst(const NGramModel &model,
                std::shared_ptr<const SymbolTable> words, BackoffMode mode);

// Same topology, every finite weight negated.
Fst negate_weights(const Fst &fst);

struct LexiconOptions {
  // Gives every phone a self-loop so one phone may span several frames.
  // Word ends then return to the start through an epsilon arc.
  bool self_loops = false;
  double self_loop_cost = 0.0;
};

// Phones in, morphemes out (on the first phone arc of each pronunciation),
// closed under concatenation through the start state.
Fst compile_lexicon(const Lexicon &lex, const GraphSymbols &syms,
                    const LexiconOptions &opts = {});

struct ComposeOptions {
  // Right-operand input label treated as a failure transition: followed
  // only when the current state has no arc for the label being matched.
  Label failure_label = kNoLabel;
};

// Composition with an epsilon sequencing filter (left-side epsilon moves
// before right-side ones, so each path appears once). The result is
// trimmed and input-sorted.
Fst compose_standard(const Fst &a, const Fst &b, const ComposeOptions &opts = {});

struct SearchGraphOptions {
  LexiconOptions lexicon;
};

// L o G with #0 back-off arcs followed as failure transitions, so path
// weights carry exact back-off LM scores. Throws EmptyResultError when the
// composition accepts no non-empty morpheme sequence.
Fst build_search_graph(const Lexicon &lex, const NGramModel &model,
                       const GraphSymbols &syms,
                       const SearchGraphOptions &opts = {});

// Acceptor (or transducer when olabels differ) of one label string.
Fst linear_fst(const std::vector<Label> &ilabels,
               const std::vector<Label> &olabels = {});

// Minimum initial-to-final path cost (Bellman-Ford; negative arcs allowed,
// negative cycles rejected). Zero when nothing is accepted.
Weight shortest_path_cost(const Fst &fst);

}  // namespace wfstd

#endif  // WFSTD_GRAPH_BUILD_H_
