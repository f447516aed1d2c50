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

#ifndef WFSTD_DECODER_H_
#define WFSTD_DECODER_H_

#include <cstdint>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "absl/container/flat_hash_map.h"
#include "wfstd/acoustic.h"
#include "wfstd/fst.h"

namespace wfstd {

// Search state (q1, (q2, q3)): a state of the search graph, of the negated
// small LM and of the big LM. Static decoding leaves q2 and q3 at 0.
struct StateTriple {
  StateId graph = 0;
  StateId small_lm = 0;
  StateId big_lm = 0;

  friend bool operator==(const StateTriple &, const StateTriple &) = default;
  friend auto operator<=>(const StateTriple &, const StateTriple &) = default;
};

struct StateTripleHash {
  size_t operator()(const StateTriple &t) const noexcept {
    uint64_t h = static_cast<uint32_t>(t.graph);
    h = h * 0x9e3779b97f4a7c15ull + static_cast<uint32_t>(t.small_lm);
    h = h * 0x9e3779b97f4a7c15ull + static_cast<uint32_t>(t.big_lm);
    return static_cast<size_t>(h ^ (h >> 29));
  }
};

// Counters proving the matching discipline: epsilon outputs are never
// looked up in an LM, and a back-off hop only follows a failed direct match.
struct FebabosStats {
  uint64_t match_attempts = 0;    // direct lookups of a non-epsilon label
  uint64_t failed_matches = 0;    // lookups that found no arc
  uint64_t backoff_hops = 0;      // back-off arcs traversed
  uint64_t dead_relays = 0;       // failed lookups with no back-off arc left
  uint64_t epsilon_match_attempts = 0;

  FebabosStats &operator+=(const FebabosStats &o);
};

struct RelayResult {
  StateId state = kNoStateId;
  Weight weight = Weight::Zero();  // back-off hops (x) matched arc
  int hops = 0;
  Label olabel = kEpsilon;         // output label of the matched arc

  bool Dead() const { return weight.IsZero(); }
};

// Follows back-off arcs (input label `backoff_label`) from `state` until an
// arc reading `label` exists, then takes it. A dead result (Zero weight)
// means no match and no back-off arc remained. `label` must not be
// epsilon: such a call is counted in stats and returns a dead result.
RelayResult relay_match(const Fst &g, StateId state, Label label,
                        FebabosStats *stats = nullptr,
                        Label backoff_label = kEpsilon);

// Final weight reached through back-off arcs when `state` itself is not
// final; Zero when no final state is on the back-off chain.
Weight relay_final(const Fst &g, StateId state, Label backoff_label = kEpsilon);

// Memo of relay_match results for one LM machine, dense over (state,
// label) and filled on demand. A hit adds the same counters the lookup
// added when it was computed. Not thread-safe: one per search.
class RelayCache {
 public:
  static constexpr size_t kMaxEntries = size_t{1} << 24;

  RelayCache(const Fst &g, Label backoff_label);
  RelayResult Match(StateId state, Label label, FebabosStats *stats);

 private:
  const Fst *g_;
  Label backoff_label_;
  size_t num_labels_ = 0;
  std::vector<RelayResult> table_;  // hops < 0 marks an empty slot
};

// The machines one search runs over. With small_lm_neg and big_lm set the
// search expands graph o small_lm_neg o big_lm on the fly; otherwise it is
// a plain static search over `graph`.
struct SearchGraphs {
  const Fst *graph = nullptr;
  const Fst *small_lm_neg = nullptr;
  const Fst *big_lm = nullptr;
  Label backoff_label = kEpsilon;

  bool OnTheFly() const { return small_lm_neg && big_lm; }
};

struct DecodeOptions {
  double beam = 16.0;
  size_t max_active = 7000;
  double lattice_beam = 8.0;
  double acoustic_scale = 1.0;

  void Validate() const;
};

// Per-search helpers for the expansion steps.
struct ExpandOptions {
  RelayCache *small_lm_cache = nullptr;
  RelayCache *big_lm_cache = nullptr;
};

// Incoming arc of a token. `prev` indexes the previous frame's list, or
// the same list when same_frame is set (epsilon-input arcs).
struct TokenLink {
  int32_t prev = -1;
  bool same_frame = false;
  Label ilabel = kEpsilon;
  Label olabel = kEpsilon;
  double graph_cost = 0.0;
  double acoustic_cost = 0.0;
  double total = 0.0;  // path cost through this link when pushed
  int32_t next = -1;
};

struct Token {
  StateTriple triple;
  double cost = 0.0;
  int32_t first_link = -1;
};

// Tokens of one frame, at most one per triple. Pushing a triple again
// combines with the tropical plus (keeps the cheaper cost) and records the
// extra incoming link for lattice generation.
class TokenList {
 public:
  // Links costing more than the token's best cost + link_beam are not
  // stored; they could not survive pruning anyway.
  explicit TokenList(double link_beam = std::numeric_limits<double>::infinity())
      : link_beam_(link_beam) {}

  // Returns true when the triple is new or its cost improved.
  bool Push(const StateTriple &triple, double cost, const TokenLink &link);
  void PushInitial(const StateTriple &triple);

  size_t size() const { return tokens_.size(); }
  bool empty() const { return tokens_.empty(); }
  const Token &operator[](size_t i) const { return tokens_[i]; }
  const std::vector<Token> &tokens() const { return tokens_; }
  const TokenLink &Link(int32_t i) const { return links_[static_cast<size_t>(i)]; }
  const Token *Find(const StateTriple &triple) const;
  int32_t IndexOf(const StateTriple &triple) const;
  double BestCost() const;

 private:
  friend TokenList prune_tokens(const TokenList &, const DecodeOptions &);

  double link_beam_;
  std::vector<Token> tokens_;
  std::vector<TokenLink> links_;
  absl::flat_hash_map<StateTriple, int32_t, StateTripleHash> index_;
};

// One frame of emitting expansion: every arc with a non-epsilon input label
// leaving a token's graph state, composed on the fly with the two LMs when
// `graphs` has them, plus the scaled acoustic cost for `frame`.
TokenList advance_emitting_febabos(const SearchGraphs &graphs,
                                   const TokenList &last,
                                   const AcousticMatrix &acoustics,
                                   size_t frame, double acoustic_scale,
                                   FebabosStats *stats = nullptr,
                                   const ExpandOptions &expand = {},
                                   double link_beam = std::numeric_limits<double>::infinity());

// Closes the list under epsilon-input graph arcs within the frame, with the
// same LM matching for non-epsilon outputs and no acoustic cost.
TokenList propagate_nonemitting(const SearchGraphs &graphs, TokenList tokens,
                                FebabosStats *stats = nullptr,
                                const ExpandOptions &expand = {});

// Keeps tokens within beam of the best, then the max_active cheapest (ties
// by triple). Links are kept when within lattice_beam of their token.
TokenList prune_tokens(const TokenList &tokens, const DecodeOptions &opts);

// Adds final weights (graph, and relayed LM finals when on the fly). Each
// surviving token links to its index in `tokens` with the final weight as
// graph cost. Throws EmptyResultError naming the utterance when nothing is
// finalizable.
TokenList finalize_utterance(const TokenList &tokens, const SearchGraphs &graphs,
                             const std::string &utt_id);

// Acyclic machine of surviving hypotheses: inputs are phones or epsilon,
// outputs morphemes or epsilon, weights graph + acoustic cost.
struct Lattice {
  std::string utt_id;
  Fst fst;
  std::vector<int32_t> state_frames;  // frame index per state
};

struct DecodeStats {
  FebabosStats febabos;
  size_t frames = 0;
  size_t peak_tokens = 0;
  double best_cost = std::numeric_limits<double>::infinity();
};

Lattice decode_onthefly(const Fst &hclg_small, const Fst &small_lm_neg,
                        const Fst &big_lm, const AcousticMatrix &acoustics,
                        const DecodeOptions &opts, DecodeStats *stats = nullptr,
                        Label backoff_label = kEpsilon);

Lattice decode_static(const Fst &graph, const AcousticMatrix &acoustics,
                      const DecodeOptions &opts, DecodeStats *stats = nullptr);

// Runs the search over `graphs` (either mode).
Lattice decode(const SearchGraphs &graphs, const AcousticMatrix &acoustics,
               const DecodeOptions &opts, DecodeStats *stats = nullptr);

// Replaces the lattice's small-LM scores by big-LM scores: composes its
// output labels with small_lm_neg then big_lm using the same relay
// matching. Paths whose morphemes cannot be matched are dropped.
Lattice rescore_lattice(const Lattice &lat, const Fst &small_lm_neg,
                        const Fst &big_lm, FebabosStats *stats = nullptr,
                        Label backoff_label = kEpsilon);

struct BestPath {
  std::vector<Label> olabels;  // epsilons removed
  double cost = 0.0;
};

// Minimum-cost path; equal costs are resolved by the lexicographically
// smaller output sequence (compared by symbol text when the lattice has an
// output table, else by label).
BestPath best_path(const Lattice &lat);

// States in topological order. Throws StructuralError on a cycle.
std::vector<StateId> topological_order(const Fst &fst);

// FST text format plus a "# state <s> frame <t>" comment per state.
void write_lattice(const Lattice &lat, std::ostream &os);

// "utt_id<TAB>morpheme morpheme ...<TAB>cost"
std::string format_best_path(const std::string &utt_id, const BestPath &path,
                             const SymbolTable &words);

}  // namespace wfstd

#endif  // WFSTD_DECODER_H_
