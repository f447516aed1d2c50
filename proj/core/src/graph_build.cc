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

#include "wfstd/graph_build.h"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "wfstd/error.h"

namespace wfstd {

Lexicon read_lexicon(std::istream &is) {
  Lexicon lex;
  std::string line;
  size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::istringstream fields(line);
    Pronunciation p;
    if (!(fields >> p.morpheme)) continue;
    std::string phone;
    while (fields >> phone) p.phones.push_back(phone);
    if (p.phones.empty())
      throw ParseError("morpheme '" + p.morpheme + "' has an empty pronunciation",
                       lineno);
    lex.entries.push_back(std::move(p));
  }
  return lex;
}

void write_lexicon(const Lexicon &lex, std::ostream &os) {
  for (const auto &p : lex.entries) {
    os << p.morpheme << '\t';
    for (size_t i = 0; i < p.phones.size(); ++i)
      os << (i ? " " : "") << p.phones[i];
    os << '\n';
  }
}

GraphSymbols make_graph_symbols(const Lexicon &lex,
                                const std::vector<const NGramModel *> &models) {
  std::set<std::string> phones, words;
  for (const auto &p : lex.entries) {
    words.insert(p.morpheme);
    phones.insert(p.phones.begin(), p.phones.end());
  }
  if (lex.silence_phone) phones.insert(*lex.silence_phone);
  for (const NGramModel *m : models)
    for (WordId w : m->EventSpace())
      if (w != m->Eos()) words.insert(m->Word(w));
  auto phone_table = std::make_shared<SymbolTable>();
  for (const auto &p : phones) phone_table->AddSymbol(p);
  auto word_table = std::make_shared<SymbolTable>();
  for (const auto &w : words) word_table->AddSymbol(w);
  word_table->AddSymbol(kBackoffSymbol);
  return {phone_table, word_table};
}

StateId LmFst::StateForHistory(std::span<const WordId> history) const {
  Ngram key(history.begin(), history.end());
  while (true) {
    auto it = context_states.find(key);
    if (it != context_states.end()) return it->second;
    if (key.empty()) return kNoStateId;
    key.erase(key.begin());
  }
}

LmFst lm_to_fst(const NGramModel &model, std::shared_ptr<const SymbolTable> words,
                BackoffMode mode) {
  const int order = model.Order();
  LmFst out;
  if (mode == BackoffMode::kDisambiguation) {
    auto id = words->Find(kBackoffSymbol);
    if (!id) throw StructuralError("word table lacks the #0 symbol");
    out.backoff_label = *id;
  }

  // Continuations grouped by context.
  std::map<Ngram, std::vector<std::pair<WordId, double>>> continuations;
  for (int k = 1; k <= order; ++k)
    for (const auto &[ngram, entry] : model.Entries(k))
      continuations[Ngram(ngram.begin(), ngram.end() - 1)].emplace_back(
          ngram.back(), entry.logprob);

  std::vector<Ngram> contexts{Ngram{model.Bos()}, Ngram{}};
  for (int k = 1; k < order; ++k) {
    for (const auto &[ngram, entry] : model.SortedEntries(k)) {
      if (ngram.back() == model.Eos()) continue;
      if (ngram.size() == 1 && ngram[0] == model.Bos()) continue;
      bool has_backoff = entry.backoff && *entry.backoff != 0.0;
      if (continuations.count(ngram) || has_backoff) contexts.push_back(ngram);
    }
  }
  for (const auto &ctx : contexts) {
    StateId s = out.fst.AddState();
    out.context_states.emplace(ctx, s);
    out.state_contexts.push_back(ctx);
  }
  out.fst.SetStart(0);

  auto label_of = [&](WordId w) {
    auto id = words->Find(model.Word(w));
    if (!id) throw StructuralError("word table lacks '" + model.Word(w) + "'");
    return *id;
  };

  Ngram extended;
  for (StateId s = 0; s < static_cast<StateId>(contexts.size()); ++s) {
    const Ngram &ctx = contexts[s];
    if (!ctx.empty()) {
      const NgramEntry *e = model.FindEntry(ctx);
      double bow = e && e->backoff ? *e->backoff : 0.0;
      StateId target = out.StateForHistory(std::span(ctx).subspan(1));
      out.fst.AddArc(s, Arc{out.backoff_label, kEpsilon,
                            Weight(Log10ToCost(bow)), target});
    }
    auto it = continuations.find(ctx);
    if (it != continuations.end()) {
      auto conts = it->second;
      std::sort(conts.begin(), conts.end());
      for (auto [w, lp] : conts) {
        if (w == model.Eos() || w == model.Bos()) continue;
        extended = ctx;
        extended.push_back(w);
        std::span<const WordId> hist(extended);
        if (static_cast<int>(hist.size()) > order - 1)
          hist = hist.last(static_cast<size_t>(order - 1));
        Label l = label_of(w);
        out.fst.AddArc(s, Arc{l, l, Weight(Log10ToCost(lp)),
                              out.StateForHistory(hist)});
      }
    }
    out.fst.SetFinal(s, Weight(Log10ToCost(model.ConditionalLog10(ctx, model.Eos()))));
  }
  out.fst.ArcSortInput();
  out.fst.SetInputSymbols(words);
  out.fst.SetOutputSymbols(words);
  return out;
}

Fst negate_weights(const Fst &fst) {
  Fst out = fst;
  for (StateId s = 0; s < static_cast<StateId>(out.NumStates()); ++s) {
    out.SetFinal(s, Negate(out.Final(s)));
    for (Arc &a : out.MutableArcs(s)) a.weight = Negate(a.weight);
  }
  if (fst.InputSorted()) out.ArcSortInput();
  return out;
}

Fst compile_lexicon(const Lexicon &lex, const GraphSymbols &syms,
                    const LexiconOptions &opts) {
  if (lex.entries.empty()) throw ValidationError("empty lexicon");
  auto phone = [&](const std::string &p) {
    auto id = syms.phones->Find(p);
    if (!id || *id == kEpsilon) throw StructuralError("unknown phone '" + p + "'");
    return *id;
  };
  Fst fst;
  StateId start = fst.AddState();
  fst.SetStart(start);
  fst.SetFinal(start, Weight::One());
  for (const auto &pron : lex.entries) {
    if (pron.phones.empty())
      throw ValidationError("morpheme '" + pron.morpheme +
                            "' has an empty pronunciation");
    auto word = syms.words->Find(pron.morpheme);
    if (!word) throw StructuralError("unknown morpheme '" + pron.morpheme + "'");
    StateId cur = start;
    for (size_t i = 0; i < pron.phones.size(); ++i) {
      Label p = phone(pron.phones[i]);
      Label out = i == 0 ? *word : kEpsilon;
      bool last = i + 1 == pron.phones.size();
      if (last && !opts.self_loops) {
        fst.AddArc(cur, Arc{p, out, Weight::One(), start});
        break;
      }
      StateId next = fst.AddState();
      fst.AddArc(cur, Arc{p, out, Weight::One(), next});
      if (opts.self_loops)
        fst.AddArc(next, Arc{p, kEpsilon, Weight(opts.self_loop_cost), next});
      if (last) fst.AddArc(next, Arc{kEpsilon, kEpsilon, Weight::One(), start});
      cur = next;
    }
  }
  if (lex.silence_phone)
    fst.AddArc(start, Arc{phone(*lex.silence_phone), kEpsilon,
                          Weight(lex.silence_cost), start});
  fst.ArcSortInput();
  fst.SetInputSymbols(syms.phones);
  fst.SetOutputSymbols(syms.words);
  return fst;
}

namespace {

struct PairState {
  StateId a, b;
  int filter;
  friend bool operator==(const PairState &, const PairState &) = default;
};

struct PairStateHash {
  size_t operator()(const PairState &p) const noexcept {
    return (static_cast<size_t>(static_cast<uint32_t>(p.a)) * 0x9e3779b97f4a7c15ull) ^
           (static_cast<size_t>(static_cast<uint32_t>(p.b)) << 1) ^
           static_cast<size_t>(p.filter);
  }
};

}  // namespace

Fst compose_standard(const Fst &a, const Fst &b, const ComposeOptions &opts) {
  if (a.OutputSymbols() && b.InputSymbols() &&
      !(*a.OutputSymbols() == *b.InputSymbols()))
    throw StructuralError("composition alphabet mismatch");
  Fst out;
  out.SetInputSymbols(a.InputSymbols());
  out.SetOutputSymbols(b.OutputSymbols());
  if (a.Start() == kNoStateId || b.Start() == kNoStateId) return out;

  std::unordered_map<PairState, StateId, PairStateHash> ids;
  std::deque<PairState> queue;
  auto state_of = [&](PairState p) {
    auto [it, inserted] = ids.emplace(p, kNoStateId);
    if (inserted) {
      it->second = out.AddState();
      queue.push_back(p);
    }
    return it->second;
  };
  out.SetStart(state_of({a.Start(), b.Start(), 0}));

  const Label failure = opts.failure_label;
  auto emit_matches = [&](StateId src, const Arc &e1, StateId q, Weight prefix) {
    auto arcs = b.Arcs(q);
    auto lo = std::lower_bound(arcs.begin(), arcs.end(), e1.olabel,
                               [](const Arc &x, Label l) { return x.ilabel < l; });
    bool any = false;
    for (auto it = lo; it != arcs.end() && it->ilabel == e1.olabel; ++it) {
      any = true;
      StateId dst = state_of({e1.nextstate, it->nextstate, 0});
      out.AddArc(src, Arc{e1.ilabel, it->olabel,
                          Times(Times(prefix, e1.weight), it->weight), dst});
    }
    return any;
  };

  Fst sorted_b;
  const Fst *right = &b;
  if (!b.InputSorted()) {
    sorted_b = b;
    sorted_b.ArcSortInput();
    right = &sorted_b;
  }
  const Fst &rb = *right;

  while (!queue.empty()) {
    PairState p = queue.front();
    queue.pop_front();
    StateId src = ids.at(p);
    out.SetFinal(src, Times(a.Final(p.a), rb.Final(p.b)));
    for (const Arc &e1 : a.Arcs(p.a)) {
      if (e1.olabel == kEpsilon) {
        if (p.filter == 0)
          out.AddArc(src, Arc{e1.ilabel, kEpsilon, e1.weight,
                              state_of({e1.nextstate, p.b, 0})});
        continue;
      }
      if (emit_matches(src, e1, p.b, Weight::One()) || failure == kNoLabel) continue;
      Weight acc = Weight::One();
      StateId q = p.b;
      while (true) {
        auto bo = find_arc(rb, q, failure);
        if (!bo) break;
        acc = Times(acc, bo->weight);
        q = bo->nextstate;
        if (emit_matches(src, e1, q, acc)) break;
      }
    }
    for (const Arc &e2 : rb.Arcs(p.b)) {
      // Sorted, so epsilons come first. An epsilon failure label is never a
      // free move.
      if (e2.ilabel != kEpsilon || failure == kEpsilon) break;
      out.AddArc(src, Arc{kEpsilon, e2.olabel, e2.weight,
                          state_of({p.a, e2.nextstate, 1})});
    }
  }
  Fst trimmed = connect(out);
  trimmed.ArcSortInput();
  return trimmed;
}

Fst build_search_graph(const Lexicon &lex, const NGramModel &model,
                       const GraphSymbols &syms, const SearchGraphOptions &opts) {
  Fst lexicon = compile_lexicon(lex, syms, opts.lexicon);
  LmFst grammar = lm_to_fst(model, syms.words, BackoffMode::kDisambiguation);
  Fst graph = compose_standard(lexicon, grammar.fst,
                               ComposeOptions{grammar.backoff_label});
  // The empty sentence always survives, so a graph without a single word
  // arc means the lexicon and LM share no vocabulary.
  bool has_word = false;
  for (StateId s = 0; s < static_cast<StateId>(graph.NumStates()) && !has_word; ++s)
    for (const Arc &a : graph.Arcs(s))
      if (a.olabel != kEpsilon) {
        has_word = true;
        break;
      }
  if (!has_word)
    throw EmptyResultError("search graph is empty: lexicon and LM share no morpheme");
  return graph;
}

Fst linear_fst(const std::vector<Label> &ilabels, const std::vector<Label> &olabels) {
  if (!olabels.empty() && olabels.size() != ilabels.size())
    throw StructuralError("linear_fst: label sequences differ in length");
  Fst fst;
  StateId s = fst.AddState();
  fst.SetStart(s);
  for (size_t i = 0; i < ilabels.size(); ++i) {
    StateId n = fst.AddState();
    fst.AddArc(s, Arc{ilabels[i], olabels.empty() ? ilabels[i] : olabels[i],
                      Weight::One(), n});
    s = n;
  }
  fst.SetFinal(s, Weight::One());
  return fst;
}

Weight shortest_path_cost(const Fst &fst) {
  const size_t n = fst.NumStates();
  if (n == 0 || fst.Start() == kNoStateId) return Weight::Zero();
  std::vector<Weight> dist(n, Weight::Zero());
  std::vector<size_t> relaxations(n, 0);
  std::vector<char> queued(n, 0);
  std::deque<StateId> queue{fst.Start()};
  dist[fst.Start()] = Weight::One();
  queued[fst.Start()] = 1;
  while (!queue.empty()) {
    StateId s = queue.front();
    queue.pop_front();
    queued[s] = 0;
    if (++relaxations[s] > n + 1)
      throw StructuralError("shortest_path_cost: negative cycle");
    for (const Arc &arc : fst.Arcs(s)) {
      Weight d = Times(dist[s], arc.weight);
      if (d < dist[arc.nextstate]) {
        dist[arc.nextstate] = d;
        if (!queued[arc.nextstate]) {
          queued[arc.nextstate] = 1;
          queue.push_back(arc.nextstate);
        }
      }
    }
  }
  Weight best = Weight::Zero();
  for (size_t s = 0; s < n; ++s)
    best = Plus(best, Times(dist[s], fst.Final(static_cast<StateId>(s))));
  return best;
}

}  // namespace wfstd
