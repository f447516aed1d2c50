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

#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <sstream>

#include "doctest.h"
#include "fixtures.h"
#include "wfstd/error.h"
#include "wfstd/graph_build.h"

using namespace wfstd;
using namespace wfstd::testing;

namespace {

using StringPair = std::pair<std::vector<Label>, std::vector<Label>>;

// Minimum weight per (input, output) string pair, epsilons removed, by
// exhaustive enumeration. The machine must be acyclic.
std::map<StringPair, double> AllPaths(const Fst &f) {
  std::map<StringPair, double> out;
  std::vector<Label> in, ou;
  std::function<void(StateId, double)> walk = [&](StateId s, double w) {
    if (f.IsFinal(s)) {
      double total = w + f.Final(s).Value();
      auto [it, fresh] = out.emplace(StringPair{in, ou}, total);
      if (!fresh) it->second = std::min(it->second, total);
    }
    for (const Arc &a : f.Arcs(s)) {
      if (a.ilabel) in.push_back(a.ilabel);
      if (a.olabel) ou.push_back(a.olabel);
      walk(a.nextstate, w + a.weight.Value());
      if (a.ilabel) in.pop_back();
      if (a.olabel) ou.pop_back();
    }
  };
  if (f.Start() != kNoStateId) walk(f.Start(), 0.0);
  return out;
}

Fst RandomDag(std::mt19937_64 &rng, int states, int arcs) {
  Fst f;
  f.AddStates(static_cast<size_t>(states));
  f.SetStart(0);
  for (int i = 0; i < arcs; ++i) {
    StateId s = static_cast<StateId>(rng() % (states - 1));
    StateId t = s + 1 + static_cast<StateId>(rng() % (states - 1 - s));
    f.AddArc(s, Arc{static_cast<Label>(rng() % 4), static_cast<Label>(rng() % 4),
                    Weight(static_cast<double>(rng() % 100) / 10.0), t});
  }
  f.SetFinal(static_cast<StateId>(states - 1), Weight(0.5));
  if (rng() % 2) f.SetFinal(static_cast<StateId>(states / 2), Weight(1.5));
  f.ArcSortInput();
  return f;
}

std::vector<Label> Labels(const SymbolTable &t, const std::vector<std::string> &syms) {
  std::vector<Label> out;
  for (const auto &s : syms) out.push_back(*t.Find(s));
  return out;
}

// Cost of accepting `words` in an LM acceptor, back-off arcs followed as
// failure transitions.
double AcceptorCost(const LmFst &g, const SymbolTable &words, const Sentence &s) {
  Fst line = linear_fst(Labels(words, s));
  return shortest_path_cost(compose_standard(line, g.fst, ComposeOptions{g.backoff_label}))
      .Value();
}

struct MiniSetup {
  NGramModel model = estimate_witten_bell(MiniCorpus(), 2);
  Lexicon lex = MiniLexicon();
  GraphSymbols syms = make_graph_symbols(lex, {&model});
};

}  // namespace

TEST_CASE("lexicon text round trip and empty pronunciations") {
  std::stringstream ss;
  write_lexicon(MiniLexicon(), ss);
  Lexicon back = read_lexicon(ss);
  REQUIRE(back.entries.size() == 6);
  CHECK(back.entries[0].morpheme == "vix");
  CHECK(back.entries[0].phones == std::vector<std::string>{"v", "i", "x"});
  std::istringstream bad("vix\tv i x\nci\n");
  CHECK_THROWS_AS(read_lexicon(bad), ParseError);
  Lexicon empty_pron;
  empty_pron.entries = {{"a", {}}};
  GraphSymbols syms = make_graph_symbols(MiniLexicon(), {});
  CHECK_THROWS_AS(compile_lexicon(empty_pron, syms), ValidationError);
}

TEST_CASE("fixture acceptor: a then b costs the two conditionals") {
  NGramModel m = FixtureModel();
  Lexicon none;
  GraphSymbols syms = make_graph_symbols(none, {&m});
  LmFst g = lm_to_fst(m, syms.words, BackoffMode::kDisambiguation);
  Fst line = linear_fst(Labels(*syms.words, {"a", "b"}));
  Fst c = compose_standard(line, g.fst, ComposeOptions{g.backoff_label});
  // Interior weight: drop the sentence-end final weights.
  for (StateId s = 0; s < static_cast<StateId>(c.NumStates()); ++s)
    if (c.IsFinal(s)) c.SetFinal(s, Weight::One());
  CHECK(shortest_path_cost(c).Value() == doctest::Approx(CostOfLog10(-0.8)).epsilon(1e-9));
  CHECK(shortest_path_cost(c).Value() ==
        doctest::Approx(CostOfLog10(-0.5) + CostOfLog10(-0.3)).epsilon(1e-9));
}

TEST_CASE("sentence-begin state of the mini model") {
  MiniSetup t;
  for (BackoffMode mode : {BackoffMode::kEpsilon, BackoffMode::kDisambiguation}) {
    LmFst g = lm_to_fst(t.model, t.syms.words, mode);
    StateId start = g.fst.Start();
    CHECK(g.state_contexts[start] == Ngram{t.model.Bos()});
    size_t words = 0, backoffs = 0;
    for (const Arc &a : g.fst.Arcs(start)) {
      if (a.ilabel == g.backoff_label) {
        ++backoffs;
        CHECK(a.olabel == kEpsilon);
      } else {
        ++words;
        CHECK(t.syms.words->Symbol(a.ilabel) == "vix");
      }
    }
    CHECK(words == 1);
    CHECK(backoffs == 1);
    CHECK((mode == BackoffMode::kEpsilon ? g.backoff_label == kEpsilon
                                         : t.syms.words->Symbol(g.backoff_label) == "#0"));
  }
}

TEST_CASE("acceptor min-path equals the back-off sentence score") {
  std::vector<NGramModel> models;
  models.push_back(estimate_witten_bell(MiniCorpus(), 2));
  models.push_back(estimate_witten_bell(RandomCorpus(10, 200, 1), 3));
  models.push_back(estimate_witten_bell(RandomCorpus(14, 300, 2), 4));
  models.push_back(prune_to_small_lm(models.back(), 0.01, 3));
  for (const NGramModel &m : models) {
    Lexicon none;
    GraphSymbols syms = make_graph_symbols(none, {&m});
    LmFst g = lm_to_fst(m, syms.words, BackoffMode::kDisambiguation);
    LmFst geps = lm_to_fst(m, syms.words, BackoffMode::kEpsilon);
    for (const Sentence &s : RandomSentences(m, 200, 77)) {
      double oracle = SentenceCostOracle(m, s);
      CHECK(AcceptorCost(g, *syms.words, s) == doctest::Approx(oracle).epsilon(1e-9));
      // With plain epsilon back-off arcs the min path can only be cheaper.
      double eps_cost = shortest_path_cost(
          compose_standard(linear_fst(Labels(*syms.words, s)), geps.fst)).Value();
      CHECK(eps_cost <= oracle + 1e-9);
    }
  }
}

TEST_CASE("negation flips every weight and is an involution") {
  Fst f;
  f.AddStates(2);
  f.SetStart(0);
  f.AddArc(0, Arc{1, 1, Weight(2.5), 1});
  f.AddArc(0, Arc{2, 2, Weight(0.5), 1});
  f.SetFinal(1, Weight(0.25));
  Fst n = negate_weights(f);
  CHECK(n.Arcs(0)[0].weight == Weight(-2.5));
  CHECK(n.Final(1) == Weight(-0.25));
  CHECK_FALSE(n.IsFinal(0));
  Fst back = negate_weights(n);
  for (StateId s = 0; s < 2; ++s) {
    CHECK(back.Final(s) == f.Final(s));
    REQUIRE(back.NumArcs(s) == f.NumArcs(s));
    for (size_t i = 0; i < f.NumArcs(s); ++i) CHECK(back.Arcs(s)[i] == f.Arcs(s)[i]);
  }
}

TEST_CASE("the cheapest LM continuation becomes the dearest after negation") {
  MiniSetup t;
  LmFst g = lm_to_fst(t.model, t.syms.words, BackoffMode::kEpsilon);
  Fst neg = negate_weights(g.fst);
  StateId unigram = g.context_states.at(Ngram{});
  const Arc *best = nullptr;
  for (const Arc &a : g.fst.Arcs(unigram))
    if (!best || a.weight < best->weight) best = &a;
  double worst_neg = -HUGE_VAL;
  Label worst_label = kNoLabel;
  for (const Arc &a : neg.Arcs(unigram))
    if (a.weight.Value() > worst_neg) worst_neg = a.weight.Value(), worst_label = a.ilabel;
  CHECK(worst_label == best->ilabel);
  CHECK(worst_neg == -best->weight.Value());
}

TEST_CASE("lexicon transducer outputs each morpheme on its first phone") {
  Lexicon one;
  one.entries = {{"vix", {"v", "i", "x"}}};
  GraphSymbols syms = make_graph_symbols(MiniLexicon(), {});
  Fst l = compile_lexicon(one, syms);
  StateId s = l.Start();
  std::vector<Label> outs;
  for (const char *p : {"v", "i", "x"}) {
    auto a = find_arc(l, s, *syms.phones->Find(p));
    REQUIRE(a);
    outs.push_back(a->olabel);
    s = a->nextstate;
  }
  CHECK(outs == std::vector<Label>{*syms.words->Find("vix"), kEpsilon, kEpsilon});
  CHECK(l.IsFinal(s));

  Fst full = compile_lexicon(MiniLexicon(), syms);
  auto phones = Labels(*syms.phones, {"v", "i", "x", "c", "i"});
  Fst c = compose_standard(linear_fst(phones), full);
  auto paths = AllPaths(c);
  REQUIRE(paths.size() == 1);
  CHECK(paths.begin()->first.second == Labels(*syms.words, {"vix", "ci"}));

  Lexicon two = one;
  two.entries.push_back({"vix", {"v", "i", "c"}});
  Fst l2 = compile_lexicon(two, syms);
  size_t accepted = 0;
  for (auto ph : {std::vector<std::string>{"v", "i", "x"}, std::vector<std::string>{"v", "i", "c"}}) {
    auto p = AllPaths(compose_standard(linear_fst(Labels(*syms.phones, ph)), l2));
    REQUIRE(p.size() == 1);
    CHECK(p.begin()->first.second == Labels(*syms.words, {"vix"}));
    ++accepted;
  }
  CHECK(accepted == 2);
}

TEST_CASE("composition weights match witness path pairs") {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 300; ++trial) {
    Fst a = RandomDag(rng, 5, 9), b = RandomDag(rng, 5, 9);
    auto pa = AllPaths(a), pb = AllPaths(b);
    std::map<StringPair, double> expect;
    for (const auto &[xa, wa] : pa)
      for (const auto &[xb, wb] : pb)
        if (xa.second == xb.first) {
          StringPair key{xa.first, xb.second};
          auto [it, fresh] = expect.emplace(key, wa + wb);
          if (!fresh) it->second = std::min(it->second, wa + wb);
        }
    auto got = AllPaths(compose_standard(a, b));
    REQUIRE(got.size() == expect.size());
    for (const auto &[k, w] : expect) {
      REQUIRE(got.count(k));
      CHECK(got.at(k) == doctest::Approx(w).epsilon(1e-12));
    }
  }
}

TEST_CASE("composition with an identity acceptor changes nothing") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    Fst a = RandomDag(rng, 6, 12);
    Fst id;
    id.AddState();
    id.SetStart(0);
    id.SetFinal(0, Weight::One());
    for (Label l = 1; l < 4; ++l) id.AddArc(0, Arc{l, l, Weight::One(), 0});
    CHECK(AllPaths(compose_standard(a, id)) == AllPaths(a));
  }
}

TEST_CASE("composition rejects mismatched alphabets") {
  auto t1 = std::make_shared<SymbolTable>();
  t1->AddSymbol("a");
  auto t2 = std::make_shared<SymbolTable>();
  t2->AddSymbol("b");
  Fst a = linear_fst({1}), b = linear_fst({1});
  a.SetOutputSymbols(t1);
  b.SetInputSymbols(t2);
  CHECK_THROWS_AS(compose_standard(a, b), StructuralError);
}

TEST_CASE("mini search graph: phones of vix tin cost the LM score") {
  MiniSetup t;
  Fst graph = build_search_graph(t.lex, t.model, t.syms);
  Fst c = compose_standard(linear_fst(Labels(*t.syms.phones, {"v", "i", "x", "t", "i", "n"})),
                           graph);
  auto paths = AllPaths(c);
  REQUIRE(paths.size() == 1);
  CHECK(paths.begin()->first.second == Labels(*t.syms.words, {"vix", "tin"}));
  CHECK(paths.begin()->second ==
        doctest::Approx(SentenceCostOracle(t.model, {"vix", "tin"})).epsilon(1e-9));
}

TEST_CASE("mini search graph accepts exactly the phone strings of morpheme sequences") {
  MiniSetup t;
  Fst graph = build_search_graph(t.lex, t.model, t.syms);
  // Pronunciations have 2 or 3 phones, so strings of up to 7 phones come
  // from at most 3 morphemes.
  std::map<std::vector<std::string>, double> realizable;
  std::vector<Sentence> seqs{{}};
  for (int len = 1; len <= 3; ++len) {
    std::vector<Sentence> next;
    for (const Sentence &s : seqs)
      if (static_cast<int>(s.size()) == len - 1)
        for (const auto &p : t.lex.entries) {
          Sentence e = s;
          e.push_back(p.morpheme);
          next.push_back(e);
        }
    seqs.insert(seqs.end(), next.begin(), next.end());
  }
  std::map<std::string, std::vector<std::string>> pron;
  for (const auto &p : t.lex.entries) pron[p.morpheme] = p.phones;
  for (const Sentence &s : seqs) {
    if (s.empty()) continue;
    std::vector<std::string> ph;
    for (const auto &m : s) ph.insert(ph.end(), pron[m].begin(), pron[m].end());
    double cost = SentenceCostOracle(t.model, s);
    auto [it, fresh] = realizable.emplace(ph, cost);
    if (!fresh) it->second = std::min(it->second, cost);
  }
  for (const auto &[ph, cost] : realizable) {
    if (ph.size() > 7) continue;
    Weight w = shortest_path_cost(compose_standard(linear_fst(Labels(*t.syms.phones, ph)), graph));
    CHECK(w.Value() == doctest::Approx(cost).epsilon(1e-9));
  }
  std::vector<std::string> phones;
  for (Label l : t.syms.phones->Labels())
    if (l != kEpsilon) phones.push_back(t.syms.phones->Symbol(l));
  std::mt19937_64 rng(5);
  size_t rejected = 0;
  for (int i = 0; i < 2000; ++i) {
    std::vector<std::string> ph;
    size_t len = 2 + rng() % 6;
    for (size_t k = 0; k < len; ++k) ph.push_back(phones[rng() % phones.size()]);
    Weight w = shortest_path_cost(compose_standard(linear_fst(Labels(*t.syms.phones, ph)), graph));
    CHECK(w.IsZero() == !realizable.count(ph));
    rejected += w.IsZero();
  }
  CHECK(rejected > 0);
}

TEST_CASE("search graphs are trim and every path has a finite LM score") {
  MiniSetup t;
  Fst graph = build_search_graph(t.lex, t.model, t.syms);
  Fst again = connect(graph);
  CHECK(again.NumStates() == graph.NumStates());
  CHECK(again.NumArcs() == graph.NumArcs());
  std::mt19937_64 rng(8);
  for (int walk = 0; walk < 300; ++walk) {
    StateId s = graph.Start();
    Sentence out;
    double w = 0.0;
    for (int step = 0; step < 40; ++step) {
      if (graph.IsFinal(s) && (rng() % 4 == 0 || graph.NumArcs(s) == 0)) break;
      const Arc &a = graph.Arcs(s)[rng() % graph.NumArcs(s)];
      if (a.olabel) out.push_back(t.syms.words->Symbol(a.olabel));
      w += a.weight.Value();
      s = a.nextstate;
    }
    if (!graph.IsFinal(s)) continue;
    double lp = score_sentence(t.model, std::span<const std::string>(out));
    CHECK(std::isfinite(lp));
    // The graph's own weight for this path is never below the LM score.
    CHECK(w + graph.Final(s).Value() >= CostOfLog10(lp) - 1e-9);
  }
}

TEST_CASE("the big-LM search graph has more arcs than the pruned one") {
  auto corpus = RandomCorpus(20, 400, 17);
  NGramModel big = estimate_witten_bell(corpus, 4);
  NGramModel small = prune_to_small_lm(big, 1e-5, 3);
  Lexicon lex;
  for (WordId w : big.EventSpace()) {
    const std::string &word = big.Word(w);
    if (word[0] != 'w') continue;
    lex.entries.push_back({word, {"p" + word.substr(1, 1), "q" + word.substr(2, 1)}});
  }
  GraphSymbols syms = make_graph_symbols(lex, {&big, &small});
  Fst g4 = build_search_graph(lex, big, syms);
  Fst g3 = build_search_graph(lex, small, syms);
  CHECK(g4.NumArcs() > g3.NumArcs());
}

TEST_CASE("no shared vocabulary gives an empty-result error") {
  NGramModel m = FixtureModel();
  Lexicon lex;
  lex.entries = {{"zz", {"z"}}};
  GraphSymbols syms = make_graph_symbols(lex, {&m});
  CHECK_THROWS_AS(build_search_graph(lex, m, syms), EmptyResultError);
}
