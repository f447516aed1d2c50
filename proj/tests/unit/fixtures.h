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

// Shared fixtures and independent reference computations for the unit
// and acceptance tests. Nothing here calls into the code under test except
// to read model entries.

#ifndef WFSTD_TESTS_FIXTURES_H_
#define WFSTD_TESTS_FIXTURES_H_

#include <cmath>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "wfstd/graph_build.h"
#include "wfstd/ngram.h"

namespace wfstd::testing {

// Two-sentence morpheme corpus: "vixci vixtin cUxti" and
// "vixtin cUxkAn vixci" segmented into morphemes.
inline std::vector<Sentence> MiniCorpus() {
  return {{"vix", "ci", "vix", "tin", "cUx", "ti"},
          {"vix", "tin", "cUx", "kAn", "vix", "ci"}};
}

inline Lexicon MiniLexicon() {
  Lexicon lex;
  lex.entries = {{"vix", {"v", "i", "x"}}, {"ci", {"c", "i"}},
                 {"tin", {"t", "i", "n"}}, {"cUx", {"c", "U", "x"}},
                 {"ti", {"t", "i"}},       {"kAn", {"k", "A", "n"}}};
  return lex;
}

// Order-2 model: log10 P(a) = -0.5, P(b) = -0.7, P(b|a) = -0.3,
// bow(a) = -0.2, bow(b) = -0.1, P(</s>) = -1.0.
inline const char *kFixtureArpa =
    "\\data\\\n"
    "ngram 1=4\n"
    "ngram 2=1\n"
    "\n"
    "\\1-grams:\n"
    "-1.0\t</s>\n"
    "-99\t<s>\n"
    "-0.5\ta\t-0.2\n"
    "-0.7\tb\t-0.1\n"
    "\n"
    "\\2-grams:\n"
    "-0.3\ta b\n"
    "\n"
    "\\end\\\n";

inline NGramModel FixtureModel() {
  std::istringstream is(kFixtureArpa);
  return parse_arpa(is);
}

inline double CostOfLog10(double lp) { return -lp * std::log(10.0); }

// Interpolated Witten-Bell probabilities straight from corpus counts:
//   P(w|h) = (c(h,w) + T(h) P(w|h')) / (c(h) + T(h))   when c(h) > 0
//   P(w|h) = P(w|h')                                    otherwise
//   P(w)   = (c(w) + T/|V|) / (N + T), |V| = observed words + </s> + <unk>
// where h' drops the oldest token of h.
class WittenBellOracle {
 public:
  WittenBellOracle(const std::vector<Sentence> &corpus, int order) : order_(order) {
    std::set<std::string> vocab;
    for (const Sentence &s : corpus) {
      std::vector<std::string> toks{"<s>"};
      toks.insert(toks.end(), s.begin(), s.end());
      toks.push_back("</s>");
      for (size_t i = 1; i < toks.size(); ++i) {
        vocab.insert(toks[i]);
        for (int k = 0; k < order && static_cast<int>(i) - k >= 0; ++k) {
          std::vector<std::string> h(toks.begin() + static_cast<long>(i) - k,
                                     toks.begin() + static_cast<long>(i));
          auto &next = counts_[h];
          if (next[toks[i]]++ == 0) ++types_[h];
          ++totals_[h];
        }
      }
    }
    vocab.insert("<unk>");
    vocab_size_ = vocab.size();
  }

  double Prob(std::vector<std::string> h, const std::string &w) const {
    if (static_cast<int>(h.size()) > order_ - 1)
      h.erase(h.begin(), h.end() - (order_ - 1));
    if (h.empty()) {
      double n = Total({}), t = Types({});
      return (Count({}, w) + t / static_cast<double>(vocab_size_)) / (n + t);
    }
    std::vector<std::string> lower(h.begin() + 1, h.end());
    double lower_p = Prob(lower, w);
    double ch = Total(h);
    if (ch == 0) return lower_p;
    double t = Types(h);
    return (Count(h, w) + t * lower_p) / (ch + t);
  }

  // Natural-log cost of a sentence with implicit markers.
  double SentenceCost(const Sentence &s) const {
    std::vector<std::string> h{"<s>"};
    double cost = 0.0;
    for (const std::string &w : s) {
      cost -= std::log(Prob(h, w));
      h.push_back(w);
    }
    return cost - std::log(Prob(h, "</s>"));
  }

  size_t VocabSize() const { return vocab_size_; }

 private:
  using Hist = std::vector<std::string>;
  double Count(const Hist &h, const std::string &w) const {
    auto it = counts_.find(h);
    if (it == counts_.end()) return 0;
    auto jt = it->second.find(w);
    return jt == it->second.end() ? 0 : jt->second;
  }
  double Total(const Hist &h) const {
    auto it = totals_.find(h);
    return it == totals_.end() ? 0 : it->second;
  }
  double Types(const Hist &h) const {
    auto it = types_.find(h);
    return it == types_.end() ? 0 : it->second;
  }

  int order_;
  size_t vocab_size_ = 0;
  std::map<Hist, std::map<std::string, double>> counts_;
  std::map<Hist, double> totals_;
  std::map<Hist, double> types_;
};

// ARPA back-off recursion written against the raw entry table:
//   P(w|h) = p(h,w) if listed, else bow(h) * P(w|h').
inline double BackoffLog10(const NGramModel &m, std::vector<WordId> h, WordId w) {
  if (static_cast<int>(h.size()) > m.Order() - 1)
    h.erase(h.begin(), h.end() - (m.Order() - 1));
  std::vector<WordId> ngram = h;
  ngram.push_back(w);
  if (const NgramEntry *e = m.FindEntry(ngram)) return e->logprob;
  if (h.empty()) return -HUGE_VAL;
  const NgramEntry *ctx = m.FindEntry(h);
  double bow = ctx && ctx->backoff ? *ctx->backoff : 0.0;
  return bow + BackoffLog10(m, std::vector<WordId>(h.begin() + 1, h.end()), w);
}

inline double SentenceCostOracle(const NGramModel &m, const Sentence &s) {
  std::vector<WordId> h{m.Bos()};
  double lp = 0.0;
  for (const std::string &w : s) {
    WordId id = *m.FindWord(w);
    lp += BackoffLog10(m, h, id);
    h.push_back(id);
  }
  lp += BackoffLog10(m, h, m.Eos());
  return CostOfLog10(lp);
}

// Corpus over words w00..w{vocab-1} from a random sparse Markov chain, so
// that long contexts repeat and back-off chains get deep.
inline std::vector<Sentence> RandomCorpus(size_t vocab, size_t sentences, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<size_t>> next(vocab);
  for (auto &n : next)
    for (int k = 0; k < 3; ++k) n.push_back(rng() % vocab);
  std::vector<Sentence> corpus;
  for (size_t i = 0; i < sentences; ++i) {
    Sentence s;
    size_t w = rng() % vocab;
    size_t len = 1 + rng() % 8;
    for (size_t j = 0; j < len; ++j) {
      s.push_back("w" + std::to_string(w / 10) + std::to_string(w % 10));
      w = (rng() % 5 == 0) ? rng() % vocab : next[w][rng() % 3];
    }
    corpus.push_back(std::move(s));
  }
  return corpus;
}

// Uniformly random word strings over the model's predictable words.
inline std::vector<Sentence> RandomSentences(const NGramModel &m, size_t n, uint64_t seed,
                                             size_t max_len = 12) {
  std::vector<std::string> words;
  for (WordId w : m.EventSpace())
    if (w != m.Eos()) words.push_back(m.Word(w));
  std::mt19937_64 rng(seed);
  std::vector<Sentence> out;
  for (size_t i = 0; i < n; ++i) {
    Sentence s;
    size_t len = 1 + rng() % max_len;
    for (size_t j = 0; j < len; ++j) s.push_back(words[rng() % words.size()]);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace wfstd::testing

#endif  // WFSTD_TESTS_FIXTURES_H_
