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

#ifndef WFSTD_NGRAM_H_
#define WFSTD_NGRAM_H_

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace wfstd {

using WordId = int32_t;
using Ngram = std::vector<WordId>;

inline constexpr std::string_view kBos = "<s>";
inline constexpr std::string_view kEos = "</s>";
inline constexpr std::string_view kUnk = "<unk>";
// log10 probability used for events that can never occur, e.g. P(<s>).
inline constexpr double kLog10Impossible = -99.0;

struct NgramHash {
  size_t operator()(const Ngram &ngram) const noexcept {
    size_t h = 0xcbf29ce484222325ull;
    for (WordId w : ngram) {
      h ^= static_cast<uint32_t>(w);
      h *= 0x100000001b3ull;
    }
    return h;
  }
};

struct NgramEntry {
  double logprob = 0.0;           // log10 P(word | context)
  std::optional<double> backoff;  // log10 back-off weight, contexts only
};

// Back-off n-gram model with ARPA semantics. An n-gram is stored as its
// full token sequence (context followed by the predicted word).
class NGramModel {
 public:
  explicit NGramModel(int order = 1);

  int Order() const { return order_; }
  // Lowers the declared order and drops longer entries.
  void TruncateOrder(int order);

  WordId AddWord(std::string_view word);
  std::optional<WordId> FindWord(std::string_view word) const;
  const std::string &Word(WordId id) const { return words_.at(id); }
  size_t VocabularySize() const { return words_.size(); }
  WordId Bos() const { return bos_; }
  WordId Eos() const { return eos_; }

  // Words that may be predicted: the vocabulary minus <s>.
  std::vector<WordId> EventSpace() const;

  void SetEntry(const Ngram &ngram, const NgramEntry &entry);
  const NgramEntry *FindEntry(std::span<const WordId> ngram) const;
  bool RemoveEntry(const Ngram &ngram);
  size_t NumEntries(int order) const;
  size_t NumEntries() const;
  // Entries of one order sorted by token ids.
  std::vector<std::pair<Ngram, NgramEntry>> SortedEntries(int order) const;
  const std::unordered_map<Ngram, NgramEntry, NgramHash> &Entries(int order) const {
    return tables_.at(order - 1);
  }

  // Back-off conditional log10 P(word | history); the history is truncated
  // to the last Order()-1 tokens. Throws OovError when the word has no
  // unigram entry.
  double ConditionalLog10(std::span<const WordId> history, WordId word) const;

  // Checks that every context of an order-k entry (k >= 2) is an order-(k-1)
  // entry, that back-off weights only appear below the top order and that
  // every word is in the vocabulary. Throws ValidationError.
  void Validate() const;

 private:
  int order_;
  std::vector<std::string> words_;
  std::unordered_map<std::string, WordId> index_;
  WordId bos_;
  WordId eos_;
  std::vector<std::unordered_map<Ngram, NgramEntry, NgramHash>> tables_;
};

bool operator==(const NGramModel &a, const NGramModel &b);

// Same entries and values up to `tolerance` (compared through word strings,
// so vocabularies may be ordered differently).
bool ApproxEqualModels(const NGramModel &a, const NGramModel &b,
                       double tolerance = 5e-7);

NGramModel parse_arpa(std::istream &is);
void write_arpa(const NGramModel &model, std::ostream &os);

using Sentence = std::vector<std::string>;

// Witten-Bell estimate, interpolated with the next lower order and stored in
// back-off form. The unigram level is interpolated with a uniform
// distribution over the observed words, </s> and <unk>.
NGramModel estimate_witten_bell(const std::vector<Sentence> &corpus, int order);

enum class SentenceMarkers { kImplicit, kNone };

// Sum of back-off conditional log10 probabilities. With kImplicit the
// history starts at <s> and </s> is scored at the end; with kNone only the
// given tokens are scored, from an empty history.
double score_sentence(const NGramModel &model,
                      std::span<const std::string> tokens,
                      SentenceMarkers markers = SentenceMarkers::kImplicit);
double score_sentence(const NGramModel &model, std::span<const WordId> tokens,
                      SentenceMarkers markers = SentenceMarkers::kImplicit);

// Recomputes the back-off weight of every context so that each conditional
// distribution sums to one over the event space. Entries that are not the
// context of a longer entry lose their back-off weight.
void recompute_backoffs(NGramModel *model);

inline constexpr double kDefaultPruneThreshold = 1e-5;

// Drops entries above max_order and entries of order >= 2 whose conditional
// probability is below threshold (unless a longer surviving entry needs
// them as context), then renormalizes back-off weights.
NGramModel prune_to_small_lm(const NGramModel &model,
                             double threshold = kDefaultPruneThreshold,
                             int max_order = 3);

}  // namespace wfstd

#endif  // WFSTD_NGRAM_H_
