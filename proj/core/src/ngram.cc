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

#include "wfstd/ngram.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "wfstd/error.h"

namespace wfstd {

NGramModel::NGramModel(int order) : order_(order) {
  if (order < 1) throw ValidationError("n-gram order must be >= 1");
  tables_.resize(order);
  bos_ = AddWord(kBos);
  eos_ = AddWord(kEos);
}

void NGramModel::TruncateOrder(int order) {
  if (order < 1 || order > order_)
    throw ValidationError("cannot truncate order " + std::to_string(order_) +
                          " model to order " + std::to_string(order));
  order_ = order;
  tables_.resize(order);
}

WordId NGramModel::AddWord(std::string_view word) {
  if (auto id = FindWord(word)) return *id;
  WordId id = static_cast<WordId>(words_.size());
  words_.emplace_back(word);
  index_.emplace(std::string(word), id);
  return id;
}

std::optional<WordId> NGramModel::FindWord(std::string_view word) const {
  auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<WordId> NGramModel::EventSpace() const {
  std::vector<WordId> out;
  for (WordId w = 0; w < static_cast<WordId>(words_.size()); ++w)
    if (w != bos_) out.push_back(w);
  return out;
}

void NGramModel::SetEntry(const Ngram &ngram, const NgramEntry &entry) {
  if (ngram.empty() || static_cast<int>(ngram.size()) > order_)
    throw ValidationError("n-gram length " + std::to_string(ngram.size()) +
                          " outside model order " + std::to_string(order_));
  for (WordId w : ngram)
    if (w < 0 || static_cast<size_t>(w) >= words_.size())
      throw ValidationError("word id " + std::to_string(w) + " not in vocabulary");
  tables_[ngram.size() - 1][ngram] = entry;
}

const NgramEntry *NGramModel::FindEntry(std::span<const WordId> ngram) const {
  if (ngram.empty() || static_cast<int>(ngram.size()) > order_) return nullptr;
  const auto &table = tables_[ngram.size() - 1];
  auto it = table.find(Ngram(ngram.begin(), ngram.end()));
  return it == table.end() ? nullptr : &it->second;
}

bool NGramModel::RemoveEntry(const Ngram &ngram) {
  if (ngram.empty() || static_cast<int>(ngram.size()) > order_) return false;
  return tables_[ngram.size() - 1].erase(ngram) > 0;
}

size_t NGramModel::NumEntries(int order) const {
  return tables_.at(order - 1).size();
}

size_t NGramModel::NumEntries() const {
  size_t n = 0;
  for (const auto &t : tables_) n += t.size();
  return n;
}

std::vector<std::pair<Ngram, NgramEntry>> NGramModel::SortedEntries(int order) const {
  const auto &table = tables_.at(order - 1);
  std::vector<std::pair<Ngram, NgramEntry>> out(table.begin(), table.end());
  std::sort(out.begin(), out.end(),
            [](const auto &a, const auto &b) { return a.first < b.first; });
  return out;
}

double NGramModel::ConditionalLog10(std::span<const WordId> history,
                                    WordId word) const {
  size_t max_ctx = static_cast<size_t>(order_ - 1);
  if (history.size() > max_ctx) history = history.last(max_ctx);
  Ngram ngram;
  ngram.reserve(history.size() + 1);
  double acc = 0.0;
  for (size_t k = history.size();; --k) {
    auto ctx = history.last(k);
    ngram.assign(ctx.begin(), ctx.end());
    ngram.push_back(word);
    if (const NgramEntry *e = FindEntry(ngram)) return acc + e->logprob;
    if (k == 0) break;
    if (const NgramEntry *c = FindEntry(ctx); c && c->backoff) acc += *c->backoff;
  }
  throw OovError(static_cast<size_t>(word) < words_.size()
                     ? words_[word]
                     : "#" + std::to_string(word));
}

namespace {

std::string NgramText(const NGramModel &model, std::span<const WordId> ngram) {
  std::string out;
  for (WordId w : ngram) {
    if (!out.empty()) out += ' ';
    out += model.Word(w);
  }
  return out;
}

}  // namespace

void NGramModel::Validate() const {
  for (int k = 1; k <= order_; ++k) {
    for (const auto &[ngram, entry] : tables_[k - 1]) {
      if (entry.backoff && k == order_)
        throw ValidationError("back-off weight on top-order n-gram '" +
                              NgramText(*this, ngram) + "'");
      if (std::isnan(entry.logprob) ||
          (entry.backoff && std::isnan(*entry.backoff)))
        throw ValidationError("NaN value on n-gram '" + NgramText(*this, ngram) +
                              "'");
      if (k >= 2) {
        std::span<const WordId> ctx(ngram.data(), ngram.size() - 1);
        if (!FindEntry(ctx))
          throw ValidationError("missing back-off chain: context '" +
                                NgramText(*this, ctx) + "' of n-gram '" +
                                NgramText(*this, ngram) + "' is not listed");
      }
    }
  }
}

bool operator==(const NGramModel &a, const NGramModel &b) {
  return ApproxEqualModels(a, b, 0.0);
}

bool ApproxEqualModels(const NGramModel &a, const NGramModel &b,
                       double tolerance) {
  if (a.Order() != b.Order()) return false;
  for (int k = 1; k <= a.Order(); ++k) {
    if (a.NumEntries(k) != b.NumEntries(k)) return false;
    for (const auto &[ngram, ea] : a.Entries(k)) {
      Ngram mapped;
      for (WordId w : ngram) {
        auto id = b.FindWord(a.Word(w));
        if (!id) return false;
        mapped.push_back(*id);
      }
      const NgramEntry *eb = b.FindEntry(mapped);
      if (!eb) return false;
      if (std::abs(ea.logprob - eb->logprob) > tolerance) return false;
      if (ea.backoff.has_value() != eb->backoff.has_value()) return false;
      if (ea.backoff && std::abs(*ea.backoff - *eb->backoff) > tolerance)
        return false;
    }
  }
  return true;
}

namespace {

std::vector<std::string> Split(const std::string &line) {
  std::istringstream is(line);
  std::vector<std::string> out;
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

double ParseLog10(const std::string &text, size_t lineno) {
  try {
    size_t pos = 0;
    double v = std::stod(text, &pos);
    if (pos != text.size() || std::isnan(v)) throw std::invalid_argument("");
    return v;
  } catch (const std::exception &) {
    throw ParseError("bad number '" + text + "'", lineno);
  }
}

std::string FormatLog10(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.7f", v);
  return buf;
}

}  // namespace

NGramModel parse_arpa(std::istream &is) {
  std::string line;
  size_t lineno = 0;
  std::vector<size_t> declared;
  bool in_data = false;
  while (std::getline(is, line)) {
    ++lineno;
    auto f = Split(line);
    if (f.empty()) {
      if (in_data && !declared.empty()) break;
      continue;
    }
    if (f[0] == "\\data\\") {
      in_data = true;
      continue;
    }
    if (!in_data) continue;
    if (f[0] != "ngram") {
      if (f[0].starts_with("\\")) break;
      throw ParseError("expected 'ngram N=count'", lineno);
    }
    std::string spec = line.substr(line.find("ngram") + 5);
    auto eq = spec.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'ngram N=count'", lineno);
    size_t n = 0, count = 0;
    try {
      n = std::stoul(spec.substr(0, eq));
      count = std::stoul(spec.substr(eq + 1));
    } catch (const std::exception &) {
      throw ParseError("bad count header", lineno);
    }
    if (n != declared.size() + 1) throw ParseError("count headers out of order", lineno);
    declared.push_back(count);
  }
  if (declared.empty()) throw ParseError("missing \\data\\ header", 0);

  NGramModel model(static_cast<int>(declared.size()));
  std::vector<size_t> seen(declared.size(), 0);
  int section = 0;
  bool ended = false;
  // A blank line may have terminated the header loop before a section
  // marker; sections are recognized from here on.
  auto handle = [&](const std::string &text) {
    auto f = Split(text);
    if (f.empty()) return;
    if (f[0] == "\\end\\") {
      ended = true;
      return;
    }
    if (f[0].starts_with("\\") && f[0].ends_with("-grams:")) {
      try {
        section = std::stoi(f[0].substr(1));
      } catch (const std::exception &) {
        throw ParseError("bad section header '" + f[0] + "'", lineno);
      }
      if (section < 1 || section > model.Order())
        throw ParseError("section " + f[0] + " outside declared order", lineno);
      return;
    }
    if (f[0] == "ngram") return;
    if (section == 0) throw ParseError("n-gram line outside a section", lineno);
    size_t n = static_cast<size_t>(section);
    if (f.size() != n + 1 && f.size() != n + 2)
      throw ParseError("expected " + std::to_string(n + 1) + " or " +
                           std::to_string(n + 2) + " fields",
                       lineno);
    NgramEntry entry;
    entry.logprob = ParseLog10(f[0], lineno);
    if (f.size() == n + 2) entry.backoff = ParseLog10(f[n + 1], lineno);
    Ngram ngram;
    for (size_t i = 1; i <= n; ++i) {
      if (n == 1) {
        ngram.push_back(model.AddWord(f[i]));
      } else {
        auto id = model.FindWord(f[i]);
        if (!id)
          throw ValidationError("line " + std::to_string(lineno) + ": word '" +
                                f[i] + "' has no unigram entry");
        ngram.push_back(*id);
      }
    }
    if (model.FindEntry(ngram))
      throw ParseError("duplicate n-gram", lineno);
    model.SetEntry(ngram, entry);
    ++seen[n - 1];
  };
  if (!line.empty()) handle(line);
  while (!ended && std::getline(is, line)) {
    ++lineno;
    handle(line);
  }
  if (!ended) throw ParseError("missing \\end\\", lineno);
  for (size_t k = 0; k < declared.size(); ++k) {
    if (declared[k] != seen[k])
      throw ValidationError("header declares " + std::to_string(declared[k]) +
                            " " + std::to_string(k + 1) + "-grams but " +
                            std::to_string(seen[k]) + " are listed");
  }
  model.Validate();
  return model;
}

void write_arpa(const NGramModel &model, std::ostream &os) {
  os << "\n\\data\\\n";
  for (int k = 1; k <= model.Order(); ++k)
    os << "ngram " << k << "=" << model.NumEntries(k) << "\n";
  for (int k = 1; k <= model.Order(); ++k) {
    os << "\n\\" << k << "-grams:\n";
    for (const auto &[ngram, entry] : model.SortedEntries(k)) {
      os << FormatLog10(entry.logprob) << '\t' << NgramText(model, ngram);
      if (entry.backoff) os << '\t' << FormatLog10(*entry.backoff);
      os << '\n';
    }
  }
  os << "\n\\end\\\n";
}

void recompute_backoffs(NGramModel *model) {
  const int order = model->Order();
  // contexts[k-1]: order-k sequences that prefix some order-(k+1) entry,
  // mapped to the words they predict explicitly.
  std::vector<std::map<Ngram, std::vector<WordId>>> contexts(order);
  for (int k = 2; k <= order; ++k) {
    for (const auto &[ngram, entry] : model->Entries(k)) {
      Ngram ctx(ngram.begin(), ngram.end() - 1);
      contexts[k - 2][ctx].push_back(ngram.back());
    }
  }
  // Ascending order: the lower-order distribution used in the denominator
  // must already be normalized.
  for (int k = 1; k <= order; ++k) {
    std::vector<std::pair<Ngram, double>> updates;
    std::vector<Ngram> cleared;
    for (const auto &[ngram, entry] : model->Entries(k)) {
      auto it = contexts[k - 1].find(ngram);
      if (k == order || it == contexts[k - 1].end()) {
        if (entry.backoff) cleared.push_back(ngram);
        continue;
      }
      double seen = 0.0, seen_lower = 0.0;
      std::span<const WordId> shorter(ngram.data() + 1, ngram.size() - 1);
      Ngram full = ngram;
      full.push_back(0);
      for (WordId w : it->second) {
        full.back() = w;
        seen += std::pow(10.0, model->FindEntry(full)->logprob);
        seen_lower += std::pow(10.0, model->ConditionalLog10(shorter, w));
      }
      double num = 1.0 - seen, den = 1.0 - seen_lower;
      double bow;
      if (num <= 1e-15)
        bow = kLog10Impossible;
      else if (den <= 1e-15)
        bow = 0.0;
      else
        bow = std::log10(num / den);
      updates.emplace_back(ngram, bow);
    }
    for (auto &[ngram, bow] : updates) {
      NgramEntry e = *model->FindEntry(ngram);
      e.backoff = bow;
      model->SetEntry(ngram, e);
    }
    for (auto &ngram : cleared) {
      NgramEntry e = *model->FindEntry(ngram);
      e.backoff.reset();
      model->SetEntry(ngram, e);
    }
  }
}

NGramModel estimate_witten_bell(const std::vector<Sentence> &corpus, int order) {
  if (corpus.empty()) throw ValidationError("cannot estimate from an empty corpus");
  if (order < 1) throw ValidationError("n-gram order must be >= 1");

  std::set<std::string> types;
  for (const auto &sentence : corpus)
    for (const auto &w : sentence) {
      if (w == kBos || w == kEos)
        throw ValidationError("sentence markers must not appear in the corpus");
      types.insert(w);
    }
  NGramModel model(order);
  WordId unk = model.AddWord(kUnk);
  for (const auto &w : types) model.AddWord(w);

  // counts[k-1][ngram] for every n-gram ending at a predicted position.
  std::vector<std::map<Ngram, double>> counts(order);
  for (const auto &sentence : corpus) {
    Ngram seq{model.Bos()};
    for (const auto &w : sentence) seq.push_back(*model.FindWord(w));
    seq.push_back(model.Eos());
    for (size_t i = 1; i < seq.size(); ++i) {
      for (int k = 1; k <= order && static_cast<int>(i) + 1 >= k; ++k) {
        Ngram ngram(seq.begin() + (i + 1 - k), seq.begin() + i + 1);
        counts[k - 1][ngram] += 1.0;
      }
    }
  }

  // Unigrams: interpolate with uniform over observed words, </s>, <unk>.
  {
    double total = 0.0;
    for (const auto &[ngram, c] : counts[0]) total += c;
    double distinct = static_cast<double>(counts[0].size());
    std::vector<WordId> space = model.EventSpace();
    double uniform = 1.0 / static_cast<double>(space.size());
    for (WordId w : space) {
      auto it = counts[0].find(Ngram{w});
      double c = it == counts[0].end() ? 0.0 : it->second;
      double p = (c + distinct * uniform) / (total + distinct);
      model.SetEntry({w}, {std::log10(p), std::nullopt});
    }
    model.SetEntry({model.Bos()}, {kLog10Impossible, std::nullopt});
    (void)unk;
  }

  for (int k = 2; k <= order; ++k) {
    struct HistoryStats {
      double total = 0.0;
      double distinct = 0.0;
    };
    std::map<Ngram, HistoryStats> stats;
    for (const auto &[ngram, c] : counts[k - 1]) {
      auto &s = stats[Ngram(ngram.begin(), ngram.end() - 1)];
      s.total += c;
      s.distinct += 1.0;
    }
    std::vector<std::pair<Ngram, double>> probs;
    for (const auto &[ngram, c] : counts[k - 1]) {
      Ngram history(ngram.begin(), ngram.end() - 1);
      const HistoryStats &s = stats[history];
      std::span<const WordId> lower(history.data() + 1, history.size() - 1);
      double p_lower = std::pow(10.0, model.ConditionalLog10(lower, ngram.back()));
      double p = (c + s.distinct * p_lower) / (s.total + s.distinct);
      probs.emplace_back(ngram, std::log10(p));
    }
    for (auto &[ngram, lp] : probs) model.SetEntry(ngram, {lp, std::nullopt});
  }
  recompute_backoffs(&model);
  model.Validate();
  return model;
}

double score_sentence(const NGramModel &model, std::span<const WordId> tokens,
                      SentenceMarkers markers) {
  Ngram history;
  if (markers == SentenceMarkers::kImplicit) history.push_back(model.Bos());
  double total = 0.0;
  for (WordId w : tokens) {
    if (w == model.Bos() || w == model.Eos())
      throw ValidationError("sentence markers are implicit, not tokens");
    total += model.ConditionalLog10(history, w);
    history.push_back(w);
  }
  if (markers == SentenceMarkers::kImplicit)
    total += model.ConditionalLog10(history, model.Eos());
  return total;
}

double score_sentence(const NGramModel &model,
                      std::span<const std::string> tokens,
                      SentenceMarkers markers) {
  Ngram ids;
  ids.reserve(tokens.size());
  for (const auto &t : tokens) {
    auto id = model.FindWord(t);
    if (!id || !model.FindEntry(std::span<const WordId>(&*id, 1)))
      throw OovError(t);
    ids.push_back(*id);
  }
  return score_sentence(model, ids, markers);
}

NGramModel prune_to_small_lm(const NGramModel &model, double threshold,
                             int max_order) {
  if (max_order < 1 || max_order > model.Order())
    throw ValidationError("max_order must be in [1, " +
                          std::to_string(model.Order()) + "]");
  if (!(threshold > 0.0 && threshold < 1.0))
    throw ValidationError("prune threshold must be in (0, 1)");
  NGramModel out = model;
  out.TruncateOrder(max_order);
  const double log_threshold = std::log10(threshold);
  std::set<Ngram> needed;  // contexts of surviving longer entries
  for (int k = max_order; k >= 2; --k) {
    std::vector<Ngram> doomed;
    std::set<Ngram> next_needed;
    for (const auto &[ngram, entry] : out.Entries(k)) {
      bool keep = entry.logprob >= log_threshold || needed.count(ngram);
      if (keep)
        next_needed.emplace(ngram.begin(), ngram.end() - 1);
      else
        doomed.push_back(ngram);
    }
    for (const auto &ngram : doomed) out.RemoveEntry(ngram);
    needed = std::move(next_needed);
  }
  recompute_backoffs(&out);
  out.Validate();
  return out;
}

}  // namespace wfstd
