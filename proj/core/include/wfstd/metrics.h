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

#ifndef WFSTD_METRICS_H_
#define WFSTD_METRICS_H_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "wfstd/fst.h"

namespace wfstd {

struct WerResult {
  double wer = 0.0;  // percent
  size_t substitutions = 0;
  size_t insertions = 0;
  size_t deletions = 0;
  size_t reference_tokens = 0;

  size_t Errors() const { return substitutions + insertions + deletions; }
};

// Levenshtein alignment with unit costs. Among equal-cost alignments the
// backtrace prefers substitution, then insertion, then deletion. Throws
// ValidationError for an empty reference.
WerResult wer_score(const std::vector<std::string> &reference,
                    const std::vector<std::string> &hypothesis);

// Corpus-level WER from summed counts.
WerResult accumulate_wer(const std::vector<WerResult> &parts);

inline constexpr char kSuffixMarker = '+';

// Glues every "+"-marked morpheme onto the word before it ("vix +ci" ->
// "vixci"). A marked morpheme with nothing before it starts a word of its
// own, marker stripped, and is counted in *flagged.
std::vector<std::string> morphemes_to_words(const std::vector<std::string> &morphemes,
                                            size_t *flagged = nullptr);

struct SizeRow {
  std::string name;
  size_t states = 0;
  size_t arcs = 0;
  uint64_t bytes = 0;  // size of the text serialization
};

// One row per machine, in the order given.
std::vector<SizeRow> size_report(
    const std::vector<std::pair<std::string, const Fst *>> &fsts);

SizeRow sum_rows(const std::string &name, const std::vector<SizeRow> &rows);

}  // namespace wfstd

#endif  // WFSTD_METRICS_H_
