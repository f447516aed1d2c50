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

#include "wfstd/metrics.h"

#include <algorithm>
#include <ostream>
#include <streambuf>

#include "wfstd/error.h"

namespace wfstd {

WerResult wer_score(const std::vector<std::string> &reference,
                    const std::vector<std::string> &hypothesis) {
  if (reference.empty()) throw ValidationError("wer_score: empty reference");
  const size_t n = reference.size(), m = hypothesis.size();
  std::vector<std::vector<size_t>> d(n + 1, std::vector<size_t>(m + 1, 0));
  for (size_t i = 0; i <= n; ++i) d[i][0] = i;
  for (size_t j = 0; j <= m; ++j) d[0][j] = j;
  for (size_t i = 1; i <= n; ++i)
    for (size_t j = 1; j <= m; ++j) {
      size_t sub = d[i - 1][j - 1] + (reference[i - 1] == hypothesis[j - 1] ? 0 : 1);
      d[i][j] = std::min({sub, d[i][j - 1] + 1, d[i - 1][j] + 1});
    }
  WerResult r;
  r.reference_tokens = n;
  size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      bool same = reference[i - 1] == hypothesis[j - 1];
      if (d[i][j] == d[i - 1][j - 1] + (same ? 0 : 1)) {
        if (!same) ++r.substitutions;
        --i, --j;
        continue;
      }
    }
    if (j > 0 && d[i][j] == d[i][j - 1] + 1) {
      ++r.insertions;
      --j;
    } else {
      ++r.deletions;
      --i;
    }
  }
  r.wer = 100.0 * static_cast<double>(r.Errors()) / static_cast<double>(n);
  return r;
}

WerResult accumulate_wer(const std::vector<WerResult> &parts) {
  WerResult total;
  for (const WerResult &p : parts) {
    total.substitutions += p.substitutions;
    total.insertions += p.insertions;
    total.deletions += p.deletions;
    total.reference_tokens += p.reference_tokens;
  }
  if (total.reference_tokens > 0)
    total.wer = 100.0 * static_cast<double>(total.Errors()) /
                static_cast<double>(total.reference_tokens);
  return total;
}

std::vector<std::string> morphemes_to_words(const std::vector<std::string> &morphemes,
                                            size_t *flagged) {
  std::vector<std::string> words;
  size_t bad = 0;
  for (const std::string &m : morphemes) {
    bool suffix = !m.empty() && m.front() == kSuffixMarker;
    if (suffix && !words.empty()) {
      words.back() += m.substr(1);
    } else if (suffix) {
      ++bad;
      words.push_back(m.substr(1));
    } else {
      words.push_back(m);
    }
  }
  if (flagged) *flagged = bad;
  return words;
}

namespace {

class CountingBuf : public std::streambuf {
 public:
  uint64_t count = 0;

 protected:
  int_type overflow(int_type c) override {
    if (c != traits_type::eof()) ++count;
    return traits_type::not_eof(c);
  }
  std::streamsize xsputn(const char *, std::streamsize n) override {
    count += static_cast<uint64_t>(n);
    return n;
  }
};

}  // namespace

std::vector<SizeRow> size_report(
    const std::vector<std::pair<std::string, const Fst *>> &fsts) {
  std::vector<SizeRow> rows;
  for (const auto &[name, fst] : fsts) {
    SizeRow row;
    row.name = name;
    row.states = fst->NumStates();
    row.arcs = fst->NumArcs();
    CountingBuf buf;
    std::ostream os(&buf);
    write_text_fst(*fst, os);
    row.bytes = buf.count;
    rows.push_back(row);
  }
  return rows;
}

SizeRow sum_rows(const std::string &name, const std::vector<SizeRow> &rows) {
  SizeRow total;
  total.name = name;
  for (const SizeRow &r : rows) {
    total.states += r.states;
    total.arcs += r.arcs;
    total.bytes += r.bytes;
  }
  return total;
}

}  // namespace wfstd
