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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "doctest.h"
#include "wfstd/error.h"
#include "wfstd/metrics.h"
#include "wfstd/pipeline.h"

using namespace wfstd;

namespace {

std::vector<std::string> Split(const std::string &s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  for (std::string t; is >> t;) out.push_back(t);
  return out;
}

// Greedy re-segmentation of a word into lexicon morphemes; stems and
// suffixes have fixed spellings so the split is unique.
std::vector<std::string> Segment(const std::vector<std::string> &words, const ToyTask &task) {
  std::vector<std::string> out;
  for (const std::string &w : words) {
    size_t pos = 0;
    bool first = true;
    while (pos < w.size()) {
      bool found = false;
      for (const auto &m : first ? task.stems : task.suffixes) {
        std::string surface = first ? m : m.substr(1);
        if (w.compare(pos, surface.size(), surface) == 0) {
          out.push_back(m);
          pos += surface.size();
          found = true;
          break;
        }
      }
      REQUIRE(found);
      first = false;
    }
  }
  return out;
}

PipelineConfig SmallConfig() {
  PipelineConfig c;
  c.task.num_phones = 12;
  c.task.num_stems = 10;
  c.task.num_suffixes = 6;
  c.corpus_sentences = 300;
  c.order = 3;
  c.small_order = 2;
  c.prune_threshold = 1e-3;
  c.test_utterances = 5;
  c.utterance_phones = 20;
  c.timing = false;
  return c;
}

std::map<std::string, std::string> Summary(const std::string &report) {
  std::map<std::string, std::string> kv;
  std::istringstream is(report);
  bool in_summary = false;
  for (std::string line; std::getline(is, line);) {
    if (line == "# summary") {
      in_summary = true;
      continue;
    }
    auto eq = line.find('=');
    if (in_summary && eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

}  // namespace

TEST_CASE("word error rate goldens") {
  auto a = wer_score(Split("a b c"), Split("a b c"));
  CHECK(a.wer == 0.0);
  CHECK(a.Errors() == 0);
  auto s = wer_score(Split("a b c"), Split("a x c"));
  CHECK(s.wer == doctest::Approx(100.0 / 3.0));
  CHECK(s.substitutions == 1);
  CHECK(s.Errors() == 1);
  auto d = wer_score(Split("a b c"), Split("a c"));
  CHECK(d.wer == doctest::Approx(100.0 / 3.0));
  CHECK(d.deletions == 1);
  CHECK(d.Errors() == 1);
  auto i = wer_score(Split("a b"), Split("a b c d"));
  CHECK(i.insertions == 2);
  CHECK(i.wer == doctest::Approx(100.0));
  // Substitution is preferred when it ties with an insertion plus deletion.
  auto t = wer_score(Split("a"), Split("b"));
  CHECK(t.substitutions == 1);
  CHECK(t.Errors() == 1);
  CHECK_THROWS_AS(wer_score({}, Split("a")), ValidationError);

  auto sum = accumulate_wer({s, d, i});
  CHECK(sum.reference_tokens == 8);
  CHECK(sum.Errors() == 4);
  CHECK(sum.wer == doctest::Approx(50.0));
}

TEST_CASE("word error rate is zero on itself and invariant under renaming") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<std::string> ref, hyp, ref2, hyp2;
    size_t n = 1 + rng() % 8, m = rng() % 9;
    for (size_t k = 0; k < n; ++k) ref.push_back(std::string(1, char('a' + rng() % 4)));
    for (size_t k = 0; k < m; ++k) hyp.push_back(std::string(1, char('a' + rng() % 4)));
    CHECK(wer_score(ref, ref).Errors() == 0);
    for (const auto &x : ref) ref2.push_back("tok_" + x + x);
    for (const auto &x : hyp) hyp2.push_back("tok_" + x + x);
    auto r1 = wer_score(ref, hyp), r2 = wer_score(ref2, hyp2);
    CHECK(r1.substitutions == r2.substitutions);
    CHECK(r1.insertions == r2.insertions);
    CHECK(r1.deletions == r2.deletions);
    CHECK(r1.Errors() >= (n > m ? n - m : m - n));
    CHECK(r1.Errors() <= std::max(n, m));
  }
}

TEST_CASE("morphemes are glued into words") {
  CHECK(morphemes_to_words(Split("vix +ci")) == Split("vixci"));
  CHECK(morphemes_to_words(Split("vix +tin cUx +ti")) == Split("vixtin cUxti"));
  CHECK(morphemes_to_words(Split("vix tin cUx")) == Split("vix tin cUx"));
  size_t flagged = 0;
  CHECK(morphemes_to_words(Split("+ci vix"), &flagged) == Split("ci vix"));
  CHECK(flagged == 1);
  CHECK(morphemes_to_words({}).empty());
}

TEST_CASE("generated sentences survive gluing and re-segmentation") {
  ToyTask task = make_toy_task(ToyTaskOptions());
  for (const Sentence &s : task.SampleCorpus(500, 3)) {
    size_t flagged = 0;
    auto words = morphemes_to_words(s, &flagged);
    CHECK(flagged == 0);
    CHECK(Segment(words, task) == s);
  }
}

TEST_CASE("toy task phone strings segment uniquely") {
  ToyTask task = make_toy_task(ToyTaskOptions());
  std::map<std::vector<std::string>, std::string> by_phones;
  for (const auto &e : task.lexicon.entries) {
    CHECK(by_phones.emplace(e.phones, e.morpheme).second);
    for (const auto &[other, m] : by_phones)
      if (other != e.phones) {
        size_t k = std::min(other.size(), e.phones.size());
        CHECK_FALSE(std::equal(other.begin(), other.begin() + k, e.phones.begin()));
      }
  }
}

TEST_CASE("size report counts") {
  Fst empty;
  Fst one;
  one.AddStates(2);
  one.SetStart(0);
  one.AddArc(0, Arc{1, 1, Weight(0.5), 1});
  one.SetFinal(1, Weight::One());
  auto rows = size_report({{"empty", &empty}, {"one", &one}});
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].states == 0);
  CHECK(rows[0].arcs == 0);
  CHECK(rows[0].bytes == 0);
  CHECK(rows[1].states == 2);
  CHECK(rows[1].arcs == 1);
  std::ostringstream os;
  write_text_fst(one, os);
  CHECK(rows[1].bytes == os.str().size());
  SizeRow total = sum_rows("all", rows);
  CHECK(total.states == 2);
  CHECK(total.arcs == 1);

  ToyTaskOptions o;
  o.num_stems = 8;
  o.num_suffixes = 4;
  ToyTask task = make_toy_task(o);
  NGramModel big = estimate_witten_bell(task.SampleCorpus(200, 1), 3);
  NGramModel small = prune_to_small_lm(big, 1e-3, 2);
  DecodingGraphs g = build_decoding_graphs(task.lexicon, big, small, true);
  auto r = size_report({{"hclg", &*g.hclg_big}});
  size_t arcs = 0, states = 0;
  for (StateId s = 0; s < static_cast<StateId>(g.hclg_big->NumStates()); ++s, ++states)
    for (const Arc &a : g.hclg_big->Arcs(s)) {
      (void)a;
      ++arcs;
    }
  CHECK(r[0].arcs == arcs);
  CHECK(r[0].states == states);
}

TEST_CASE("strategy names parse both ways") {
  for (Strategy s : {Strategy::kOnTheFly, Strategy::kStatic, Strategy::kRescore})
    CHECK(ParseStrategy(StrategyName(s)) == s);
  CHECK(StrategyName(Strategy::kOnTheFly) == "onthefly");
  CHECK_THROWS_AS(ParseStrategy("dynamic"), ValidationError);
}

TEST_CASE("zero-noise pipeline: all strategies perfect and identical") {
  DecodeReport rep = run_pipeline(SmallConfig());
  REQUIRE(rep.strategies.size() == 3);
  const StrategyReport *fly = rep.Find(Strategy::kOnTheFly);
  const StrategyReport *stat = rep.Find(Strategy::kStatic);
  const StrategyReport *re = rep.Find(Strategy::kRescore);
  REQUIRE(fly);
  REQUIRE(stat);
  REQUIRE(re);
  for (const StrategyReport *r : {fly, stat, re}) {
    CHECK(r->wer.Errors() == 0);
    CHECK(r->wer.wer == 0.0);
    REQUIRE(r->utterances.size() == 5);
    CHECK(r->peak_tokens > 0);
  }
  for (size_t i = 0; i < 5; ++i) {
    CHECK(fly->utterances[i].hypothesis == stat->utterances[i].hypothesis);
    CHECK(re->utterances[i].hypothesis == stat->utterances[i].hypothesis);
    CHECK(fly->utterances[i].hypothesis == fly->utterances[i].reference);
  }
  REQUIRE(rep.SizeRatio());
  CHECK(*rep.SizeRatio() > 0.0);

  auto kv = Summary(rep.Format());
  CHECK(kv.at("strategy.onthefly.wer") == "0.00");
  CHECK(kv.count("size_ratio"));
  CHECK_FALSE(kv.count("strategy.onthefly.rtf"));
  CHECK(kv.at("strategy.onthefly.epsilon_match_attempts") == "0");
}

TEST_CASE("identical configs give byte-identical reports") {
  PipelineConfig c = SmallConfig();
  c.synthesis.noise = 2.0;
  c.decode.beam = 6.0;
  std::string a = run_pipeline(c).Format();
  std::string b = run_pipeline(c).Format();
  CHECK(a == b);
  c.test_seed += 1;
  CHECK(run_pipeline(c).Format() != a);
}

TEST_CASE("stage failures name the stage") {
  PipelineConfig c = SmallConfig();
  c.order = 0;
  try {
    run_pipeline(c);
    FAIL("expected a stage error");
  } catch (const StageError &e) {
    CHECK(e.stage() == "lm-build");
    CHECK(std::string(e.what()).rfind("lm-build: ", 0) == 0);
  }
  c = SmallConfig();
  c.decode.beam = -1.0;
  try {
    run_pipeline(c);
    FAIL("expected a stage error");
  } catch (const StageError &e) {
    CHECK(e.stage().rfind("decode", 0) == 0);
  }
}

#ifdef WFSTD_CLI_PATH
namespace {

int Run(const std::string &args) {
  std::string cmd = std::string(WFSTD_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return rc == 0 ? 0 : 1;
}

std::string Slurp(const std::filesystem::path &p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("command-line pipeline end to end") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "wfstd_cli_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::string d = dir.string();
  REQUIRE(Run("make-task --out-dir " + d +
              " --stems 10 --suffixes 6 --phones 12 --sentences 300 --utterances 3"
              " --utterance-phones 20") == 0);
  REQUIRE(Run("lm-build --corpus " + d + "/corpus.txt --order 3 --out " + d + "/g4.arpa") == 0);
  REQUIRE(Run("lm-prune --lm " + d + "/g4.arpa --prune-threshold 1e-3 --max-order 2 --out " +
              d + "/g3.arpa") == 0);
  REQUIRE(Run("graph-build --lexicon " + d + "/lexicon.txt --lm " + d + "/g3.arpa --out " +
              d + "/hclg3.fst") == 0);
  CHECK(fs::file_size(dir / "hclg3.fst") > 0);
  REQUIRE(Run("synth --lexicon " + d + "/lexicon.txt --transcripts " + d +
              "/test.txt --out " + d + "/ac.txt") == 0);
  for (const char *s : {"onthefly", "static", "rescore"}) {
    std::string hyp = d + "/hyp_" + s + ".txt";
    REQUIRE(Run("decode --lexicon " + d + "/lexicon.txt --lm " + d + "/g4.arpa --small-lm " +
                d + "/g3.arpa --acoustics " + d + "/ac.txt --strategy " + s + " --out " + hyp) ==
            0);
    std::string cmd = std::string(WFSTD_CLI_PATH) + " score --ref " + d + "/test.txt --hyp " +
                      hyp + " > " + d + "/score.txt";
    REQUIRE(std::system(cmd.c_str()) == 0);
    CHECK(Slurp(dir / "score.txt").rfind("wer=0.00 ", 0) == 0);
  }
  CHECK(Slurp(dir / "hyp_onthefly.txt").size() > 0);
  CHECK(Run("decode --lexicon " + d + "/missing.txt --lm x --acoustics y") != 0);
  CHECK(Run("decode --strategy bogus") != 0);
  CHECK(Run("lm-build --corpus " + d + "/corpus.txt --order 0 --out " + d + "/x.arpa") != 0);
  fs::remove_all(dir);
}
#endif
