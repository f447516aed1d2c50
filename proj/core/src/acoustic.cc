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

#include "wfstd/acoustic.h"

#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "wfstd/error.h"
#include "wfstd/fst.h"

namespace wfstd {

AcousticMatrix::AcousticMatrix(std::string utt_id, size_t frames, size_t symbols)
    : utt_id_(std::move(utt_id)),
      frames_(frames),
      symbols_(symbols),
      costs_(frames * symbols, 0.0) {}

void AcousticMatrix::SetCost(size_t frame, Label label, double cost) {
  if (frame >= frames_ || label < 1 || static_cast<size_t>(label) > symbols_)
    throw StructuralError("acoustic matrix index out of range");
  if (!std::isfinite(cost)) throw StructuralError("acoustic costs must be finite");
  costs_[frame * symbols_ + static_cast<size_t>(label - 1)] = cost;
}

PriorVector::PriorVector(std::vector<double> priors) : priors_(std::move(priors)) {
  if (priors_.empty()) throw ValidationError("empty prior vector");
  double sum = 0.0;
  for (double p : priors_) {
    if (!(p > 0.0)) throw ValidationError("priors must be positive");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-6) throw ValidationError("priors must sum to 1");
}

PriorVector PriorVector::Uniform(size_t symbols) {
  return PriorVector(std::vector<double>(symbols, 1.0 / static_cast<double>(symbols)));
}

AcousticMatrix posterior_to_loglik(const std::string &utt_id,
                                   const std::vector<std::vector<double>> &posteriors,
                                   const PriorVector &priors) {
  AcousticMatrix m(utt_id, posteriors.size(), priors.size());
  for (size_t t = 0; t < posteriors.size(); ++t) {
    const auto &row = posteriors[t];
    if (row.size() != priors.size())
      throw ValidationError("posterior row " + std::to_string(t) + " has " +
                            std::to_string(row.size()) + " columns, expected " +
                            std::to_string(priors.size()));
    double sum = std::accumulate(row.begin(), row.end(), 0.0);
    if (std::abs(sum - 1.0) > 1e-4)
      throw ValidationError("posterior row " + std::to_string(t) + " sums to " +
                            std::to_string(sum));
    for (size_t s = 0; s < row.size(); ++s) {
      if (row[s] < 0.0) throw ValidationError("negative posterior");
      double p = std::max(row[s], kPosteriorFloor);
      m.SetCost(t, static_cast<Label>(s + 1), -(std::log(p) - std::log(priors[s])));
    }
  }
  return m;
}

AcousticMatrix synthesize_utterance(const std::string &utt_id,
                                    std::span<const Label> phones,
                                    size_t num_symbols,
                                    const SynthesisOptions &opts) {
  if (phones.empty()) throw ValidationError("cannot synthesize an empty phone sequence");
  if (opts.frames_per_phone < 1) throw ValidationError("frames_per_phone must be >= 1");
  if (opts.noise < 0.0) throw ValidationError("noise must be non-negative");
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  AcousticMatrix m(utt_id, phones.size() * opts.frames_per_phone, num_symbols);
  size_t t = 0;
  for (Label phone : phones) {
    if (phone < 1 || static_cast<size_t>(phone) > num_symbols)
      throw ValidationError("phone id " + std::to_string(phone) +
                            " outside the emitting-symbol table");
    for (size_t k = 0; k < opts.frames_per_phone; ++k, ++t) {
      for (Label s = 1; s <= static_cast<Label>(num_symbols); ++s) {
        double cost = 0.0;
        if (s != phone) {
          cost = opts.margin;
          if (opts.noise > 0.0) cost += opts.noise * gauss(rng);
        }
        m.SetCost(t, s, cost);
      }
    }
  }
  return m;
}

Weight acoustic_cost(const AcousticMatrix &m, size_t frame, Label label,
                     double scale) {
  if (frame >= m.NumFrames())
    throw StructuralError("frame " + std::to_string(frame) + " out of range");
  if (label < 1 || static_cast<size_t>(label) > m.NumSymbols())
    throw StructuralError("label " + std::to_string(label) +
                          " is not an emitting symbol");
  return Weight(scale * m.Cost(frame, label));
}

std::vector<AcousticMatrix> read_acoustic_matrices(std::istream &is) {
  std::vector<AcousticMatrix> out;
  std::string line;
  size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::istringstream header(line);
    std::string utt, id, frames_kw, symbols_kw;
    size_t frames = 0, symbols = 0;
    if (!(header >> utt)) continue;
    if (utt != "utt" || !(header >> id >> frames_kw >> frames >> symbols_kw >> symbols) ||
        frames_kw != "frames" || symbols_kw != "symbols")
      throw ParseError("expected 'utt <id> frames <T> symbols <S>'", lineno);
    AcousticMatrix m(id, frames, symbols);
    for (size_t t = 0; t < frames; ++t) {
      if (!std::getline(is, line)) throw ParseError("truncated matrix " + id, lineno);
      ++lineno;
      std::istringstream row(line);
      for (size_t s = 1; s <= symbols; ++s) {
        double v;
        if (!(row >> v)) throw ParseError("short row in matrix " + id, lineno);
        m.SetCost(t, static_cast<Label>(s), v);
      }
      std::string extra;
      if (row >> extra) throw ParseError("long row in matrix " + id, lineno);
    }
    out.push_back(std::move(m));
  }
  return out;
}

void write_acoustic_matrix(const AcousticMatrix &m, std::ostream &os) {
  os << "utt " << m.UttId() << " frames " << m.NumFrames() << " symbols "
     << m.NumSymbols() << '\n';
  for (size_t t = 0; t < m.NumFrames(); ++t) {
    auto row = m.Row(t);
    for (size_t s = 0; s < row.size(); ++s)
      os << (s ? " " : "") << FormatCost(row[s]);
    os << '\n';
  }
}

}  // namespace wfstd
