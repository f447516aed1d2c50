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

#ifndef WFSTD_ACOUSTIC_H_
#define WFSTD_ACOUSTIC_H_

#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "wfstd/symbol_table.h"
#include "wfstd/weight.h"

namespace wfstd {

// Per-frame negative log-likelihood costs. Column s-1 holds the cost of
// emitting symbol s (symbol 0, epsilon, has no column).
class AcousticMatrix {
 public:
  AcousticMatrix() = default;
  AcousticMatrix(std::string utt_id, size_t frames, size_t symbols);

  const std::string &UttId() const { return utt_id_; }
  size_t NumFrames() const { return frames_; }
  size_t NumSymbols() const { return symbols_; }

  double Cost(size_t frame, Label label) const {
    return costs_[frame * symbols_ + static_cast<size_t>(label - 1)];
  }
  void SetCost(size_t frame, Label label, double cost);
  std::span<const double> Row(size_t frame) const {
    return std::span<const double>(costs_).subspan(frame * symbols_, symbols_);
  }

  friend bool operator==(const AcousticMatrix &, const AcousticMatrix &) = default;

 private:
  std::string utt_id_;
  size_t frames_ = 0;
  size_t symbols_ = 0;
  std::vector<double> costs_;
};

// State priors p(q); positive and summing to one.
class PriorVector {
 public:
  explicit PriorVector(std::vector<double> priors);
  static PriorVector Uniform(size_t symbols);
  size_t size() const { return priors_.size(); }
  double operator[](size_t i) const { return priors_[i]; }

 private:
  std::vector<double> priors_;
};

inline constexpr double kPosteriorFloor = 1e-10;

// Hybrid scaled likelihood: cost = -(ln posterior - ln prior), the
// observation probability term dropped. Zero posteriors are floored at
// kPosteriorFloor. Rows must sum to 1 within 1e-4.
AcousticMatrix posterior_to_loglik(const std::string &utt_id,
                                   const std::vector<std::vector<double>> &posteriors,
                                   const PriorVector &priors);

struct SynthesisOptions {
  size_t frames_per_phone = 1;
  double noise = 0.0;   // std-dev of the Gaussian perturbation
  double margin = 5.0;  // cost of every wrong symbol before noise
  uint64_t seed = 0;
};

// Frames for each phone in turn: the scheduled phone costs 0, every other
// symbol costs margin + noise * N(0, 1). Deterministic given the seed.
AcousticMatrix synthesize_utterance(const std::string &utt_id,
                                    std::span<const Label> phones,
                                    size_t num_symbols,
                                    const SynthesisOptions &opts);

// scale * cost of `label` at `frame`. Throws StructuralError out of range,
// including for epsilon.
Weight acoustic_cost(const AcousticMatrix &m, size_t frame, Label label,
                     double scale = 1.0);

// "utt <id> frames <T> symbols <S>" then T rows of S costs.
std::vector<AcousticMatrix> read_acoustic_matrices(std::istream &is);
void write_acoustic_matrix(const AcousticMatrix &m, std::ostream &os);

}  // namespace wfstd

#endif  // WFSTD_ACOUSTIC_H_
