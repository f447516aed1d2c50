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

#ifndef WFSTD_WEIGHT_H_
#define WFSTD_WEIGHT_H_

#include <cmath>
#include <limits>
#include <ostream>

namespace wfstd {

// Tropical semiring weight: a cost in the natural-log negative-log domain.
// Plus is min, Times is +, Zero is +inf and One is 0.
class TropicalWeight {
 public:
  constexpr TropicalWeight() : value_(0.0) {}
  constexpr explicit TropicalWeight(double value) : value_(value) {}

  static constexpr TropicalWeight Zero() {
    return TropicalWeight(std::numeric_limits<double>::infinity());
  }
  static constexpr TropicalWeight One() { return TropicalWeight(0.0); }

  constexpr double Value() const { return value_; }
  constexpr bool IsZero() const {
    return value_ == std::numeric_limits<double>::infinity();
  }
  bool IsValid() const { return !std::isnan(value_) && value_ != -Zero().value_; }

  friend constexpr bool operator==(TropicalWeight a, TropicalWeight b) {
    return a.value_ == b.value_;
  }
  friend constexpr bool operator<(TropicalWeight a, TropicalWeight b) {
    return a.value_ < b.value_;
  }

 private:
  double value_;
};

inline constexpr TropicalWeight Plus(TropicalWeight a, TropicalWeight b) {
  return a.Value() <= b.Value() ? a : b;
}

inline constexpr TropicalWeight Times(TropicalWeight a, TropicalWeight b) {
  if (a.IsZero() || b.IsZero()) return TropicalWeight::Zero();
  return TropicalWeight(a.Value() + b.Value());
}

// Negation keeps Zero as Zero: a non-final state stays non-final.
inline constexpr TropicalWeight Negate(TropicalWeight a) {
  return a.IsZero() ? a : TropicalWeight(-a.Value());
}

inline bool ApproxEqual(TropicalWeight a, TropicalWeight b,
                        double delta = 1e-6) {
  if (a.IsZero() || b.IsZero()) return a.IsZero() && b.IsZero();
  return std::abs(a.Value() - b.Value()) <= delta;
}

inline std::ostream &operator<<(std::ostream &os, TropicalWeight w) {
  if (w.IsZero()) return os << "Infinity";
  return os << w.Value();
}

using Weight = TropicalWeight;

// log10 probability -> cost.
inline double Log10ToCost(double log10_prob) {
  return -log10_prob * 2.302585092994045684;
}

}  // namespace wfstd

#endif  // WFSTD_WEIGHT_H_
