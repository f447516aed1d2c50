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

#ifndef WFSTD_FST_H_
#define WFSTD_FST_H_

#include <cstdint>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "wfstd/symbol_table.h"
#include "wfstd/weight.h"

namespace wfstd {

using StateId = int32_t;
inline constexpr StateId kNoStateId = -1;

struct Arc {
  Label ilabel = kEpsilon;
  Label olabel = kEpsilon;
  Weight weight = Weight::One();
  StateId nextstate = kNoStateId;

  friend bool operator==(const Arc &a, const Arc &b) = default;
};

// A weighted transducer over the tropical semiring with a single initial
// state (initial weight fixed to One) and per-state final weights, where
// Weight::Zero() means "not final".
//
// Arcs of a state are kept in insertion order; ArcSortInput() orders them by
// input label, which find_arc() relies on for logarithmic lookup.
class Fst {
 public:
  Fst() = default;

  StateId AddState();
  void AddStates(size_t n);
  void SetStart(StateId s);
  void SetFinal(StateId s, Weight w);
  void AddArc(StateId s, const Arc &arc);
  void ReserveArcs(StateId s, size_t n);

  StateId Start() const { return start_; }
  Weight Final(StateId s) const { return states_[Checked(s)].final; }
  bool IsFinal(StateId s) const { return !Final(s).IsZero(); }
  size_t NumStates() const { return states_.size(); }
  size_t NumArcs(StateId s) const { return states_[Checked(s)].arcs.size(); }
  size_t NumArcs() const;
  bool ValidState(StateId s) const {
    return s >= 0 && static_cast<size_t>(s) < states_.size();
  }

  std::span<const Arc> Arcs(StateId s) const {
    return states_[Checked(s)].arcs;
  }
  // Mutable access drops the input-sorted guarantee.
  std::vector<Arc> &MutableArcs(StateId s);

  // Stable sort of every arc list by input label.
  void ArcSortInput();
  bool InputSorted() const { return input_sorted_; }

  void SetInputSymbols(std::shared_ptr<const SymbolTable> syms) {
    isyms_ = std::move(syms);
  }
  void SetOutputSymbols(std::shared_ptr<const SymbolTable> syms) {
    osyms_ = std::move(syms);
  }
  const std::shared_ptr<const SymbolTable> &InputSymbols() const {
    return isyms_;
  }
  const std::shared_ptr<const SymbolTable> &OutputSymbols() const {
    return osyms_;
  }

 private:
  struct State {
    std::vector<Arc> arcs;
    Weight final = Weight::Zero();
  };

  size_t Checked(StateId s) const;

  std::vector<State> states_;
  StateId start_ = kNoStateId;
  bool input_sorted_ = true;
  std::shared_ptr<const SymbolTable> isyms_;
  std::shared_ptr<const SymbolTable> osyms_;
};

// Arc of `state` whose input label is `ilabel`. Among several such arcs the
// lowest-weight one wins. Binary search when the machine is input-sorted,
// linear scan otherwise. Throws StructuralError for an invalid state.
std::optional<Arc> find_arc(const Fst &fst, StateId state, Label ilabel);

// Removes states that are not on some initial-to-final path. Surviving
// states keep their relative order. No successful path -> empty machine.
// When state_map is given it receives old -> new ids (kNoStateId if removed).
Fst connect(const Fst &fst, std::vector<StateId> *state_map = nullptr);

// Text format, one line per arc or final state:
//   src<TAB>dst<TAB>ilabel<TAB>olabel[<TAB>weight]
//   state[<TAB>weight]
// Lines starting with '#' are comments. The source state of the first line
// is the initial state. When symbol tables are given every label must be
// bound in them.
Fst read_text_fst(std::istream &is, const SymbolTable *isyms = nullptr,
                  const SymbolTable *osyms = nullptr);
// Writes with the initial state renumbered to 0 and its lines first.
void write_text_fst(const Fst &fst, std::ostream &os);

// Shortest decimal form that parses back to the same double.
std::string FormatCost(double value);

}  // namespace wfstd

#endif  // WFSTD_FST_H_
