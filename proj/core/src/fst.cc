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

#include "wfstd/fst.h"

#include <algorithm>
#include <charconv>
#include <string>

#include "wfstd/error.h"

namespace wfstd {

size_t Fst::Checked(StateId s) const {
  if (!ValidState(s))
    throw StructuralError("invalid state id " + std::to_string(s));
  return static_cast<size_t>(s);
}

StateId Fst::AddState() {
  states_.emplace_back();
  return static_cast<StateId>(states_.size() - 1);
}

void Fst::AddStates(size_t n) { states_.resize(states_.size() + n); }

void Fst::SetStart(StateId s) { start_ = static_cast<StateId>(Checked(s)); }

void Fst::SetFinal(StateId s, Weight w) { states_[Checked(s)].final = w; }

void Fst::AddArc(StateId s, const Arc &arc) {
  auto &arcs = states_[Checked(s)].arcs;
  Checked(arc.nextstate);
  if (!arcs.empty() && arc.ilabel < arcs.back().ilabel) input_sorted_ = false;
  arcs.push_back(arc);
}

size_t Fst::NumArcs() const {
  size_t n = 0;
  for (const auto &state : states_) n += state.arcs.size();
  return n;
}

void Fst::ReserveArcs(StateId s, size_t n) { states_[Checked(s)].arcs.reserve(n); }

std::vector<Arc> &Fst::MutableArcs(StateId s) {
  input_sorted_ = false;
  return states_[Checked(s)].arcs;
}

void Fst::ArcSortInput() {
  for (auto &state : states_) {
    std::stable_sort(state.arcs.begin(), state.arcs.end(),
                     [](const Arc &a, const Arc &b) { return a.ilabel < b.ilabel; });
  }
  input_sorted_ = true;
}

std::optional<Arc> find_arc(const Fst &fst, StateId state, Label ilabel) {
  auto arcs = fst.Arcs(state);
  const Arc *best = nullptr;
  if (fst.InputSorted()) {
    auto it = std::lower_bound(
        arcs.begin(), arcs.end(), ilabel,
        [](const Arc &a, Label l) { return a.ilabel < l; });
    for (; it != arcs.end() && it->ilabel == ilabel; ++it)
      if (!best || it->weight < best->weight) best = &*it;
  } else {
    for (const Arc &a : arcs)
      if (a.ilabel == ilabel && (!best || a.weight < best->weight)) best = &a;
  }
  if (!best) return std::nullopt;
  return *best;
}

Fst connect(const Fst &fst, std::vector<StateId> *state_map) {
  const size_t n = fst.NumStates();
  if (state_map) state_map->assign(n, kNoStateId);
  if (n == 0 || fst.Start() == kNoStateId) return Fst();
  std::vector<char> access(n, 0), coaccess(n, 0);
  std::vector<StateId> stack{fst.Start()};
  access[fst.Start()] = 1;
  std::vector<std::vector<StateId>> reverse(n);
  while (!stack.empty()) {
    StateId s = stack.back();
    stack.pop_back();
    for (const Arc &a : fst.Arcs(s)) {
      reverse[a.nextstate].push_back(s);
      if (!access[a.nextstate]) {
        access[a.nextstate] = 1;
        stack.push_back(a.nextstate);
      }
    }
  }
  for (size_t s = 0; s < n; ++s) {
    if (access[s] && fst.IsFinal(static_cast<StateId>(s))) {
      coaccess[s] = 1;
      stack.push_back(static_cast<StateId>(s));
    }
  }
  while (!stack.empty()) {
    StateId s = stack.back();
    stack.pop_back();
    for (StateId p : reverse[s]) {
      if (!coaccess[p]) {
        coaccess[p] = 1;
        stack.push_back(p);
      }
    }
  }
  Fst out;
  out.SetInputSymbols(fst.InputSymbols());
  out.SetOutputSymbols(fst.OutputSymbols());
  if (!coaccess[fst.Start()]) return out;
  std::vector<StateId> remap(n, kNoStateId);
  for (size_t s = 0; s < n; ++s)
    if (access[s] && coaccess[s]) remap[s] = out.AddState();
  for (size_t s = 0; s < n; ++s) {
    StateId ns = remap[s];
    if (ns == kNoStateId) continue;
    out.SetFinal(ns, fst.Final(static_cast<StateId>(s)));
    for (const Arc &a : fst.Arcs(static_cast<StateId>(s))) {
      if (remap[a.nextstate] == kNoStateId) continue;
      Arc b = a;
      b.nextstate = remap[a.nextstate];
      out.AddArc(ns, b);
    }
  }
  out.SetStart(remap[fst.Start()]);
  if (fst.InputSorted()) out.ArcSortInput();
  if (state_map) *state_map = std::move(remap);
  return out;
}

namespace {

std::vector<std::string_view> SplitFields(std::string_view line) {
  std::vector<std::string_view> fields;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) fields.push_back(line.substr(i, j - i));
    i = j;
  }
  return fields;
}

int32_t ParseId(std::string_view text, size_t lineno, const char *what) {
  int32_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || value < 0)
    throw ParseError(std::string("bad ") + what + " '" + std::string(text) + "'",
                     lineno);
  return value;
}

double ParseCost(std::string_view text, size_t lineno) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || std::isnan(value))
    throw ParseError("bad weight '" + std::string(text) + "'", lineno);
  return value;
}

}  // namespace

std::string FormatCost(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

Fst read_text_fst(std::istream &is, const SymbolTable *isyms,
                  const SymbolTable *osyms) {
  struct ArcLine {
    StateId src;
    Arc arc;
  };
  std::vector<ArcLine> arcs;
  std::vector<std::pair<StateId, double>> finals;
  StateId start = kNoStateId;
  StateId max_state = -1;
  std::string line;
  size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto fields = SplitFields(line);
    if (fields.empty() || fields[0].front() == '#') continue;
    if (fields.size() <= 2) {
      StateId s = ParseId(fields[0], lineno, "state id");
      double w = fields.size() == 2 ? ParseCost(fields[1], lineno) : 0.0;
      if (start == kNoStateId) start = s;
      finals.emplace_back(s, w);
      max_state = std::max(max_state, s);
    } else if (fields.size() == 4 || fields.size() == 5) {
      ArcLine a;
      a.src = ParseId(fields[0], lineno, "source state");
      a.arc.nextstate = ParseId(fields[1], lineno, "destination state");
      a.arc.ilabel = ParseId(fields[2], lineno, "input label");
      a.arc.olabel = ParseId(fields[3], lineno, "output label");
      a.arc.weight = Weight(fields.size() == 5 ? ParseCost(fields[4], lineno) : 0.0);
      if (a.arc.weight.IsZero())
        throw ParseError("arc weight must be finite", lineno);
      if (isyms && !isyms->Contains(a.arc.ilabel))
        throw ParseError("unknown input symbol " + std::to_string(a.arc.ilabel),
                         lineno);
      if (osyms && !osyms->Contains(a.arc.olabel))
        throw ParseError("unknown output symbol " + std::to_string(a.arc.olabel),
                         lineno);
      // The initial state is the source of the first arc line; a leading
      // final line only decides it for arc-less machines.
      if (arcs.empty()) start = a.src;
      max_state = std::max({max_state, a.src, a.arc.nextstate});
      arcs.push_back(a);
    } else {
      throw ParseError("expected 1, 2, 4 or 5 fields, got " +
                           std::to_string(fields.size()),
                       lineno);
    }
  }
  Fst fst;
  if (max_state < 0) return fst;
  fst.AddStates(static_cast<size_t>(max_state) + 1);
  for (const auto &a : arcs) fst.AddArc(a.src, a.arc);
  for (auto [s, w] : finals) fst.SetFinal(s, Weight(w));
  fst.SetStart(start);
  return fst;
}

void write_text_fst(const Fst &fst, std::ostream &os) {
  const size_t n = fst.NumStates();
  if (n == 0 || fst.Start() == kNoStateId) return;
  std::vector<StateId> order;
  order.reserve(n);
  order.push_back(fst.Start());
  for (size_t s = 0; s < n; ++s)
    if (static_cast<StateId>(s) != fst.Start()) order.push_back(static_cast<StateId>(s));
  std::vector<StateId> remap(n);
  for (size_t i = 0; i < n; ++i) remap[order[i]] = static_cast<StateId>(i);
  for (size_t i = 0; i < n; ++i) {
    StateId s = order[i];
    for (const Arc &a : fst.Arcs(s)) {
      os << i << '\t' << remap[a.nextstate] << '\t' << a.ilabel << '\t'
         << a.olabel;
      if (a.weight != Weight::One()) os << '\t' << FormatCost(a.weight.Value());
      os << '\n';
    }
    if (fst.IsFinal(s)) {
      os << i;
      if (fst.Final(s) != Weight::One()) os << '\t' << FormatCost(fst.Final(s).Value());
      os << '\n';
    }
  }
}

}  // namespace wfstd
