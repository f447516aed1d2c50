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

#ifndef WFSTD_SYMBOL_TABLE_H_
#define WFSTD_SYMBOL_TABLE_H_

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace wfstd {

using Label = int32_t;
inline constexpr Label kEpsilon = 0;
inline constexpr Label kNoLabel = -1;
inline constexpr std::string_view kEpsilonSymbol = "<eps>";

// Bijective symbol <-> id map. Id 0 is always "<eps>".
class SymbolTable {
 public:
  SymbolTable();

  // Returns the existing id when the symbol is already present.
  Label AddSymbol(std::string_view symbol);
  // Adds with an explicit id; throws if either side is already bound
  // to something else.
  void AddSymbol(std::string_view symbol, Label id);

  std::optional<Label> Find(std::string_view symbol) const;
  // Throws StructuralError for unknown ids.
  const std::string &Symbol(Label id) const;
  bool Contains(Label id) const;

  // Number of bound ids, including <eps>.
  size_t NumSymbols() const { return index_.size(); }
  // One past the largest bound id.
  Label AvailableKey() const { return static_cast<Label>(symbols_.size()); }

  // All bound ids in increasing order.
  std::vector<Label> Labels() const;

  static SymbolTable ReadText(std::istream &is);
  void WriteText(std::ostream &os) const;

  friend bool operator==(const SymbolTable &a, const SymbolTable &b) {
    return a.symbols_ == b.symbols_;
  }

 private:
  std::vector<std::string> symbols_;  // "" marks an unbound id
  std::unordered_map<std::string, Label> index_;
};

}  // namespace wfstd

#endif  // WFSTD_SYMBOL_TABLE_H_
