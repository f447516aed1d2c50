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

#include "wfstd/symbol_table.h"

#include <sstream>

#include "wfstd/error.h"

namespace wfstd {

SymbolTable::SymbolTable() { AddSymbol(kEpsilonSymbol, kEpsilon); }

Label SymbolTable::AddSymbol(std::string_view symbol) {
  if (auto id = Find(symbol)) return *id;
  Label id = AvailableKey();
  AddSymbol(symbol, id);
  return id;
}

void SymbolTable::AddSymbol(std::string_view symbol, Label id) {
  if (symbol.empty()) throw StructuralError("empty symbol");
  if (id < 0) throw StructuralError("negative symbol id");
  std::string key(symbol);
  auto it = index_.find(key);
  if (it != index_.end()) {
    if (it->second == id) return;
    throw StructuralError("symbol '" + key + "' already bound to id " +
                          std::to_string(it->second));
  }
  if (static_cast<size_t>(id) < symbols_.size() && !symbols_[id].empty())
    throw StructuralError("id " + std::to_string(id) + " already bound to '" +
                          symbols_[id] + "'");
  if (static_cast<size_t>(id) >= symbols_.size()) symbols_.resize(id + 1);
  symbols_[id] = key;
  index_.emplace(std::move(key), id);
}

std::optional<Label> SymbolTable::Find(std::string_view symbol) const {
  auto it = index_.find(std::string(symbol));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool SymbolTable::Contains(Label id) const {
  return id >= 0 && static_cast<size_t>(id) < symbols_.size() &&
         !symbols_[id].empty();
}

const std::string &SymbolTable::Symbol(Label id) const {
  if (!Contains(id))
    throw StructuralError("unknown symbol id " + std::to_string(id));
  return symbols_[id];
}

std::vector<Label> SymbolTable::Labels() const {
  std::vector<Label> out;
  out.reserve(index_.size());
  for (size_t i = 0; i < symbols_.size(); ++i)
    if (!symbols_[i].empty()) out.push_back(static_cast<Label>(i));
  return out;
}

SymbolTable SymbolTable::ReadText(std::istream &is) {
  SymbolTable table;
  std::string line;
  size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string symbol, id_text, extra;
    if (!(fields >> symbol >> id_text) || (fields >> extra))
      throw ParseError("expected 'symbol<TAB>id'", lineno);
    Label id;
    try {
      size_t pos = 0;
      long value = std::stol(id_text, &pos);
      if (pos != id_text.size() || value < 0) throw std::invalid_argument("");
      id = static_cast<Label>(value);
    } catch (const std::exception &) {
      throw ParseError("bad symbol id '" + id_text + "'", lineno);
    }
    if (id == kEpsilon && symbol != kEpsilonSymbol)
      throw ParseError("id 0 must be <eps>", lineno);
    try {
      table.AddSymbol(symbol, id);
    } catch (const StructuralError &e) {
      throw ParseError(e.what(), lineno);
    }
  }
  return table;
}

void SymbolTable::WriteText(std::ostream &os) const {
  for (size_t i = 0; i < symbols_.size(); ++i)
    if (!symbols_[i].empty()) os << symbols_[i] << '\t' << i << '\n';
}

}  // namespace wfstd
