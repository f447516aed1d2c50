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

#include "wfstd/decoder.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <optional>

#include "wfstd/error.h"

namespace wfstd {

FebabosStats &FebabosStats::operator+=(const FebabosStats &o) {
  match_attempts += o.match_attempts;
  failed_matches += o.failed_matches;
  backoff_hops += o.backoff_hops;
  dead_relays += o.dead_relays;
  epsilon_match_attempts += o.epsilon_match_attempts;
  return *this;
}

RelayResult relay_match(const Fst &g, StateId state, Label label,
                        FebabosStats *stats, Label backoff_label) {
  FebabosStats scratch;
  FebabosStats &st = stats ? *stats : scratch;
  if (label == kEpsilon) {
    ++st.epsilon_match_attempts;
    return {};
  }
  Weight acc = Weight::One();
  int hops = 0;
  StateId q = state;
  while (true) {
    ++st.match_attempts;
    if (auto arc = find_arc(g, q, label))
      return {arc->nextstate, Times(acc, arc->weight), hops, arc->olabel};
    ++st.failed_matches;
    auto backoff = find_arc(g, q, backoff_label);
    if (!backoff) {
      ++st.dead_relays;
      return {};
    }
    ++st.backoff_hops;
    ++hops;
    acc = Times(acc, backoff->weight);
    q = backoff->nextstate;
  }
}

Weight relay_final(const Fst &g, StateId state, Label backoff_label) {
  Weight acc = Weight::One();
  StateId q = state;
  for (size_t guard = 0; guard <= g.NumStates(); ++guard) {
    if (g.IsFinal(q)) return Times(acc, g.Final(q));
    auto backoff = find_arc(g, q, backoff_label);
    if (!backoff) return Weight::Zero();
    acc = Times(acc, backoff->weight);
    q = backoff->nextstate;
  }
  return Weight::Zero();
}

RelayCache::RelayCache(const Fst &g, Label backoff_label)
    : g_(&g), backoff_label_(backoff_label) {
  Label max_label = 0;
  for (StateId s = 0; s < static_cast<StateId>(g.NumStates()); ++s)
    for (const Arc &a : g.Arcs(s)) max_label = std::max(max_label, a.ilabel);
  num_labels_ = static_cast<size_t>(max_label) + 1;
  if (g.NumStates() * num_labels_ <= kMaxEntries) {
    RelayResult empty;
    empty.hops = -1;
    table_.assign(g.NumStates() * num_labels_, empty);
  }
}

RelayResult RelayCache::Match(StateId state, Label label, FebabosStats *stats) {
  if (label <= kEpsilon || static_cast<size_t>(label) >= num_labels_ || table_.empty())
    return relay_match(*g_, state, label, stats, backoff_label_);
  RelayResult &slot = table_[static_cast<size_t>(state) * num_labels_ +
                             static_cast<size_t>(label)];
  if (slot.hops < 0) {
    slot = relay_match(*g_, state, label, stats, backoff_label_);
  } else if (stats) {
    const uint64_t hops = static_cast<uint64_t>(slot.hops);
    const uint64_t dead = slot.Dead() ? 1 : 0;
    stats->match_attempts += hops + 1;
    stats->failed_matches += hops + dead;
    stats->backoff_hops += hops;
    stats->dead_relays += dead;
  }
  return slot;
}

void DecodeOptions::Validate() const {
  if (!(beam > 0.0) || !(lattice_beam > 0.0) || !(acoustic_scale > 0.0) ||
      max_active == 0)
    throw ValidationError("decode options must all be positive");
}

bool TokenList::Push(const StateTriple &triple, double cost, const TokenLink &link) {
  auto [it, inserted] = index_.emplace(triple, static_cast<int32_t>(tokens_.size()));
  if (inserted) tokens_.push_back(Token{triple, cost, -1});
  Token &tok = tokens_[static_cast<size_t>(it->second)];
  if (!inserted && cost > tok.cost + link_beam_) return false;
  bool improved = inserted || cost < tok.cost;
  if (cost < tok.cost) tok.cost = cost;
  if (link.same_frame) {
    // Re-expansion of an improved predecessor re-pushes the same arc.
    for (int32_t l = tok.first_link; l >= 0; l = links_[l].next) {
      TokenLink &old = links_[static_cast<size_t>(l)];
      if (old.same_frame && old.prev == link.prev && old.ilabel == link.ilabel &&
          old.olabel == link.olabel && old.graph_cost == link.graph_cost) {
        old.total = std::min(old.total, cost);
        return improved;
      }
    }
  }
  TokenLink stored = link;
  stored.total = cost;
  stored.next = tok.first_link;
  tok.first_link = static_cast<int32_t>(links_.size());
  links_.push_back(stored);
  return improved;
}

void TokenList::PushInitial(const StateTriple &triple) {
  auto [it, inserted] = index_.emplace(triple, static_cast<int32_t>(tokens_.size()));
  if (inserted) tokens_.push_back(Token{triple, 0.0, -1});
  else tokens_[static_cast<size_t>(it->second)].cost =
      std::min(tokens_[static_cast<size_t>(it->second)].cost, 0.0);
}

const Token *TokenList::Find(const StateTriple &triple) const {
  int32_t i = IndexOf(triple);
  return i < 0 ? nullptr : &tokens_[static_cast<size_t>(i)];
}

int32_t TokenList::IndexOf(const StateTriple &triple) const {
  auto it = index_.find(triple);
  return it == index_.end() ? -1 : it->second;
}

double TokenList::BestCost() const {
  double best = std::numeric_limits<double>::infinity();
  for (const Token &t : tokens_) best = std::min(best, t.cost);
  return best;
}

namespace {

// Composes graph arc e1 leaving `from` with the LM operands. False when
// the LM relay dies.
inline bool ExpandArc(const SearchGraphs &g, const StateTriple &from, const Arc &e1,
                      StateTriple *to, double *graph_cost, FebabosStats *stats,
                      const ExpandOptions &expand) {
  if (!g.OnTheFly() || e1.olabel == kEpsilon) {
    *to = StateTriple{e1.nextstate, from.small_lm, from.big_lm};
    *graph_cost = e1.weight.Value();
    return true;
  }
  RelayResult small =
      expand.small_lm_cache
          ? expand.small_lm_cache->Match(from.small_lm, e1.olabel, stats)
          : relay_match(*g.small_lm_neg, from.small_lm, e1.olabel, stats, g.backoff_label);
  if (small.Dead()) return false;
  if (small.olabel == kEpsilon) {
    *to = StateTriple{e1.nextstate, small.state, from.big_lm};
    *graph_cost = e1.weight.Value() + small.weight.Value();
    return true;
  }
  RelayResult big =
      expand.big_lm_cache
          ? expand.big_lm_cache->Match(from.big_lm, small.olabel, stats)
          : relay_match(*g.big_lm, from.big_lm, small.olabel, stats, g.backoff_label);
  if (big.Dead()) return false;
  *to = StateTriple{e1.nextstate, small.state, big.state};
  *graph_cost = e1.weight.Value() + small.weight.Value() + big.weight.Value();
  return true;
}

Weight FinalWeight(const SearchGraphs &g, const StateTriple &t) {
  Weight w = g.graph->Final(t.graph);
  if (w.IsZero() || !g.OnTheFly()) return w;
  w = Times(w, relay_final(*g.small_lm_neg, t.small_lm, g.backoff_label));
  return Times(w, relay_final(*g.big_lm, t.big_lm, g.backoff_label));
}

}  // namespace

TokenList advance_emitting_febabos(const SearchGraphs &graphs, const TokenList &last,
                                   const AcousticMatrix &acoustics, size_t frame,
                                   double acoustic_scale, FebabosStats *stats,
                                   const ExpandOptions &expand, double link_beam) {
  if (frame >= acoustics.NumFrames())
    throw StructuralError("frame " + std::to_string(frame) + " out of range");
  TokenList next(link_beam);
  StateTriple to;
  double graph_cost = 0.0;
  for (size_t i = 0; i < last.size(); ++i) {
    const Token &tok = last[i];
    for (const Arc &e1 : graphs.graph->Arcs(tok.triple.graph)) {
      if (e1.ilabel == kEpsilon) continue;
      if (!ExpandArc(graphs, tok.triple, e1, &to, &graph_cost, stats, expand)) continue;
      if (static_cast<size_t>(e1.ilabel) > acoustics.NumSymbols())
        acoustic_cost(acoustics, frame, e1.ilabel);  // throws
      double ac = acoustic_scale * acoustics.Cost(frame, e1.ilabel);
      TokenLink link;
      link.prev = static_cast<int32_t>(i);
      link.ilabel = e1.ilabel;
      link.olabel = e1.olabel;
      link.graph_cost = graph_cost;
      link.acoustic_cost = ac;
      next.Push(to, tok.cost + graph_cost + ac, link);
    }
  }
  return next;
}

TokenList propagate_nonemitting(const SearchGraphs &graphs, TokenList tokens,
                                FebabosStats *stats, const ExpandOptions &expand) {
  std::deque<int32_t> queue;
  std::vector<char> queued(tokens.size(), 0);
  for (size_t i = 0; i < tokens.size(); ++i) {
    auto arcs = graphs.graph->Arcs(tokens[i].triple.graph);
    if (!arcs.empty() && arcs.front().ilabel == kEpsilon) {
      queue.push_back(static_cast<int32_t>(i));
      queued[i] = 1;
    }
  }
  // Epsilon cycles would be cost-positive in any graph built here; the
  // budget only stops pathological inputs.
  size_t budget = 64 * (tokens.size() + 16);
  StateTriple to;
  double graph_cost = 0.0;
  while (!queue.empty() && budget-- > 0) {
    int32_t i = queue.front();
    queue.pop_front();
    queued[static_cast<size_t>(i)] = 0;
    const StateTriple from = tokens[static_cast<size_t>(i)].triple;
    for (const Arc &e1 : graphs.graph->Arcs(from.graph)) {
      if (e1.ilabel != kEpsilon) break;
      if (!ExpandArc(graphs, from, e1, &to, &graph_cost, stats, expand)) continue;
      double cost = tokens[static_cast<size_t>(i)].cost + graph_cost;
      TokenLink link;
      link.prev = i;
      link.same_frame = true;
      link.olabel = e1.olabel;
      link.graph_cost = graph_cost;
      if (!tokens.Push(to, cost, link)) continue;
      int32_t j = tokens.IndexOf(to);
      if (static_cast<size_t>(j) >= queued.size()) queued.resize(j + 1, 0);
      if (!queued[static_cast<size_t>(j)]) {
        queued[static_cast<size_t>(j)] = 1;
        queue.push_back(j);
      }
    }
  }
  return tokens;
}

TokenList prune_tokens(const TokenList &tokens, const DecodeOptions &opts) {
  TokenList out(tokens.link_beam_);
  if (tokens.empty()) return out;
  const double limit = tokens.BestCost() + opts.beam;
  std::vector<int32_t> keep;
  for (size_t i = 0; i < tokens.size(); ++i)
    if (tokens[i].cost <= limit) keep.push_back(static_cast<int32_t>(i));
  if (keep.size() > opts.max_active) {
    auto cheaper = [&](int32_t a, int32_t b) {
      const Token &ta = tokens[static_cast<size_t>(a)];
      const Token &tb = tokens[static_cast<size_t>(b)];
      if (ta.cost != tb.cost) return ta.cost < tb.cost;
      return ta.triple < tb.triple;
    };
    std::nth_element(keep.begin(), keep.begin() + static_cast<long>(opts.max_active),
                     keep.end(), cheaper);
    keep.resize(opts.max_active);
    std::sort(keep.begin(), keep.end());
  }
  std::vector<int32_t> remap(tokens.size(), -1);
  for (size_t k = 0; k < keep.size(); ++k) remap[static_cast<size_t>(keep[k])] =
      static_cast<int32_t>(k);
  out.tokens_.reserve(keep.size());
  for (int32_t old : keep) {
    const Token &tok = tokens[static_cast<size_t>(old)];
    Token copy{tok.triple, tok.cost, -1};
    const double link_limit = tok.cost + opts.lattice_beam;
    for (int32_t l = tok.first_link; l >= 0; l = tokens.links_[l].next) {
      TokenLink link = tokens.links_[static_cast<size_t>(l)];
      if (link.total > link_limit) continue;
      if (link.same_frame) {
        link.prev = remap[static_cast<size_t>(link.prev)];
        if (link.prev < 0) continue;
      }
      link.next = copy.first_link;
      copy.first_link = static_cast<int32_t>(out.links_.size());
      out.links_.push_back(link);
    }
    out.index_.emplace(copy.triple, static_cast<int32_t>(out.tokens_.size()));
    out.tokens_.push_back(copy);
  }
  return out;
}

TokenList finalize_utterance(const TokenList &tokens, const SearchGraphs &graphs,
                             const std::string &utt_id) {
  TokenList out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    Weight f = FinalWeight(graphs, tokens[i].triple);
    if (f.IsZero()) continue;
    TokenLink link;
    link.prev = static_cast<int32_t>(i);
    link.graph_cost = f.Value();
    out.Push(tokens[i].triple, tokens[i].cost + f.Value(), link);
  }
  if (out.empty())
    throw EmptyResultError("utterance " + utt_id +
                           ": no surviving token reaches a final state");
  return out;
}

namespace {

// Forward-backward pruning of the token trellis into a lattice. layers[0]
// holds the initial token, layers[t+1] the tokens after frame t, and
// `finals` links into the last layer.
Lattice BuildLattice(const std::vector<TokenList> &layers, const TokenList &finals,
                     double lattice_beam, const SearchGraphs &graphs,
                     const std::string &utt_id) {
  const size_t num_layers = layers.size();
  std::vector<std::vector<double>> beta(num_layers);
  for (size_t l = 0; l < num_layers; ++l)
    beta[l].assign(layers[l].size(), std::numeric_limits<double>::infinity());
  double best = finals.BestCost();
  for (const Token &tok : finals.tokens()) {
    const TokenLink &link = finals.Link(tok.first_link);
    beta.back()[static_cast<size_t>(link.prev)] =
        std::min(beta.back()[static_cast<size_t>(link.prev)], link.graph_cost);
  }
  auto link_cost = [](const TokenLink &l) { return l.graph_cost + l.acoustic_cost; };
  for (size_t l = num_layers; l-- > 0;) {
    const TokenList &layer = layers[l];
    // Same-frame (epsilon) links: relax until stable.
    for (size_t pass = 0; pass <= layer.size(); ++pass) {
      bool changed = false;
      for (size_t j = 0; j < layer.size(); ++j) {
        for (int32_t k = layer[j].first_link; k >= 0; k = layer.Link(k).next) {
          const TokenLink &link = layer.Link(k);
          if (!link.same_frame) continue;
          double b = link_cost(link) + beta[l][j];
          if (b < beta[l][static_cast<size_t>(link.prev)]) {
            beta[l][static_cast<size_t>(link.prev)] = b;
            changed = true;
          }
        }
      }
      if (!changed) break;
    }
    if (l == 0) break;
    for (size_t j = 0; j < layer.size(); ++j) {
      for (int32_t k = layer[j].first_link; k >= 0; k = layer.Link(k).next) {
        const TokenLink &link = layer.Link(k);
        if (link.same_frame) continue;
        double b = link_cost(link) + beta[l][j];
        auto &target = beta[l - 1][static_cast<size_t>(link.prev)];
        target = std::min(target, b);
      }
    }
  }

  const double limit = best + lattice_beam + 1e-9 * std::max(1.0, std::abs(best));
  Lattice lat;
  lat.utt_id = utt_id;
  lat.fst.SetInputSymbols(graphs.graph->InputSymbols());
  lat.fst.SetOutputSymbols(graphs.graph->OutputSymbols());
  std::vector<std::vector<StateId>> state_of(num_layers);
  auto get_state = [&](size_t l, int32_t j) {
    auto &s = state_of[l][static_cast<size_t>(j)];
    if (s == kNoStateId) {
      s = lat.fst.AddState();
      lat.state_frames.push_back(static_cast<int32_t>(l));
    }
    return s;
  };
  for (size_t l = 0; l < num_layers; ++l) state_of[l].assign(layers[l].size(), kNoStateId);

  // The initial token is the only linkless token of layer 0.
  int32_t start = -1;
  for (size_t j = 0; j < layers[0].size(); ++j)
    if (layers[0][j].cost == 0.0 && layers[0][j].first_link < 0) start = static_cast<int32_t>(j);
  if (start < 0) throw EmptyResultError("utterance " + utt_id + ": lost the initial token");
  lat.fst.SetStart(get_state(0, start));

  for (size_t l = 0; l < num_layers; ++l) {
    const TokenList &layer = layers[l];
    for (size_t j = 0; j < layer.size(); ++j) {
      if (layer[j].cost + beta[l][j] > limit) continue;
      for (int32_t k = layer[j].first_link; k >= 0; k = layer.Link(k).next) {
        const TokenLink &link = layer.Link(k);
        size_t pl = link.same_frame ? l : l - 1;
        const Token &prev = layers[pl][static_cast<size_t>(link.prev)];
        if (prev.cost + link_cost(link) + beta[l][j] > limit) continue;
        StateId src = get_state(pl, link.prev);
        StateId dst = get_state(l, static_cast<int32_t>(j));
        lat.fst.AddArc(src, Arc{link.ilabel, link.olabel, Weight(link_cost(link)), dst});
      }
    }
  }
  for (const Token &tok : finals.tokens()) {
    const TokenLink &link = finals.Link(tok.first_link);
    const size_t l = num_layers - 1;
    if (tok.cost > limit) continue;
    StateId s = state_of[l][static_cast<size_t>(link.prev)];
    if (s == kNoStateId) continue;
    lat.fst.SetFinal(s, Weight(link.graph_cost));
  }
  lat.fst.ArcSortInput();
  topological_order(lat.fst);  // throws on epsilon cycles
  return lat;
}

}  // namespace

Lattice decode(const SearchGraphs &graphs, const AcousticMatrix &acoustics,
               const DecodeOptions &opts, DecodeStats *stats) {
  opts.Validate();
  if (!graphs.graph || graphs.graph->Start() == kNoStateId)
    throw EmptyResultError("utterance " + acoustics.UttId() + ": empty search graph");
  if (acoustics.NumFrames() == 0)
    throw EmptyResultError("utterance " + acoustics.UttId() + ": no frames");
  DecodeStats local;
  DecodeStats &st = stats ? *stats : local;
  FebabosStats *fs = &st.febabos;

  StateTriple start{graphs.graph->Start(), 0, 0};
  if (graphs.OnTheFly()) {
    start.small_lm = graphs.small_lm_neg->Start();
    start.big_lm = graphs.big_lm->Start();
  }
  std::optional<RelayCache> small_cache, big_cache;
  ExpandOptions expand;
  if (graphs.OnTheFly()) {
    small_cache.emplace(*graphs.small_lm_neg, graphs.backoff_label);
    big_cache.emplace(*graphs.big_lm, graphs.backoff_label);
    expand.small_lm_cache = &*small_cache;
    expand.big_lm_cache = &*big_cache;
  }
  std::vector<TokenList> layers;
  layers.reserve(acoustics.NumFrames() + 1);
  {
    TokenList init(opts.lattice_beam);
    init.PushInitial(start);
    layers.push_back(
        prune_tokens(propagate_nonemitting(graphs, std::move(init), fs, expand), opts));
  }
  for (size_t t = 0; t < acoustics.NumFrames(); ++t) {
    TokenList next = advance_emitting_febabos(graphs, layers.back(), acoustics, t,
                                              opts.acoustic_scale, fs, expand,
                                              opts.lattice_beam);
    next = propagate_nonemitting(graphs, std::move(next), fs, expand);
    if (next.empty())
      throw EmptyResultError("utterance " + acoustics.UttId() +
                             ": no hypothesis survives frame " + std::to_string(t));
    st.peak_tokens = std::max(st.peak_tokens, next.size());
    layers.push_back(prune_tokens(next, opts));
  }
  st.frames += acoustics.NumFrames();
  TokenList finals = finalize_utterance(layers.back(), graphs, acoustics.UttId());
  st.best_cost = finals.BestCost();
  return BuildLattice(layers, finals, opts.lattice_beam, graphs, acoustics.UttId());
}

Lattice decode_onthefly(const Fst &hclg_small, const Fst &small_lm_neg,
                        const Fst &big_lm, const AcousticMatrix &acoustics,
                        const DecodeOptions &opts, DecodeStats *stats,
                        Label backoff_label) {
  return decode(SearchGraphs{&hclg_small, &small_lm_neg, &big_lm, backoff_label},
                acoustics, opts, stats);
}

Lattice decode_static(const Fst &graph, const AcousticMatrix &acoustics,
                      const DecodeOptions &opts, DecodeStats *stats) {
  return decode(SearchGraphs{&graph, nullptr, nullptr, kEpsilon}, acoustics, opts,
                stats);
}

Lattice rescore_lattice(const Lattice &lat, const Fst &small_lm_neg, const Fst &big_lm,
                        FebabosStats *stats, Label backoff_label) {
  if (lat.fst.Start() == kNoStateId)
    throw EmptyResultError("utterance " + lat.utt_id + ": empty lattice");
  SearchGraphs graphs{&lat.fst, &small_lm_neg, &big_lm, backoff_label};
  Fst product;
  product.SetInputSymbols(lat.fst.InputSymbols());
  product.SetOutputSymbols(lat.fst.OutputSymbols());
  std::vector<int32_t> frames;
  absl::flat_hash_map<StateTriple, StateId, StateTripleHash> ids;
  std::deque<StateTriple> queue;
  auto state_of = [&](const StateTriple &t) {
    auto [it, inserted] = ids.emplace(t, kNoStateId);
    if (inserted) {
      it->second = product.AddState();
      frames.push_back(lat.state_frames.empty()
                           ? 0
                           : lat.state_frames[static_cast<size_t>(t.graph)]);
      queue.push_back(t);
    }
    return it->second;
  };
  product.SetStart(state_of({lat.fst.Start(), small_lm_neg.Start(), big_lm.Start()}));
  StateTriple to;
  double graph_cost = 0.0;
  while (!queue.empty()) {
    StateTriple t = queue.front();
    queue.pop_front();
    StateId src = ids.at(t);
    product.SetFinal(src, FinalWeight(graphs, t));
    for (const Arc &arc : lat.fst.Arcs(t.graph)) {
      if (!ExpandArc(graphs, t, arc, &to, &graph_cost, stats, {})) continue;
      product.AddArc(src, Arc{arc.ilabel, arc.olabel, Weight(graph_cost), state_of(to)});
    }
  }
  std::vector<StateId> map;
  Lattice out;
  out.utt_id = lat.utt_id;
  out.fst = connect(product, &map);
  if (out.fst.NumStates() == 0)
    throw EmptyResultError("utterance " + lat.utt_id +
                           ": every lattice path was dropped by rescoring");
  out.state_frames.resize(out.fst.NumStates());
  for (size_t s = 0; s < map.size(); ++s)
    if (map[s] != kNoStateId) out.state_frames[static_cast<size_t>(map[s])] = frames[s];
  return out;
}

std::vector<StateId> topological_order(const Fst &fst) {
  const size_t n = fst.NumStates();
  std::vector<size_t> indegree(n, 0);
  for (size_t s = 0; s < n; ++s)
    for (const Arc &a : fst.Arcs(static_cast<StateId>(s))) ++indegree[a.nextstate];
  std::vector<StateId> order, ready;
  for (size_t s = 0; s < n; ++s)
    if (indegree[s] == 0) ready.push_back(static_cast<StateId>(s));
  while (!ready.empty()) {
    StateId s = ready.back();
    ready.pop_back();
    order.push_back(s);
    for (const Arc &a : fst.Arcs(s))
      if (--indegree[a.nextstate] == 0) ready.push_back(a.nextstate);
  }
  if (order.size() != n) throw StructuralError("machine is cyclic");
  return order;
}

namespace {

// -1, 0, 1 comparing the output strings of two partial paths.
int CompareOutputs(const std::vector<Label> &a, const std::vector<Label> &b,
                   const SymbolTable *syms) {
  size_t n = std::min(a.size(), b.size());
  for (size_t i = 0; i < n; ++i) {
    if (a[i] == b[i]) continue;
    if (syms && syms->Contains(a[i]) && syms->Contains(b[i]))
      return syms->Symbol(a[i]) < syms->Symbol(b[i]) ? -1 : 1;
    return a[i] < b[i] ? -1 : 1;
  }
  if (a.size() == b.size()) return 0;
  return a.size() < b.size() ? -1 : 1;
}

bool SameCost(double a, double b) {
  if (std::isinf(a) || std::isinf(b)) return a == b;
  return std::abs(a - b) <= 1e-9 * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

}  // namespace

BestPath best_path(const Lattice &lat) {
  const Fst &fst = lat.fst;
  if (fst.Start() == kNoStateId || fst.NumStates() == 0)
    throw EmptyResultError("utterance " + lat.utt_id + ": empty lattice");
  const SymbolTable *syms = fst.OutputSymbols().get();
  const size_t n = fst.NumStates();
  struct Back {
    StateId prev = kNoStateId;
    Label olabel = kEpsilon;
  };
  std::vector<double> cost(n, std::numeric_limits<double>::infinity());
  std::vector<Back> back(n);
  auto outputs = [&](StateId s) {
    std::vector<Label> out;
    for (StateId q = s; q != kNoStateId && q != fst.Start(); q = back[q].prev)
      if (back[q].olabel != kEpsilon) out.push_back(back[q].olabel);
    std::reverse(out.begin(), out.end());
    return out;
  };
  cost[fst.Start()] = 0.0;
  for (StateId s : topological_order(fst)) {
    if (std::isinf(cost[s])) continue;
    for (const Arc &a : fst.Arcs(s)) {
      double c = cost[s] + a.weight.Value();
      StateId t = a.nextstate;
      bool take = c < cost[t] && !SameCost(c, cost[t]);
      if (!take && SameCost(c, cost[t])) {
        auto mine = outputs(s);
        if (a.olabel != kEpsilon) mine.push_back(a.olabel);
        take = CompareOutputs(mine, outputs(t), syms) < 0;
      }
      if (take) {
        cost[t] = c;
        back[t] = Back{s, a.olabel};
      }
    }
  }
  StateId best = kNoStateId;
  double best_cost = std::numeric_limits<double>::infinity();
  for (size_t s = 0; s < n; ++s) {
    if (!fst.IsFinal(static_cast<StateId>(s)) || std::isinf(cost[s])) continue;
    double c = cost[s] + fst.Final(static_cast<StateId>(s)).Value();
    bool take = best == kNoStateId || (c < best_cost && !SameCost(c, best_cost));
    if (!take && SameCost(c, best_cost))
      take = CompareOutputs(outputs(static_cast<StateId>(s)), outputs(best), syms) < 0;
    if (take) {
      best = static_cast<StateId>(s);
      best_cost = c;
    }
  }
  if (best == kNoStateId)
    throw EmptyResultError("utterance " + lat.utt_id + ": lattice has no final path");
  return BestPath{outputs(best), best_cost};
}

void write_lattice(const Lattice &lat, std::ostream &os) {
  const Fst &fst = lat.fst;
  if (fst.Start() == kNoStateId) return;
  // Mirrors write_text_fst's numbering: the start state first.
  StateId next = 1;
  for (size_t s = 0; s < fst.NumStates(); ++s) {
    StateId id = static_cast<StateId>(s) == fst.Start() ? 0 : next++;
    os << "# state " << id << " frame "
       << (s < lat.state_frames.size() ? lat.state_frames[s] : 0) << '\n';
  }
  write_text_fst(fst, os);
}

std::string format_best_path(const std::string &utt_id, const BestPath &path,
                             const SymbolTable &words) {
  std::string out = utt_id + '\t';
  for (size_t i = 0; i < path.olabels.size(); ++i) {
    if (i) out += ' ';
    out += words.Symbol(path.olabels[i]);
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "\t%.6f", path.cost);
  return out + buf;
}

}  // namespace wfstd
