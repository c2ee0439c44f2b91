// Copyright 2026 The EFR Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef EFR_DEVIATIONS_HPP
#define EFR_DEVIATIONS_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "efr/eval.hpp"
#include "efr/game.hpp"

namespace efr {

// ---------------------------------------------------------------------------
// Action transformations.
// ---------------------------------------------------------------------------

enum class TransformKind { identity, external, internal };

/// A map A(I) -> A(I) on one infoset's actions: the identity, the constant
/// map to a target, or a single trigger-to-target swap.
struct ActionTransformation {
  TransformKind kind = TransformKind::identity;
  int target = -1;   // external and internal
  int trigger = -1;  // internal only

  int apply(int a) const {
    switch (kind) {
      case TransformKind::identity: return a;
      case TransformKind::external: return target;
      case TransformKind::internal: return a == trigger ? target : a;
    }
    return a;
  }

  bool is_identity() const { return kind == TransformKind::identity; }
  /// True when the deviation player observes the recommended action
  /// (identity and internal reveal it; external hides it).
  bool reveals_recommendation() const {
    return kind != TransformKind::external;
  }

  static ActionTransformation identity() { return {}; }
  static ActionTransformation external_to(int target) {
    return {TransformKind::external, target, -1};
  }
  /// Trigger == target normalizes to the identity.
  static ActionTransformation internal_swap(int trigger, int target) {
    if (trigger == target) return identity();
    return {TransformKind::internal, target, trigger};
  }

  bool operator==(const ActionTransformation&) const = default;
  bool operator<(const ActionTransformation& o) const {
    return std::tie(kind, target, trigger) <
           std::tie(o.kind, o.target, o.trigger);
  }
};

inline std::vector<ActionTransformation> external_transformations(int n) {
  std::vector<ActionTransformation> out;
  out.reserve(n);
  for (int a = 0; a < n; ++a) out.push_back(ActionTransformation::external_to(a));
  return out;
}

/// Non-identity internal transformations: n^2 - n of them.
inline std::vector<ActionTransformation> internal_transformations(int n) {
  std::vector<ActionTransformation> out;
  out.reserve(n * (n - 1));
  for (int t = 0; t < n; ++t) {
    for (int d = 0; d < n; ++d) {
      if (t != d) out.push_back(ActionTransformation::internal_swap(t, d));
    }
  }
  return out;
}

/// Maximal activation omega(Phi): the largest number of transformations
/// moved by any single input.
inline int maximal_activation(const std::vector<ActionTransformation>& phis,
                              int num_actions) {
  int best = 0;
  for (int a = 0; a < num_actions; ++a) {
    int count = 0;
    for (const auto& phi : phis) count += phi.apply(a) != a ? 1 : 0;
    best = std::max(best, count);
  }
  return best;
}

// ---------------------------------------------------------------------------
// Deviation types and their per-infoset EFR parameters.
// ---------------------------------------------------------------------------

enum class DeviationType {
  behavioral,
  tips,
  csps,
  cfps,
  bps,
  action_informed,
  action_blind,
  cf_informed,
  cf_blind,
  cf_ex_in,
  cfps_ex_in,
  tips_ex_in,
};

inline const std::vector<std::pair<std::string, DeviationType>>&
deviation_type_tokens() {
  static const std::vector<std::pair<std::string, DeviationType>> kTokens = {
      {"bhv", DeviationType::behavioral},
      {"tips", DeviationType::tips},
      {"csps", DeviationType::csps},
      {"cfps", DeviationType::cfps},
      {"bps", DeviationType::bps},
      {"act_in", DeviationType::action_informed},
      {"act_blind", DeviationType::action_blind},
      {"cf_in", DeviationType::cf_informed},
      {"cf", DeviationType::cf_blind},
      {"cf_exin", DeviationType::cf_ex_in},
      {"cfps_exin", DeviationType::cfps_ex_in},
      {"tips_exin", DeviationType::tips_ex_in},
  };
  return kTokens;
}

inline DeviationType parse_deviation_type(const std::string& token) {
  for (const auto& [tok, type] : deviation_type_tokens()) {
    if (tok == token) return type;
  }
  throw std::invalid_argument("unknown deviation type token: " + token);
}

inline std::string deviation_type_token(DeviationType type) {
  for (const auto& [tok, t] : deviation_type_tokens()) {
    if (t == type) return tok;
  }
  return "?";
}

inline bool uses_external_set(DeviationType t) {
  switch (t) {
    case DeviationType::bps:
    case DeviationType::action_blind:
    case DeviationType::cf_blind:
    case DeviationType::csps:
    case DeviationType::cf_ex_in:
    case DeviationType::cfps_ex_in:
    case DeviationType::tips_ex_in:
      return true;
    default:
      return false;
  }
}

inline bool uses_internal_set(DeviationType t) {
  switch (t) {
    case DeviationType::bps:
    case DeviationType::action_blind:
    case DeviationType::cf_blind:
      return false;
    default:
      return true;
  }
}

/// Phi_I for the type at infoset I: the external transformations, the
/// non-identity internal ones, or their union.
inline std::vector<ActionTransformation> transformations_at(
    const Game& g, InfosetId i, DeviationType type) {
  int n = g.infoset(i).num_actions;
  std::vector<ActionTransformation> out;
  if (uses_external_set(type)) out = external_transformations(n);
  if (uses_internal_set(type)) {
    auto in = internal_transformations(n);
    out.insert(out.end(), in.begin(), in.end());
  }
  return out;
}

/// Number of non-identity internal transformations allowed before another
/// non-identity transformation along one line of play, for the type.
inline int internal_chain_length(DeviationType t, int d_star) {
  switch (t) {
    case DeviationType::behavioral: return d_star;
    case DeviationType::tips:
    case DeviationType::tips_ex_in:
    case DeviationType::csps:
      return 1;
    default:
      return 0;
  }
}

// ---------------------------------------------------------------------------
// Time selection keys.
// ---------------------------------------------------------------------------

/// A per-round weight derived from the learner's own strategy: constant 1,
/// the own reach of an infoset, that reach times one action probability,
/// or an explicit product along a prefix of the infoset forest.
struct TimeSelectionKey {
  enum class Kind { constant_one, reach_at, reach_and_action, memory_prefix };

  Kind kind = Kind::constant_one;
  InfosetId infoset = kNoId;  // reach_at / reach_and_action
  int action = -1;            // reach_and_action
  std::vector<std::pair<InfosetId, int>> chain;  // memory_prefix

  /// Keys are normalized so that equal weight functions compare equal:
  /// the reach of a forest-root infoset and the empty prefix are the
  /// constant 1.
  static TimeSelectionKey constant_one() { return {}; }

  static TimeSelectionKey reach_at(const Game& g, InfosetId i) {
    if (g.infoset(i).depth == 0) return constant_one();
    TimeSelectionKey k;
    k.kind = Kind::reach_at;
    k.infoset = i;
    return k;
  }

  static TimeSelectionKey reach_and_action(InfosetId i, int a) {
    TimeSelectionKey k;
    k.kind = Kind::reach_and_action;
    k.infoset = i;
    k.action = a;
    return k;
  }

  static TimeSelectionKey memory_prefix(
      std::vector<std::pair<InfosetId, int>> chain) {
    if (chain.empty()) return constant_one();
    TimeSelectionKey k;
    k.kind = Kind::memory_prefix;
    k.chain = std::move(chain);
    return k;
  }

  bool operator==(const TimeSelectionKey&) const = default;
  bool operator<(const TimeSelectionKey& o) const {
    return std::tie(kind, infoset, action, chain) <
           std::tie(o.kind, o.infoset, o.action, o.chain);
  }
};

/// Evaluates a key against the owning player's current strategy.
inline double key_weight(const Game& g, const StrategyProfile& pi,
                         const TimeSelectionKey& key) {
  switch (key.kind) {
    case TimeSelectionKey::Kind::constant_one:
      return 1.0;
    case TimeSelectionKey::Kind::reach_at:
      return own_reach(g, pi, key.infoset);
    case TimeSelectionKey::Kind::reach_and_action:
      return own_reach(g, pi, key.infoset) * pi.prob(key.infoset, key.action);
    case TimeSelectionKey::Kind::memory_prefix: {
      double w = 1.0;
      for (const auto& [i, a] : key.chain) w *= pi.prob(i, a);
      return w;
    }
  }
  return 1.0;
}

namespace detail {

inline std::vector<TimeSelectionKey> reach_keys_inclusive(const Game& g,
                                                          InfosetId i) {
  // {1} u {reach(I!!) : I!! <= I}; the forest-root entry collapses into
  // the constant.
  std::set<TimeSelectionKey> keys;
  keys.insert(TimeSelectionKey::constant_one());
  for (const auto& [anc, act] : g.infoset(i).path) {
    keys.insert(TimeSelectionKey::reach_at(g, anc));
  }
  keys.insert(TimeSelectionKey::reach_at(g, i));
  return {keys.begin(), keys.end()};
}

inline std::vector<TimeSelectionKey> trigger_keys_strict(const Game& g,
                                                         InfosetId i) {
  // {1} u {reach(I!!) * pi(a!!|I!!) : I!! < I, a!! in A(I!!)}.
  std::set<TimeSelectionKey> keys;
  keys.insert(TimeSelectionKey::constant_one());
  for (const auto& [anc, act] : g.infoset(i).path) {
    for (int a = 0; a < g.infoset(anc).num_actions; ++a) {
      keys.insert(TimeSelectionKey::reach_and_action(anc, a));
    }
  }
  return {keys.begin(), keys.end()};
}

inline std::vector<TimeSelectionKey> memory_prefix_keys(const Game& g,
                                                        InfosetId i) {
  // {1} u, for every proper prefix of I's forest path, every assignment
  // of actions along that prefix.
  std::vector<TimeSelectionKey> keys;
  keys.push_back(TimeSelectionKey::constant_one());
  const auto& path = g.infoset(i).path;
  std::vector<std::pair<InfosetId, int>> chain;
  std::function<void(size_t, size_t)> fill = [&](size_t k, size_t len) {
    if (k == len) {
      keys.push_back(TimeSelectionKey::memory_prefix(chain));
      return;
    }
    InfosetId anc = path[k].first;
    for (int a = 0; a < g.infoset(anc).num_actions; ++a) {
      chain.emplace_back(anc, a);
      fill(k + 1, len);
      chain.pop_back();
    }
  };
  for (size_t len = 1; len <= path.size(); ++len) fill(0, len);
  return keys;
}

}  // namespace detail

/// W_I^Phi(phi_I) for the configured type.
inline std::vector<TimeSelectionKey> time_selection_keys(
    const Game& g, InfosetId i, const ActionTransformation& phi,
    DeviationType type) {
  switch (type) {
    case DeviationType::cf_blind:
    case DeviationType::cf_informed:
    case DeviationType::cf_ex_in:
      return {TimeSelectionKey::constant_one()};
    case DeviationType::action_blind:
    case DeviationType::action_informed:
      return {TimeSelectionKey::reach_at(g, i)};
    case DeviationType::bps:
    case DeviationType::cfps:
    case DeviationType::cfps_ex_in:
      return detail::reach_keys_inclusive(g, i);
    case DeviationType::tips:
    case DeviationType::tips_ex_in:
      return detail::trigger_keys_strict(g, i);
    case DeviationType::csps:
      if (phi.kind == TransformKind::external) {
        return detail::trigger_keys_strict(g, i);
      }
      return {TimeSelectionKey::reach_at(g, i)};
    case DeviationType::behavioral:
      return detail::memory_prefix_keys(g, i);
  }
  throw std::logic_error("unreachable");
}

// ---------------------------------------------------------------------------
// Memory states.
// ---------------------------------------------------------------------------

/// The deviation player's record at an infoset: one symbol per own-path
/// predecessor, either a revealed action or the hidden-symbol star.
struct MemoryState {
  static constexpr int kStar = -1;
  std::vector<int> symbols;

  bool operator==(const MemoryState&) const = default;
  bool operator<(const MemoryState& o) const { return symbols < o.symbols; }

  MemoryState extended(int symbol) const {
    MemoryState m = *this;
    m.symbols.push_back(symbol);
    return m;
  }

  std::string str() const {
    std::string s;
    for (int v : symbols) s += v == kStar ? "*" : std::to_string(v);
    return s;
  }
};

// ---------------------------------------------------------------------------
// Behavioral deviations.
// ---------------------------------------------------------------------------

/// An assignment of an action transformation to every (infoset, memory
/// state) pair of one player.
class BehavioralDeviation {
 public:
  virtual ~BehavioralDeviation() = default;
  virtual PlayerId player() const = 0;
  virtual ActionTransformation transform_at(const Game& g, InfosetId i,
                                            const MemoryState& memory)
      const = 0;
  /// Pruning hint: may return true only when the deviation applies the
  /// identity at `i` and at every successor reachable with memory prefix
  /// `memory`. Returning false is always sound.
  virtual bool identity_below(const Game& g, InfosetId i,
                              const MemoryState& memory) const {
    return false;
  }
};

/// w_phi(I, g; pi_i): probability that the deviation player holds memory
/// `g` at `i`, given mixed recommendations pi_i. Walks I's forest path,
/// splitting on the recommendation at each step.
inline double memory_probability(const Game& g, const BehavioralDeviation& dev,
                                 InfosetId i, const MemoryState& memory,
                                 const StrategyProfile& pi) {
  const auto& path = g.infoset(i).path;
  if (memory.symbols.size() != path.size()) {
    throw std::invalid_argument("memory length != infoset depth");
  }
  double w = 1.0;
  MemoryState prefix;
  for (size_t k = 0; k < path.size() && w > 0.0; ++k) {
    auto [anc, path_action] = path[k];
    ActionTransformation phi = dev.transform_at(g, anc, prefix);
    int b = memory.symbols[k];
    // Sum pi(a | anc) over recommendations a with phi(a) = the path action
    // and observation o(a; phi) = b.
    double step = 0.0;
    for (int a = 0; a < g.infoset(anc).num_actions; ++a) {
      if (phi.apply(a) != path_action) continue;
      int obs = phi.reveals_recommendation() ? a : MemoryState::kStar;
      if (obs == b) step += pi.prob(anc, a);
    }
    w *= step;
    prefix = prefix.extended(b);
  }
  return w;
}

/// Memory states realizable at `i` under the deviation (those reachable
/// with probability one for some pure recommendation sequence).
inline std::vector<MemoryState> realizable_memories(
    const Game& g, const BehavioralDeviation& dev, InfosetId i) {
  const auto& path = g.infoset(i).path;
  std::vector<MemoryState> frontier{MemoryState{}};
  for (auto [anc, path_action] : path) {
    std::vector<MemoryState> next;
    for (const auto& m : frontier) {
      ActionTransformation phi = dev.transform_at(g, anc, m);
      std::set<int> symbols;
      for (int a = 0; a < g.infoset(anc).num_actions; ++a) {
        if (phi.apply(a) != path_action) continue;
        symbols.insert(phi.reveals_recommendation() ? a : MemoryState::kStar);
      }
      for (int b : symbols) next.push_back(m.extended(b));
    }
    frontier = std::move(next);
  }
  return frontier;
}

// ---------------------------------------------------------------------------
// Pure strategies.
// ---------------------------------------------------------------------------

inline double num_pure_strategies(const Game& g, PlayerId p) {
  double n = 1.0;
  for (InfosetId i : g.player_infosets.at(p)) n *= g.infoset(i).num_actions;
  return n;
}

/// Mixed-radix decoding of a pure strategy index.
inline PureStrategy pure_strategy_from_index(const Game& g, PlayerId p,
                                             uint64_t index) {
  const auto& list = g.player_infosets.at(p);
  PureStrategy s(list.size());
  for (size_t k = 0; k < list.size(); ++k) {
    int n = g.infoset(list[k]).num_actions;
    s[k] = static_cast<int>(index % n);
    index /= n;
  }
  return s;
}

inline uint64_t pure_strategy_index(const Game& g, PlayerId p,
                                    const PureStrategy& s) {
  const auto& list = g.player_infosets.at(p);
  uint64_t index = 0;
  for (size_t k = list.size(); k-- > 0;) {
    index = index * g.infoset(list[k]).num_actions + s[k];
  }
  return index;
}

/// Probability of a pure strategy under a behavioral strategy (product of
/// its action probabilities; realization-equivalent factorization).
inline double pure_strategy_prob(const Game& g, PlayerId p,
                                 const StrategyProfile& pi,
                                 const PureStrategy& s) {
  const auto& list = g.player_infosets.at(p);
  double prob = 1.0;
  for (size_t k = 0; k < list.size(); ++k) prob *= pi.prob(list[k], s[k]);
  return prob;
}

// ---------------------------------------------------------------------------
// The named deviation families (single-deviation parameterizations).
// ---------------------------------------------------------------------------

enum class DevFamily {
  cf_blind,
  cf_informed,
  action_blind,
  action_informed,
  bps,
  cfps,
  csps,
  tips,
  behavioral_chain,  // trigger/target pattern over every infoset
  behavioral_point,  // one (target, memory, swap) triple
  causal_blind,
  causal_informed,
};

/// One concrete deviation with the usual trigger/target parameters, a
/// pure-strategy map via apply(), and the corresponding behavioral
/// deviation via transform_at().
class TableDeviation : public BehavioralDeviation {
 public:
  DevFamily family;
  PlayerId owner = 0;
  InfosetId trigger_infoset = kNoId;  // I!!
  int trigger_action = -1;            // a!!
  InfosetId target_infoset = kNoId;   // I(.)
  int target_action = -1;             // a(.)
  int target_trigger = -1;            // a(.)!!, the swap trigger at the target
  PureStrategy play;                  // s' for causal deviations
  // behavioral_chain: per player-infoset position, (a!!_I, a'_I).
  std::vector<int> chain_trigger;
  std::vector<int> chain_target;
  // behavioral_point: required memory along the target's path.
  std::vector<int> point_memory;

  PlayerId player() const override { return owner; }

  /// The transformed action at infoset `i` when the recommended pure
  /// strategy is `s` (indexed by player-infoset position).
  int apply(const Game& g, const PureStrategy& s, InfosetId i) const {
    const auto& is = g.infoset(i);
    int si = s[is.position];
    auto rec = [&](InfosetId j) { return s[g.infoset(j).position]; };
    switch (family) {
      case DevFamily::cf_blind:
        if (i == target_infoset) return target_action;
        if (g.infoset_precedes(i, target_infoset)) {
          return g.action_toward(i, target_infoset);
        }
        return si;
      case DevFamily::cf_informed:
        if (i == target_infoset) {
          return si == target_trigger ? target_action : si;
        }
        if (g.infoset_precedes(i, target_infoset)) {
          return g.action_toward(i, target_infoset);
        }
        return si;
      case DevFamily::action_blind:
        return i == trigger_infoset ? target_action : si;
      case DevFamily::action_informed:
        if (i == trigger_infoset && si == trigger_action) return target_action;
        return si;
      case DevFamily::bps:
        if (i == target_infoset) return target_action;
        if (on_segment(g, i)) return g.action_toward(i, target_infoset);
        return si;
      case DevFamily::cfps:
        if (i == target_infoset) {
          return si == target_trigger ? target_action : si;
        }
        if (on_segment(g, i)) return g.action_toward(i, target_infoset);
        return si;
      case DevFamily::csps:
        if (rec(trigger_infoset) != trigger_action) return si;
        if (i == target_infoset) return target_action;
        if (on_segment(g, i)) return g.action_toward(i, target_infoset);
        return si;
      case DevFamily::tips:
        if (rec(trigger_infoset) != trigger_action) return si;
        if (i == target_infoset) {
          return si == target_trigger ? target_action : si;
        }
        if (on_segment(g, i)) return g.action_toward(i, target_infoset);
        return si;
      case DevFamily::behavioral_chain: {
        for (const auto& [anc, act] : is.path) {
          if (rec(anc) != chain_trigger[g.infoset(anc).position]) return si;
        }
        if (si != chain_trigger[is.position]) return si;
        return chain_target[is.position];
      }
      case DevFamily::behavioral_point: {
        if (i != target_infoset || si != target_trigger) return si;
        const auto& path = is.path;
        for (size_t k = 0; k < path.size(); ++k) {
          if (rec(path[k].first) != point_memory[k]) return si;
        }
        return target_action;
      }
      case DevFamily::causal_blind:
        if (g.infoset_precedes(trigger_infoset, i)) {
          return play[is.position];
        }
        return si;
      case DevFamily::causal_informed:
        if (g.infoset_precedes(trigger_infoset, i) &&
            rec(trigger_infoset) == trigger_action) {
          return play[is.position];
        }
        return si;
    }
    return si;
  }

  /// Full pure-strategy map.
  PureStrategy apply(const Game& g, const PureStrategy& s) const {
    const auto& list = g.player_infosets.at(owner);
    PureStrategy out(list.size());
    for (size_t k = 0; k < list.size(); ++k) out[k] = apply(g, s, list[k]);
    return out;
  }

  ActionTransformation transform_at(const Game& g, InfosetId i,
                                    const MemoryState& memory) const override {
    const auto& is = g.infoset(i);
    switch (family) {
      case DevFamily::cf_blind:
        if (i == target_infoset) {
          return ActionTransformation::external_to(target_action);
        }
        if (g.infoset_precedes(i, target_infoset)) {
          return ActionTransformation::external_to(
              g.action_toward(i, target_infoset));
        }
        return {};
      case DevFamily::cf_informed:
        if (i == target_infoset) {
          return ActionTransformation::internal_swap(target_trigger,
                                                     target_action);
        }
        if (g.infoset_precedes(i, target_infoset)) {
          return ActionTransformation::external_to(
              g.action_toward(i, target_infoset));
        }
        return {};
      case DevFamily::action_blind:
        if (i == trigger_infoset) {
          return ActionTransformation::external_to(target_action);
        }
        return {};
      case DevFamily::action_informed:
        if (i == trigger_infoset) {
          return ActionTransformation::internal_swap(trigger_action,
                                                     target_action);
        }
        return {};
      case DevFamily::bps:
        if (i == target_infoset) {
          return ActionTransformation::external_to(target_action);
        }
        if (on_segment(g, i)) {
          return ActionTransformation::external_to(
              g.action_toward(i, target_infoset));
        }
        return {};
      case DevFamily::cfps:
        if (i == target_infoset) {
          return ActionTransformation::internal_swap(target_trigger,
                                                     target_action);
        }
        if (on_segment(g, i)) {
          return ActionTransformation::external_to(
              g.action_toward(i, target_infoset));
        }
        return {};
      case DevFamily::csps:
        if (i == trigger_infoset) {
          // Trigger and target may coincide.
          int out = i == target_infoset ? target_action
                                        : g.action_toward(i, target_infoset);
          return ActionTransformation::internal_swap(trigger_action, out);
        }
        if ((i == target_infoset || on_segment(g, i)) && fired(g, i, memory)) {
          int out = i == target_infoset ? target_action
                                        : g.action_toward(i, target_infoset);
          return ActionTransformation::external_to(out);
        }
        return {};
      case DevFamily::tips:
        if (i == trigger_infoset) {
          return ActionTransformation::internal_swap(
              trigger_action, g.action_toward(i, target_infoset));
        }
        if (i == target_infoset && fired(g, i, memory)) {
          return ActionTransformation::internal_swap(target_trigger,
                                                     target_action);
        }
        if (on_segment(g, i) && fired(g, i, memory)) {
          return ActionTransformation::external_to(
              g.action_toward(i, target_infoset));
        }
        return {};
      case DevFamily::behavioral_chain: {
        for (size_t k = 0; k < is.path.size(); ++k) {
          InfosetId anc = is.path[k].first;
          if (memory.symbols[k] !=
              chain_trigger[g.infoset(anc).position]) {
            return {};
          }
        }
        return ActionTransformation::internal_swap(chain_trigger[is.position],
                                                   chain_target[is.position]);
      }
      case DevFamily::behavioral_point:
        if (i == target_infoset && memory.symbols == point_memory) {
          return ActionTransformation::internal_swap(target_trigger,
                                                     target_action);
        }
        return {};
      case DevFamily::causal_blind:
        if (g.infoset_precedes(trigger_infoset, i)) {
          return ActionTransformation::external_to(play[is.position]);
        }
        return {};
      case DevFamily::causal_informed:
        if (i == trigger_infoset) {
          return ActionTransformation::internal_swap(trigger_action,
                                                     play[is.position]);
        }
        if (g.infoset_precedes(trigger_infoset, i) && fired(g, i, memory)) {
          return ActionTransformation::external_to(play[is.position]);
        }
        return {};
    }
    return {};
  }

  bool identity_below(const Game& g, InfosetId i,
                      const MemoryState& memory) const override {
    switch (family) {
      case DevFamily::cf_blind:
      case DevFamily::cf_informed:
      case DevFamily::bps:
      case DevFamily::cfps:
        return !g.infoset_precedes(i, target_infoset);
      case DevFamily::csps:
      case DevFamily::tips:
        if (!g.infoset_precedes(i, target_infoset)) return true;
        // Once past the trigger with a non-matching record, nothing fires.
        return strictly_after_trigger(g, i) && !fired(g, i, memory);
      case DevFamily::action_blind:
      case DevFamily::action_informed:
        return !g.infoset_precedes(i, trigger_infoset);
      case DevFamily::behavioral_chain: {
        const auto& path = g.infoset(i).path;
        for (size_t k = 0; k < path.size(); ++k) {
          if (memory.symbols[k] !=
              chain_trigger[g.infoset(path[k].first).position]) {
            return true;
          }
        }
        return false;
      }
      case DevFamily::behavioral_point: {
        if (!g.infoset_precedes(i, target_infoset)) return true;
        const auto& path = g.infoset(i).path;
        for (size_t k = 0; k < path.size(); ++k) {
          if (memory.symbols[k] != point_memory[k]) return true;
        }
        return false;
      }
      case DevFamily::causal_blind:
        return !g.infoset_precedes(trigger_infoset, i) &&
               !g.infoset_precedes(i, trigger_infoset);
      case DevFamily::causal_informed:
        if (!g.infoset_precedes(trigger_infoset, i) &&
            !g.infoset_precedes(i, trigger_infoset)) {
          return true;
        }
        return strictly_after_trigger(g, i) && !fired(g, i, memory);
    }
    return false;
  }

 private:
  /// True when i lies strictly between the trigger and the target on the
  /// target's forest path (trigger included, target excluded).
  bool on_segment(const Game& g, InfosetId i) const {
    if (i == target_infoset) return false;
    if (!g.infoset_precedes(i, target_infoset)) return false;
    return trigger_infoset == kNoId || i == trigger_infoset ||
           g.infoset_precedes(trigger_infoset, i);
  }

  bool strictly_after_trigger(const Game& g, InfosetId i) const {
    return i != trigger_infoset && g.infoset_precedes(trigger_infoset, i);
  }

  /// For informed families: whether the memory records the trigger action
  /// at the trigger infoset's position on i's path.
  bool fired(const Game& g, InfosetId i, const MemoryState& memory) const {
    const auto& path = g.infoset(i).path;
    for (size_t k = 0; k < path.size(); ++k) {
      if (path[k].first == trigger_infoset) {
        return memory.symbols[k] == trigger_action;
      }
    }
    return false;  // trigger not on the path: never fired
  }
};

// ---------------------------------------------------------------------------
// Enumeration and counting.
// ---------------------------------------------------------------------------

struct EnumerationBudget {
  double max_pure_evals = 1e7;
};

/// Enumerates the family's deviation set for one player. Throws when the
/// family requires pure-strategy enumeration beyond the budget.
inline std::vector<TableDeviation> enumerate_family(
    const Game& g, PlayerId p, DevFamily family,
    const EnumerationBudget& budget = {}) {
  std::vector<TableDeviation> out;
  const auto& infosets = g.player_infosets.at(p);

  auto base = [&](DevFamily f) {
    TableDeviation d;
    d.family = f;
    d.owner = p;
    return d;
  };

  switch (family) {
    case DevFamily::cf_blind:
      for (InfosetId tgt : infosets) {
        for (int a = 0; a < g.infoset(tgt).num_actions; ++a) {
          auto d = base(family);
          d.target_infoset = tgt;
          d.target_action = a;
          out.push_back(d);
        }
      }
      break;
    case DevFamily::cf_informed:
      for (InfosetId tgt : infosets) {
        int n = g.infoset(tgt).num_actions;
        for (int trig = 0; trig < n; ++trig) {
          for (int a = 0; a < n; ++a) {
            auto d = base(family);
            d.target_infoset = tgt;
            d.target_trigger = trig;
            d.target_action = a;
            out.push_back(d);
          }
        }
      }
      break;
    case DevFamily::action_blind:
      for (InfosetId i : infosets) {
        for (int a = 0; a < g.infoset(i).num_actions; ++a) {
          auto d = base(family);
          d.trigger_infoset = i;
          d.target_action = a;
          out.push_back(d);
        }
      }
      break;
    case DevFamily::action_informed:
      for (InfosetId i : infosets) {
        int n = g.infoset(i).num_actions;
        for (int trig = 0; trig < n; ++trig) {
          for (int a = 0; a < n; ++a) {
            if (trig == a) continue;  // identity
            auto d = base(family);
            d.trigger_infoset = i;
            d.trigger_action = trig;
            d.target_action = a;
            out.push_back(d);
          }
        }
      }
      break;
    case DevFamily::bps:
    case DevFamily::cfps:
      for (InfosetId tgt : infosets) {
        std::vector<InfosetId> starts;
        for (const auto& [anc, act] : g.infoset(tgt).path) {
          starts.push_back(anc);
        }
        starts.push_back(tgt);
        int n = g.infoset(tgt).num_actions;
        for (InfosetId start : starts) {
          for (int a = 0; a < n; ++a) {
            if (family == DevFamily::bps) {
              auto d = base(family);
              d.trigger_infoset = start;
              d.target_infoset = tgt;
              d.target_action = a;
              out.push_back(d);
            } else {
              for (int trig = 0; trig < n; ++trig) {
                auto d = base(family);
                d.trigger_infoset = start;
                d.target_infoset = tgt;
                d.target_trigger = trig;
                d.target_action = a;
                out.push_back(d);
              }
            }
          }
        }
      }
      break;
    case DevFamily::csps:
    case DevFamily::tips:
      for (InfosetId tgt : infosets) {
        const auto& path = g.infoset(tgt).path;
        int n = g.infoset(tgt).num_actions;
        std::vector<InfosetId> starts;
        for (const auto& [anc, act] : path) starts.push_back(anc);
        if (family == DevFamily::csps) starts.push_back(tgt);
        for (InfosetId start : starts) {
          int nt = g.infoset(start).num_actions;
          for (int trig = 0; trig < nt; ++trig) {
            for (int a = 0; a < n; ++a) {
              if (family == DevFamily::csps) {
                if (start == tgt && trig == a) continue;  // identity
                auto d = base(family);
                d.trigger_infoset = start;
                d.trigger_action = trig;
                d.target_infoset = tgt;
                d.target_action = a;
                out.push_back(d);
              } else {
                for (int tt = 0; tt < n; ++tt) {
                  auto d = base(family);
                  d.trigger_infoset = start;
                  d.trigger_action = trig;
                  d.target_infoset = tgt;
                  d.target_trigger = tt;
                  d.target_action = a;
                  out.push_back(d);
                }
              }
            }
          }
        }
      }
      break;
    case DevFamily::behavioral_point:
      for (InfosetId tgt : infosets) {
        const auto& path = g.infoset(tgt).path;
        int n = g.infoset(tgt).num_actions;
        std::vector<int> memory(path.size(), 0);
        std::function<void(size_t)> fill = [&](size_t k) {
          if (k == path.size()) {
            for (int trig = 0; trig < n; ++trig) {
              for (int a = 0; a < n; ++a) {
                if (trig == a) continue;
                auto d = base(DevFamily::behavioral_point);
                d.target_infoset = tgt;
                d.target_trigger = trig;
                d.target_action = a;
                d.point_memory = memory;
                out.push_back(d);
              }
            }
            return;
          }
          for (int a = 0; a < g.infoset(path[k].first).num_actions; ++a) {
            memory[k] = a;
            fill(k + 1);
          }
        };
        fill(0);
      }
      break;
    case DevFamily::behavioral_chain: {
      // All (trigger, target) assignments over every infoset.
      double combos = 1.0;
      for (InfosetId i : infosets) {
        int n = g.infoset(i).num_actions;
        combos *= n * n;
      }
      if (combos > budget.max_pure_evals) {
        throw std::runtime_error("behavioral chain enumeration over budget");
      }
      std::vector<int> trig(infosets.size(), 0), tgtv(infosets.size(), 0);
      std::function<void(size_t)> fill = [&](size_t k) {
        if (k == infosets.size()) {
          auto d = base(DevFamily::behavioral_chain);
          d.chain_trigger = trig;
          d.chain_target = tgtv;
          out.push_back(d);
          return;
        }
        int n = g.infoset(infosets[k]).num_actions;
        for (int t = 0; t < n; ++t) {
          for (int a = 0; a < n; ++a) {
            trig[k] = t;
            tgtv[k] = a;
            fill(k + 1);
          }
        }
      };
      fill(0);
      break;
    }
    case DevFamily::causal_blind:
    case DevFamily::causal_informed:
      for (InfosetId start : infosets) {
        // Assign s' over the infosets weakly after `start`; elsewhere s'
        // never acts, fixed to action 0.
        std::vector<InfosetId> region;
        for (InfosetId i : infosets) {
          if (g.infoset_precedes(start, i)) region.push_back(i);
        }
        double combos = 1.0;
        for (InfosetId i : region) combos *= g.infoset(i).num_actions;
        if (combos * (family == DevFamily::causal_informed
                          ? g.infoset(start).num_actions
                          : 1) >
            budget.max_pure_evals) {
          throw std::runtime_error("causal enumeration over budget");
        }
        PureStrategy play(infosets.size(), 0);
        std::function<void(size_t)> fill = [&](size_t k) {
          if (k == region.size()) {
            if (family == DevFamily::causal_blind) {
              auto d = base(family);
              d.trigger_infoset = start;
              d.play = play;
              out.push_back(d);
            } else {
              for (int trig = 0; trig < g.infoset(start).num_actions;
                   ++trig) {
                auto d = base(family);
                d.trigger_infoset = start;
                d.trigger_action = trig;
                d.play = play;
                out.push_back(d);
              }
            }
            return;
          }
          for (int a = 0; a < g.infoset(region[k]).num_actions; ++a) {
            play[g.infoset(region[k]).position] = a;
            fill(k + 1);
          }
        };
        fill(0);
      }
      break;
  }
  return out;
}

/// Induced pure-strategy map: out[index(s)] = index(phi(s)). Small games
/// only.
inline std::vector<uint32_t> induced_map(const Game& g, PlayerId p,
                                         const TableDeviation& dev,
                                         const EnumerationBudget& budget = {}) {
  double n = num_pure_strategies(g, p);
  if (n > budget.max_pure_evals) {
    throw std::runtime_error("pure strategy enumeration over budget");
  }
  uint64_t count = static_cast<uint64_t>(n);
  std::vector<uint32_t> out(count);
  for (uint64_t s = 0; s < count; ++s) {
    PureStrategy ps = pure_strategy_from_index(g, p, s);
    out[s] =
        static_cast<uint32_t>(pure_strategy_index(g, p, dev.apply(g, ps)));
  }
  return out;
}

/// [phi pi](s') = sum over the preimage of s' of pi(s).
inline std::vector<double> pushforward(const Game& g, PlayerId p,
                                       const TableDeviation& dev,
                                       const std::vector<double>& mixed,
                                       const EnumerationBudget& budget = {}) {
  auto map = induced_map(g, p, dev, budget);
  std::vector<double> out(mixed.size(), 0.0);
  for (size_t s = 0; s < mixed.size(); ++s) out[map[s]] += mixed[s];
  return out;
}

/// Exact deviation count after removing identity-equivalent duplicates.
/// When the pure-strategy space fits the budget the count is over induced
/// maps; otherwise it falls back to the parameter count with structural
/// identity removal only.
inline size_t count_deviations(const Game& g, PlayerId p, DevFamily family,
                               const EnumerationBudget& budget = {}) {
  auto devs = enumerate_family(g, p, family, budget);
  double pure = num_pure_strategies(g, p);
  if (pure * static_cast<double>(devs.size()) <= budget.max_pure_evals) {
    std::set<std::vector<uint32_t>> maps;
    std::vector<uint32_t> ident(static_cast<size_t>(pure));
    for (size_t s = 0; s < ident.size(); ++s) ident[s] = s;
    for (const auto& d : devs) {
      auto m = induced_map(g, p, d, budget);
      if (m != ident) maps.insert(std::move(m));
    }
    return maps.size();
  }
  return devs.size();
}

}  // namespace efr

#endif  // EFR_DEVIATIONS_HPP
