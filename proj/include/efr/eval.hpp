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

#ifndef EFR_EVAL_HPP
#define EFR_EVAL_HPP

#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "efr/game.hpp"

namespace efr {

/// Which players' action probabilities enter a reach product.
struct PlayerSubset {
  std::vector<bool> players;  // size num_players
  bool chance = false;

  static PlayerSubset all(const Game& g) {
    return {std::vector<bool>(g.num_players, true), true};
  }
  static PlayerSubset only(const Game& g, PlayerId p) {
    PlayerSubset s{std::vector<bool>(g.num_players, false), false};
    s.players[p] = true;
    return s;
  }
  static PlayerSubset excluding(const Game& g, PlayerId p) {
    PlayerSubset s{std::vector<bool>(g.num_players, true), true};
    s.players[p] = false;
    return s;
  }
  bool contains(PlayerId p) const {
    return p == kChancePlayer ? chance : players.at(p);
  }
};

/// P(h0, h; pi) restricted to `subset`: product of the subset's action
/// probabilities strictly between h0 and h. Returns 1 if h0 == h and 0 if
/// h0 is not a predecessor of h.
inline double reach_prob(const Game& g, const StrategyProfile& pi,
                         HistoryId from, HistoryId h,
                         const PlayerSubset& subset) {
  if (h < 0 || h >= static_cast<HistoryId>(g.nodes.size())) {
    throw std::out_of_range("reach_prob: unknown history id");
  }
  double prod = 1.0;
  HistoryId cur = h;
  while (cur != from) {
    HistoryId par = g.nodes[cur].parent;
    if (par == kNoId) return 0.0;  // from is not a predecessor
    const auto& pn = g.nodes[par];
    int a = g.nodes[cur].incoming_action;
    if (pn.is_chance()) {
      if (subset.chance) prod *= pn.chance_probs[a];
    } else if (subset.contains(pn.player)) {
      prod *= pi.prob(pn.infoset, a);
    }
    cur = par;
  }
  return prod;
}

inline double reach_prob(const Game& g, const StrategyProfile& pi, HistoryId h,
                         const PlayerSubset& subset) {
  return reach_prob(g, pi, g.root(), h, subset);
}

/// P(h(I); pi_i): the owning player's reach of infoset I. Well defined
/// under perfect recall (identical over the infoset's histories).
inline double own_reach(const Game& g, const StrategyProfile& pi,
                        InfosetId i) {
  double prod = 1.0;
  for (const auto& [anc, act] : g.infoset(i).path) prod *= pi.prob(anc, act);
  return prod;
}

/// u_i(pi) for every player.
inline std::vector<double> expected_utility(const Game& g,
                                            const StrategyProfile& pi) {
  std::vector<double> out(g.num_players, 0.0);
  std::function<void(HistoryId, double)> walk = [&](HistoryId h, double p) {
    const auto& n = g.nodes[h];
    if (n.is_terminal()) {
      for (int i = 0; i < g.num_players; ++i) out[i] += p * n.payoffs[i];
      return;
    }
    for (size_t a = 0; a < n.children.size(); ++a) {
      double q = n.is_chance() ? n.chance_probs[a] : pi.prob(n.infoset, a);
      if (q != 0.0) walk(n.children[a], p * q);
    }
  };
  walk(g.root(), 1.0);
  return out;
}

/// One evaluation pass for a fixed profile and player: expected values
/// below every history (for that player) and the player-excluded reach of
/// every history. Gives all counterfactual action values in O(|H|).
class ValuePass {
 public:
  ValuePass(const Game& g, const StrategyProfile& pi, PlayerId player)
      : game_(&g), player_(player), value_below_(g.nodes.size(), 0.0),
        cf_reach_(g.nodes.size(), 0.0) {
    compute_values(g.root(), pi);
    cf_reach_[g.root()] = 1.0;
    compute_reach(g.root(), pi);
  }

  /// Expected utility to `player` below h, under the full profile.
  double value_below(HistoryId h) const { return value_below_[h]; }
  /// P(h; pi_{-player}) including chance.
  double cf_reach(HistoryId h) const { return cf_reach_[h]; }

  /// v_I(a; pi).
  double action_value(InfosetId i, int a) const {
    const auto& is = game_->infoset(i);
    double v = 0.0;
    for (HistoryId h : is.histories) {
      v += cf_reach_[h] * value_below_[game_->node(h).children[a]];
    }
    return v;
  }

  /// All action values at I in one call.
  std::vector<double> action_values(InfosetId i) const {
    const auto& is = game_->infoset(i);
    std::vector<double> v(is.num_actions, 0.0);
    for (HistoryId h : is.histories) {
      const auto& n = game_->node(h);
      for (int a = 0; a < is.num_actions; ++a) {
        v[a] += cf_reach_[h] * value_below_[n.children[a]];
      }
    }
    return v;
  }

 private:
  void compute_values(HistoryId h, const StrategyProfile& pi) {
    const auto& n = game_->node(h);
    if (n.is_terminal()) {
      value_below_[h] = n.payoffs[player_];
      return;
    }
    double v = 0.0;
    for (size_t a = 0; a < n.children.size(); ++a) {
      compute_values(n.children[a], pi);
      double q = n.is_chance() ? n.chance_probs[a] : pi.prob(n.infoset, a);
      v += q * value_below_[n.children[a]];
    }
    value_below_[h] = v;
  }

  void compute_reach(HistoryId h, const StrategyProfile& pi) {
    const auto& n = game_->node(h);
    if (n.is_terminal()) return;
    for (size_t a = 0; a < n.children.size(); ++a) {
      double q;
      if (n.is_chance()) {
        q = n.chance_probs[a];
      } else if (n.player == player_) {
        q = 1.0;
      } else {
        q = pi.prob(n.infoset, a);
      }
      cf_reach_[n.children[a]] = cf_reach_[h] * q;
      compute_reach(n.children[a], pi);
    }
  }

  const Game* game_;
  PlayerId player_;
  std::vector<double> value_below_;
  std::vector<double> cf_reach_;
};

/// v_I(a; pi) by the direct terminal sum.
inline double cf_value(const Game& g, const StrategyProfile& pi, InfosetId i,
                       int a) {
  const auto& is = g.infoset(i);
  if (a < 0 || a >= is.num_actions) {
    throw std::out_of_range("cf_value: action not legal at infoset");
  }
  PlayerSubset minus_i = PlayerSubset::excluding(g, is.player);
  double v = 0.0;
  std::function<void(HistoryId, double)> sum_below = [&](HistoryId h,
                                                         double p) {
    const auto& n = g.nodes[h];
    if (n.is_terminal()) {
      v += p * n.payoffs[is.player];
      return;
    }
    for (size_t b = 0; b < n.children.size(); ++b) {
      double q = n.is_chance() ? n.chance_probs[b] : pi.prob(n.infoset, b);
      if (q != 0.0) sum_below(n.children[b], p * q);
    }
  };
  for (HistoryId h : is.histories) {
    double w = reach_prob(g, pi, h, minus_i);
    if (w != 0.0) sum_below(g.nodes[h].children[a], w);
  }
  return v;
}

/// v_I(dist; pi): expectation of action values under `dist`.
inline double cf_value(const Game& g, const StrategyProfile& pi, InfosetId i,
                       const std::vector<double>& dist) {
  double v = 0.0;
  for (int a = 0; a < g.infoset(i).num_actions; ++a) {
    if (dist[a] != 0.0) v += dist[a] * cf_value(g, pi, i, a);
  }
  return v;
}

/// Counterfactual immediate payoff r(I, a; pi_{-i}): terminal successors
/// only.
inline double immediate_payoff(const Game& g, const StrategyProfile& pi,
                               InfosetId i, int a) {
  const auto& is = g.infoset(i);
  PlayerSubset minus_i = PlayerSubset::excluding(g, is.player);
  double v = 0.0;
  for (HistoryId z : is.terminal_successors[a]) {
    v += reach_prob(g, pi, z, minus_i) * g.nodes[z].payoffs[is.player];
  }
  return v;
}

/// v_I(pi): counterfactual value of following pi from I on, computed by
/// the bottom-up recursion over immediate payoffs and child infosets.
inline double cf_state_value(const Game& g, const StrategyProfile& pi,
                             InfosetId i) {
  const auto& is = g.infoset(i);
  double v = 0.0;
  for (int a = 0; a < is.num_actions; ++a) {
    double pa = pi.prob(i, a);
    if (pa == 0.0) continue;
    double va = immediate_payoff(g, pi, i, a);
    for (InfosetId c : is.children_by_action[a]) {
      va += cf_state_value(g, pi, c);
    }
    v += pa * va;
  }
  return v;
}

/// v_I(a; pi) by the recursive decomposition (immediate payoff plus child
/// state values). Algebraically equal to the direct terminal sum.
inline double cf_value_recursive(const Game& g, const StrategyProfile& pi,
                                 InfosetId i, int a) {
  double v = immediate_payoff(g, pi, i, a);
  for (InfosetId c : g.infoset(i).children_by_action[a]) {
    v += cf_state_value(g, pi, c);
  }
  return v;
}

/// Immediate counterfactual regret of an action map at I:
/// E_{a~phi(pi_i(I))} v_I(a) - E_{a~pi_i(I)} v_I(a). `mapped` gives
/// phi(a) per action.
inline double immediate_cf_regret(const Game& g, const StrategyProfile& pi,
                                  InfosetId i, const std::vector<int>& mapped) {
  const auto& is = g.infoset(i);
  ValuePass pass(g, pi, is.player);
  std::vector<double> v = pass.action_values(i);
  double r = 0.0;
  for (int a = 0; a < is.num_actions; ++a) {
    r += pi.prob(i, a) * (v[mapped[a]] - v[a]);
  }
  return r;
}

/// Best-response value for `player` against pi_{-player}, by expectimax
/// over the player's infoset forest (deepest infosets resolved first).
inline double best_response_value(const Game& g, const StrategyProfile& pi,
                                  PlayerId player) {
  ValuePass pass(g, pi, player);  // only cf_reach is reused below
  std::vector<int> choice(g.infosets.size(), -1);

  // Infosets ordered deepest-first; ids are parents-before-children.
  std::vector<InfosetId> order = g.player_infosets.at(player);
  std::reverse(order.begin(), order.end());

  // Value below a history when `player` plays the chosen best response.
  std::vector<double> memo(g.nodes.size(),
                           std::numeric_limits<double>::quiet_NaN());
  std::function<double(HistoryId)> br_below = [&](HistoryId h) -> double {
    if (!std::isnan(memo[h])) return memo[h];
    const auto& n = g.nodes[h];
    double v;
    if (n.is_terminal()) {
      v = n.payoffs[player];
    } else if (n.is_decision() && n.player == player) {
      v = br_below(n.children[choice[n.infoset]]);
    } else {
      v = 0.0;
      for (size_t a = 0; a < n.children.size(); ++a) {
        double q = n.is_chance() ? n.chance_probs[a] : pi.prob(n.infoset, a);
        if (q != 0.0) v += q * br_below(n.children[a]);
      }
    }
    memo[h] = v;
    return v;
  };

  for (InfosetId i : order) {
    const auto& is = g.infoset(i);
    double best = -std::numeric_limits<double>::infinity();
    int best_a = 0;
    for (int a = 0; a < is.num_actions; ++a) {
      double q = 0.0;
      for (HistoryId h : is.histories) {
        q += pass.cf_reach(h) * br_below(g.nodes[h].children[a]);
      }
      if (q > best) {
        best = q;
        best_a = a;
      }
    }
    choice[i] = best_a;
  }
  // Deepest-first processing means every memoized value was computed with
  // final choices at all infosets below it, so the cache stays valid.
  return br_below(g.root());
}

}  // namespace efr

#endif  // EFR_EVAL_HPP
