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

#ifndef EFR_AUDIT_HPP
#define EFR_AUDIT_HPP

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "efr/deviations.hpp"
#include "efr/eval.hpp"
#include "efr/game.hpp"

namespace efr {

// ---------------------------------------------------------------------------
// Per-round context shared by the brute-force evaluations.
// ---------------------------------------------------------------------------

/// Precomputed quantities for one (profile, player): immediate payoffs
/// r(I, a; pi_{-i}) and on-path state values v_I(pi).
class AuditContext {
 public:
  AuditContext(const Game& g, const StrategyProfile& pi, PlayerId player)
      : game_(&g), profile_(&pi), player_(player) {
    ValuePass pass(g, pi, player);
    const auto& list = g.player_infosets.at(player);
    imm_.resize(g.infosets.size());
    state_value_.assign(g.infosets.size(), 0.0);
    for (InfosetId i : list) {
      const auto& is = g.infoset(i);
      imm_[i].assign(is.num_actions, 0.0);
      for (int a = 0; a < is.num_actions; ++a) {
        double r = 0.0;
        for (HistoryId z : is.terminal_successors[a]) {
          r += pass.cf_reach(z) * g.node(z).payoffs[player];
        }
        imm_[i][a] = r;
      }
    }
    // v_I(pi) bottom-up: deeper infosets first (reverse id order).
    for (auto it = list.rbegin(); it != list.rend(); ++it) {
      InfosetId i = *it;
      const auto& is = g.infoset(i);
      double v = 0.0;
      for (int a = 0; a < is.num_actions; ++a) {
        double va = imm_[i][a];
        for (InfosetId c : is.children_by_action[a]) va += state_value_[c];
        v += pi.prob(i, a) * va;
      }
      state_value_[i] = v;
    }
  }

  const Game& game() const { return *game_; }
  const StrategyProfile& profile() const { return *profile_; }
  PlayerId player() const { return player_; }
  double immediate(InfosetId i, int a) const { return imm_[i][a]; }
  /// v_I(pi): counterfactual value of following the profile from I.
  double state_value(InfosetId i) const { return state_value_[i]; }

 private:
  const Game* game_;
  const StrategyProfile* profile_;
  PlayerId player_;
  std::vector<std::vector<double>> imm_;
  std::vector<double> state_value_;
};

// ---------------------------------------------------------------------------
// Behavioral-deviation values and full regret.
// ---------------------------------------------------------------------------

/// v-hat_{I,g}(phi; pi): expected value of the deviation from (I, g), by
/// the recursive definition over immediate payoffs and successor
/// (infoset, memory) pairs.
inline double deviation_cf_value(const AuditContext& ctx,
                                 const BehavioralDeviation& dev, InfosetId i,
                                 const MemoryState& memory) {
  const Game& g = ctx.game();
  if (dev.identity_below(g, i, memory)) return ctx.state_value(i);
  const auto& is = g.infoset(i);
  ActionTransformation phi = dev.transform_at(g, i, memory);
  double v = 0.0;
  for (int a = 0; a < is.num_actions; ++a) {
    double pa = ctx.profile().prob(i, a);
    if (pa == 0.0) continue;
    int out = phi.apply(a);
    double va = ctx.immediate(i, out);
    MemoryState next = memory.extended(
        phi.reveals_recommendation() ? a : MemoryState::kStar);
    for (InfosetId c : is.children_by_action[out]) {
      va += deviation_cf_value(ctx, dev, c, next);
    }
    v += pa * va;
  }
  return v;
}

/// Full regret rho_{I,g}(phi; pi) = w_phi(I, g; pi_i) (v-hat - v_I(pi)).
inline double full_regret(const AuditContext& ctx,
                          const BehavioralDeviation& dev, InfosetId i,
                          const MemoryState& memory) {
  double w = memory_probability(ctx.game(), dev, i, memory, ctx.profile());
  if (w == 0.0) return 0.0;
  return w * (deviation_cf_value(ctx, dev, i, memory) - ctx.state_value(i));
}

/// Immediate regret rho_I(phi_{<=I, <=g}; pi) = w * rho^cf_I(phi_{I,g}).
inline double immediate_regret(const AuditContext& ctx,
                               const BehavioralDeviation& dev, InfosetId i,
                               const MemoryState& memory) {
  const Game& g = ctx.game();
  double w = memory_probability(g, dev, i, memory, ctx.profile());
  if (w == 0.0) return 0.0;
  ActionTransformation phi = dev.transform_at(g, i, memory);
  const auto& is = g.infoset(i);
  double transformed = 0.0;
  for (int a = 0; a < is.num_actions; ++a) {
    double pa = ctx.profile().prob(i, a);
    if (pa == 0.0) continue;
    int out = phi.apply(a);
    double va = ctx.immediate(i, out);
    for (InfosetId c : is.children_by_action[out]) va += ctx.state_value(c);
    transformed += pa * va;
  }
  return w * (transformed - ctx.state_value(i));
}

// ---------------------------------------------------------------------------
// Cumulative full-regret audit over a deviation set.
// ---------------------------------------------------------------------------

/// Accumulates, round by round, the cumulative full regret of every
/// (deviation, infoset, memory) triple for a fixed deviation set. The
/// realizable (I, g) support of each deviation is computed once up front.
class CumulativeRegretAuditor {
 public:
  CumulativeRegretAuditor(const Game& g, PlayerId player,
                          std::vector<TableDeviation> devs)
      : game_(&g), player_(player), devs_(std::move(devs)) {
    supports_.resize(devs_.size());
    cum_.resize(devs_.size());
    for (size_t d = 0; d < devs_.size(); ++d) {
      supports_[d] = realizable_support(g, player, devs_[d]);
      cum_[d].assign(supports_[d].size(), 0.0);
    }
  }

  /// Realizable (infoset, memory) pairs, identity tails pruned.
  struct Support {
    std::vector<InfosetId> infosets;
    std::vector<MemoryState> memories;
    size_t size() const { return infosets.size(); }
  };

  static Support realizable_support(const Game& g, PlayerId player,
                                    const BehavioralDeviation& dev) {
    Support sup;
    // Top-down closure from forest roots; the pairs come out in forest
    // order because player_infosets is topological.
    std::vector<std::vector<MemoryState>> at(g.infosets.size());
    for (InfosetId i : g.player_infosets.at(player)) {
      if (g.infoset(i).depth == 0) at[i].push_back(MemoryState{});
    }
    for (InfosetId i : g.player_infosets.at(player)) {
      const auto& is = g.infoset(i);
      for (const MemoryState& m : at[i]) {
        sup.infosets.push_back(i);
        sup.memories.push_back(m);
        if (dev.identity_below(g, i, m)) continue;
        ActionTransformation phi = dev.transform_at(g, i, m);
        for (int a = 0; a < is.num_actions; ++a) {
          int out = phi.apply(a);
          MemoryState next = m.extended(
              phi.reveals_recommendation() ? a : MemoryState::kStar);
          for (InfosetId c : is.children_by_action[out]) {
            auto& bucket = at[c];
            if (std::find(bucket.begin(), bucket.end(), next) ==
                bucket.end()) {
              bucket.push_back(next);
            }
          }
        }
      }
    }
    return sup;
  }

  void add_round(const StrategyProfile& pi) {
    AuditContext ctx(*game_, pi, player_);
    ++rounds_;
    for (size_t d = 0; d < devs_.size(); ++d) {
      const auto& sup = supports_[d];
      for (size_t k = 0; k < sup.size(); ++k) {
        cum_[d][k] += full_regret(ctx, devs_[d], sup.infosets[k],
                                  sup.memories[k]);
      }
    }
  }

  int rounds() const { return rounds_; }

  /// max over (deviation, infoset, memory) of cumulative full regret.
  double max_cumulative_regret() const {
    double best = 0.0;
    for (const auto& row : cum_) {
      for (double v : row) best = std::max(best, v);
    }
    return best;
  }

  /// Positive part of the maximum time-averaged full regret.
  double average_gap() const {
    return rounds_ == 0 ? 0.0
                        : std::max(0.0, max_cumulative_regret() / rounds_);
  }

 private:
  const Game* game_;
  PlayerId player_;
  std::vector<TableDeviation> devs_;
  std::vector<Support> supports_;
  std::vector<std::vector<double>> cum_;
  int rounds_ = 0;
};

// ---------------------------------------------------------------------------
// Empirical play, observable-sequential-rationality gap, incentives.
// ---------------------------------------------------------------------------

/// A recorded sequence of strategy profiles pi^1..pi^T.
struct EmpiricalPlay {
  const Game* game = nullptr;
  std::vector<StrategyProfile> rounds;

  int T() const { return static_cast<int>(rounds.size()); }

  /// mu^T over pure profiles (chance outcome, s_1, .., s_N), enumerated
  /// as a flat vector in mixed-radix order. Small games only.
  std::vector<double> empirical_distribution(
      const EnumerationBudget& budget = {}) const {
    const Game& g = *game;
    std::vector<uint64_t> sizes;
    double total = 1.0;
    for (PlayerId p = 0; p < g.num_players; ++p) {
      double n = num_pure_strategies(g, p);
      total *= n;
      sizes.push_back(static_cast<uint64_t>(n));
    }
    // Chance "pure strategies": one outcome per chance infoset is overkill
    // here; we only need outcome weights of terminals, so mu is over
    // (terminal-relevant) player strategies, weighted by chance inside the
    // utility evaluation. The distribution returned is over player
    // strategy profiles only.
    if (total > budget.max_pure_evals) {
      throw std::runtime_error("empirical distribution over budget");
    }
    uint64_t count = static_cast<uint64_t>(total);
    std::vector<double> mu(count, 0.0);
    for (const auto& pi : rounds) {
      for (uint64_t idx = 0; idx < count; ++idx) {
        uint64_t rest = idx;
        double prob = 1.0;
        for (PlayerId p = 0; p < g.num_players; ++p) {
          uint64_t sp = rest % sizes[p];
          rest /= sizes[p];
          prob *= pure_strategy_prob(g, p,  pi,
                                     pure_strategy_from_index(g, p, sp));
        }
        mu[idx] += prob / rounds.size();
      }
    }
    return mu;
  }
};

/// Expected utility to `player` of a pure own strategy against the other
/// players' behavioral strategies.
inline double pure_vs_profile_value(const Game& g, const StrategyProfile& pi,
                                    PlayerId player, const PureStrategy& s) {
  std::function<double(HistoryId)> walk = [&](HistoryId h) -> double {
    const auto& n = g.node(h);
    if (n.is_terminal()) return n.payoffs[player];
    if (n.is_decision() && n.player == player) {
      return walk(n.children[s[g.infoset(n.infoset).position]]);
    }
    double v = 0.0;
    for (size_t a = 0; a < n.children.size(); ++a) {
      double q = n.is_chance() ? n.chance_probs[a] : pi.prob(n.infoset, a);
      if (q != 0.0) v += q * walk(n.children[a]);
    }
    return v;
  };
  return walk(g.root());
}

/// Reach-weighted counterfactual value v_I(sigma_i; pi_{-i}) of a mixed
/// strategy given as a distribution over pure strategies.
inline double reach_weighted_value(const Game& g, const StrategyProfile& pi,
                                   PlayerId player, InfosetId i,
                                   const std::vector<double>& mixed) {
  const auto& is = g.infoset(i);
  PlayerSubset minus = PlayerSubset::excluding(g, player);
  double reach = 0.0;   // P(h(I); sigma)
  double value = 0.0;   // v^cf_I(sigma; pi_{-i})
  for (uint64_t idx = 0; idx < mixed.size(); ++idx) {
    if (mixed[idx] == 0.0) continue;
    PureStrategy s = pure_strategy_from_index(g, player, idx);
    bool plays = true;
    for (const auto& [anc, act] : is.path) {
      if (s[g.infoset(anc).position] != act) {
        plays = false;
        break;
      }
    }
    if (plays) reach += mixed[idx];
    // Counterfactual value of the pure strategy from I.
    double v = 0.0;
    std::function<double(HistoryId)> below = [&](HistoryId h) -> double {
      const auto& n = g.node(h);
      if (n.is_terminal()) return n.payoffs[player];
      if (n.is_decision() && n.player == player) {
        return below(n.children[s[g.infoset(n.infoset).position]]);
      }
      double out = 0.0;
      for (size_t a = 0; a < n.children.size(); ++a) {
        double q = n.is_chance() ? n.chance_probs[a] : pi.prob(n.infoset, a);
        if (q != 0.0) out += q * below(n.children[a]);
      }
      return out;
    };
    for (HistoryId h : is.histories) {
      v += reach_prob(g, pi, h, minus) *
           below(g.node(h).children[s[is.position]]);
    }
    value += mixed[idx] * v;
  }
  return reach * value;
}

/// Definition-style full regret of a swap deviation at infoset I under one
/// profile: v_I(phi(pi_i)) - v_I(phi_{<I}(pi_i)), both reach-weighted.
inline double definition_full_regret(const Game& g, const StrategyProfile& pi,
                                     const TableDeviation& dev, InfosetId i,
                                     const EnumerationBudget& budget = {}) {
  PlayerId p = dev.player();
  double n = num_pure_strategies(g, p);
  if (n > budget.max_pure_evals) {
    throw std::runtime_error("definition_full_regret over budget");
  }
  uint64_t count = static_cast<uint64_t>(n);
  std::vector<double> transformed(count, 0.0), truncated(count, 0.0);
  for (uint64_t idx = 0; idx < count; ++idx) {
    PureStrategy s = pure_strategy_from_index(g, p, idx);
    double prob = pure_strategy_prob(g, p, pi, s);
    if (prob == 0.0) continue;
    PureStrategy full = dev.apply(g, s);
    // phi_{<I}: the deviation applied strictly before I only.
    PureStrategy trunc = s;
    for (const auto& [anc, act] : g.infoset(i).path) {
      trunc[g.infoset(anc).position] = full[g.infoset(anc).position];
    }
    transformed[pure_strategy_index(g, p, full)] += prob;
    truncated[pure_strategy_index(g, p, trunc)] += prob;
  }
  return reach_weighted_value(g, pi, p, i, transformed) -
         reach_weighted_value(g, pi, p, i, truncated);
}

struct OsrGapResult {
  double max_gap = 0.0;
  // Per infoset id: positive part of the max average full regret there.
  std::vector<double> per_infoset;
};

/// OSR gap of the play sequence against a deviation set: the positive
/// part of the maximum average Definition-style full regret, per infoset
/// and overall.
inline OsrGapResult osr_gap(const EmpiricalPlay& play,
                            const std::vector<TableDeviation>& devs,
                            const EnumerationBudget& budget = {}) {
  const Game& g = *play.game;
  OsrGapResult out;
  out.per_infoset.assign(g.infosets.size(), 0.0);
  if (devs.empty() || play.rounds.empty()) return out;
  PlayerId p = devs.front().player();
  for (const auto& dev : devs) {
    for (InfosetId i : g.player_infosets.at(p)) {
      double cum = 0.0;
      for (const auto& pi : play.rounds) {
        cum += definition_full_regret(g, pi, dev, i, budget);
      }
      double gap = std::max(0.0, cum / play.T());
      out.per_infoset[i] = std::max(out.per_infoset[i], gap);
      out.max_gap = std::max(out.max_gap, gap);
    }
  }
  return out;
}

/// Average-regret identity: E_{s~mu}[rho(phi; s)] computed from the
/// per-round profiles two ways; returns the common value and throws if
/// the two computations disagree beyond `tol`.
inline double deviation_incentive(const EmpiricalPlay& play,
                                  const TableDeviation& dev,
                                  double tol = 1e-10,
                                  const EnumerationBudget& budget = {}) {
  const Game& g = *play.game;
  PlayerId p = dev.player();
  uint64_t count = static_cast<uint64_t>(num_pure_strategies(g, p));
  if (static_cast<double>(count) * play.T() > budget.max_pure_evals) {
    throw std::runtime_error("deviation_incentive over budget");
  }

  // Route one: per round, u_i(phi(pi_i), pi_{-i}) - u_i(pi) via the
  // pushforward.
  double route1 = 0.0;
  for (const auto& pi : play.rounds) {
    std::vector<double> mixed(count, 0.0);
    for (uint64_t idx = 0; idx < count; ++idx) {
      mixed[idx] = pure_strategy_prob(g, p, pi,
                                      pure_strategy_from_index(g, p, idx));
    }
    std::vector<double> pushed = pushforward(g, p, dev, mixed, budget);
    double u_dev = 0.0;
    for (uint64_t idx = 0; idx < count; ++idx) {
      if (pushed[idx] != 0.0) {
        u_dev += pushed[idx] *
                 pure_vs_profile_value(g, pi, p,
                                       pure_strategy_from_index(g, p, idx));
      }
    }
    route1 += u_dev - expected_utility(g, pi)[p];
  }
  route1 /= play.T();

  // Route two: expectation under the empirical distribution of play,
  // summing over own pure strategies against the round profiles.
  double route2 = 0.0;
  for (const auto& pi : play.rounds) {
    for (uint64_t idx = 0; idx < count; ++idx) {
      PureStrategy s = pure_strategy_from_index(g, p, idx);
      double prob = pure_strategy_prob(g, p, pi, s);
      if (prob == 0.0) continue;
      double u_dev = pure_vs_profile_value(g, pi, p, dev.apply(g, s));
      double u_raw = pure_vs_profile_value(g, pi, p, s);
      route2 += prob * (u_dev - u_raw);
    }
  }
  route2 /= play.T();

  if (std::abs(route1 - route2) > tol * std::max(1.0, g.utility_bound)) {
    throw std::runtime_error("deviation incentive identity violated");
  }
  return route1;
}

/// Total best-response gap of a profile: sum over players of the benefit
/// of best-responding to the others. Zero exactly at an equilibrium.
inline double best_response_gap(const Game& g, const StrategyProfile& pi) {
  auto u = expected_utility(g, pi);
  double gap = 0.0;
  for (PlayerId p = 0; p < g.num_players; ++p) {
    gap += best_response_value(g, pi, p) - u[p];
  }
  return gap;
}

// ---------------------------------------------------------------------------
// Seeded random deviations and profiles for property tests.
// ---------------------------------------------------------------------------

namespace detail {

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t memory_hash(const MemoryState& m) {
  uint64_t h = 0x243f6a8885a308d3ULL;
  for (int v : m.symbols) h = splitmix64(h ^ static_cast<uint64_t>(v + 2));
  return h;
}

}  // namespace detail

/// A behavioral deviation whose transformation at each (infoset, memory)
/// pair is drawn deterministically from a seed: identity, external or
/// internal with equal structural weight.
class SeededRandomDeviation : public BehavioralDeviation {
 public:
  SeededRandomDeviation(const Game& g, PlayerId player, uint64_t seed)
      : game_(&g), player_(player), seed_(seed) {}

  PlayerId player() const override { return player_; }

  ActionTransformation transform_at(const Game& g, InfosetId i,
                                    const MemoryState& memory) const override {
    int n = g.infoset(i).num_actions;
    uint64_t h = detail::splitmix64(
        seed_ ^ detail::splitmix64(static_cast<uint64_t>(i) + 1) ^
        detail::memory_hash(memory));
    switch (h % 3) {
      case 0: return ActionTransformation::identity();
      case 1: return ActionTransformation::external_to((h >> 8) % n);
      default: {
        int trigger = static_cast<int>((h >> 8) % n);
        int target = static_cast<int>((h >> 24) % n);
        return ActionTransformation::internal_swap(trigger, target);
      }
    }
  }

 private:
  const Game* game_;
  PlayerId player_;
  uint64_t seed_;
};

/// A seeded random strategy profile with strictly positive distributions.
inline StrategyProfile random_profile(const Game& g, uint64_t seed) {
  StrategyProfile pi(g);
  for (const auto& is : g.infosets) {
    std::vector<double> d(is.num_actions);
    double sum = 0.0;
    for (int a = 0; a < is.num_actions; ++a) {
      uint64_t h = detail::splitmix64(
          seed ^ detail::splitmix64(static_cast<uint64_t>(is.id) * 131 + a));
      d[a] = 0.05 + static_cast<double>(h % 100000) / 100000.0;
      sum += d[a];
    }
    for (double& v : d) v /= sum;
    pi.set(is.id, std::move(d));
  }
  return pi;
}

}  // namespace efr

#endif  // EFR_AUDIT_HPP
