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

#ifndef EFR_EFR_HPP
#define EFR_EFR_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "efr/deviations.hpp"
#include "efr/eval.hpp"
#include "efr/game.hpp"
#include "efr/regret_matching.hpp"

namespace efr {

struct EfrConfig {
  DeviationType type = DeviationType::cf_blind;
  RmVariant rm = RmVariant::exact;
};

/// One EFR learner: per-infoset time-selection regret matching over the
/// configured deviation type's transformations and keys, with the
/// top-down next-strategy pass. Deterministic given the opponent
/// strategies it observes.
class EfrInstance {
 public:
  EfrInstance(const Game& game, PlayerId player, EfrConfig config)
      : game_(&game), player_(player), config_(config),
        current_(StrategyProfile(game)), avg_weight_(game.infosets.size()) {
    if (config.rm != RmVariant::exact && config.rm != RmVariant::plus) {
      throw std::invalid_argument(
          "EFR supports the exact and plus regret matching variants");
    }
    const auto& list = game.player_infosets.at(player);
    locals_.resize(list.size());
    for (size_t k = 0; k < list.size(); ++k) {
      InfosetId i = list[k];
      Local& loc = locals_[k];
      loc.infoset = i;
      loc.transforms = transformations_at(game, i, config.type);
      loc.omega =
          maximal_activation(loc.transforms, game.infoset(i).num_actions);
      std::vector<int> key_counts;
      for (const auto& phi : loc.transforms) {
        auto keys = time_selection_keys(game, i, phi, config.type);
        std::vector<int> slots;
        slots.reserve(keys.size());
        for (const auto& key : keys) slots.push_back(loc.intern(key));
        loc.key_slots.push_back(std::move(slots));
        key_counts.push_back(static_cast<int>(keys.size()));
      }
      loc.state = LocalLearnerState::make(config.rm, key_counts);
      avg_weight_[i].assign(game.infoset(i).num_actions, 0.0);
    }
    own_reach_cache_.assign(game.infosets.size(), 1.0);
  }

  PlayerId player() const { return player_; }
  const StrategyProfile& current_strategy() const { return current_; }
  int round() const { return round_; }
  uint64_t work_units() const { return work_; }
  const Game& game() const { return *game_; }

  /// One EFR round: accumulate weighted immediate counterfactual regrets
  /// under the full profile (own current strategy plus `others`), then
  /// rebuild the next strategy top-down. Returns the learner's expected
  /// payoff in the observed round for convenience.
  double observe_and_update(const StrategyProfile& others) {
    StrategyProfile profile = others;
    profile.assign_player(*game_, player_, current_);

    // Played strategy enters the reach-weighted average.
    accumulate_average();

    ValuePass pass(*game_, profile, player_);
    work_ += 2 * game_->nodes.size();
    double payoff = pass.value_below(game_->root());

    refresh_own_reach(current_);
    for (Local& loc : locals_) {
      const auto& is = game_->infoset(loc.infoset);
      std::vector<double> v = pass.action_values(loc.infoset);
      double baseline = 0.0;
      for (int a = 0; a < is.num_actions; ++a) {
        baseline += current_.prob(loc.infoset, a) * v[a];
      }
      loc.key_weights.resize(loc.keys.size());
      for (size_t k = 0; k < loc.keys.size(); ++k) {
        loc.key_weights[k] = weight_of(loc.keys[k], current_);
      }
      for (size_t f = 0; f < loc.transforms.size(); ++f) {
        double transformed = 0.0;
        for (int a = 0; a < is.num_actions; ++a) {
          transformed +=
              current_.prob(loc.infoset, a) * v[loc.transforms[f].apply(a)];
        }
        double rho = transformed - baseline;
        auto& row = loc.state.x[f];
        for (size_t s = 0; s < loc.key_slots[f].size(); ++s) {
          double w = loc.key_weights[loc.key_slots[f][s]];
          double next = row[s] + w * rho;
          if (config_.rm == RmVariant::plus && next < 0.0) next = 0.0;
          row[s] = next;
          ++work_;
        }
      }
    }

    // Top-down construction of the next strategy. Keys only reference
    // strict predecessors, so evaluating them on the partially built
    // strategy is well defined in construction order.
    StrategyProfile next = current_;
    refresh_own_reach(next);
    for (Local& loc : locals_) {
      const auto& is = game_->infoset(loc.infoset);
      loc.key_weights.resize(loc.keys.size());
      for (size_t k = 0; k < loc.keys.size(); ++k) {
        loc.key_weights[k] = weight_of(loc.keys[k], next);
      }
      std::vector<double> y(loc.transforms.size(), 0.0);
      double z = 0.0;
      for (size_t f = 0; f < loc.transforms.size(); ++f) {
        const auto& row = loc.state.x[f];
        double yf = 0.0;
        for (size_t s = 0; s < loc.key_slots[f].size(); ++s) {
          if (row[s] > 0.0) {
            yf += loc.key_weights[loc.key_slots[f][s]] * row[s];
          }
          ++work_;
        }
        y[f] = yf;
        z += yf;
      }
      std::vector<double> sigma =
          fixed_point(loc.transforms, y, z, is.num_actions);
      work_ += static_cast<uint64_t>(is.num_actions) * is.num_actions *
               is.num_actions;
      next.set(loc.infoset, std::move(sigma));
      // The own-reach cache must reflect the updated ancestors for
      // deeper infosets' keys.
      own_reach_cache_[loc.infoset] = reach_from_parent(next, loc.infoset);
    }
    current_ = std::move(next);
    ++round_;
    return payoff;
  }

  /// Reach-weighted (realization-equivalent) average of the strategies
  /// played over rounds 1..t.
  StrategyProfile average_strategy() const {
    if (round_ < 1) throw std::logic_error("average undefined before round 1");
    StrategyProfile avg(*game_);
    for (const Local& loc : locals_) {
      const auto& mass = avg_weight_[loc.infoset];
      double total = 0.0;
      for (double m : mass) total += m;
      if (total > 0.0) {
        std::vector<double> d(mass.size());
        for (size_t a = 0; a < mass.size(); ++a) d[a] = mass[a] / total;
        avg.set(loc.infoset, std::move(d));
      }
    }
    return avg;
  }

  /// Theorem-style regret bound 2^(n_in + 1) U |I_i| sqrt(D T), with
  /// D = max over infosets of max_phi |W(phi)| * omega(Phi_I).
  double regret_bound(double rounds) const {
    double d = 0.0;
    for (const Local& loc : locals_) {
      size_t max_keys = 0;
      for (const auto& slots : loc.key_slots) {
        max_keys = std::max(max_keys, slots.size());
      }
      d = std::max(d, static_cast<double>(max_keys) * loc.omega);
    }
    int n_in = internal_chain_length(config_.type, game_->max_depth(player_));
    double num_infosets =
        static_cast<double>(game_->player_infosets.at(player_).size());
    return std::pow(2.0, n_in + 1) * game_->utility_bound * num_infosets *
           std::sqrt(d * rounds);
  }

  /// Total number of (I, phi, w) state entries (index-set audit).
  size_t state_entry_count() const {
    size_t n = 0;
    for (const Local& loc : locals_) {
      for (const auto& slots : loc.key_slots) n += slots.size();
    }
    return n;
  }

  /// Number of distinct time-selection keys at one infoset, maximized
  /// over the player's infosets.
  size_t max_keys_per_transform() const {
    size_t n = 0;
    for (const Local& loc : locals_) {
      for (const auto& slots : loc.key_slots) {
        n = std::max(n, slots.size());
      }
    }
    return n;
  }

  /// Cumulative regret table row (I, phi, w) accessor for tests.
  double table_entry(size_t local_index, size_t transform, size_t slot) const {
    return locals_.at(local_index).state.x.at(transform).at(slot);
  }
  const std::vector<ActionTransformation>& transforms_of(
      size_t local_index) const {
    return locals_.at(local_index).transforms;
  }
  const std::vector<TimeSelectionKey>& keys_of(size_t local_index) const {
    return locals_.at(local_index).keys;
  }
  const std::vector<std::vector<int>>& key_slots_of(size_t local_index) const {
    return locals_.at(local_index).key_slots;
  }

 private:
  struct Local {
    InfosetId infoset = kNoId;
    std::vector<ActionTransformation> transforms;
    std::vector<TimeSelectionKey> keys;      // interned, unique
    std::vector<std::vector<int>> key_slots;  // per transform, indices in keys
    std::vector<double> key_weights;          // scratch, parallel to keys
    LocalLearnerState state;
    int omega = 0;

    int intern(const TimeSelectionKey& key) {
      for (size_t k = 0; k < keys.size(); ++k) {
        if (keys[k] == key) return static_cast<int>(k);
      }
      keys.push_back(key);
      return static_cast<int>(keys.size()) - 1;
    }
  };

  double reach_from_parent(const StrategyProfile& pi, InfosetId i) const {
    const auto& is = game_->infoset(i);
    if (is.parent == kNoId) return 1.0;
    return own_reach_cache_[is.parent] * pi.prob(is.parent, is.parent_action);
  }

  void refresh_own_reach(const StrategyProfile& pi) {
    for (const Local& loc : locals_) {
      own_reach_cache_[loc.infoset] = reach_from_parent(pi, loc.infoset);
    }
  }

  double weight_of(const TimeSelectionKey& key, const StrategyProfile& pi) {
    switch (key.kind) {
      case TimeSelectionKey::Kind::constant_one:
        return 1.0;
      case TimeSelectionKey::Kind::reach_at:
        return own_reach_cache_[key.infoset];
      case TimeSelectionKey::Kind::reach_and_action:
        return own_reach_cache_[key.infoset] * pi.prob(key.infoset, key.action);
      case TimeSelectionKey::Kind::memory_prefix: {
        double w = 1.0;
        for (const auto& [i, a] : key.chain) w *= pi.prob(i, a);
        return w;
      }
    }
    return 1.0;
  }

  void accumulate_average() {
    refresh_own_reach(current_);
    for (const Local& loc : locals_) {
      double reach = own_reach_cache_[loc.infoset];
      auto& mass = avg_weight_[loc.infoset];
      for (size_t a = 0; a < mass.size(); ++a) {
        mass[a] += reach * current_.prob(loc.infoset, a);
      }
    }
  }

  const Game* game_;
  PlayerId player_;
  EfrConfig config_;
  StrategyProfile current_;
  std::vector<Local> locals_;
  std::vector<double> own_reach_cache_;
  std::vector<std::vector<double>> avg_weight_;
  int round_ = 0;
  uint64_t work_ = 0;
};

/// Identical-config self-play: every seat runs the same deviation type;
/// returns the per-round profile stream via a callback.
inline void efr_self_play(
    const Game& game, EfrConfig config, int rounds,
    const std::function<void(int, const StrategyProfile&)>& on_round) {
  std::vector<EfrInstance> learners;
  learners.reserve(game.num_players);
  for (PlayerId p = 0; p < game.num_players; ++p) {
    learners.emplace_back(game, p, config);
  }
  for (int t = 1; t <= rounds; ++t) {
    StrategyProfile profile(game);
    for (const auto& l : learners) {
      profile.assign_player(game, l.player(), l.current_strategy());
    }
    if (on_round) on_round(t, profile);
    for (auto& l : learners) l.observe_and_update(profile);
  }
}

}  // namespace efr

#endif  // EFR_EFR_HPP
