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

#ifndef EFR_GAMES_GOOFSPIEL_HPP
#define EFR_GAMES_GOOFSPIEL_HPP

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "efr/game.hpp"

namespace efr::games {

enum class PointsOrder { ascending, descending, random };

inline PointsOrder parse_points_order(const std::string& s) {
  if (s == "asc" || s == "ascending") return PointsOrder::ascending;
  if (s == "desc" || s == "descending") return PointsOrder::descending;
  if (s == "random") return PointsOrder::random;
  throw std::invalid_argument("unknown points order: " + s);
}

/// Score vector for final point totals: 1 split evenly among the players
/// tied for the most points, 0 for everyone else. Totals always sum to 1.
inline std::vector<double> goofspiel_scores(const std::vector<int>& points) {
  int best = 0;
  for (int p : points) best = std::max(best, p);
  int leaders = 0;
  for (int p : points) leaders += (p == best) ? 1 : 0;
  std::vector<double> out(points.size(), 0.0);
  for (size_t i = 0; i < points.size(); ++i) {
    if (points[i] == best) out[i] = 1.0 / leaders;
  }
  return out;
}

/// Imperfect-information goofspiel. Each player holds bid cards 1..n and
/// bids on n point cards worth 1..n, revealed in a fixed order or dealt by
/// chance. The strictly highest bid wins the point card; on a tie for the
/// highest bid the card is discarded. Players observe the revealed point
/// cards and each round's outcome (who won, or a discard), never the other
/// players' bids. Simultaneous bids are serialized player 0 first and
/// hidden through the information sets.
inline Game build_goofspiel(int n_ranks, PointsOrder order, int n_players) {
  if (n_ranks < 2) throw std::invalid_argument("goofspiel needs >= 2 ranks");
  if (n_players < 2 || n_players > 3) {
    throw std::invalid_argument("goofspiel supports 2 or 3 players");
  }
  GameBuilder b(n_players);

  struct State {
    std::vector<int> hands;          // bitmask of remaining bid cards, per player
    std::vector<int> points;
    std::vector<int> deck;           // remaining point cards (random order)
    std::string revealed;            // point-card sequence so far
    std::string outcomes;            // per round: '0'..'2' winner or 'd'
    std::vector<std::string> own_bids;  // per player, own bid sequence
    int round = 0;
  };

  auto card_label = [](int c) { return std::to_string(c); };

  std::function<void(HistoryId, const std::string&, State, int)> play_round;
  std::function<void(HistoryId, const std::string&, State)> next_round;

  play_round = [&](HistoryId parent, const std::string& incoming, State s,
                   int point_card) {
    // Bids chosen this round, filled player by player. Local to the round:
    // resolving one joint bid recurses into later rounds before the loop
    // over this round's actions finishes.
    std::vector<int> bids(n_players, 0);
    // Sequential bid nodes for each player, hidden by the infosets.
    std::function<void(HistoryId, const std::string&, int)> bid_node =
        [&](HistoryId par, const std::string& in, int p) {
          std::vector<std::string> actions;
          for (int c = 1; c <= n_ranks; ++c) {
            if (s.hands[p] & (1 << c)) actions.push_back(card_label(c));
          }
          std::string key = "p" + std::to_string(p) + "|pc:" + s.revealed +
                            card_label(point_card) + "|own:" +
                            s.own_bids[p] + "|res:" + s.outcomes;
          HistoryId h = b.add_decision(par, in, p, key, actions);
          for (const std::string& a : actions) {
            bids[p] = std::stoi(a);
            if (p + 1 < n_players) {
              bid_node(h, a, p + 1);
            } else {
              // Resolve the round.
              State t = s;
              int high = 0, high_count = 0, winner = -1;
              for (int q = 0; q < n_players; ++q) {
                if (bids[q] > high) {
                  high = bids[q];
                  high_count = 1;
                  winner = q;
                } else if (bids[q] == high) {
                  ++high_count;
                }
              }
              char outcome = 'd';
              if (high_count == 1) {
                t.points[winner] += point_card;
                outcome = static_cast<char>('0' + winner);
              }
              t.outcomes += outcome;
              t.revealed += card_label(point_card);
              for (int q = 0; q < n_players; ++q) {
                t.hands[q] &= ~(1 << bids[q]);
                t.own_bids[q] += card_label(bids[q]);
              }
              ++t.round;
              next_round(h, a, t);
            }
          }
        };
    bid_node(parent, incoming, 0);
  };

  next_round = [&](HistoryId parent, const std::string& incoming, State s) {
    if (s.round == n_ranks) {
      b.add_terminal(parent, incoming, goofspiel_scores(s.points));
      return;
    }
    if (order == PointsOrder::ascending) {
      play_round(parent, incoming, s, s.round + 1);
    } else if (order == PointsOrder::descending) {
      play_round(parent, incoming, s, n_ranks - s.round);
    } else {
      std::vector<std::string> outs;
      std::vector<double> ps;
      for (int c : s.deck) {
        outs.push_back(card_label(c));
        ps.push_back(1.0 / s.deck.size());
      }
      HistoryId ch = b.add_chance(parent, incoming, outs, ps);
      for (int c : s.deck) {
        State t = s;
        t.deck.erase(std::find(t.deck.begin(), t.deck.end(), c));
        play_round(ch, card_label(c), t, c);
      }
    }
  };

  State init;
  init.hands.assign(n_players, 0);
  for (int p = 0; p < n_players; ++p) {
    for (int c = 1; c <= n_ranks; ++c) init.hands[p] |= (1 << c);
  }
  init.points.assign(n_players, 0);
  init.own_bids.assign(n_players, "");
  for (int c = 1; c <= n_ranks; ++c) init.deck.push_back(c);
  next_round(kNoId, "", init);

  std::string tag = order == PointsOrder::ascending    ? "asc"
                    : order == PointsOrder::descending ? "desc"
                                                       : "random";
  return b.finalize("goofspiel_" + std::to_string(n_ranks) + "_" + tag + "_" +
                    std::to_string(n_players) + "p");
}

}  // namespace efr::games

#endif  // EFR_GAMES_GOOFSPIEL_HPP
