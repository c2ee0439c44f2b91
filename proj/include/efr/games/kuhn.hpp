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

#ifndef EFR_GAMES_KUHN_HPP
#define EFR_GAMES_KUHN_HPP

#include <string>
#include <vector>

#include "efr/game.hpp"

namespace efr::games {

/// Three-card Kuhn poker. Each player antes one chip, receives one card
/// from {J, Q, K}, and a single bet of one chip is allowed. Used as the
/// desk-scale oracle game throughout the test suite.
inline Game build_kuhn() {
  GameBuilder b(2);
  const char* kCards = "JQK";

  std::vector<std::string> deals;
  std::vector<double> probs;
  for (int c0 = 0; c0 < 3; ++c0) {
    for (int c1 = 0; c1 < 3; ++c1) {
      if (c0 == c1) continue;
      deals.push_back(std::string(1, kCards[c0]) + kCards[c1]);
      probs.push_back(1.0 / 6.0);
    }
  }
  HistoryId root = b.add_chance(kNoId, "", deals, probs);

  auto winner_sign = [&](int c0, int c1) { return c0 > c1 ? 1.0 : -1.0; };

  for (int c0 = 0; c0 < 3; ++c0) {
    for (int c1 = 0; c1 < 3; ++c1) {
      if (c0 == c1) continue;
      std::string deal = std::string(1, kCards[c0]) + kCards[c1];
      double sign = winner_sign(c0, c1);
      std::string k0(1, kCards[c0]);
      std::string k1(1, kCards[c1]);

      HistoryId p0 = b.add_decision(root, deal, 0, k0 + ":", {"p", "b"});
      // Player 0 checks.
      HistoryId p1c = b.add_decision(p0, "p", 1, k1 + ":p", {"p", "b"});
      b.add_terminal(p1c, "p", {sign, -sign});  // both check: showdown for 1
      HistoryId p0cb =
          b.add_decision(p1c, "b", 0, k0 + ":pb", {"p", "b"});
      b.add_terminal(p0cb, "p", {-1.0, 1.0});              // player 0 folds
      b.add_terminal(p0cb, "b", {2.0 * sign, -2.0 * sign});  // call: pot 2
      // Player 0 bets.
      HistoryId p1b = b.add_decision(p0, "b", 1, k1 + ":b", {"p", "b"});
      b.add_terminal(p1b, "p", {1.0, -1.0});               // player 1 folds
      b.add_terminal(p1b, "b", {2.0 * sign, -2.0 * sign});   // call: pot 2
    }
  }
  return b.finalize("kuhn");
}

}  // namespace efr::games

#endif  // EFR_GAMES_KUHN_HPP
