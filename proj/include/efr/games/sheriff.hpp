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

#ifndef EFR_GAMES_SHERIFF_HPP
#define EFR_GAMES_SHERIFF_HPP

#include <functional>
#include <string>
#include <vector>

#include "efr/game.hpp"

namespace efr::games {

/// Sheriff: a two-player, non-zero-sum negotiation game. The smuggler
/// (player 0) privately loads zero to three illegal items, then four
/// rounds of cheap talk follow: the smuggler signals a bribe from zero to
/// three and the sheriff (player 1) signals inspect or pass. Only the
/// final round's bribe and inspection decision are binding. Without an
/// inspection the smuggler nets items minus bribe and the sheriff earns
/// the bribe; an inspection costs a guilty smuggler twice the item count,
/// while a clean cargo obliges the sheriff to pay the smuggler three.
inline Game build_sheriff() {
  constexpr int kRounds = 4;
  constexpr int kMaxItems = 3;
  constexpr int kMaxBribe = 3;
  GameBuilder b(2);

  std::vector<std::string> item_actions;
  for (int m = 0; m <= kMaxItems; ++m) item_actions.push_back(std::to_string(m));
  HistoryId root = b.add_decision(kNoId, "", 0, "load", item_actions);

  std::function<void(HistoryId, const std::string&, int, int, std::string)>
      bribe_round =
          [&](HistoryId parent, const std::string& incoming, int items,
              int round, std::string public_hist) {
            std::vector<std::string> bribes;
            for (int x = 0; x <= kMaxBribe; ++x) {
              bribes.push_back(std::to_string(x));
            }
            HistoryId hb = b.add_decision(
                parent, incoming, 0,
                "sm|" + std::to_string(items) + "|" + public_hist, bribes);
            for (int x = 0; x <= kMaxBribe; ++x) {
              std::string h2 = public_hist + std::to_string(x);
              HistoryId hs = b.add_decision(hb, std::to_string(x), 1,
                                            "sh|" + h2, {"pass", "inspect"});
              for (int inspect = 0; inspect < 2; ++inspect) {
                std::string label = inspect ? "inspect" : "pass";
                std::string h3 = h2 + (inspect ? "I" : "P");
                if (round < kRounds) {
                  bribe_round(hs, label, items, round + 1, h3);
                } else {
                  double sm, sh;
                  if (!inspect) {
                    sm = items - x;
                    sh = x;
                  } else if (items > 0) {
                    sm = -2.0 * items;
                    sh = 2.0 * items;
                  } else {
                    sm = 3.0;
                    sh = -3.0;
                  }
                  b.add_terminal(hs, label, {sm, sh});
                }
              }
            }
          };

  for (int m = 0; m <= kMaxItems; ++m) {
    bribe_round(root, std::to_string(m), m, 1, "");
  }
  return b.finalize("sheriff");
}

}  // namespace efr::games

#endif  // EFR_GAMES_SHERIFF_HPP
