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

#ifndef EFR_GAMES_HPP
#define EFR_GAMES_HPP

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "efr/game.hpp"
#include "efr/games/goofspiel.hpp"
#include "efr/games/kuhn.hpp"
#include "efr/games/leduc.hpp"
#include "efr/games/sheriff.hpp"

namespace efr::games {

/// Parameters identifying one benchmark game instance, parsable from CLI
/// flags or config keys.
struct GameSpec {
  std::string kind;  // kuhn | leduc | goofspiel | sheriff | custom
  int ranks = 5;
  PointsOrder order = PointsOrder::ascending;
  int players = 2;
  std::string file;  // custom games only

  /// True when the parameters are one of the benchmark configurations
  /// (ranks 4 or 5, two or three players).
  bool paper_configuration() const {
    if (kind != "goofspiel") return kind == "leduc" || kind == "sheriff";
    if (players == 2) {
      return (ranks == 5 && order != PointsOrder::random) ||
             (ranks == 4 && order == PointsOrder::random);
    }
    return players == 3 && ranks == 4 && order != PointsOrder::random;
  }

  std::string label() const {
    if (kind != "goofspiel") return kind;
    std::ostringstream os;
    os << "goofspiel(" << ranks << ","
       << (order == PointsOrder::ascending    ? "asc"
           : order == PointsOrder::descending ? "desc"
                                              : "random")
       << "," << players << ")";
    return os.str();
  }
};

inline Game build_game(const GameSpec& spec) {
  if (spec.kind == "kuhn") return build_kuhn();
  if (spec.kind == "leduc") return build_leduc();
  if (spec.kind == "sheriff") return build_sheriff();
  if (spec.kind == "goofspiel") {
    return build_goofspiel(spec.ranks, spec.order, spec.players);
  }
  if (spec.kind == "custom") {
    std::ifstream in(spec.file);
    if (!in) throw std::runtime_error("cannot open game file: " + spec.file);
    return read_game_text(in);
  }
  throw std::invalid_argument("unknown game kind: " + spec.kind);
}

}  // namespace efr::games

#endif  // EFR_GAMES_HPP
