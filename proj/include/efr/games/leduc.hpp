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

#ifndef EFR_GAMES_LEDUC_HPP
#define EFR_GAMES_LEDUC_HPP

#include <functional>
#include <string>
#include <vector>

#include "efr/game.hpp"

namespace efr::games {

namespace leduc_detail {

// Cards 0..5; rank = card / 2 (J=0, Q=1, K=2), two suits per rank.
inline int rank(int card) { return card / 2; }

inline std::string card_name(int card) {
  static const char* kRanks = "JQK";
  static const char* kSuits = "sh";
  return std::string(1, kRanks[rank(card)]) + kSuits[card % 2];
}

struct BetState {
  int round = 1;            // 1 or 2
  int raises = 0;           // raises so far this round
  int checks = 0;           // consecutive opening checks this round
  int to_act = 0;           // player to act
  int pot[2] = {1, 1};      // antes already posted
  int pending = 0;          // chips needed to call
  std::string history;      // public betting string, '/' between rounds
};

// Hand strength at showdown: pair with the public card beats high card.
inline int strength(int priv, int pub) {
  return rank(priv) == rank(pub) ? 100 + rank(priv) : rank(priv);
}

}  // namespace leduc_detail

/// Leduc hold'em: six cards (three ranks, two suits), one private card
/// each, an ante of one chip, two betting rounds with at most two raises
/// per round, raise sizes of two chips in round one and four in round two,
/// and a public card before round two. Payoffs are in chips; the game's
/// payoff_scale reports them in milli-big-blinds (ante = one big blind).
inline Game build_leduc() {
  using namespace leduc_detail;
  GameBuilder b(2);

  std::vector<std::string> deals;
  std::vector<double> probs;
  std::vector<std::pair<int, int>> deal_cards;
  for (int c0 = 0; c0 < 6; ++c0) {
    for (int c1 = 0; c1 < 6; ++c1) {
      if (c0 == c1) continue;
      deals.push_back(card_name(c0) + card_name(c1));
      probs.push_back(1.0 / 30.0);
      deal_cards.emplace_back(c0, c1);
    }
  }
  HistoryId root = b.add_chance(kNoId, "", deals, probs);

  // Recursive construction of a betting round and its continuations.
  struct Ctx {
    int c0, c1;       // private cards
    int pub = -1;     // public card, -1 before round two
  };

  std::function<void(Ctx&, HistoryId, const std::string&, BetState)> betting;
  std::function<void(Ctx&, HistoryId, const std::string&, const BetState&)>
      end_round;

  auto showdown = [](const Ctx& ctx, const BetState& s) {
    int s0 = strength(ctx.c0, ctx.pub);
    int s1 = strength(ctx.c1, ctx.pub);
    double u0;
    if (s0 > s1) {
      u0 = s.pot[1];
    } else if (s1 > s0) {
      u0 = -s.pot[0];
    } else {
      u0 = 0.0;  // split the pot
    }
    return std::vector<double>{u0, -u0};
  };

  auto infoset_key = [](const Ctx& ctx, int player, const BetState& s) {
    int priv = player == 0 ? ctx.c0 : ctx.c1;
    std::string key = card_name(priv);
    key += ctx.pub >= 0 ? "|" + card_name(ctx.pub) : "|-";
    key += "|" + s.history;
    return key;
  };

  betting = [&](Ctx& ctx, HistoryId parent, const std::string& incoming,
                BetState s) {
    int raise_size = s.round == 1 ? 2 : 4;
    std::vector<std::string> actions;
    if (s.pending > 0) actions.push_back("f");
    actions.push_back("c");
    if (s.raises < 2) actions.push_back("r");

    HistoryId h = b.add_decision(parent, incoming, s.to_act,
                                 infoset_key(ctx, s.to_act, s), actions);
    int me = s.to_act;
    int opp = 1 - me;

    if (s.pending > 0) {
      // Folding concedes the chips already committed.
      double u_me = -static_cast<double>(s.pot[me]);
      std::vector<double> u(2);
      u[me] = u_me;
      u[opp] = -u_me;
      b.add_terminal(h, "f", u);
    }

    {
      // A call closes the round; an opening check passes to the opponent
      // and a second check closes the round.
      BetState next = s;
      next.pot[me] += s.pending;
      next.pending = 0;
      next.history += "c";
      next.to_act = opp;
      if (s.pending > 0 || s.checks == 1) {
        end_round(ctx, h, "c", next);
      } else {
        next.checks = 1;
        betting(ctx, h, "c", next);
      }
    }

    if (s.raises < 2) {
      BetState next = s;
      next.pot[me] += s.pending + raise_size;
      next.pending = raise_size;
      next.raises = s.raises + 1;
      next.checks = 0;
      next.history += "r";
      next.to_act = opp;
      betting(ctx, h, "r", next);
    }
  };

  end_round = [&](Ctx& ctx, HistoryId parent, const std::string& incoming,
                  const BetState& s) {
    if (s.round == 2) {
      b.add_terminal(parent, incoming, showdown(ctx, s));
      return;
    }
    // Reveal the public card: uniform over the four undealt cards.
    std::vector<std::string> outs;
    std::vector<double> ps;
    std::vector<int> cards;
    for (int c = 0; c < 6; ++c) {
      if (c == ctx.c0 || c == ctx.c1) continue;
      outs.push_back(card_name(c));
      ps.push_back(0.25);
      cards.push_back(c);
    }
    HistoryId ch = b.add_chance(parent, incoming, outs, ps);
    for (size_t k = 0; k < cards.size(); ++k) {
      Ctx ctx2 = ctx;
      ctx2.pub = cards[k];
      BetState s2;
      s2.round = 2;
      s2.raises = 0;
      s2.to_act = 0;
      s2.pot[0] = s.pot[0];
      s2.pot[1] = s.pot[1];
      s2.pending = 0;
      s2.history = s.history + "/";
      betting(ctx2, ch, outs[k], s2);
    }
  };

  for (size_t d = 0; d < deal_cards.size(); ++d) {
    Ctx ctx{deal_cards[d].first, deal_cards[d].second, -1};
    BetState s;
    betting(ctx, root, deals[d], s);
  }

  Game g = b.finalize("leduc");
  g.payoff_scale = 1000.0;  // chips -> milli-big-blinds
  g.payoff_unit = "mbb";
  return g;
}

}  // namespace efr::games

#endif  // EFR_GAMES_LEDUC_HPP
