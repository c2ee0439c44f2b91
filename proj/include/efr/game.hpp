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

#ifndef EFR_GAME_HPP
#define EFR_GAME_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace efr {

using PlayerId = int;
using HistoryId = int;
using InfosetId = int;

inline constexpr PlayerId kChancePlayer = -1;
inline constexpr PlayerId kTerminalPlayer = -2;
inline constexpr int kNoId = -1;

/// One node of the explicit game tree. Terminal nodes carry payoffs,
/// chance nodes carry a fixed outcome distribution, decision nodes an
/// information set.
struct HistoryNode {
  HistoryId parent = kNoId;
  int incoming_action = -1;  // index into the parent's action list
  PlayerId player = kTerminalPlayer;
  InfosetId infoset = kNoId;
  std::vector<std::string> actions;
  std::vector<double> chance_probs;
  std::vector<double> payoffs;
  std::vector<HistoryId> children;

  bool is_terminal() const { return player == kTerminalPlayer; }
  bool is_chance() const { return player == kChancePlayer; }
  bool is_decision() const { return player >= 0; }
};

/// Metadata for one information set: position in the owning player's
/// infoset forest plus the successor structure used by recursive value
/// computations.
struct InfosetInfo {
  InfosetId id = kNoId;
  PlayerId player = kNoId;
  std::string key;
  int num_actions = 0;
  std::vector<HistoryId> histories;

  // Forest structure under perfect recall.
  int depth = 0;                 // number of own-player predecessor infosets
  int position = 0;              // index within the owner's infoset list
  InfosetId parent = kNoId;      // own-player parent infoset
  int parent_action = -1;        // action taken at the parent to reach here
  // Own-player (infoset, action) chain from the forest root down to the
  // parent of this infoset; size == depth.
  std::vector<std::pair<InfosetId, int>> path;

  // Child infosets reached by each action with no own decision in between.
  std::vector<std::vector<InfosetId>> children_by_action;
  // Terminal histories reached by each action with no own decision in
  // between.
  std::vector<std::vector<HistoryId>> terminal_successors;
};

struct ValidationReport {
  bool ok = true;
  std::vector<std::string> diagnostics;
};

/// An explicit extensive-form game. Immutable once built; all evaluation
/// routines are pure functions of (game, strategies), so a Game can be
/// shared freely across threads.
class Game {
 public:
  std::string name;
  int num_players = 0;
  std::vector<HistoryNode> nodes;
  std::vector<InfosetInfo> infosets;
  // Per player, infoset ids in construction order. Construction order is
  // parents-before-children, which the builder verifies, so this doubles
  // as a topological order for the top-down strategy pass.
  std::vector<std::vector<InfosetId>> player_infosets;
  double utility_bound = 0.0;  // U = max |u_i(z)|
  // Multiplier applied when reporting payoffs (e.g. 1000 for chips->mbb).
  double payoff_scale = 1.0;
  std::string payoff_unit = "utility";

  HistoryId root() const { return 0; }
  const HistoryNode& node(HistoryId h) const { return nodes.at(h); }
  const InfosetInfo& infoset(InfosetId i) const { return infosets.at(i); }
  int num_actions(InfosetId i) const { return infosets.at(i).num_actions; }

  std::vector<HistoryId> terminals() const {
    std::vector<HistoryId> out;
    for (HistoryId h = 0; h < static_cast<HistoryId>(nodes.size()); ++h) {
      if (nodes[h].is_terminal()) out.push_back(h);
    }
    return out;
  }

  /// Maximum number of actions at any decision node.
  int max_actions() const {
    int n = 0;
    for (const auto& is : infosets) n = std::max(n, is.num_actions);
    return n;
  }

  /// Maximum number of actions over one player's infosets.
  int max_actions(PlayerId p) const {
    int n = 0;
    for (InfosetId i : player_infosets.at(p)) {
      n = std::max(n, infosets[i].num_actions);
    }
    return n;
  }

  /// Depth of the player's deepest infoset.
  int max_depth(PlayerId p) const {
    int d = 0;
    for (InfosetId i : player_infosets.at(p)) {
      d = std::max(d, infosets[i].depth);
    }
    return d;
  }

  /// Own-player (infoset, action) sequence on the path to history `h`.
  std::vector<std::pair<InfosetId, int>> own_sequence(HistoryId h,
                                                      PlayerId p) const {
    std::vector<std::pair<InfosetId, int>> seq;
    HistoryId cur = h;
    while (nodes[cur].parent != kNoId) {
      HistoryId par = nodes[cur].parent;
      if (nodes[par].player == p) {
        seq.emplace_back(nodes[par].infoset, nodes[cur].incoming_action);
      }
      cur = par;
    }
    std::reverse(seq.begin(), seq.end());
    return seq;
  }

  bool is_ancestor(HistoryId a, HistoryId b) const {
    while (b != kNoId) {
      if (a == b) return true;
      b = nodes[b].parent;
    }
    return false;
  }

  /// True iff `a` weakly precedes `b` in the owning player's infoset
  /// forest (a == b or a on b's path).
  bool infoset_precedes(InfosetId a, InfosetId b) const {
    if (a == b) return true;
    for (const auto& [anc, act] : infosets[b].path) {
      if (anc == a) return true;
    }
    return false;
  }

  /// The unique action at `a` on the path toward successor infoset `b`,
  /// or -1 if `b` is not a successor of `a`.
  int action_toward(InfosetId a, InfosetId b) const {
    if (a == b) return -1;
    const auto& path = infosets[b].path;
    for (size_t k = 0; k < path.size(); ++k) {
      if (path[k].first == a) return path[k].second;
    }
    return -1;
  }
};

/// Per-infoset action distributions for every player (the chance policy
/// lives in the game itself). Indexed by global infoset id.
class StrategyProfile {
 public:
  StrategyProfile() = default;
  explicit StrategyProfile(const Game& game)
      : dists_(game.infosets.size()) {
    for (const auto& is : game.infosets) {
      dists_[is.id].assign(is.num_actions, 1.0 / is.num_actions);
    }
  }

  std::vector<double>& at(InfosetId i) { return dists_.at(i); }
  const std::vector<double>& at(InfosetId i) const { return dists_.at(i); }
  double prob(InfosetId i, int a) const { return dists_.at(i).at(a); }
  size_t size() const { return dists_.size(); }

  void set(InfosetId i, std::vector<double> dist) {
    dists_.at(i) = std::move(dist);
  }

  /// Replaces this profile's distributions for `p` with those of `other`.
  void assign_player(const Game& game, PlayerId p,
                     const StrategyProfile& other) {
    for (InfosetId i : game.player_infosets.at(p)) dists_[i] = other.at(i);
  }

  /// Renormalizes every distribution; drift beyond `hard` is an error.
  void normalize(double soft = 1e-12, double hard = 1e-6) {
    for (auto& d : dists_) {
      if (d.empty()) continue;
      double s = 0.0;
      for (double v : d) s += v;
      if (std::abs(s - 1.0) > hard) {
        throw std::runtime_error("strategy distribution sum " +
                                 std::to_string(s) + " outside tolerance");
      }
      if (std::abs(s - 1.0) > soft) {
        for (double& v : d) v /= s;
      }
    }
  }

  bool operator==(const StrategyProfile& o) const { return dists_ == o.dists_; }

 private:
  std::vector<std::vector<double>> dists_;
};

/// A pure strategy for one player: an action index per infoset, indexed by
/// position in Game::player_infosets[p].
using PureStrategy = std::vector<int>;

namespace detail {

inline void check(bool cond, const std::string& msg) {
  if (!cond) throw std::runtime_error("game construction: " + msg);
}

}  // namespace detail

/// Incremental game-tree builder. Nodes attach to a declared action of
/// their parent; finalize() checks structure, groups infosets, validates
/// perfect recall and computes the utility bound.
class GameBuilder {
 public:
  explicit GameBuilder(int num_players) : num_players_(num_players) {}

  HistoryId add_decision(HistoryId parent, const std::string& incoming,
                         PlayerId player, const std::string& infoset_key,
                         std::vector<std::string> actions) {
    detail::check(player >= 0 && player < num_players_, "bad player id");
    detail::check(!actions.empty(), "decision node with no actions");
    HistoryId h = attach(parent, incoming);
    nodes_[h].player = player;
    nodes_[h].actions = std::move(actions);
    nodes_[h].children.assign(nodes_[h].actions.size(), kNoId);
    infoset_keys_[h] = infoset_key;
    return h;
  }

  HistoryId add_chance(HistoryId parent, const std::string& incoming,
                       std::vector<std::string> outcomes,
                       std::vector<double> probs) {
    detail::check(outcomes.size() == probs.size(),
                  "chance outcomes/probs size mismatch");
    detail::check(!outcomes.empty(), "chance node with no outcomes");
    double s = 0.0;
    for (double p : probs) {
      detail::check(p >= 0.0, "negative chance probability");
      s += p;
    }
    detail::check(std::abs(s - 1.0) < 1e-9, "chance probs must sum to 1");
    HistoryId h = attach(parent, incoming);
    nodes_[h].player = kChancePlayer;
    nodes_[h].actions = std::move(outcomes);
    nodes_[h].chance_probs = std::move(probs);
    nodes_[h].children.assign(nodes_[h].actions.size(), kNoId);
    return h;
  }

  HistoryId add_terminal(HistoryId parent, const std::string& incoming,
                         std::vector<double> payoffs) {
    detail::check(static_cast<int>(payoffs.size()) == num_players_,
                  "terminal payoff count != num players");
    HistoryId h = attach(parent, incoming);
    nodes_[h].player = kTerminalPlayer;
    nodes_[h].payoffs = std::move(payoffs);
    return h;
  }

  Game finalize(std::string name) {
    Game g;
    g.name = std::move(name);
    g.num_players = num_players_;
    g.nodes = std::move(nodes_);
    g.player_infosets.resize(num_players_);

    // Every declared action must have exactly one child.
    for (HistoryId h = 0; h < static_cast<HistoryId>(g.nodes.size()); ++h) {
      const auto& n = g.nodes[h];
      if (n.is_terminal()) continue;
      for (size_t a = 0; a < n.children.size(); ++a) {
        detail::check(n.children[a] != kNoId,
                      "action '" + n.actions[a] + "' of node " +
                          std::to_string(h) + " has no child");
      }
    }

    group_infosets(g);
    ValidationReport report = validate_perfect_recall_impl(g);
    if (!report.ok) {
      throw std::runtime_error("perfect recall violated: " +
                               report.diagnostics.front());
    }
    build_forest(g);

    for (const auto& n : g.nodes) {
      if (!n.is_terminal()) continue;
      for (double u : n.payoffs) {
        g.utility_bound = std::max(g.utility_bound, std::abs(u));
      }
    }
    return g;
  }

  /// Structure-only perfect-recall check, exposed for games that are
  /// deliberately malformed in tests.
  static ValidationReport validate(const Game& g) {
    return validate_perfect_recall_impl(g);
  }

 private:
  HistoryId attach(HistoryId parent, const std::string& incoming) {
    HistoryId h = static_cast<HistoryId>(nodes_.size());
    nodes_.emplace_back();
    nodes_[h].parent = parent;
    if (parent == kNoId) {
      detail::check(h == 0, "only node 0 may be the root");
    } else {
      detail::check(parent < h, "parent must be created before child");
      auto& pn = nodes_[parent];
      detail::check(!pn.is_terminal(), "cannot attach below a terminal");
      auto it = std::find(pn.actions.begin(), pn.actions.end(), incoming);
      detail::check(it != pn.actions.end(),
                    "unknown action '" + incoming + "' at parent");
      int idx = static_cast<int>(it - pn.actions.begin());
      detail::check(pn.children[idx] == kNoId,
                    "action '" + incoming + "' already has a child");
      pn.children[idx] = h;
      nodes_[h].incoming_action = idx;
    }
    return h;
  }

  void group_infosets(Game& g) {
    std::map<std::pair<PlayerId, std::string>, InfosetId> index;
    for (HistoryId h = 0; h < static_cast<HistoryId>(g.nodes.size()); ++h) {
      auto& n = g.nodes[h];
      if (!n.is_decision()) continue;
      const std::string& key = infoset_keys_.at(h);
      auto it = index.find({n.player, key});
      if (it == index.end()) {
        InfosetId id = static_cast<InfosetId>(g.infosets.size());
        index.emplace(std::make_pair(n.player, key), id);
        InfosetInfo info;
        info.id = id;
        info.player = n.player;
        info.key = key;
        info.num_actions = static_cast<int>(n.actions.size());
        g.infosets.push_back(std::move(info));
        g.player_infosets[n.player].push_back(id);
        n.infoset = id;
      } else {
        n.infoset = it->second;
        detail::check(g.infosets[it->second].num_actions ==
                          static_cast<int>(n.actions.size()),
                      "action sets differ within infoset '" + key + "'");
        detail::check(g.nodes[g.infosets[it->second].histories.front()]
                              .actions == n.actions,
                      "action labels differ within infoset '" + key + "'");
      }
      g.infosets[n.infoset].histories.push_back(h);
    }
  }

  static ValidationReport validate_perfect_recall_impl(const Game& g) {
    ValidationReport report;
    for (const auto& is : g.infosets) {
      auto ref = g.own_sequence(is.histories.front(), is.player);
      for (size_t k = 1; k < is.histories.size(); ++k) {
        auto seq = g.own_sequence(is.histories[k], is.player);
        if (seq != ref) {
          report.ok = false;
          std::ostringstream os;
          os << "infoset '" << is.key << "' (player " << is.player
             << "): histories " << is.histories.front() << " and "
             << is.histories[k] << " have different own action sequences";
          report.diagnostics.push_back(os.str());
        }
      }
    }
    return report;
  }

  static void build_forest(Game& g) {
    for (PlayerId p = 0; p < g.num_players; ++p) {
      for (size_t k = 0; k < g.player_infosets[p].size(); ++k) {
        g.infosets[g.player_infosets[p][k]].position = static_cast<int>(k);
      }
    }
    for (auto& is : g.infosets) {
      auto seq = g.own_sequence(is.histories.front(), is.player);
      is.depth = static_cast<int>(seq.size());
      is.path = seq;
      if (!seq.empty()) {
        is.parent = seq.back().first;
        is.parent_action = seq.back().second;
      }
      is.children_by_action.assign(is.num_actions, {});
      is.terminal_successors.assign(is.num_actions, {});
    }
    // Construction order must place parents before children.
    for (auto& is : g.infosets) {
      detail::check(is.parent == kNoId || is.parent < is.id,
                    "infoset order is not topological");
    }
    // Successor structure: walk down from each (history, action) until the
    // next own decision or a terminal.
    for (auto& is : g.infosets) {
      for (HistoryId h : is.histories) {
        for (int a = 0; a < is.num_actions; ++a) {
          collect_successors(g, is, g.nodes[h].children[a], a);
        }
      }
      for (auto& v : is.children_by_action) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
      }
    }
  }

  static void collect_successors(Game& g, InfosetInfo& is, HistoryId h,
                                 int action) {
    const auto& n = g.nodes[h];
    if (n.is_terminal()) {
      is.terminal_successors[action].push_back(h);
      return;
    }
    if (n.is_decision() && n.player == is.player) {
      is.children_by_action[action].push_back(n.infoset);
      return;
    }
    for (HistoryId c : n.children) collect_successors(g, is, c, action);
  }

  int num_players_;
  std::vector<HistoryNode> nodes_;
  std::map<HistoryId, std::string> infoset_keys_;
};

/// Perfect-recall check on a finished game.
inline ValidationReport validate_perfect_recall(const Game& g) {
  return GameBuilder::validate(g);
}

// ---------------------------------------------------------------------------
// Text serialization (version 1).
//
// Line-oriented, one record per history:
//   efg-text 1
//   game <name> players <N> [scale <s> unit <u>]
//   node <id> parent <pid|-> action <label|-> decision <player> infoset <key>
//   node <id> parent <pid|-> action <label|-> chance <p0> <p1> ...
//   node <id> parent <pid|-> action <label|-> terminal <u0> <u1> ...
// Labels and keys are quoted with URL-style %XX escapes for whitespace.
// ---------------------------------------------------------------------------

namespace detail {

inline std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == ' ' || c == '%' || c == '\n' || c == '\t') {
      char buf[4];
      std::snprintf(buf, sizeof(buf), "%%%02X", static_cast<unsigned char>(c));
      out += buf;
    } else {
      out += c;
    }
  }
  return out.empty() ? "-" : out;
}

inline std::string unescape(const std::string& s) {
  if (s == "-") return "";
  std::string out;
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%' && i + 2 < s.size()) {
      out += static_cast<char>(std::stoi(s.substr(i + 1, 2), nullptr, 16));
      i += 2;
    } else {
      out += s[i];
    }
  }
  return out;
}

}  // namespace detail

inline void write_game_text(const Game& g, std::ostream& os) {
  os << "efg-text 1\n";
  os << "game " << detail::escape(g.name) << " players " << g.num_players
     << " scale " << g.payoff_scale << " unit " << detail::escape(g.payoff_unit)
     << "\n";
  char buf[64];
  for (HistoryId h = 0; h < static_cast<HistoryId>(g.nodes.size()); ++h) {
    const auto& n = g.nodes[h];
    os << "node " << h << " parent ";
    if (n.parent == kNoId) {
      os << "-";
      os << " action -";
    } else {
      os << n.parent << " action "
         << detail::escape(g.nodes[n.parent].actions[n.incoming_action]);
    }
    if (n.is_terminal()) {
      os << " terminal";
      for (double u : n.payoffs) {
        std::snprintf(buf, sizeof(buf), " %.17g", u);
        os << buf;
      }
    } else if (n.is_chance()) {
      os << " chance";
      for (size_t a = 0; a < n.actions.size(); ++a) {
        std::snprintf(buf, sizeof(buf), " %.17g", n.chance_probs[a]);
        os << " " << detail::escape(n.actions[a]) << buf;
      }
    } else {
      os << " decision " << n.player << " infoset "
         << detail::escape(g.infosets[n.infoset].key) << " actions";
      for (const auto& a : n.actions) os << " " << detail::escape(a);
    }
    os << "\n";
  }
}

inline Game read_game_text(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "efg-text 1") {
    throw std::runtime_error("bad or unsupported game text header");
  }
  if (!std::getline(is, line)) throw std::runtime_error("missing game line");
  std::istringstream head(line);
  std::string tok, name, unit = "utility";
  int players = 0;
  double scale = 1.0;
  head >> tok;
  if (tok != "game") throw std::runtime_error("expected 'game' line");
  head >> name;
  while (head >> tok) {
    if (tok == "players") head >> players;
    else if (tok == "scale") head >> scale;
    else if (tok == "unit") { head >> unit; }
    else throw std::runtime_error("unknown game attribute: " + tok);
  }
  if (players <= 0) throw std::runtime_error("bad player count");

  GameBuilder b(players);
  int expected_id = 0;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    ls >> tok;
    if (tok != "node") throw std::runtime_error("expected node record");
    int id;
    std::string parent_tok, action_tok, kind;
    ls >> id >> tok >> parent_tok >> tok >> action_tok >> kind;
    if (id != expected_id) {
      throw std::runtime_error("node ids must be dense and ordered");
    }
    ++expected_id;
    HistoryId parent =
        parent_tok == "-" ? kNoId : static_cast<HistoryId>(std::stoi(parent_tok));
    std::string incoming = detail::unescape(action_tok);
    if (kind == "terminal") {
      std::vector<double> payoffs;
      double u;
      while (ls >> u) payoffs.push_back(u);
      b.add_terminal(parent, incoming, std::move(payoffs));
    } else if (kind == "chance") {
      std::vector<std::string> outcomes;
      std::vector<double> probs;
      std::string label;
      double p;
      while (ls >> label >> p) {
        outcomes.push_back(detail::unescape(label));
        probs.push_back(p);
      }
      b.add_chance(parent, incoming, std::move(outcomes), std::move(probs));
    } else if (kind == "decision") {
      int player;
      std::string kw, key;
      ls >> player >> kw >> key;
      if (kw != "infoset") throw std::runtime_error("expected 'infoset'");
      ls >> kw;
      if (kw != "actions") throw std::runtime_error("expected 'actions'");
      std::vector<std::string> actions;
      std::string a;
      while (ls >> a) actions.push_back(detail::unescape(a));
      b.add_decision(parent, incoming, player, detail::unescape(key),
                     std::move(actions));
    } else {
      throw std::runtime_error("unknown node kind: " + kind);
    }
  }
  Game g = b.finalize(detail::unescape(name));
  g.payoff_scale = scale;
  g.payoff_unit = detail::unescape(unit);
  return g;
}

}  // namespace efr

#endif  // EFR_GAME_HPP
