#pragma once

#include <utility>
#include <vector>

#include "wmp/model.hpp"
#include "wmp/options.hpp"

namespace wmp {

// The two-player game derived from an MDP: Player 1 keeps the states and
// picks actions over fresh weight-0 edges, Player 2 owns the (state, action)
// vertices and resolves the distribution over the original weights. Path
// means halve in the translation.
struct GameFromMdp {
  TwoPlayerGame game;
  std::vector<int> state_vertex;              // MDP state -> Player-1 vertex
  std::vector<std::pair<int, int>> origin;    // vertex -> (state, choice index), -1 for states
};

GameFromMdp game_from_mdp(const Mdp& mdp);

// Optimal window total payoff within l_max steps under optimal play
// (Player 1 maximizes at her vertices, Player 2 minimizes), and the set of
// vertices where it is non-negative.
struct GoodWinResult {
  std::vector<Rational> value;
  std::vector<char> non_negative;
};

GoodWinResult good_win(const TwoPlayerGame& game, int l_max);

// Vertices from which Player 1 wins the direct fixed window objective at
// threshold 0: the greatest fixpoint of good_win under subgame restriction.
std::vector<char> direct_window_winning(const TwoPlayerGame& game, int l_max);

// Per-vertex direct fixed window value: the largest threshold the vertex
// wins, searched over the finite candidate value set. Requires integer
// weights.
struct VertexValues {
  std::vector<Rational> value;
  Rational maximum;
};

VertexValues max_direct_window_value(const TwoPlayerGame& game, int l_max);

// Exact per-vertex mean-payoff game values via bounded value iteration and
// rational rounding. Requires integer weights; iteration count is
// 4 n^3 W, guarded by opts.mean_payoff_iteration_cap.
std::vector<Rational> mean_payoff_game_values(const TwoPlayerGame& game, const SolverOptions& opts = {});

}  // namespace wmp
