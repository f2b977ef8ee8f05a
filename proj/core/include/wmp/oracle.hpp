#pragma once

#include <cstdint>
#include <vector>

#include "wmp/model.hpp"

namespace wmp::oracle {

// Brute-force counterparts of the solvers. These deliberately share no
// recurrence or traversal with the solver implementations: agreement between
// the two sides is what the differential test suites check.

// Minimum window mean-payoff over all l_max-step paths from all vertices,
// by exhaustive enumeration.
Rational brute_bscc_fixed_window_value(const WeightedDigraph& bscc, int l_max,
                                       std::uint64_t cap = 500'000);

// All elementary cycles, as vertex sequences v0 ... vk with vk = v0.
std::vector<std::vector<int>> elementary_cycles(const WeightedDigraph& graph);

// Minimum mean over the elementary cycles. Parallel edges collapse to their
// minimum weight.
Rational brute_min_cycle_mean(const WeightedDigraph& graph);

// Per-vertex direct fixed window value via the explicit
// (vertex, age, deficit) safety game solved by attractor computation, one
// threshold at a time. Requires integer weights.
std::vector<Rational> brute_direct_window_game_values(const TwoPlayerGame& game, int l_max,
                                                      std::uint64_t cap = 100'000);

// Per-vertex mean-payoff game value by enumerating positional strategy
// pairs; checks that the min-max and max-min orders agree before returning.
std::vector<Rational> brute_mean_payoff_game_values(const TwoPlayerGame& game,
                                                    std::uint64_t cap = 2'000'000);

// Reset constructions: the source game is augmented with high-weight edges
// back to the initial vertex so that the value from anywhere matches the
// value from the start; each Player-1 edge is split in two. The source game
// must be bipartite alternating, carry non-negative integer weights, and
// start at a Player-1 vertex.
TwoPlayerGame build_reset_game(const TwoPlayerGame& game, int l_max);

// The MDP whose derived game is the reset game up to renaming: Player-2
// choices become fair coin flips between continuing and resetting.
Mdp build_reset_mdp(const TwoPlayerGame& game, int l_max);

// Bounded-window variants: identical except the reset weight is
// (W + 1) * |vertices of the reset game|.
TwoPlayerGame build_bounded_reset_game(const TwoPlayerGame& game);
Mdp build_bounded_reset_mdp(const TwoPlayerGame& game);

// Weight carried by the reset edges of the fixed (respectively bounded)
// construction; exposed so tests can pin the values.
Rational reset_edge_weight(const TwoPlayerGame& game, int l_max);
Rational bounded_reset_edge_weight(const TwoPlayerGame& game);

// Seeded Monte Carlo estimate of a Fixed or DirectFixed expectation over a
// Markov chain. Exact rational mean and variance; the normal-approximation
// interval is derived from them.
struct McEstimate {
  Rational mean;
  Rational variance_of_mean;  // s^2 / N, exact
  long long samples = 0;

  // (exact - mean)^2 <= k^2 * variance_of_mean, evaluated exactly.
  bool within_sigmas(const Rational& exact, int k) const;
  double stddev_of_mean() const;
  double ci_low(double k) const;
  double ci_high(double k) const;
};

McEstimate monte_carlo(const MarkovChain& mc, const Objective& objective, long long samples,
                       int horizon, int burn_in, std::uint64_t seed);

struct RandomModelParams {
  int states = 4;
  int min_out_degree = 1;
  int max_out_degree = 2;
  int min_actions = 1;  // MDPs only
  int max_actions = 1;
  long long weight_min = 0;
  long long weight_max = 3;
  int weight_denominator_max = 1;  // > 1 draws rational weights
  bool strongly_connected = false;
  bool bipartite = false;  // games: alternating edges, Player-1 initial
};

// Deterministic per seed; all emitted distributions sum to exactly 1.
MarkovChain random_markov_chain(const RandomModelParams& params, std::uint64_t seed);
Mdp random_mdp(const RandomModelParams& params, std::uint64_t seed);
TwoPlayerGame random_game(const RandomModelParams& params, std::uint64_t seed);

// The worked-example chain: two BSCCs {s1} and {s3, s4} reached with
// probability 1/2 each; the eight length-2 window values from s3/s4 are
// 3, 3, 2, 2, 3/2, 1, 1, 1.
MarkovChain fig1();
// Four-state cycle with weights 2, 5, 4, 3 and its copy shifted by -3.
MarkovChain fig2_chain();
MarkovChain fig3_chain();
WeightedDigraph fig2_cycle();
WeightedDigraph fig3_cycle();
// Small alternating game with maximum weight 4 (reset fixture source).
TwoPlayerGame fig7_game();
// Chain whose bounded window value is 0 while every fixed window value is
// negative; constructed, not paper-sourced.
MarkovChain strict_gap_chain();

}  // namespace wmp::oracle
