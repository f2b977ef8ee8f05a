#pragma once

#include <vector>

#include "wmp/model.hpp"

namespace wmp {

// Bottom strongly connected components of a Markov chain, the remaining
// transient states, and the exact probability of reaching each BSCC from
// the initial state. The reachability probabilities sum to exactly 1.
struct BsccPartition {
  std::vector<std::vector<int>> bsccs;
  std::vector<int> transient_states;
  std::vector<Rational> reachability;
};

BsccPartition bscc_decomposition(const MarkovChain& mc);

// Exact probability, per state, of eventually reaching `target`.
std::vector<Rational> reachability_probabilities(const MarkovChain& mc, const std::vector<int>& target);

// Exact probability, per state, of staying inside `stay` until `target` is
// reached.
std::vector<Rational> until_probabilities(const MarkovChain& mc, const std::vector<int>& stay,
                                          const std::vector<int>& target);

// A maximal end component: states plus, per state, the indices of the kept
// choices (into Mdp::choices(state)).
struct Mec {
  std::vector<int> states;
  std::vector<std::vector<int>> choice_indices;
};

struct MecPartition {
  std::vector<Mec> mecs;
};

MecPartition mec_decomposition(const Mdp& mdp);

// Minimum over all cycles of the mean edge weight, exact. The graph must be
// strongly connected with at least one edge.
Rational min_mean_cycle(const WeightedDigraph& graph);

namespace detail {

// Tarjan's algorithm, iterative. Components are returned in reverse
// topological order of the condensation.
std::vector<std::vector<int>> strongly_connected_components(const std::vector<std::vector<int>>& adj);

// Solves a x = b exactly by Gaussian elimination over rationals.
std::vector<Rational> solve_linear(std::vector<std::vector<Rational>> a, std::vector<Rational> b);

// Expected number of visits to each state of `stay` before first leaving it,
// starting from `start`, counting only states from which leaving is possible
// (states trapped inside `stay` get 0: they never contribute to an exit).
std::vector<Rational> expected_visits_before_exit(const MarkovChain& mc, const std::vector<char>& stay,
                                                  int start);

}  // namespace detail

}  // namespace wmp
