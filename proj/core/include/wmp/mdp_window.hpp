#pragma once

#include <vector>

#include "wmp/game.hpp"
#include "wmp/graph.hpp"
#include "wmp/mc_window.hpp"
#include "wmp/model.hpp"
#include "wmp/options.hpp"

namespace wmp {

// Expected fixed window mean-payoff inside one MEC, passed as a standalone
// strongly connected MDP with integer weights: twice the direct window value
// of the derived game at the best state vertex, for window 2 * l_max.
Rational mec_fixed_window_value(const Mdp& mec, int l_max);

// Expected bounded window mean-payoff inside one MEC: twice the mean-payoff
// game value of the derived game at the best state vertex.
Rational mec_bounded_window_value(const Mdp& mec, const SolverOptions& opts = {});

enum class MecMode { Fixed, Bounded };

// The input MDP with every in-MEC edge weight replaced by the MEC's window
// value; weights outside MECs are untouched.
struct MecReplacement {
  Mdp mdp;
  MecPartition partition;
  std::vector<Rational> mec_value;  // parallel to partition.mecs
};

MecReplacement replace_mec_weights(const Mdp& mdp, int l_max, MecMode mode,
                                   const SolverOptions& opts = {});

// Optimal expected mean payoff of an MDP whose MECs all carry one constant
// edge weight (validated). Solved as a committed-MEC terminal-value problem
// by policy iteration with exact linear solves.
Rational expected_mean_payoff_const_mec(const Mdp& mdp);

AnalysisResult expected_fixed_window(const Mdp& mdp, int l_max, const SolverOptions& opts = {});

AnalysisResult expected_bounded_window(const Mdp& mdp, const SolverOptions& opts = {});

// The product MDP tracking the last l_max - 1 weights and the running
// minimum window value; its expected mean payoff equals the expected direct
// fixed window value of the source.
struct DirFixProductMdp {
  struct Node {
    int state;
    std::vector<Integer> window;  // last l_max - 1 weights, oldest first
    Rational lambda;              // minimum window value seen so far
  };
  Mdp mdp;
  std::vector<Node> nodes;
};

// `mdp` must carry non-negative integer weights (normalize first); built by
// forward reachability only and guarded by opts.product_cap.
DirFixProductMdp build_direct_window_product(const Mdp& mdp, int l_max, const SolverOptions& opts = {});

AnalysisResult expected_direct_fixed_window(const Mdp& mdp, int l_max, const SolverOptions& opts = {});

}  // namespace wmp
