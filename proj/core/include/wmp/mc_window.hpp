#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wmp/graph.hpp"
#include "wmp/model.hpp"
#include "wmp/options.hpp"

namespace wmp {

// Finite law of a window value: value -> probability, probabilities sum to 1.
using ValueDistribution = std::map<Rational, Rational>;

// Value of one internal component (BSCC or MEC), in user weight space.
struct ComponentValue {
  std::vector<int> states;
  Rational value;
};

struct AnalysisResult {
  Objective objective;
  Rational expected;
  std::optional<ValueDistribution> distribution;
  std::vector<ComponentValue> component_values;
  WeightTransform transform;
  std::string algorithm;
};

// Worst-case window total payoff over windows of length l_max, per vertex:
// table[v] = min over l_max-step paths from v of the best prefix sum, and
// the set of vertices where that is non-negative.
struct WindowTable {
  std::vector<Rational> total_payoff;
  std::vector<char> non_negative;

  bool all_non_negative() const {
    for (char c : non_negative)
      if (!c) return false;
    return true;
  }
  std::vector<int> states() const {
    std::vector<int> r;
    for (size_t i = 0; i < non_negative.size(); ++i)
      if (non_negative[i]) r.push_back(static_cast<int>(i));
    return r;
  }
};

// The closed strongly connected graph `bscc` is scanned for states whose
// every window of length l_max closes at threshold 0.
WindowTable non_negative_window_states(const WeightedDigraph& bscc, int l_max);

// Expected fixed window mean-payoff inside one BSCC: the minimum over states
// and l_max-step paths of the window mean-payoff, found by threshold search
// over the finite candidate value set. Requires integer weights.
Rational bscc_fixed_window_value(const WeightedDigraph& bscc, int l_max);

AnalysisResult expected_fixed_window(const MarkovChain& mc, int l_max, const SolverOptions& opts = {});

AnalysisResult expected_bounded_window(const MarkovChain& mc, const SolverOptions& opts = {});

// The derived chain tracking (state, window age, deficit) for a threshold;
// reaching `trap` means some window of length l_max failed to close.
struct ThresholdProductMc {
  struct Node {
    int state;        // original state
    int age;          // window age in [0 .. l_max-1]
    Integer deficit;  // outstanding weight needed to close, > 0 unless age = 0
  };
  MarkovChain chain;
  std::vector<Node> nodes;  // indexed as chain states; trap has no entry
  int trap;
  Rational lambda;
  Integer deficit_bound;  // declared worst case, max |reduced weight| * (l_max - 1)
};

// `mc` must carry non-negative integer weights (normalize first) and
// lambda must be non-negative.
ThresholdProductMc build_threshold_product(const MarkovChain& mc, const Rational& lambda, int l_max);

// Expected direct fixed window mean-payoff with the full value distribution,
// via threshold products over the candidate value set.
AnalysisResult expected_direct_fixed_window(const MarkovChain& mc, int l_max,
                                            const SolverOptions& opts = {});

// The path Markov chain: states are the l_max-step paths of `mc` reachable
// while sliding from the initial state, labelled with their window
// mean-payoff.
struct PathUnfolding {
  MarkovChain chain;
  int init;                                  // the artificial source state
  std::vector<Rational> label;               // per chain state; label[init] = 0
  std::vector<std::vector<int>> path_states;  // original-state sequence per chain state
};

PathUnfolding build_path_unfolding(const MarkovChain& mc, int l_max, const SolverOptions& opts = {});

// Same expectation and distribution as expected_direct_fixed_window, via the
// path unfolding; exponential in l_max, guarded by opts.unfold_cap.
AnalysisResult expected_direct_fixed_window_unfold(const MarkovChain& mc, int l_max,
                                                   const SolverOptions& opts = {});

// Checker for the state-local good-window property: a state satisfies it
// when the probability mass of l_max-step paths from it with window
// mean-payoff >= lambda is at least p. The verdict requires all states
// reachable from the initial state to satisfy it.
struct GoodWindowCheck {
  std::vector<char> satisfied;
  std::vector<Rational> mass;
  bool all_reachable_satisfied;
};

GoodWindowCheck check_good_window_everywhere(const MarkovChain& mc, const Rational& p, int l_max,
                                             const Rational& lambda);

}  // namespace wmp
