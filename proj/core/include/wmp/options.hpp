#pragma once

#include <cstddef>
#include <cstdint>

namespace wmp {

// Knobs shared by the solvers. Results never depend on them except through
// explicit size-cap errors; `threads` fans out independent subproblems with
// a deterministic merge, so output is identical for any thread count.
struct SolverOptions {
  int threads = 1;
  // Path-unfolding guard: the construction is rejected when |S|^l_max
  // exceeds this.
  std::uint64_t unfold_cap = 1'000'000;
  // Reachable-state guard for the direct-fixed MDP product.
  std::uint64_t product_cap = 1'000'000;
  // Iteration guard for the exact mean-payoff value iteration.
  std::uint64_t mean_payoff_iteration_cap = 100'000'000;
  // When enumerating the window values realized by l_max-step paths would
  // visit more than this many path nodes, fall back to the full candidate
  // superset.
  std::uint64_t realized_value_enum_cap = 200'000;
};

}  // namespace wmp
