#include "wmp/mdp_window.hpp"

#include <gtest/gtest.h>

#include <functional>

#include "test_util.hpp"
#include "wmp/oracle.hpp"

namespace wmp {
namespace {

Mdp single_state_loop(const Rational& w) {
  Mdp::Builder b;
  b.add_state("s");
  b.set_initial("s");
  b.add_transition(0, "a", 0, Rational(1), w);
  return std::move(b).build();
}

// fig1's {s3, s4} component as a single-action MDP.
Mdp fig1_b2_mdp() {
  Mdp::Builder b;
  b.add_state("s3");
  b.add_state("s4");
  b.set_initial("s3");
  b.add_transition(0, "a", 0, Rational(1, 2), Rational(3));
  b.add_transition(0, "a", 1, Rational(1, 2), Rational(2));
  b.add_transition(1, "a", 0, Rational(1, 2), Rational(0));
  b.add_transition(1, "a", 1, Rational(1, 2), Rational(1));
  return std::move(b).build();
}

TEST(MecFixedWindow, SelfLoopAndDegeneracy) {
  EXPECT_EQ(mec_fixed_window_value(single_state_loop(Rational(6)), 2), Rational(6));
  // Must match the chain-side component value of the same component.
  EXPECT_EQ(mec_fixed_window_value(fig1_b2_mdp(), 2), Rational(1));
}

TEST(MecFixedWindow, RejectsNonMec) {
  Mdp::Builder b;
  b.add_state("x");
  b.add_state("y");
  b.set_initial("x");
  b.add_transition(0, "a", 1, Rational(1), Rational(0));
  b.add_transition(1, "a", 1, Rational(1), Rational(0));
  EXPECT_THROW(mec_fixed_window_value(std::move(b).build(), 2), ValidationError);
}

TEST(MecFixedWindow, MatchesSafetyGameOracle) {
  std::mt19937_64 seeds(127);
  int rounds = 0;
  std::uint64_t seed = 1000;
  while (rounds < 25) {
    oracle::RandomModelParams params;
    params.states = static_cast<int>(test::rnd(seeds, 1, 4));
    params.max_actions = 2;
    params.strongly_connected = true;
    params.weight_min = 0;
    params.weight_max = 2;
    auto mdp = oracle::random_mdp(params, ++seed);
    // Keep only instances that are a single MEC over all state-action pairs.
    auto mecs = mec_decomposition(mdp);
    if (mecs.mecs.size() != 1 || static_cast<int>(mecs.mecs[0].states.size()) != mdp.num_states())
      continue;
    bool all_actions = true;
    for (size_t i = 0; i < mecs.mecs[0].states.size(); ++i)
      if (mecs.mecs[0].choice_indices[i].size() !=
          mdp.choices(mecs.mecs[0].states[i]).size())
        all_actions = false;
    if (!all_actions) continue;
    ++rounds;
    int l_max = static_cast<int>(test::rnd(seeds, 1, 2));
    auto derived = game_from_mdp(mdp);
    auto brute = oracle::brute_direct_window_game_values(derived.game, 2 * l_max);
    Rational best = brute[static_cast<size_t>(derived.state_vertex[0])];
    for (int s = 1; s < mdp.num_states(); ++s)
      best = std::max(best, brute[static_cast<size_t>(derived.state_vertex[static_cast<size_t>(s)])]);
    EXPECT_EQ(mec_fixed_window_value(mdp, l_max), Rational(2) * best);
  }
}

TEST(MecBoundedWindow, SingleActionEqualsMinMeanCycle) {
  std::mt19937_64 seeds(131);
  for (int round = 0; round < 20; ++round) {
    oracle::RandomModelParams params;
    params.states = static_cast<int>(test::rnd(seeds, 1, 5));
    params.strongly_connected = true;
    params.weight_min = 0;
    params.weight_max = 4;
    auto mdp = oracle::random_mdp(params, seeds());
    auto chain = mdp.induced_chain();
    std::vector<int> all;
    for (int s = 0; s < chain.num_states(); ++s) all.push_back(s);
    EXPECT_EQ(mec_bounded_window_value(mdp), min_mean_cycle(chain.subgraph(all).graph));
  }
}

TEST(ReplaceMecWeights, OnlyInMecEdgesRewritten) {
  // Transient chain into two components of values 0 and 5.
  Mdp::Builder b;
  b.add_state("t");
  b.add_state("lo");
  b.add_state("hi");
  b.set_initial("t");
  b.add_transition(0, "left", 1, Rational(1), Rational(7));
  b.add_transition(0, "right", 2, Rational(1), Rational(9));
  b.add_transition(1, "a", 1, Rational(1), Rational(0));
  b.add_transition(2, "a", 2, Rational(1), Rational(5));
  auto mdp = std::move(b).build();
  auto replaced = replace_mec_weights(mdp, 2, MecMode::Fixed);
  ASSERT_EQ(replaced.partition.mecs.size(), 2u);
  EXPECT_EQ(replaced.mdp.choices(0)[0].edges[0].weight, Rational(7));
  EXPECT_EQ(replaced.mdp.choices(0)[1].edges[0].weight, Rational(9));
  EXPECT_EQ(replaced.mdp.choices(1)[0].edges[0].weight, Rational(0));
  EXPECT_EQ(replaced.mdp.choices(2)[0].edges[0].weight, Rational(5));
  EXPECT_EQ(expected_fixed_window(mdp, 2).expected, Rational(5));
}

TEST(ExpectedMeanPayoffConstMec, Examples) {
  EXPECT_EQ(expected_mean_payoff_const_mec(single_state_loop(Rational(4, 3))), Rational(4, 3));

  // Choice at the start: reach value 1 surely, or flip a coin between 0 and 5.
  Mdp::Builder b;
  b.add_state("s");
  b.add_state("one");
  b.add_state("zero");
  b.add_state("five");
  b.set_initial("s");
  b.add_transition(0, "sure", 1, Rational(1), Rational(0));
  b.add_transition(0, "flip", 2, Rational(1, 2), Rational(0));
  b.add_transition(0, "flip", 3, Rational(1, 2), Rational(0));
  b.add_transition(1, "a", 1, Rational(1), Rational(1));
  b.add_transition(2, "a", 2, Rational(1), Rational(0));
  b.add_transition(3, "a", 3, Rational(1), Rational(5));
  EXPECT_EQ(expected_mean_payoff_const_mec(std::move(b).build()), Rational(5, 2));
}

TEST(ExpectedMeanPayoffConstMec, RejectsNonConstantMecs) {
  EXPECT_THROW(expected_mean_payoff_const_mec(fig1_b2_mdp()), UnsupportedError);
}

// Memoryless enumeration oracle: each policy induces a chain whose value is
// the reach-weighted constant of the absorbed component.
Rational enumerate_memoryless_optimum(const Mdp& mdp) {
  std::vector<size_t> policy(static_cast<size_t>(mdp.num_states()), 0);
  std::optional<Rational> best;
  std::function<void(int)> go = [&](int s) {
    if (s == mdp.num_states()) {
      MarkovChain::Builder b;
      for (int v = 0; v < mdp.num_states(); ++v) b.add_state(mdp.state_name(v));
      b.set_initial(mdp.initial());
      for (int v = 0; v < mdp.num_states(); ++v)
        for (const auto& e : mdp.choices(v)[policy[static_cast<size_t>(v)]].edges)
          b.add_edge(v, e.dst, e.prob, e.weight);
      auto chain = std::move(b).build();
      auto part = bscc_decomposition(chain);
      Rational value;
      for (size_t i = 0; i < part.bsccs.size(); ++i) {
        // Constant-weight components: any internal edge carries the value.
        int v0 = part.bsccs[i][0];
        value += part.reachability[i] * chain.out(v0)[0].weight;
      }
      if (!best || value > *best) best = value;
      return;
    }
    for (size_t c = 0; c < mdp.choices(s).size(); ++c) {
      policy[static_cast<size_t>(s)] = c;
      go(s + 1);
    }
  };
  go(0);
  return *best;
}

TEST(ExpectedMeanPayoffConstMec, MatchesMemorylessEnumeration) {
  std::mt19937_64 seeds(137);
  int rounds = 0;
  std::uint64_t seed = 5000;
  while (rounds < 30) {
    oracle::RandomModelParams params;
    params.states = static_cast<int>(test::rnd(seeds, 2, 6));
    params.max_actions = 2;
    params.max_out_degree = 2;
    params.weight_min = 0;
    params.weight_max = 4;
    auto raw = oracle::random_mdp(params, ++seed);
    // Make MEC weights constant by rewriting them with their own index.
    auto mecs = mec_decomposition(raw);
    if (mecs.mecs.empty()) continue;
    Mdp::Builder b;
    for (int s = 0; s < raw.num_states(); ++s) b.add_state(raw.state_name(s));
    b.set_initial(raw.initial());
    std::vector<std::map<int, Rational>> rewrite(static_cast<size_t>(raw.num_states()));
    for (size_t mi = 0; mi < mecs.mecs.size(); ++mi)
      for (size_t i = 0; i < mecs.mecs[mi].states.size(); ++i)
        for (int ci : mecs.mecs[mi].choice_indices[i])
          rewrite[static_cast<size_t>(mecs.mecs[mi].states[i])][ci] =
              Rational(static_cast<long long>(mi * 2 + 1), 2);
    for (int s = 0; s < raw.num_states(); ++s)
      for (size_t ci = 0; ci < raw.choices(s).size(); ++ci) {
        auto it = rewrite[static_cast<size_t>(s)].find(static_cast<int>(ci));
        for (const auto& e : raw.choices(s)[ci].edges)
          b.add_transition(s, raw.action_name(raw.choices(s)[ci].action), e.dst, e.prob,
                           it == rewrite[static_cast<size_t>(s)].end() ? e.weight : it->second);
      }
    auto mdp = std::move(b).build();
    ++rounds;
    EXPECT_EQ(expected_mean_payoff_const_mec(mdp), enumerate_memoryless_optimum(mdp));
  }
}

TEST(ExpectedFixedWindowMdp, DegeneracyOnFig1) {
  Mdp::Builder b;
  auto fig1 = oracle::fig1();
  for (int s = 0; s < fig1.num_states(); ++s) b.add_state(fig1.state_name(s));
  b.set_initial(fig1.initial());
  for (int s = 0; s < fig1.num_states(); ++s)
    for (const auto& e : fig1.out(s)) b.add_transition(s, "a", e.dst, e.prob, e.weight);
  auto mdp = std::move(b).build();
  EXPECT_EQ(expected_fixed_window(mdp, 2).expected, Rational(3, 2));
  EXPECT_EQ(expected_bounded_window(mdp).expected, Rational(3, 2));
  EXPECT_EQ(expected_direct_fixed_window(mdp, 2).expected, Rational(1));
}

TEST(ExpectedWindowMdp, DegeneracySuiteOnRandomSingleActionMdps) {
  std::mt19937_64 seeds(139);
  for (int round = 0; round < 25; ++round) {
    oracle::RandomModelParams params;
    params.states = static_cast<int>(test::rnd(seeds, 2, 5));
    params.weight_min = 0;
    params.weight_max = 3;
    params.max_out_degree = 2;
    auto mdp = oracle::random_mdp(params, seeds());
    auto chain = mdp.induced_chain();
    int l_max = static_cast<int>(test::rnd(seeds, 1, 3));
    EXPECT_EQ(expected_fixed_window(mdp, l_max).expected,
              expected_fixed_window(chain, l_max).expected);
    EXPECT_EQ(expected_bounded_window(mdp).expected, expected_bounded_window(chain).expected);
    EXPECT_EQ(expected_direct_fixed_window(mdp, l_max).expected,
              expected_direct_fixed_window(chain, l_max).expected);
  }
}

TEST(DirectWindowProduct, SelfLoopStabilizes) {
  auto product = build_direct_window_product(single_state_loop(Rational(3)), 3);
  // (s, [3,3], 3) is reached after the sentinel entries roll out and loops.
  EXPECT_LE(product.nodes.size(), 4u);
  for (const auto& node : product.nodes) EXPECT_EQ(node.lambda, Rational(3));
}

TEST(DirectWindowProduct, LambdaComponentsWithinCandidateSetAndMonotone) {
  std::mt19937_64 seeds(149);
  for (int round = 0; round < 20; ++round) {
    oracle::RandomModelParams params;
    params.states = static_cast<int>(test::rnd(seeds, 2, 4));
    params.max_actions = 2;
    params.weight_min = 0;
    params.weight_max = 2;
    auto norm = normalize(oracle::random_mdp(params, seeds()));
    int l_max = 2;
    auto product = build_direct_window_product(norm.model, l_max);
    Integer w = norm.model.max_weight().numerator();
    for (const auto& node : product.nodes) {
      EXPECT_LE(node.lambda.denominator(), l_max);
      EXPECT_GE(node.lambda, Rational(0));
      EXPECT_LE(node.lambda, Rational(w));
    }
    // Lambda never increases along any edge of the product.
    for (int t = 0; t < product.mdp.num_states(); ++t)
      for (const auto& c : product.mdp.choices(t))
        for (const auto& e : c.edges)
          EXPECT_LE(product.nodes[static_cast<size_t>(e.dst)].lambda,
                    product.nodes[static_cast<size_t>(t)].lambda);
  }
}

TEST(DirectWindowProduct, CapIsEnforced) {
  SolverOptions opts;
  opts.product_cap = 3;
  oracle::RandomModelParams params;
  params.states = 4;
  params.weight_max = 3;
  auto norm = normalize(oracle::random_mdp(params, 7));
  EXPECT_THROW(build_direct_window_product(norm.model, 3, opts), SizeCapError);
}

// Product-level memoryless enumeration: every memoryless product strategy
// induces a chain; the best induced expected mean payoff is the optimum.
TEST(ExpectedDirectFixedWindowMdp, MatchesProductPolicyEnumeration) {
  std::mt19937_64 seeds(151);
  for (int round = 0; round < 8; ++round) {
    oracle::RandomModelParams params;
    params.states = 3;
    params.max_actions = 2;
    params.max_out_degree = 2;
    params.weight_min = 0;
    params.weight_max = 2;
    auto mdp = oracle::random_mdp(params, seeds());
    int l_max = 2;
    auto norm = normalize(mdp);
    auto product = build_direct_window_product(norm.model, l_max);

    std::vector<size_t> policy(static_cast<size_t>(product.mdp.num_states()), 0);
    std::optional<Rational> best;
    std::function<void(int)> go = [&](int s) {
      if (s == product.mdp.num_states()) {
        MarkovChain::Builder b;
        for (int v = 0; v < product.mdp.num_states(); ++v) b.add_state("u" + std::to_string(v));
        b.set_initial(product.mdp.initial());
        for (int v = 0; v < product.mdp.num_states(); ++v)
          for (const auto& e : product.mdp.choices(v)[policy[static_cast<size_t>(v)]].edges)
            b.add_edge(v, e.dst, e.prob, e.weight);
        auto chain = std::move(b).build();
        // Expected mean payoff of the induced chain, evaluated through the
        // chain-side bounded window machinery.
        Rational value = expected_bounded_window(chain).expected;
        if (!best || value > *best) best = value;
        return;
      }
      for (size_t c = 0; c < product.mdp.choices(s).size(); ++c) {
        policy[static_cast<size_t>(s)] = c;
        go(s + 1);
      }
    };
    go(0);
    Rational expected = norm.transform.invert_value(*best);
    EXPECT_EQ(expected_direct_fixed_window(mdp, l_max).expected, expected);
  }
}

TEST(ExpectedWindowMdp, DirectBoundedByFixedAndMonotone) {
  std::mt19937_64 seeds(157);
  for (int round = 0; round < 10; ++round) {
    oracle::RandomModelParams params;
    params.states = 3;
    params.max_actions = 2;
    params.max_out_degree = 2;
    params.weight_min = 0;
    params.weight_max = 2;
    auto mdp = oracle::random_mdp(params, seeds());
    Rational bounded = expected_bounded_window(mdp).expected;
    Rational prev;
    for (int l = 1; l <= 3; ++l) {
      Rational fixed = expected_fixed_window(mdp, l).expected;
      Rational direct = expected_direct_fixed_window(mdp, l).expected;
      EXPECT_LE(direct, fixed);
      EXPECT_LE(fixed, bounded);
      if (l > 1) EXPECT_LE(prev, fixed);
      prev = fixed;
    }
  }
}

TEST(ResetConstructions, RoundTrips) {
  std::mt19937_64 seeds(163);
  for (int round = 0; round < 6; ++round) {
    oracle::RandomModelParams params;
    params.states = 4;
    params.bipartite = true;
    params.weight_min = 0;
    params.weight_max = 3;
    params.max_out_degree = 2;
    auto game = oracle::random_game(params, seeds());
    for (int l_max : {1, 2}) {
      auto mdp = oracle::build_reset_mdp(game, l_max);
      Rational game_value = max_direct_window_value(game, l_max)
                                .value[static_cast<size_t>(game.initial())];
      EXPECT_EQ(expected_fixed_window(mdp, l_max).expected, game_value);
    }
    auto bounded_mdp = oracle::build_bounded_reset_mdp(game);
    Rational mp_value = mean_payoff_game_values(game)[static_cast<size_t>(game.initial())];
    EXPECT_EQ(expected_bounded_window(bounded_mdp).expected, mp_value);
  }
}

}  // namespace
}  // namespace wmp
