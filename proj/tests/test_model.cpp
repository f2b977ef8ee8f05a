#include "wmp/model.hpp"

#include <gtest/gtest.h>

#include "test_util.hpp"

namespace wmp {
namespace {

TEST(Builders, MarkovChainValidation) {
  {
    MarkovChain::Builder b;
    b.add_state("a");
    b.set_initial("a");
    b.add_edge("a", "a", Rational(1, 2), Rational(0));
    EXPECT_THROW(std::move(b).build(), ValidationError);  // sum 1/2
  }
  {
    MarkovChain::Builder b;
    b.add_state("a");
    b.add_state("b");
    b.set_initial("a");
    b.add_edge("a", "b", Rational(1), Rational(0));
    EXPECT_THROW(std::move(b).build(), ValidationError);  // b has no edge
  }
  {
    MarkovChain::Builder b;
    b.add_state("a");
    b.set_initial("a");
    b.add_edge("a", "a", Rational(1, 2), Rational(0));
    EXPECT_THROW(b.add_edge("a", "a", Rational(1, 2), Rational(1)), ValidationError);  // duplicate
  }
  {
    MarkovChain::Builder b;
    b.add_state("a");
    EXPECT_THROW(b.add_edge("a", "a", Rational(0), Rational(0)), ValidationError);  // prob 0
  }
}

TEST(Builders, MdpValidation) {
  Mdp::Builder b;
  b.add_state("s");
  b.set_initial("s");
  b.add_transition(0, "go", 0, Rational(2, 3), Rational(1));
  EXPECT_THROW(std::move(b).build(), ValidationError);
}

TEST(Builders, GameValidation) {
  TwoPlayerGame::Builder b;
  b.add_vertex("v", Player::One);
  b.add_vertex("u", Player::Two);
  b.set_initial("v");
  b.add_edge("v", "u", Rational(1));
  EXPECT_THROW(std::move(b).build(), ValidationError);  // u has no edge
}

TEST(WindowEvaluators, TotalPayoffExamples) {
  auto path = FinitePath::from_weights({Rational(2), Rational(5), Rational(4)});
  EXPECT_EQ(window_total_payoff(path, 3), Rational(11));
  EXPECT_EQ(window_total_payoff(FinitePath::from_weights({Rational(-7)}), 1), Rational(-7));
  auto reduced = FinitePath::from_weights({Rational(-1), Rational(2), Rational(1)});
  EXPECT_EQ(window_total_payoff(reduced, 3), Rational(2));
  EXPECT_THROW(window_total_payoff(reduced, 4), ValidationError);
}

TEST(WindowEvaluators, MeanPayoffExamples) {
  EXPECT_EQ(window_mean_payoff(FinitePath::from_weights({Rational(2), Rational(0)}), 2), Rational(2));
  EXPECT_EQ(window_mean_payoff(FinitePath::from_weights({Rational(0), Rational(2)}), 2), Rational(1));
  EXPECT_EQ(window_mean_payoff(FinitePath::from_weights({Rational(1), Rational(0)}), 2), Rational(1));
  EXPECT_EQ(window_mean_payoff(FinitePath::from_weights({Rational(2), Rational(5), Rational(4)}), 3),
            Rational(11, 3));
}

TEST(WindowEvaluators, FiniteDirectValue) {
  std::vector<Rational> alternating;
  for (int i = 0; i < 6; ++i) alternating.push_back(Rational(i % 2 == 0 ? 2 : 0));
  EXPECT_EQ(finite_direct_window_value(FinitePath::from_weights(alternating), 2), Rational(1));
  std::vector<Rational> constant(5, Rational(7, 3));
  EXPECT_EQ(finite_direct_window_value(FinitePath::from_weights(constant), 3), Rational(7, 3));
  // Figure-2 cycle weights repeated: enumerate positions by hand.
  std::vector<Rational> cyc;
  for (int i = 0; i < 3; ++i)
    for (long long w : {2, 5, 4}) cyc.push_back(Rational(w));
  Rational expected;
  bool first = true;
  for (size_t i = 0; i + 3 <= cyc.size(); ++i) {
    std::vector<Rational> win(cyc.begin() + static_cast<long>(i), cyc.begin() + static_cast<long>(i) + 3);
    Rational v = test::wmp_of_weights(win);
    if (first || v < expected) {
      expected = v;
      first = false;
    }
  }
  EXPECT_EQ(finite_direct_window_value(FinitePath::from_weights(cyc), 3), expected);
}

TEST(WindowEvaluators, PathChainingValidated) {
  EXPECT_THROW(FinitePath(0, {{0, 1, Rational(1)}, {2, 3, Rational(1)}}), ValidationError);
  EXPECT_THROW(FinitePath(5, {{0, 1, Rational(1)}}), ValidationError);
}

TEST(WindowEvaluators, RandomProperties) {
  std::mt19937_64 rng(2024);
  for (int round = 0; round < 200; ++round) {
    int len = static_cast<int>(test::rnd(rng, 2, 7));
    std::vector<Rational> ws;
    for (int i = 0; i < len; ++i)
      ws.push_back(Rational(test::rnd(rng, -6, 6), test::rnd(rng, 1, 3)));
    auto path = FinitePath::from_weights(ws);
    int l = static_cast<int>(test::rnd(rng, 1, len - 1));

    // Monotonicity in the window length.
    EXPECT_LE(window_mean_payoff(path, l), window_mean_payoff(path, l + 1));

    // Sign link between mean and total payoff.
    EXPECT_EQ(window_mean_payoff(path, l) >= Rational(0), window_total_payoff(path, l) >= Rational(0));

    // Affine equivariance of the window mean.
    Rational a(test::rnd(rng, 1, 5), test::rnd(rng, 1, 3));
    Rational c(test::rnd(rng, -4, 4), test::rnd(rng, 1, 3));
    std::vector<Rational> mapped;
    for (const auto& w : ws) mapped.push_back(a * w + c);
    EXPECT_EQ(window_mean_payoff(FinitePath::from_weights(mapped), l),
              a * window_mean_payoff(path, l) + c);
  }
}

TEST(Normalize, IdentityOnNonNegativeIntegers) {
  MarkovChain::Builder b;
  b.add_state("a");
  b.add_state("b");
  b.set_initial("a");
  b.add_edge("a", "b", Rational(1), Rational(3));
  b.add_edge("b", "a", Rational(1, 2), Rational(2));
  b.add_edge("b", "b", Rational(1, 2), Rational(0));
  auto norm = normalize(std::move(b).build());
  EXPECT_TRUE(norm.transform.is_identity());
}

TEST(Normalize, ScaleAndShift) {
  MarkovChain::Builder b;
  b.add_state("a");
  b.add_state("b");
  b.set_initial("a");
  b.add_edge("a", "b", Rational(1), Rational(-1));
  b.add_edge("b", "a", Rational(1), Rational(1, 2));
  auto norm = normalize(std::move(b).build());
  EXPECT_EQ(norm.transform.scale, 2);
  EXPECT_EQ(norm.transform.shift, 2);
  EXPECT_EQ(norm.model.out(0)[0].weight, Rational(0));
  EXPECT_EQ(norm.model.out(1)[0].weight, Rational(3));
  EXPECT_EQ(norm.transform.invert_value(Rational(0)), Rational(-1));
  EXPECT_EQ(norm.transform.invert_value(Rational(3)), Rational(1, 2));
}

TEST(Normalize, RoundTripAndWindowEquivariance) {
  std::mt19937_64 rng(99);
  for (int round = 0; round < 100; ++round) {
    int len = static_cast<int>(test::rnd(rng, 2, 6));
    std::vector<Rational> ws;
    for (int i = 0; i < len; ++i)
      ws.push_back(Rational(test::rnd(rng, -9, 9), test::rnd(rng, 1, 4)));

    // A line chain carrying the weights, to normalize as a model.
    MarkovChain::Builder b;
    for (int i = 0; i <= len; ++i) b.add_state("s" + std::to_string(i));
    b.set_initial(0);
    for (int i = 0; i < len; ++i) b.add_edge(i, i + 1, Rational(1), ws[static_cast<size_t>(i)]);
    b.add_edge(len, len, Rational(1), Rational(0));
    auto norm = normalize(std::move(b).build());

    std::vector<Rational> normalized_ws;
    for (int i = 0; i < len; ++i) normalized_ws.push_back(norm.model.out(i)[0].weight);
    int l = static_cast<int>(test::rnd(rng, 1, len));
    Rational original = window_mean_payoff(FinitePath::from_weights(ws), l);
    Rational internal = window_mean_payoff(FinitePath::from_weights(normalized_ws), l);
    EXPECT_EQ(internal, norm.transform.apply(original));
    EXPECT_EQ(norm.transform.invert_value(internal), original);
    EXPECT_TRUE(norm.model.weights_integral());
    EXPECT_GE(norm.model.min_weight().sign(), 0);
  }
}

TEST(Objective, Validation) {
  EXPECT_NO_THROW(Objective::fixed(1));
  EXPECT_THROW(Objective::fixed(0), ValidationError);
  Objective bad{ObjectiveKind::Bounded, 3, Flavor::Payoff};
  EXPECT_THROW(bad.validate(), ValidationError);
}

TEST(Mdp, InducedChainAndRestriction) {
  Mdp::Builder b;
  b.add_state("x");
  b.add_state("y");
  b.set_initial("x");
  b.add_transition(0, "a", 1, Rational(1), Rational(2));
  b.add_transition(1, "a", 0, Rational(1, 2), Rational(1));
  b.add_transition(1, "a", 1, Rational(1, 2), Rational(0));
  Mdp mdp = std::move(b).build();
  EXPECT_TRUE(mdp.single_action());
  MarkovChain chain = mdp.induced_chain();
  EXPECT_EQ(chain.num_states(), 2);
  EXPECT_EQ(chain.out(1).size(), 2u);

  auto restr = mdp.restricted({0, 1}, {{0}, {0}});
  EXPECT_EQ(restr.mdp.num_states(), 2);
  EXPECT_THROW(mdp.restricted({1}, {{0}}), ValidationError);  // leaves the set
}

}  // namespace
}  // namespace wmp
