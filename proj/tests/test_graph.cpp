#include "wmp/graph.hpp"

#include <gtest/gtest.h>

#include "test_util.hpp"
#include "wmp/oracle.hpp"

namespace wmp {
namespace {

TEST(Bscc, SingleSelfLoop) {
  MarkovChain::Builder b;
  b.add_state("s");
  b.set_initial("s");
  b.add_edge("s", "s", Rational(1), Rational(5));
  auto part = bscc_decomposition(std::move(b).build());
  ASSERT_EQ(part.bsccs.size(), 1u);
  EXPECT_EQ(part.bsccs[0], std::vector<int>{0});
  EXPECT_EQ(part.reachability[0], Rational(1));
  EXPECT_TRUE(part.transient_states.empty());
}

TEST(Bscc, Fig1TwoComponentsHalfEach) {
  auto part = bscc_decomposition(oracle::fig1());
  ASSERT_EQ(part.bsccs.size(), 2u);
  for (size_t i = 0; i < 2; ++i) EXPECT_EQ(part.reachability[i], Rational(1, 2));
  std::set<size_t> sizes{part.bsccs[0].size(), part.bsccs[1].size()};
  EXPECT_EQ(sizes, (std::set<size_t>{1u, 2u}));
  EXPECT_EQ(part.transient_states, std::vector<int>{0});
}

TEST(Bscc, RandomAgainstNaiveSccOracle) {
  std::mt19937_64 seeds(7);
  for (int round = 0; round < 60; ++round) {
    oracle::RandomModelParams params;
    params.states = static_cast<int>(test::rnd(seeds, 2, 9));
    params.max_out_degree = 3;
    auto mc = oracle::random_markov_chain(params, seeds());
    auto part = bscc_decomposition(mc);

    std::vector<std::vector<int>> adj(static_cast<size_t>(mc.num_states()));
    for (int s = 0; s < mc.num_states(); ++s) adj[static_cast<size_t>(s)] = mc.support(s);
    std::set<std::vector<int>> expected;
    for (auto& comp : test::naive_sccs(adj)) {
      bool closed = true;
      std::set<int> members(comp.begin(), comp.end());
      for (int v : comp)
        for (int u : adj[static_cast<size_t>(v)])
          if (!members.count(u)) closed = false;
      if (closed) expected.insert(comp);
    }
    std::set<std::vector<int>> actual(part.bsccs.begin(), part.bsccs.end());
    EXPECT_EQ(actual, expected);

    Rational total;
    for (const auto& p : part.reachability) total += p;
    EXPECT_EQ(total, Rational(1));
  }
}

TEST(Reachability, TargetIsCertain) {
  auto mc = oracle::fig1();
  auto probs = reachability_probabilities(mc, {1});
  EXPECT_EQ(probs[1], Rational(1));
  EXPECT_EQ(probs[static_cast<size_t>(mc.initial())], Rational(1, 2));
}

TEST(Reachability, UntilWithFullStaySetIsReachability) {
  std::mt19937_64 seeds(11);
  for (int round = 0; round < 30; ++round) {
    oracle::RandomModelParams params;
    params.states = static_cast<int>(test::rnd(seeds, 2, 8));
    params.max_out_degree = 3;
    auto mc = oracle::random_markov_chain(params, seeds());
    std::vector<int> all, target;
    for (int s = 0; s < mc.num_states(); ++s) all.push_back(s);
    target.push_back(static_cast<int>(test::rnd(seeds, 0, mc.num_states() - 1)));
    EXPECT_EQ(until_probabilities(mc, all, target), reachability_probabilities(mc, target));
  }
}

TEST(Reachability, MatchesSamplingWithinThreeSigma) {
  std::mt19937_64 seeds(13);
  for (int round = 0; round < 3; ++round) {
    oracle::RandomModelParams params;
    params.states = 8;
    params.max_out_degree = 3;
    auto mc = oracle::random_markov_chain(params, seeds());
    std::vector<int> target{static_cast<int>(test::rnd(seeds, 0, 7))};
    Rational exact = reachability_probabilities(mc, target)[static_cast<size_t>(mc.initial())];

    // Sample: walk until the target or a state that provably cannot reach it.
    std::vector<char> can(static_cast<size_t>(mc.num_states()), 0);
    {
      std::vector<std::vector<int>> pred(static_cast<size_t>(mc.num_states()));
      for (int s = 0; s < mc.num_states(); ++s)
        for (int d : mc.support(s)) pred[static_cast<size_t>(d)].push_back(s);
      std::vector<int> queue = target;
      for (int t : target) can[static_cast<size_t>(t)] = 1;
      while (!queue.empty()) {
        int v = queue.back();
        queue.pop_back();
        for (int p : pred[static_cast<size_t>(v)])
          if (!can[static_cast<size_t>(p)]) {
            can[static_cast<size_t>(p)] = 1;
            queue.push_back(p);
          }
      }
    }
    test::ChainSampler sampler(mc);
    std::mt19937_64 rng(seeds());
    const long long n = 100000;
    long long hits = 0;
    for (long long i = 0; i < n; ++i) {
      int s = mc.initial();
      while (true) {
        if (s == target[0]) {
          ++hits;
          break;
        }
        if (!can[static_cast<size_t>(s)]) break;
        s = sampler.step(rng, s);
      }
    }
    // |p_hat - p| <= 3 sqrt(p (1-p) / n), squared to stay exact.
    Rational p_hat(hits, n);
    Rational diff = p_hat - exact;
    Rational bound = Rational(9) * exact * (Rational(1) - exact) / Rational(n);
    EXPECT_LE(diff * diff, bound) << "exact " << exact.str() << " sampled " << p_hat.str();
  }
}

TEST(Mec, SingleActionMatchesClosure) {
  Mdp::Builder b;
  b.add_state("x");
  b.add_state("y");
  b.set_initial("x");
  b.add_transition(0, "a", 1, Rational(1), Rational(0));
  b.add_transition(1, "a", 1, Rational(1), Rational(0));
  auto part = mec_decomposition(std::move(b).build());
  ASSERT_EQ(part.mecs.size(), 1u);
  EXPECT_EQ(part.mecs[0].states, std::vector<int>{1});
}

TEST(Mec, StronglyConnectedWholeMdp) {
  Mdp::Builder b;
  b.add_state("x");
  b.add_state("y");
  b.set_initial("x");
  b.add_transition(0, "a", 1, Rational(1), Rational(0));
  b.add_transition(0, "b", 0, Rational(1), Rational(1));
  b.add_transition(1, "a", 0, Rational(1, 2), Rational(0));
  b.add_transition(1, "a", 1, Rational(1, 2), Rational(2));
  auto part = mec_decomposition(std::move(b).build());
  ASSERT_EQ(part.mecs.size(), 1u);
  EXPECT_EQ(part.mecs[0].states, (std::vector<int>{0, 1}));
  EXPECT_EQ(part.mecs[0].choice_indices[0].size(), 2u);
}

// Naive fixpoint oracle: repeatedly delete (s, a) pairs whose distribution
// leaves the candidate set, then split into SCCs, until every candidate is
// stable; collect the stable strongly connected candidates.
std::vector<std::pair<std::vector<int>, std::vector<std::vector<int>>>> naive_mecs(const Mdp& mdp) {
  std::vector<std::pair<std::vector<int>, std::vector<std::vector<int>>>> result;
  std::vector<std::vector<int>> work;
  {
    std::vector<int> all;
    for (int s = 0; s < mdp.num_states(); ++s) all.push_back(s);
    work.push_back(all);
  }
  while (!work.empty()) {
    auto cand = work.back();
    work.pop_back();
    std::set<int> members(cand.begin(), cand.end());
    bool changed = true;
    std::map<int, std::vector<int>> keep;
    while (changed) {
      changed = false;
      keep.clear();
      for (int s : cand) {
        if (!members.count(s)) continue;
        std::vector<int> ok;
        for (size_t ci = 0; ci < mdp.choices(s).size(); ++ci) {
          bool inside = true;
          for (const auto& e : mdp.choices(s)[ci].edges)
            if (!members.count(e.dst)) inside = false;
          if (inside) ok.push_back(static_cast<int>(ci));
        }
        if (ok.empty()) {
          members.erase(s);
          changed = true;
        } else {
          keep[s] = ok;
        }
      }
    }
    if (members.empty()) continue;
    std::vector<int> remaining(members.begin(), members.end());
    std::map<int, int> local;
    for (size_t i = 0; i < remaining.size(); ++i) local[remaining[i]] = static_cast<int>(i);
    std::vector<std::vector<int>> adj(remaining.size());
    for (int s : remaining)
      for (int ci : keep[s])
        for (const auto& e : mdp.choices(s)[static_cast<size_t>(ci)].edges)
          adj[static_cast<size_t>(local[s])].push_back(local[e.dst]);
    auto comps = test::naive_sccs(adj);
    if (comps.size() == 1 && comps[0].size() == remaining.size()) {
      if (remaining.size() == 1) {
        int s = remaining[0];
        bool self = false;
        for (int ci : keep[s]) {
          bool loops = true;
          for (const auto& e : mdp.choices(s)[static_cast<size_t>(ci)].edges)
            if (e.dst != s) loops = false;
          if (loops) self = true;
        }
        if (!self) continue;
      }
      std::vector<std::vector<int>> actions;
      for (int s : remaining) actions.push_back(keep[s]);
      result.emplace_back(remaining, actions);
    } else {
      for (auto& comp : comps) {
        std::vector<int> sub;
        for (int lv : comp) sub.push_back(remaining[static_cast<size_t>(lv)]);
        if (sub.size() == 1) {
          int s = sub[0];
          bool self = false;
          for (int ci : keep[s]) {
            bool loops = true;
            for (const auto& e : mdp.choices(s)[static_cast<size_t>(ci)].edges)
              if (e.dst != s) loops = false;
            if (loops) self = true;
          }
          if (!self) continue;
        }
        work.push_back(sub);
      }
    }
  }
  std::sort(result.begin(), result.end());
  return result;
}

TEST(Mec, RandomAgainstNaiveFixpoint) {
  std::mt19937_64 seeds(17);
  for (int round = 0; round < 60; ++round) {
    oracle::RandomModelParams params;
    params.states = static_cast<int>(test::rnd(seeds, 2, 10));
    params.max_actions = 3;
    params.max_out_degree = 3;
    auto mdp = oracle::random_mdp(params, seeds());
    auto part = mec_decomposition(mdp);

    std::vector<std::pair<std::vector<int>, std::vector<std::vector<int>>>> actual;
    for (const auto& mec : part.mecs) actual.emplace_back(mec.states, mec.choice_indices);
    std::sort(actual.begin(), actual.end());
    EXPECT_EQ(actual, naive_mecs(mdp));

    // State sets are pairwise disjoint.
    std::set<int> seen;
    for (const auto& mec : part.mecs)
      for (int s : mec.states) EXPECT_TRUE(seen.insert(s).second);
  }
}

TEST(MinMeanCycle, Examples) {
  WeightedDigraph self(1);
  self.add_edge(0, 0, Rational(7, 2));
  EXPECT_EQ(min_mean_cycle(self), Rational(7, 2));

  // fig1's second component: cycles have means 3, 1 and 1.
  WeightedDigraph b2(2);
  b2.add_edge(0, 0, Rational(3));
  b2.add_edge(0, 1, Rational(2));
  b2.add_edge(1, 0, Rational(0));
  b2.add_edge(1, 1, Rational(1));
  EXPECT_EQ(min_mean_cycle(b2), Rational(1));
}

TEST(MinMeanCycle, RandomAgainstCycleEnumeration) {
  std::mt19937_64 seeds(19);
  for (int round = 0; round < 80; ++round) {
    oracle::RandomModelParams params;
    params.states = static_cast<int>(test::rnd(seeds, 1, 8));
    params.strongly_connected = true;
    params.max_out_degree = 3;
    params.weight_min = -5;
    params.weight_max = 5;
    params.weight_denominator_max = 2;
    auto mc = oracle::random_markov_chain(params, seeds());
    std::vector<int> all;
    for (int s = 0; s < mc.num_states(); ++s) all.push_back(s);
    auto sub = mc.subgraph(all);
    EXPECT_EQ(min_mean_cycle(sub.graph), oracle::brute_min_cycle_mean(sub.graph));
  }
}

TEST(MinMeanCycle, ShiftAndScaleEquivariance) {
  std::mt19937_64 seeds(23);
  for (int round = 0; round < 30; ++round) {
    oracle::RandomModelParams params;
    params.states = static_cast<int>(test::rnd(seeds, 2, 6));
    params.strongly_connected = true;
    params.weight_min = -3;
    params.weight_max = 4;
    auto mc = oracle::random_markov_chain(params, seeds());
    std::vector<int> all;
    for (int s = 0; s < mc.num_states(); ++s) all.push_back(s);
    auto g = mc.subgraph(all).graph;
    Rational c(test::rnd(seeds, -3, 3), test::rnd(seeds, 1, 3));
    Rational a(test::rnd(seeds, 1, 4), test::rnd(seeds, 1, 2));
    Rational base = min_mean_cycle(g);

    WeightedDigraph shifted(g.num_vertices());
    WeightedDigraph scaled(g.num_vertices());
    for (int v = 0; v < g.num_vertices(); ++v)
      for (const auto& [dst, w] : g.adj[static_cast<size_t>(v)]) {
        shifted.add_edge(v, dst, w + c);
        scaled.add_edge(v, dst, a * w);
      }
    EXPECT_EQ(min_mean_cycle(shifted), base + c);
    EXPECT_EQ(min_mean_cycle(scaled), a * base);
  }
}

}  // namespace
}  // namespace wmp
