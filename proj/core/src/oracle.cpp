#include "wmp/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <tuple>

#include "wmp/errors.hpp"

namespace wmp::oracle {

namespace {

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  // Rejection sampling; unbiased for any bound.
  std::uint64_t threshold = (-bound) % bound;
  while (true) {
    std::uint64_t r = rng();
    if (r >= threshold) return r % bound;
  }
}

long long rnd_int(std::mt19937_64& rng, long long lo, long long hi) {
  return lo + static_cast<long long>(uniform_below(rng, static_cast<std::uint64_t>(hi - lo + 1)));
}

}  // namespace

Rational brute_bscc_fixed_window_value(const WeightedDigraph& bscc, int l_max, std::uint64_t cap) {
  if (l_max < 1) throw ValidationError("window length must be >= 1");
  std::optional<Rational> minimum;
  std::uint64_t budget = cap;
  // Exhaustive DFS over every l_max-step path from every vertex.
  std::vector<Rational> sums;
  struct Frame {
    int vertex;
    size_t edge;
  };
  for (int v0 = 0; v0 < bscc.num_vertices(); ++v0) {
    std::vector<Frame> stack{{v0, 0}};
    sums.clear();
    while (!stack.empty()) {
      if (static_cast<int>(sums.size()) == l_max) {
        Rational best = sums[0];
        for (int k = 1; k < l_max; ++k)
          best = std::max(best, sums[static_cast<size_t>(k)] / Rational(k + 1));
        if (!minimum || best < *minimum) minimum = best;
        stack.pop_back();
        sums.pop_back();
        continue;
      }
      Frame& f = stack.back();
      if (f.edge >= bscc.adj[static_cast<size_t>(f.vertex)].size()) {
        stack.pop_back();
        if (!sums.empty() && sums.size() == stack.size()) sums.pop_back();
        continue;
      }
      if (budget-- == 0)
        throw SizeCapError("brute window enumeration exceeds " + std::to_string(cap) + " path nodes");
      const auto& [dst, w] = bscc.adj[static_cast<size_t>(f.vertex)][f.edge++];
      sums.push_back(sums.empty() ? w : sums.back() + w);
      stack.push_back(Frame{dst, 0});
    }
  }
  if (!minimum) throw ValidationError("graph has no paths of the requested length");
  return *minimum;
}

std::vector<std::vector<int>> elementary_cycles(const WeightedDigraph& graph) {
  int n = graph.num_vertices();
  std::vector<std::vector<int>> succ(static_cast<size_t>(n));
  for (int v = 0; v < n; ++v) {
    std::set<int> ds;
    for (const auto& [dst, w] : graph.adj[static_cast<size_t>(v)]) ds.insert(dst);
    succ[static_cast<size_t>(v)].assign(ds.begin(), ds.end());
  }
  std::vector<std::vector<int>> cycles;
  // Paths from a root through vertices with larger ids only; closing back at
  // the root yields each elementary cycle exactly once.
  std::vector<int> path;
  std::vector<char> on_path(static_cast<size_t>(n), 0);
  struct Frame {
    int vertex;
    size_t edge;
  };
  for (int root = 0; root < n; ++root) {
    std::vector<Frame> stack{{root, 0}};
    path.assign(1, root);
    on_path.assign(static_cast<size_t>(n), 0);
    on_path[static_cast<size_t>(root)] = 1;
    while (!stack.empty()) {
      Frame& f = stack.back();
      if (f.edge >= succ[static_cast<size_t>(f.vertex)].size()) {
        stack.pop_back();
        on_path[static_cast<size_t>(f.vertex)] = 0;
        path.pop_back();
        continue;
      }
      int next = succ[static_cast<size_t>(f.vertex)][f.edge++];
      if (next == root) {
        auto cycle = path;
        cycle.push_back(root);
        cycles.push_back(std::move(cycle));
      } else if (next > root && !on_path[static_cast<size_t>(next)]) {
        on_path[static_cast<size_t>(next)] = 1;
        path.push_back(next);
        stack.push_back(Frame{next, 0});
      }
    }
  }
  return cycles;
}

Rational brute_min_cycle_mean(const WeightedDigraph& graph) {
  std::map<std::pair<int, int>, Rational> weight;
  for (int v = 0; v < graph.num_vertices(); ++v)
    for (const auto& [dst, w] : graph.adj[static_cast<size_t>(v)]) {
      auto key = std::make_pair(v, dst);
      auto it = weight.find(key);
      if (it == weight.end() || w < it->second) weight[key] = w;
    }
  auto cycles = elementary_cycles(graph);
  if (cycles.empty()) throw ValidationError("graph has no cycle");
  std::optional<Rational> best;
  for (const auto& cycle : cycles) {
    Rational sum;
    for (size_t i = 0; i + 1 < cycle.size(); ++i)
      sum += weight.at(std::make_pair(cycle[i], cycle[i + 1]));
    Rational mean = sum / Rational(static_cast<long long>(cycle.size() - 1));
    if (!best || mean < *best) best = mean;
  }
  return *best;
}

namespace {

// Safety analysis of the explicit (vertex, age, deficit) product for one
// threshold p/q: Player 1 wins from v iff Player 2 cannot attract (v, 0, 0)
// to the dead state.
std::vector<char> window_safety_winning(const TwoPlayerGame& game, int l_max, const Rational& lambda,
                                        std::uint64_t cap) {
  Integer p = lambda.numerator();
  Integer q = lambda.denominator();
  int n = game.num_vertices();

  using Key = std::tuple<int, int, Integer>;
  std::map<Key, int> ids;
  struct Node {
    int vertex;
    std::vector<int> succ;
  };
  std::vector<Node> nodes;
  std::vector<Key> worklist;
  int dead = -1;

  auto intern = [&](int vertex, int age, const Integer& deficit) {
    Key key{vertex, age, deficit};
    auto it = ids.find(key);
    if (it != ids.end()) return it->second;
    if (nodes.size() >= cap)
      throw SizeCapError("safety product exceeds " + std::to_string(cap) + " states");
    int id = static_cast<int>(nodes.size());
    ids.emplace(key, id);
    nodes.push_back(Node{vertex, {}});
    worklist.push_back(Key{vertex, age, deficit});
    return id;
  };

  std::vector<int> seed(static_cast<size_t>(n));
  for (int v = 0; v < n; ++v) seed[static_cast<size_t>(v)] = intern(v, 0, Integer(0));

  size_t cursor = 0;
  std::optional<int> dead_id;
  auto dead_node = [&]() {
    if (!dead_id) {
      dead_id = static_cast<int>(nodes.size());
      nodes.push_back(Node{-1, {}});
      nodes.back().succ.push_back(*dead_id);  // absorbing
    }
    return *dead_id;
  };
  while (cursor < worklist.size()) {
    auto [vertex, age, deficit] = worklist[cursor++];
    int src = ids[Key{vertex, age, deficit}];
    for (const auto& e : game.out(vertex)) {
      Integer reduced = e.weight.numerator() * q - p;
      Integer v = deficit - reduced;
      int dst;
      if (v > 0 && age == l_max - 1)
        dst = dead_node();
      else if (v > 0)
        dst = intern(e.dst, age + 1, v);
      else
        dst = intern(e.dst, 0, Integer(0));
      nodes[static_cast<size_t>(src)].succ.push_back(dst);
    }
  }
  dead = dead_id.value_or(-1);

  // Player-2 attractor to the dead state.
  size_t total = nodes.size();
  std::vector<char> attracted(total, 0);
  if (dead >= 0) {
    std::vector<int> remaining(total, 0);
    for (size_t i = 0; i < total; ++i) remaining[i] = static_cast<int>(nodes[i].succ.size());
    std::vector<std::vector<int>> pred(total);
    for (size_t i = 0; i < total; ++i)
      for (int d : nodes[i].succ) pred[static_cast<size_t>(d)].push_back(static_cast<int>(i));
    std::vector<int> queue{dead};
    attracted[static_cast<size_t>(dead)] = 1;
    while (!queue.empty()) {
      int x = queue.back();
      queue.pop_back();
      for (int pidx : pred[static_cast<size_t>(x)]) {
        if (attracted[static_cast<size_t>(pidx)]) continue;
        const Node& pn = nodes[static_cast<size_t>(pidx)];
        bool join;
        if (pn.vertex >= 0 && game.owner(pn.vertex) == Player::One) {
          // Player 1 is attracted only when every move stays attracted.
          join = --remaining[static_cast<size_t>(pidx)] == 0;
        } else {
          join = true;
        }
        if (join) {
          attracted[static_cast<size_t>(pidx)] = 1;
          queue.push_back(pidx);
        }
      }
    }
  }
  std::vector<char> winning(static_cast<size_t>(n));
  for (int v = 0; v < n; ++v)
    winning[static_cast<size_t>(v)] = !attracted[static_cast<size_t>(seed[static_cast<size_t>(v)])];
  return winning;
}

}  // namespace

std::vector<Rational> brute_direct_window_game_values(const TwoPlayerGame& game, int l_max,
                                                      std::uint64_t cap) {
  if (l_max < 1) throw ValidationError("window length must be >= 1");
  if (!game.weights_integral())
    throw ValidationError("brute_direct_window_game_values requires integer weights");
  Integer lo = game.min_weight().numerator();
  Integer hi = game.max_weight().numerator();
  std::set<Rational> cand_set;
  for (int f = 1; f <= l_max; ++f)
    for (Integer p = lo * f; p <= hi * f; ++p) cand_set.insert(Rational(p, Integer(f)));

  int n = game.num_vertices();
  std::vector<Rational> value(static_cast<size_t>(n), Rational(lo));
  for (const Rational& lambda : cand_set) {
    auto winning = window_safety_winning(game, l_max, lambda, cap);
    for (int v = 0; v < n; ++v)
      if (winning[static_cast<size_t>(v)] && lambda > value[static_cast<size_t>(v)])
        value[static_cast<size_t>(v)] = lambda;
  }
  return value;
}

namespace {

// Value vector of the play under one positional strategy pair: every vertex
// follows its unique successor until a cycle closes; the value is that
// cycle's mean weight.
std::vector<Rational> functional_values(const TwoPlayerGame& game, const std::vector<int>& choice) {
  int n = game.num_vertices();
  std::vector<Rational> value(static_cast<size_t>(n));
  std::vector<char> done(static_cast<size_t>(n), 0);
  for (int v0 = 0; v0 < n; ++v0) {
    if (done[static_cast<size_t>(v0)]) continue;
    std::vector<int> trail;
    std::vector<int> pos(static_cast<size_t>(n), -1);
    int v = v0;
    while (!done[static_cast<size_t>(v)] && pos[static_cast<size_t>(v)] < 0) {
      pos[static_cast<size_t>(v)] = static_cast<int>(trail.size());
      trail.push_back(v);
      v = game.out(v)[static_cast<size_t>(choice[static_cast<size_t>(v)])].dst;
    }
    Rational val;
    if (done[static_cast<size_t>(v)]) {
      val = value[static_cast<size_t>(v)];
    } else {
      int start = pos[static_cast<size_t>(v)];
      Rational sum;
      int len = 0;
      for (size_t i = static_cast<size_t>(start); i < trail.size(); ++i) {
        int u = trail[i];
        sum += game.out(u)[static_cast<size_t>(choice[static_cast<size_t>(u)])].weight;
        ++len;
      }
      val = sum / Rational(len);
    }
    for (int u : trail) {
      value[static_cast<size_t>(u)] = val;
      done[static_cast<size_t>(u)] = 1;
    }
  }
  return value;
}

// Enumerate every positional strategy of `player`, invoking fn with the
// choice vector (entries for the other player's vertices stay -1).
template <typename Fn>
void for_each_positional(const TwoPlayerGame& game, Player player, Fn&& fn) {
  int n = game.num_vertices();
  std::vector<int> owned;
  for (int v = 0; v < n; ++v)
    if (game.owner(v) == player) owned.push_back(v);
  std::vector<int> choice(static_cast<size_t>(n), -1);
  for (int v : owned) choice[static_cast<size_t>(v)] = 0;
  while (true) {
    fn(choice);
    int i = static_cast<int>(owned.size()) - 1;
    for (; i >= 0; --i) {
      int v = owned[static_cast<size_t>(i)];
      if (choice[static_cast<size_t>(v)] + 1 < static_cast<int>(game.out(v).size())) {
        ++choice[static_cast<size_t>(v)];
        break;
      }
      choice[static_cast<size_t>(v)] = 0;
    }
    if (i < 0) break;
  }
}

}  // namespace

std::vector<Rational> brute_mean_payoff_game_values(const TwoPlayerGame& game, std::uint64_t cap) {
  int n = game.num_vertices();
  std::uint64_t pairs = 1;
  for (int v = 0; v < n; ++v) {
    pairs *= game.out(v).size();
    if (pairs > cap)
      throw SizeCapError("positional enumeration exceeds " + std::to_string(cap) + " pairs");
  }

  std::vector<std::vector<Rational>> per_pair;  // values for every (sigma1, sigma2)
  std::vector<Rational> lower(static_cast<size_t>(n)), upper(static_cast<size_t>(n));
  bool first1 = true;
  for_each_positional(game, Player::One, [&](const std::vector<int>& c1) {
    std::vector<Rational> worst;  // min over sigma2, per vertex
    bool first2 = true;
    for_each_positional(game, Player::Two, [&](const std::vector<int>& c2) {
      std::vector<int> joint(c1);
      for (int v = 0; v < n; ++v)
        if (joint[static_cast<size_t>(v)] < 0) joint[static_cast<size_t>(v)] = c2[static_cast<size_t>(v)];
      auto vals = functional_values(game, joint);
      if (first2) {
        worst = vals;
        first2 = false;
      } else {
        for (int v = 0; v < n; ++v)
          worst[static_cast<size_t>(v)] = std::min(worst[static_cast<size_t>(v)], vals[static_cast<size_t>(v)]);
      }
    });
    if (first1) {
      lower = worst;
      first1 = false;
    } else {
      for (int v = 0; v < n; ++v)
        lower[static_cast<size_t>(v)] = std::max(lower[static_cast<size_t>(v)], worst[static_cast<size_t>(v)]);
    }
  });

  bool first2 = true;
  for_each_positional(game, Player::Two, [&](const std::vector<int>& c2) {
    std::vector<Rational> best;  // max over sigma1, per vertex
    bool inner_first = true;
    for_each_positional(game, Player::One, [&](const std::vector<int>& c1) {
      std::vector<int> joint(c2);
      for (int v = 0; v < n; ++v)
        if (joint[static_cast<size_t>(v)] < 0) joint[static_cast<size_t>(v)] = c1[static_cast<size_t>(v)];
      auto vals = functional_values(game, joint);
      if (inner_first) {
        best = vals;
        inner_first = false;
      } else {
        for (int v = 0; v < n; ++v)
          best[static_cast<size_t>(v)] = std::max(best[static_cast<size_t>(v)], vals[static_cast<size_t>(v)]);
      }
    });
    if (first2) {
      upper = best;
      first2 = false;
    } else {
      for (int v = 0; v < n; ++v)
        upper[static_cast<size_t>(v)] = std::min(upper[static_cast<size_t>(v)], best[static_cast<size_t>(v)]);
    }
  });

  for (int v = 0; v < n; ++v)
    if (lower[static_cast<size_t>(v)] != upper[static_cast<size_t>(v)])
      throw InternalError("positional enumeration violates determinacy");
  return lower;
}

namespace {

struct SplitGame {
  std::vector<std::pair<int, int>> p1_edges;  // (src in S1, dst in S2)
  std::vector<std::pair<int, int>> p2_edges;  // (src in S2, dst in S1)
};

SplitGame validated_bipartite(const TwoPlayerGame& game, const char* who) {
  if (!game.weights_integral() || game.min_weight().sign() < 0)
    throw ValidationError(std::string(who) + " requires non-negative integer weights");
  if (game.owner(game.initial()) != Player::One)
    throw ValidationError(std::string(who) + " requires a Player-1 initial vertex");
  SplitGame split;
  for (int v = 0; v < game.num_vertices(); ++v)
    for (const auto& e : game.out(v)) {
      if (game.owner(v) == game.owner(e.dst))
        throw ValidationError(std::string(who) + " requires an alternating bipartite game");
      if (game.owner(v) == Player::One)
        split.p1_edges.emplace_back(v, e.dst);
      else
        split.p2_edges.emplace_back(v, e.dst);
    }
  return split;
}

TwoPlayerGame reset_game_with_weight(const TwoPlayerGame& game, const Rational& reset_weight,
                                     const char* who) {
  auto split = validated_bipartite(game, who);
  TwoPlayerGame::Builder builder;
  for (int v = 0; v < game.num_vertices(); ++v) builder.add_vertex(game.vertex_name(v), game.owner(v));
  builder.set_initial(game.initial());
  auto mid2_name = [&](int s, int t) {
    return game.vertex_name(s) + "~" + game.vertex_name(t) + ".2";
  };
  auto mid1_name = [&](int s, int t) {
    return game.vertex_name(s) + "~" + game.vertex_name(t) + ".1";
  };
  for (const auto& [s, t] : split.p1_edges) {
    builder.add_vertex(mid2_name(s, t), Player::Two);
    builder.add_vertex(mid1_name(s, t), Player::One);
  }
  auto weight_of = [&](int s, int t) {
    for (const auto& e : game.out(s))
      if (e.dst == t) return e.weight;
    throw InternalError("missing edge");
  };
  for (const auto& [s, t] : split.p1_edges) {
    int v2 = builder.vertex(mid2_name(s, t));
    int v1 = builder.vertex(mid1_name(s, t));
    builder.add_edge(s, v2, Rational(0));
    builder.add_edge(v2, v1, weight_of(s, t));
    builder.add_edge(v1, t, Rational(0));
    builder.add_edge(v2, game.initial(), reset_weight);
  }
  for (const auto& [s, t] : split.p2_edges) builder.add_edge(s, t, weight_of(s, t));
  return std::move(builder).build();
}

Mdp reset_mdp_with_weight(const TwoPlayerGame& game, const Rational& reset_weight, const char* who) {
  auto split = validated_bipartite(game, who);
  Mdp::Builder builder;
  for (int v = 0; v < game.num_vertices(); ++v)
    if (game.owner(v) == Player::One) builder.add_state(game.vertex_name(v));
  auto mid1_name = [&](int s, int t) {
    return game.vertex_name(s) + "~" + game.vertex_name(t) + ".1";
  };
  for (const auto& [s, t] : split.p1_edges) builder.add_state(mid1_name(s, t));
  builder.set_initial(game.vertex_name(game.initial()));

  auto weight_of = [&](int s, int t) {
    for (const auto& e : game.out(s))
      if (e.dst == t) return e.weight;
    throw InternalError("missing edge");
  };
  // A Player-1 move s -> t becomes an action that with probability 1/2
  // advances to the committed half-edge and with probability 1/2 resets.
  Rational half(1, 2);
  for (const auto& [s, t] : split.p1_edges) {
    int src = builder.state(game.vertex_name(s));
    int mid = builder.state(mid1_name(s, t));
    int init = builder.state(game.vertex_name(game.initial()));
    std::string action = "to~" + game.vertex_name(t);
    builder.add_transition(src, action, mid, half, weight_of(s, t));
    builder.add_transition(src, action, init, half, reset_weight);
  }
  // The committed half-edge hands control to the environment: a uniform
  // draw over Player 2's moves from t.
  for (const auto& [s, t] : split.p1_edges) {
    int mid = builder.state(mid1_name(s, t));
    const auto& succ = game.out(t);
    Rational each(1, static_cast<long long>(succ.size()));
    for (const auto& e : succ)
      builder.add_transition(mid, "go", builder.state(game.vertex_name(e.dst)), each, e.weight);
  }
  return std::move(builder).build();
}

}  // namespace

Rational reset_edge_weight(const TwoPlayerGame& game, int l_max) {
  return (game.max_weight() + Rational(1)) * Rational(2) * Rational(l_max);
}

Rational bounded_reset_edge_weight(const TwoPlayerGame& game) {
  auto split = validated_bipartite(game, "bounded_reset_edge_weight");
  long long vertices = game.num_vertices() + 2 * static_cast<long long>(split.p1_edges.size());
  return (game.max_weight() + Rational(1)) * Rational(vertices);
}

TwoPlayerGame build_reset_game(const TwoPlayerGame& game, int l_max) {
  if (l_max < 1) throw ValidationError("window length must be >= 1");
  return reset_game_with_weight(game, reset_edge_weight(game, l_max), "build_reset_game");
}

Mdp build_reset_mdp(const TwoPlayerGame& game, int l_max) {
  if (l_max < 1) throw ValidationError("window length must be >= 1");
  return reset_mdp_with_weight(game, reset_edge_weight(game, l_max), "build_reset_mdp");
}

TwoPlayerGame build_bounded_reset_game(const TwoPlayerGame& game) {
  return reset_game_with_weight(game, bounded_reset_edge_weight(game), "build_bounded_reset_game");
}

Mdp build_bounded_reset_mdp(const TwoPlayerGame& game) {
  return reset_mdp_with_weight(game, bounded_reset_edge_weight(game), "build_bounded_reset_mdp");
}

// --- Monte Carlo ---

bool McEstimate::within_sigmas(const Rational& exact, int k) const {
  Rational diff = exact - mean;
  return diff * diff <= Rational(static_cast<long long>(k) * k) * variance_of_mean;
}

double McEstimate::stddev_of_mean() const {
  double v = variance_of_mean.to_double();
  return v <= 0 ? 0.0 : std::sqrt(v);
}

double McEstimate::ci_low(double k) const { return mean.to_double() - k * stddev_of_mean(); }
double McEstimate::ci_high(double k) const { return mean.to_double() + k * stddev_of_mean(); }

McEstimate monte_carlo(const MarkovChain& mc, const Objective& objective, long long samples,
                       int horizon, int burn_in, std::uint64_t seed) {
  objective.validate();
  if (objective.kind != ObjectiveKind::Fixed && objective.kind != ObjectiveKind::DirectFixed)
    throw UnsupportedError("monte_carlo supports fixed and direct fixed objectives only");
  if (samples < 2) throw ValidationError("monte_carlo needs at least 2 samples");
  int l_max = *objective.window;
  int start_lo = objective.kind == ObjectiveKind::Fixed ? burn_in : 0;
  if (burn_in < 0 || horizon < start_lo + l_max)
    throw ValidationError("horizon too short for the window and burn-in");

  // Cost flavor: negate in, negate the estimate back out.
  MarkovChain model =
      objective.flavor == Flavor::Cost ? mc.with_weights([](const Rational& w) { return -w; }) : mc;
  auto norm = normalize(model);
  const MarkovChain& m = norm.model;

  // Sampled values are integers once scaled by lcm(1..l_max).
  long long scale = 1;
  for (int k = 2; k <= l_max; ++k) scale = std::lcm(scale, static_cast<long long>(k));
  long w_max = to_long(m.max_weight().numerator());
  Integer magnitude = Integer(std::to_string(scale)) * l_max * w_max;
  if (!magnitude.fits_slong_p() || to_long(magnitude) > (1L << 60))
    throw SizeCapError("monte_carlo weights too large for the integer fast path");

  struct StateSampler {
    std::uint64_t denom;
    std::vector<std::uint64_t> cumulative;
    std::vector<int> dst;
    std::vector<long> weight;
  };
  std::vector<StateSampler> samplers(static_cast<size_t>(m.num_states()));
  for (int s = 0; s < m.num_states(); ++s) {
    Integer denom(1);
    for (const auto& e : m.out(s)) denom = lcm(denom, e.prob.denominator());
    if (!denom.fits_ulong_p())
      throw UnsupportedError("monte_carlo: probability denominators too large to sample");
    StateSampler sampler;
    sampler.denom = denom.get_ui();
    std::uint64_t acc = 0;
    for (const auto& e : m.out(s)) {
      Integer num = e.prob.numerator() * (denom / e.prob.denominator());
      acc += num.get_ui();
      sampler.cumulative.push_back(acc);
      sampler.dst.push_back(e.dst);
      sampler.weight.push_back(to_long(e.weight.numerator()));
    }
    samplers[static_cast<size_t>(s)] = std::move(sampler);
  }

  std::mt19937_64 rng(seed);
  Integer sum(0), sum_sq(0);
  std::vector<long> weights(static_cast<size_t>(horizon));
  for (long long it = 0; it < samples; ++it) {
    int state = m.initial();
    for (int step = 0; step < horizon; ++step) {
      const auto& sampler = samplers[static_cast<size_t>(state)];
      std::uint64_t r = uniform_below(rng, sampler.denom);
      size_t pick = 0;
      while (sampler.cumulative[pick] <= r) ++pick;
      weights[static_cast<size_t>(step)] = sampler.weight[pick];
      state = sampler.dst[pick];
    }
    // value * scale = min over window positions of max over k of
    // (scale / k) * prefix_sum(k).
    long best_scaled = 0;
    bool first = true;
    for (int i = start_lo; i + l_max <= horizon; ++i) {
      long prefix = 0;
      long wmp_scaled = 0;
      bool w_first = true;
      for (int k = 1; k <= l_max; ++k) {
        prefix += weights[static_cast<size_t>(i + k - 1)];
        long mean_scaled = (scale / k) * prefix;
        if (w_first || mean_scaled > wmp_scaled) {
          wmp_scaled = mean_scaled;
          w_first = false;
        }
      }
      if (first || wmp_scaled < best_scaled) {
        best_scaled = wmp_scaled;
        first = false;
      }
    }
    Integer v(std::to_string(best_scaled));
    sum += v;
    sum_sq += v * v;
  }

  Integer n_z(std::to_string(samples));
  Rational scale_r(Integer(std::to_string(scale)));
  Rational mean_scaled = Rational(sum, n_z);
  // Unbiased sample variance of the mean: (sum_sq - sum^2/N) / ((N-1) N).
  Rational var_scaled = (Rational(sum_sq) - Rational(Integer(sum * sum), n_z)) /
                        Rational(Integer(n_z * (n_z - 1)));

  Rational mean_norm = mean_scaled / scale_r;
  Rational mean_user = norm.transform.invert_value(mean_norm);
  Rational denom = scale_r * Rational(norm.transform.scale);
  Rational var_user = var_scaled / (denom * denom);

  McEstimate est;
  est.mean = objective.flavor == Flavor::Cost ? -mean_user : mean_user;
  est.variance_of_mean = var_user;
  est.samples = samples;
  return est;
}

// --- random models ---

namespace {

// k positive numerators over a common denominator, summing to exactly 1.
std::vector<Rational> random_distribution(std::mt19937_64& rng, int k) {
  long long factor = rnd_int(rng, 1, 4);
  long long denom = static_cast<long long>(k) * factor;
  std::set<long long> cuts;
  while (static_cast<int>(cuts.size()) < k - 1) cuts.insert(rnd_int(rng, 1, denom - 1));
  std::vector<long long> edges{0};
  edges.insert(edges.end(), cuts.begin(), cuts.end());
  edges.push_back(denom);
  std::vector<Rational> probs;
  for (size_t i = 0; i + 1 < edges.size(); ++i)
    probs.push_back(Rational(edges[i + 1] - edges[i], denom));
  return probs;
}

Rational random_weight(std::mt19937_64& rng, const RandomModelParams& params) {
  long long den = params.weight_denominator_max > 1 ? rnd_int(rng, 1, params.weight_denominator_max) : 1;
  long long num = rnd_int(rng, params.weight_min * den, params.weight_max * den);
  return Rational(num, den);
}

std::vector<int> cycle_permutation(std::mt19937_64& rng, int n) {
  std::vector<int> perm(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) perm[static_cast<size_t>(i)] = i;
  for (int i = n - 1; i > 0; --i)
    std::swap(perm[static_cast<size_t>(i)],
              perm[static_cast<size_t>(rnd_int(rng, 0, i))]);
  return perm;
}

}  // namespace

MarkovChain random_markov_chain(const RandomModelParams& params, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  int n = params.states;
  MarkovChain::Builder builder;
  for (int s = 0; s < n; ++s) builder.add_state("s" + std::to_string(s));
  builder.set_initial(0);
  std::vector<int> perm = cycle_permutation(rng, n);
  std::vector<int> next_in_cycle(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    next_in_cycle[static_cast<size_t>(perm[static_cast<size_t>(i)])] =
        perm[static_cast<size_t>((i + 1) % n)];
  for (int s = 0; s < n; ++s) {
    int d = static_cast<int>(rnd_int(rng, params.min_out_degree,
                                     std::min(params.max_out_degree, n)));
    std::set<int> targets;
    if (params.strongly_connected) targets.insert(next_in_cycle[static_cast<size_t>(s)]);
    while (static_cast<int>(targets.size()) < d)
      targets.insert(static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(n))));
    auto probs = random_distribution(rng, static_cast<int>(targets.size()));
    size_t i = 0;
    for (int t : targets) builder.add_edge(s, t, probs[i++], random_weight(rng, params));
  }
  return std::move(builder).build();
}

Mdp random_mdp(const RandomModelParams& params, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  int n = params.states;
  Mdp::Builder builder;
  for (int s = 0; s < n; ++s) builder.add_state("s" + std::to_string(s));
  builder.set_initial(0);
  std::vector<int> perm = cycle_permutation(rng, n);
  std::vector<int> next_in_cycle(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    next_in_cycle[static_cast<size_t>(perm[static_cast<size_t>(i)])] =
        perm[static_cast<size_t>((i + 1) % n)];
  for (int s = 0; s < n; ++s) {
    int actions = static_cast<int>(rnd_int(rng, params.min_actions, params.max_actions));
    for (int a = 0; a < actions; ++a) {
      int d = static_cast<int>(rnd_int(rng, params.min_out_degree,
                                       std::min(params.max_out_degree, n)));
      std::set<int> targets;
      if (params.strongly_connected && a == 0)
        targets.insert(next_in_cycle[static_cast<size_t>(s)]);
      while (static_cast<int>(targets.size()) < d)
        targets.insert(static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(n))));
      auto probs = random_distribution(rng, static_cast<int>(targets.size()));
      size_t i = 0;
      for (int t : targets)
        builder.add_transition(s, "a" + std::to_string(a), t, probs[i++],
                               random_weight(rng, params));
    }
  }
  return std::move(builder).build();
}

TwoPlayerGame random_game(const RandomModelParams& params, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  int n = std::max(params.states, 2);
  TwoPlayerGame::Builder builder;
  std::vector<Player> owner(static_cast<size_t>(n));
  if (params.bipartite) {
    for (int v = 0; v < n; ++v) owner[static_cast<size_t>(v)] = v % 2 == 0 ? Player::One : Player::Two;
  } else {
    owner[0] = Player::One;
    owner[static_cast<size_t>(n - 1)] = Player::Two;
    for (int v = 1; v + 1 < n; ++v)
      owner[static_cast<size_t>(v)] = rnd_int(rng, 0, 1) == 0 ? Player::One : Player::Two;
  }
  for (int v = 0; v < n; ++v)
    builder.add_vertex("v" + std::to_string(v),
                       owner[static_cast<size_t>(v)]);
  builder.set_initial(0);
  std::vector<int> p1, p2, all;
  for (int v = 0; v < n; ++v) {
    (owner[static_cast<size_t>(v)] == Player::One ? p1 : p2).push_back(v);
    all.push_back(v);
  }
  for (int v = 0; v < n; ++v) {
    const std::vector<int>& pool =
        params.bipartite ? (owner[static_cast<size_t>(v)] == Player::One ? p2 : p1) : all;
    int d = static_cast<int>(rnd_int(rng, params.min_out_degree,
                                     std::min<long long>(params.max_out_degree,
                                                         static_cast<long long>(pool.size()))));
    if (d < 1) d = 1;
    std::set<int> picked;
    while (static_cast<int>(picked.size()) < d)
      picked.insert(pool[static_cast<size_t>(uniform_below(rng, pool.size()))]);
    for (int t : picked) builder.add_edge(v, t, random_weight(rng, params));
  }
  return std::move(builder).build();
}

// --- fixtures ---

MarkovChain fig1() {
  MarkovChain::Builder b;
  for (const char* name : {"s0", "s1", "s3", "s4"}) b.add_state(name);
  b.set_initial("s0");
  b.add_edge("s0", "s1", Rational(1, 2), Rational(0));
  b.add_edge("s0", "s3", Rational(1, 2), Rational(0));
  b.add_edge("s1", "s1", Rational(1), Rational(2));
  b.add_edge("s3", "s3", Rational(1, 2), Rational(3));
  b.add_edge("s3", "s4", Rational(1, 2), Rational(2));
  b.add_edge("s4", "s3", Rational(1, 2), Rational(0));
  b.add_edge("s4", "s4", Rational(1, 2), Rational(1));
  return std::move(b).build();
}

namespace {
MarkovChain four_cycle(const std::vector<long long>& weights) {
  MarkovChain::Builder b;
  for (int i = 0; i < 4; ++i) b.add_state("s" + std::to_string(i));
  b.set_initial("s0");
  for (int i = 0; i < 4; ++i)
    b.add_edge(i, (i + 1) % 4, Rational(1), Rational(weights[static_cast<size_t>(i)]));
  return std::move(b).build();
}
}  // namespace

MarkovChain fig2_chain() { return four_cycle({2, 5, 4, 3}); }
MarkovChain fig3_chain() { return four_cycle({-1, 2, 1, 0}); }

namespace {
WeightedDigraph cycle_graph(const std::vector<long long>& weights) {
  WeightedDigraph g(4);
  for (int i = 0; i < 4; ++i) g.add_edge(i, (i + 1) % 4, Rational(weights[static_cast<size_t>(i)]));
  return g;
}
}  // namespace

WeightedDigraph fig2_cycle() { return cycle_graph({2, 5, 4, 3}); }
WeightedDigraph fig3_cycle() { return cycle_graph({-1, 2, 1, 0}); }

TwoPlayerGame fig7_game() {
  TwoPlayerGame::Builder b;
  b.add_vertex("v0", Player::One);
  b.add_vertex("v1", Player::Two);
  b.add_vertex("v2", Player::One);
  b.add_vertex("v3", Player::Two);
  b.set_initial("v0");
  b.add_edge("v0", "v1", Rational(1));
  b.add_edge("v1", "v2", Rational(4));
  b.add_edge("v1", "v0", Rational(3));
  b.add_edge("v2", "v3", Rational(2));
  b.add_edge("v3", "v0", Rational(0));
  b.add_edge("v3", "v2", Rational(4));
  return std::move(b).build();
}

MarkovChain strict_gap_chain() {
  MarkovChain::Builder b;
  b.add_state("a");
  b.add_state("b");
  b.set_initial("a");
  b.add_edge("a", "a", Rational(1, 2), Rational(0));
  b.add_edge("a", "b", Rational(1, 2), Rational(1));
  b.add_edge("b", "a", Rational(1, 2), Rational(-1));
  b.add_edge("b", "b", Rational(1, 2), Rational(0));
  return std::move(b).build();
}

}  // namespace wmp::oracle
