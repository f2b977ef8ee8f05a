#include "wmp/mdp_window.hpp"

#include <algorithm>
#include <map>
#include <optional>

namespace wmp {

namespace {

void require_normalized_mdp(const Mdp& mdp, const char* who) {
  if (!mdp.weights_integral() || mdp.min_weight().sign() < 0)
    throw ValidationError(std::string(who) + " requires non-negative integer weights (normalize first)");
}

void require_single_mec(const Mdp& mec, const char* who) {
  WeightedDigraph g(mec.num_states());
  for (int s = 0; s < mec.num_states(); ++s)
    for (const auto& c : mec.choices(s))
      for (const auto& e : c.edges) g.add_edge(s, e.dst, e.weight);
  if (!g.is_strongly_connected())
    throw ValidationError(std::string(who) + ": input is not a single maximal end component");
}

}  // namespace

Rational mec_fixed_window_value(const Mdp& mec, int l_max) {
  if (l_max < 1) throw ValidationError("window length must be >= 1");
  require_single_mec(mec, "mec_fixed_window_value");
  auto derived = game_from_mdp(mec);
  auto values = max_direct_window_value(derived.game, 2 * l_max);
  std::optional<Rational> best;
  for (int s = 0; s < mec.num_states(); ++s) {
    const Rational& v = values.value[static_cast<size_t>(derived.state_vertex[static_cast<size_t>(s)])];
    if (!best || v > *best) best = v;
  }
  return Rational(2) * *best;
}

Rational mec_bounded_window_value(const Mdp& mec, const SolverOptions& opts) {
  require_single_mec(mec, "mec_bounded_window_value");
  auto derived = game_from_mdp(mec);
  auto values = mean_payoff_game_values(derived.game, opts);
  std::optional<Rational> best;
  for (int s = 0; s < mec.num_states(); ++s) {
    const Rational& v = values[static_cast<size_t>(derived.state_vertex[static_cast<size_t>(s)])];
    if (!best || v > *best) best = v;
  }
  return Rational(2) * *best;
}

MecReplacement replace_mec_weights(const Mdp& mdp, int l_max, MecMode mode,
                                   const SolverOptions& opts) {
  MecReplacement result;
  result.partition = mec_decomposition(mdp);
  result.mec_value.reserve(result.partition.mecs.size());

  // Per-MEC values on the standalone sub-MDPs, in discovery order.
  for (const auto& mec : result.partition.mecs) {
    auto sub = mdp.restricted(mec.states, mec.choice_indices);
    Rational value = mode == MecMode::Fixed ? mec_fixed_window_value(sub.mdp, l_max)
                                            : mec_bounded_window_value(sub.mdp, opts);
    result.mec_value.push_back(value);
  }

  // Rewrite in-MEC edges; everything else keeps its weight.
  Mdp::Builder builder;
  for (int s = 0; s < mdp.num_states(); ++s) builder.add_state(mdp.state_name(s));
  builder.set_initial(mdp.initial());
  std::vector<std::map<int, Rational>> rewrite(static_cast<size_t>(mdp.num_states()));
  for (size_t mi = 0; mi < result.partition.mecs.size(); ++mi) {
    const auto& mec = result.partition.mecs[mi];
    for (size_t i = 0; i < mec.states.size(); ++i)
      for (int ci : mec.choice_indices[i])
        rewrite[static_cast<size_t>(mec.states[i])].emplace(ci, result.mec_value[mi]);
  }
  for (int s = 0; s < mdp.num_states(); ++s) {
    const auto& chs = mdp.choices(s);
    for (size_t ci = 0; ci < chs.size(); ++ci) {
      auto it = rewrite[static_cast<size_t>(s)].find(static_cast<int>(ci));
      for (const auto& e : chs[ci].edges)
        builder.add_transition(s, mdp.action_name(chs[ci].action), e.dst, e.prob,
                               it == rewrite[static_cast<size_t>(s)].end() ? e.weight : it->second);
    }
  }
  result.mdp = std::move(builder).build();
  return result;
}

Rational expected_mean_payoff_const_mec(const Mdp& mdp) {
  auto partition = mec_decomposition(mdp);
  int n = mdp.num_states();

  std::vector<int> mec_of(static_cast<size_t>(n), -1);
  std::vector<std::vector<char>> choice_in_mec(static_cast<size_t>(n));
  for (int s = 0; s < n; ++s)
    choice_in_mec[static_cast<size_t>(s)].assign(mdp.choices(s).size(), 0);
  std::vector<Rational> mec_value(partition.mecs.size());
  for (size_t mi = 0; mi < partition.mecs.size(); ++mi) {
    const auto& mec = partition.mecs[mi];
    std::optional<Rational> value;
    for (size_t i = 0; i < mec.states.size(); ++i) {
      int s = mec.states[i];
      mec_of[static_cast<size_t>(s)] = static_cast<int>(mi);
      for (int ci : mec.choice_indices[i]) {
        choice_in_mec[static_cast<size_t>(s)][static_cast<size_t>(ci)] = 1;
        for (const auto& e : mdp.choices(s)[static_cast<size_t>(ci)].edges) {
          if (!value) value = e.weight;
          if (*value != e.weight)
            throw UnsupportedError(
                "expected_mean_payoff_const_mec requires one constant weight per MEC");
        }
      }
    }
    mec_value[mi] = value ? *value : Rational(0);
  }

  // Quotient: one node per MEC, one per remaining state. Moves are either a
  // commit (absorb at the MEC's value) or a distribution over nodes.
  int num_mecs = static_cast<int>(partition.mecs.size());
  std::vector<int> node_of(static_cast<size_t>(n));
  int next_node = num_mecs;
  for (int s = 0; s < n; ++s)
    node_of[static_cast<size_t>(s)] =
        mec_of[static_cast<size_t>(s)] >= 0 ? mec_of[static_cast<size_t>(s)] : next_node++;
  int num_nodes = next_node;

  struct Move {
    bool commit = false;
    Rational value;                                  // committed terminal value
    std::vector<std::pair<int, Rational>> dist;      // node -> probability
  };
  std::vector<std::vector<Move>> moves(static_cast<size_t>(num_nodes));

  auto add_distribution_move = [&](int node, int s, size_t ci) {
    std::map<int, Rational> dist;
    for (const auto& e : mdp.choices(s)[ci].edges)
      dist[node_of[static_cast<size_t>(e.dst)]] += e.prob;
    Move mv;
    for (auto& [target, prob] : dist) mv.dist.emplace_back(target, prob);
    moves[static_cast<size_t>(node)].push_back(std::move(mv));
  };

  for (size_t mi = 0; mi < partition.mecs.size(); ++mi) {
    Move commit;
    commit.commit = true;
    commit.value = mec_value[mi];
    moves[mi].push_back(std::move(commit));
    for (int s : partition.mecs[mi].states) {
      const auto& chs = mdp.choices(s);
      for (size_t ci = 0; ci < chs.size(); ++ci)
        if (!choice_in_mec[static_cast<size_t>(s)][ci])
          add_distribution_move(static_cast<int>(mi), s, ci);
    }
  }
  for (int s = 0; s < n; ++s) {
    if (mec_of[static_cast<size_t>(s)] >= 0) continue;
    for (size_t ci = 0; ci < mdp.choices(s).size(); ++ci)
      add_distribution_move(node_of[static_cast<size_t>(s)], s, ci);
  }

  // Policy iteration; the initial policy commits inside every MEC, which is
  // proper, and improvements only ever switch on strict gain.
  std::vector<size_t> policy(static_cast<size_t>(num_nodes), 0);
  std::vector<Rational> value(static_cast<size_t>(num_nodes));
  while (true) {
    // Evaluate: committed nodes are constants, the rest solve a linear
    // system against the one-step expectation of their chosen move.
    std::vector<int> open;  // nodes with a distribution move
    std::vector<int> open_index(static_cast<size_t>(num_nodes), -1);
    for (int x = 0; x < num_nodes; ++x) {
      const Move& mv = moves[static_cast<size_t>(x)][policy[static_cast<size_t>(x)]];
      if (mv.commit)
        value[static_cast<size_t>(x)] = mv.value;
      else {
        open_index[static_cast<size_t>(x)] = static_cast<int>(open.size());
        open.push_back(x);
      }
    }
    if (!open.empty()) {
      size_t m = open.size();
      std::vector<std::vector<Rational>> a(m, std::vector<Rational>(m));
      std::vector<Rational> b(m);
      for (size_t i = 0; i < m; ++i) {
        a[i][i] = Rational(1);
        const Move& mv = moves[static_cast<size_t>(open[i])][policy[static_cast<size_t>(open[i])]];
        for (const auto& [target, prob] : mv.dist) {
          int j = open_index[static_cast<size_t>(target)];
          if (j >= 0)
            a[i][static_cast<size_t>(j)] -= prob;
          else
            b[i] += prob * value[static_cast<size_t>(target)];
        }
      }
      auto x = detail::solve_linear(std::move(a), std::move(b));
      for (size_t i = 0; i < m; ++i) value[static_cast<size_t>(open[i])] = x[i];
    }

    // Improve on strict gain only; ties keep the incumbent, and among
    // strictly better moves the lowest index wins.
    bool switched = false;
    for (int x = 0; x < num_nodes; ++x) {
      Rational best = value[static_cast<size_t>(x)];
      std::optional<size_t> best_move;
      for (size_t mi = 0; mi < moves[static_cast<size_t>(x)].size(); ++mi) {
        const Move& mv = moves[static_cast<size_t>(x)][mi];
        Rational q;
        if (mv.commit) {
          q = mv.value;
        } else {
          for (const auto& [target, prob] : mv.dist) q += prob * value[static_cast<size_t>(target)];
        }
        if (q > best) {
          best = q;
          best_move = mi;
        }
      }
      if (best_move && *best_move != policy[static_cast<size_t>(x)]) {
        policy[static_cast<size_t>(x)] = *best_move;
        switched = true;
      }
    }
    if (!switched) break;
  }
  return value[static_cast<size_t>(node_of[static_cast<size_t>(mdp.initial())])];
}

AnalysisResult expected_fixed_window(const Mdp& mdp, int l_max, const SolverOptions& opts) {
  if (l_max < 1) throw ValidationError("window length must be >= 1");
  auto norm = normalize(mdp);
  auto replaced = replace_mec_weights(norm.model, l_max, MecMode::Fixed, opts);
  AnalysisResult result;
  result.objective = Objective::fixed(l_max);
  result.transform = norm.transform;
  result.algorithm = "mec-window-game";
  result.expected = norm.transform.invert_value(expected_mean_payoff_const_mec(replaced.mdp));
  for (size_t mi = 0; mi < replaced.partition.mecs.size(); ++mi)
    result.component_values.push_back(
        ComponentValue{replaced.partition.mecs[mi].states,
                       norm.transform.invert_value(replaced.mec_value[mi])});
  return result;
}

AnalysisResult expected_bounded_window(const Mdp& mdp, const SolverOptions& opts) {
  auto norm = normalize(mdp);
  auto replaced = replace_mec_weights(norm.model, 0, MecMode::Bounded, opts);
  AnalysisResult result;
  result.objective = Objective::bounded();
  result.transform = norm.transform;
  result.algorithm = "mec-mean-payoff-game";
  result.expected = norm.transform.invert_value(expected_mean_payoff_const_mec(replaced.mdp));
  for (size_t mi = 0; mi < replaced.partition.mecs.size(); ++mi)
    result.component_values.push_back(
        ComponentValue{replaced.partition.mecs[mi].states,
                       norm.transform.invert_value(replaced.mec_value[mi])});
  return result;
}

DirFixProductMdp build_direct_window_product(const Mdp& mdp, int l_max, const SolverOptions& opts) {
  if (l_max < 1) throw ValidationError("window length must be >= 1");
  require_normalized_mdp(mdp, "build_direct_window_product");
  Integer w_max = mdp.max_weight().numerator();

  struct Key {
    int state;
    std::vector<Integer> window;
    Rational lambda;
    bool operator<(const Key& o) const {
      if (state != o.state) return state < o.state;
      if (window != o.window) return window < o.window;
      return lambda < o.lambda;
    }
  };

  std::map<Key, int> ids;
  std::vector<DirFixProductMdp::Node> nodes;
  std::vector<Key> worklist;
  Mdp::Builder builder;

  auto intern = [&](Key key) {
    auto it = ids.find(key);
    if (it != ids.end()) return it->second;
    if (nodes.size() >= opts.product_cap)
      throw SizeCapError("direct window product exceeds the cap of " +
                         std::to_string(opts.product_cap) + " reachable states");
    int id = builder.add_state("u" + std::to_string(nodes.size()));
    nodes.push_back(DirFixProductMdp::Node{key.state, key.window, key.lambda});
    auto inserted = ids.emplace(std::move(key), id);
    worklist.push_back(inserted.first->first);
    return id;
  };

  Key init{mdp.initial(), std::vector<Integer>(static_cast<size_t>(l_max - 1), w_max),
           Rational(w_max)};
  int init_id = intern(init);
  builder.set_initial(init_id);

  size_t cursor = 0;
  while (cursor < worklist.size()) {
    Key key = worklist[cursor++];
    int src = ids[key];
    for (const auto& choice : mdp.choices(key.state)) {
      for (const auto& e : choice.edges) {
        Integer w = e.weight.numerator();
        // Window values over the vector extended by the new weight: the
        // sliding window that opened l_max steps ago is now fully known.
        Rational window_value;
        {
          Rational sum;
          bool first = true;
          for (int l = 1; l <= l_max; ++l) {
            const Integer& a = l <= l_max - 1 ? key.window[static_cast<size_t>(l - 1)] : w;
            sum += Rational(a);
            Rational mean = sum / Rational(l);
            if (first || mean > window_value) {
              window_value = mean;
              first = false;
            }
          }
        }
        Rational lambda = std::min(key.lambda, window_value);
        if (lambda > key.lambda)
          throw InternalError("window product lambda increased along an edge");
        Key next{e.dst, {}, lambda};
        next.window.reserve(static_cast<size_t>(l_max - 1));
        for (size_t i = 1; i < key.window.size(); ++i) next.window.push_back(key.window[i]);
        if (l_max > 1) next.window.push_back(w);
        int dst = intern(std::move(next));
        builder.add_transition(src, mdp.action_name(choice.action), dst, e.prob, key.lambda);
      }
    }
  }

  DirFixProductMdp product;
  product.mdp = std::move(builder).build();
  product.nodes = std::move(nodes);

  // Every end component of the product sees a single lambda; the running
  // minimum cannot oscillate inside a recurrent class.
  auto mecs = mec_decomposition(product.mdp);
  for (const auto& mec : mecs.mecs) {
    const Rational& l0 = product.nodes[static_cast<size_t>(mec.states.front())].lambda;
    for (int s : mec.states)
      if (product.nodes[static_cast<size_t>(s)].lambda != l0)
        throw InternalError("window product end component mixes lambda values");
  }
  return product;
}

AnalysisResult expected_direct_fixed_window(const Mdp& mdp, int l_max, const SolverOptions& opts) {
  if (l_max < 1) throw ValidationError("window length must be >= 1");
  auto norm = normalize(mdp);
  auto product = build_direct_window_product(norm.model, l_max, opts);
  AnalysisResult result;
  result.objective = Objective::direct_fixed(l_max);
  result.transform = norm.transform;
  result.algorithm = "window-product-mean-payoff";
  result.expected = norm.transform.invert_value(expected_mean_payoff_const_mec(product.mdp));
  return result;
}

}  // namespace wmp
