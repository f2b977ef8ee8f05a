#include "wmp/mc_window.hpp"

#include <algorithm>
#include <set>
#include <thread>
#include <tuple>

namespace wmp {

namespace {

std::vector<char> reachable_states(const MarkovChain& mc) {
  std::vector<char> seen(static_cast<size_t>(mc.num_states()), 0);
  std::vector<int> queue{mc.initial()};
  seen[static_cast<size_t>(mc.initial())] = 1;
  while (!queue.empty()) {
    int s = queue.back();
    queue.pop_back();
    for (const auto& e : mc.out(s))
      if (!seen[static_cast<size_t>(e.dst)]) {
        seen[static_cast<size_t>(e.dst)] = 1;
        queue.push_back(e.dst);
      }
  }
  return seen;
}

void require_normalized(const MarkovChain& mc, const char* who) {
  if (!mc.weights_integral() || mc.min_weight().sign() < 0)
    throw ValidationError(std::string(who) + " requires non-negative integer weights (normalize first)");
}

}  // namespace

WindowTable non_negative_window_states(const WeightedDigraph& bscc, int l_max) {
  if (l_max < 0) throw ValidationError("window length must be >= 0");
  int n = bscc.num_vertices();
  if (!bscc.every_vertex_has_successor())
    throw ValidationError("window table needs every vertex to keep a successor");

  // Integer fast path on scaled weights; the non-negativity set is invariant
  // under positive scaling.
  Integer den(1);
  for (const auto& out : bscc.adj)
    for (const auto& [dst, w] : out) den = lcm(den, w.denominator());
  Integer max_abs(0);
  for (const auto& out : bscc.adj)
    for (const auto& [dst, w] : out) {
      Integer scaled = abs(w.numerator() * (den / w.denominator()));
      if (scaled > max_abs) max_abs = scaled;
    }
  Integer worst = max_abs * (l_max + 1);
  bool fast = worst.fits_slong_p() && to_long(worst) < (1L << 62) / 4;

  WindowTable table;
  table.total_payoff.assign(static_cast<size_t>(n), Rational(0));
  table.non_negative.assign(static_cast<size_t>(n), 1);
  if (fast) {
    std::vector<std::vector<std::pair<int, long>>> adj(static_cast<size_t>(n));
    for (int v = 0; v < n; ++v)
      for (const auto& [dst, w] : bscc.adj[static_cast<size_t>(v)])
        adj[static_cast<size_t>(v)].emplace_back(dst,
                                                 to_long(Integer(w.numerator() * (den / w.denominator()))));
    std::vector<long> c(static_cast<size_t>(n), 0), next(static_cast<size_t>(n));
    for (int i = 0; i < l_max; ++i) {
      for (int v = 0; v < n; ++v) {
        bool first = true;
        long best = 0;
        for (const auto& [dst, w] : adj[static_cast<size_t>(v)]) {
          long cand = std::max(w, w + c[static_cast<size_t>(dst)]);
          if (first || cand < best) {
            best = cand;
            first = false;
          }
        }
        next[static_cast<size_t>(v)] = best;
      }
      std::swap(c, next);
    }
    for (int v = 0; v < n; ++v) {
      table.total_payoff[static_cast<size_t>(v)] = Rational(Integer(std::to_string(c[static_cast<size_t>(v)])), den);
      table.non_negative[static_cast<size_t>(v)] = c[static_cast<size_t>(v)] >= 0;
    }
    return table;
  }

  std::vector<Rational> c(static_cast<size_t>(n), Rational(0)), next(static_cast<size_t>(n));
  for (int i = 0; i < l_max; ++i) {
    for (int v = 0; v < n; ++v) {
      std::optional<Rational> best;
      for (const auto& [dst, w] : bscc.adj[static_cast<size_t>(v)]) {
        Rational cand = std::max(w, w + c[static_cast<size_t>(dst)]);
        if (!best || cand < *best) best = cand;
      }
      next[static_cast<size_t>(v)] = *best;
    }
    std::swap(c, next);
  }
  for (int v = 0; v < n; ++v) {
    table.total_payoff[static_cast<size_t>(v)] = c[static_cast<size_t>(v)];
    table.non_negative[static_cast<size_t>(v)] = c[static_cast<size_t>(v)].sign() >= 0;
  }
  return table;
}

namespace {

// All values p/q with q in [1..l_max] and lo*q <= p <= hi*q, sorted.
std::vector<Rational> candidate_values(const Integer& lo, const Integer& hi, int l_max) {
  std::set<Rational> cands;
  for (int q = 1; q <= l_max; ++q)
    for (Integer p = lo * q; p <= hi * q; ++p) cands.insert(Rational(p, Integer(q)));
  return std::vector<Rational>(cands.begin(), cands.end());
}

}  // namespace

Rational bscc_fixed_window_value(const WeightedDigraph& bscc, int l_max) {
  if (l_max < 1) throw ValidationError("window length must be >= 1");
  if (!bscc.weights_integral())
    throw ValidationError("bscc_fixed_window_value requires integer weights");
  Integer lo = bscc.min_weight().numerator();
  Integer hi = bscc.max_weight().numerator();
  auto cands = candidate_values(lo, hi, l_max);
  // The value is the largest candidate lambda such that every window of
  // length l_max still closes after shifting all weights by -lambda.
  auto closes_everywhere = [&](const Rational& lambda) {
    return non_negative_window_states(bscc.shifted(lambda), l_max).all_non_negative();
  };
  size_t lo_i = 0, hi_i = cands.size() - 1;  // cands[0] = min weight always passes
  while (lo_i < hi_i) {
    size_t mid = (lo_i + hi_i + 1) / 2;
    if (closes_everywhere(cands[mid]))
      lo_i = mid;
    else
      hi_i = mid - 1;
  }
  return cands[lo_i];
}

AnalysisResult expected_fixed_window(const MarkovChain& mc, int l_max, const SolverOptions&) {
  if (l_max < 1) throw ValidationError("window length must be >= 1");
  auto norm = normalize(mc);
  auto part = bscc_decomposition(norm.model);
  AnalysisResult result;
  result.objective = Objective::fixed(l_max);
  result.transform = norm.transform;
  result.algorithm = "bscc-window-threshold-search";
  Rational expected;
  for (size_t i = 0; i < part.bsccs.size(); ++i) {
    auto sub = norm.model.subgraph(part.bsccs[i]);
    Rational value = bscc_fixed_window_value(sub.graph, l_max);
    expected += part.reachability[i] * value;
    result.component_values.push_back(ComponentValue{part.bsccs[i], norm.transform.invert_value(value)});
  }
  result.expected = norm.transform.invert_value(expected);
  return result;
}

AnalysisResult expected_bounded_window(const MarkovChain& mc, const SolverOptions&) {
  auto part = bscc_decomposition(mc);
  AnalysisResult result;
  result.objective = Objective::bounded();
  result.algorithm = "bscc-min-mean-cycle";
  Rational expected;
  for (size_t i = 0; i < part.bsccs.size(); ++i) {
    auto sub = mc.subgraph(part.bsccs[i]);
    Rational value = min_mean_cycle(sub.graph);
    expected += part.reachability[i] * value;
    result.component_values.push_back(ComponentValue{part.bsccs[i], value});
  }
  result.expected = expected;
  return result;
}

ThresholdProductMc build_threshold_product(const MarkovChain& mc, const Rational& lambda, int l_max) {
  if (l_max < 1) throw ValidationError("window length must be >= 1");
  require_normalized(mc, "build_threshold_product");
  if (lambda.sign() < 0) throw ValidationError("threshold must be non-negative");
  Integer a = lambda.numerator();
  Integer b = lambda.denominator();

  auto reduced = [&](const Rational& w) { return Integer(w.numerator() * b - a); };
  Integer reduced_abs_max(0);
  for (int s = 0; s < mc.num_states(); ++s)
    for (const auto& e : mc.out(s)) {
      Integer r = abs(reduced(e.weight));
      if (r > reduced_abs_max) reduced_abs_max = r;
    }
  Integer bound = reduced_abs_max * (l_max - 1);

  using Key = std::tuple<int, int, Integer>;
  std::map<Key, int> ids;
  std::vector<ThresholdProductMc::Node> nodes;
  MarkovChain::Builder builder;
  std::vector<Key> worklist;

  auto intern = [&](int state, int age, const Integer& deficit) {
    Key key{state, age, deficit};
    auto it = ids.find(key);
    if (it != ids.end()) return it->second;
    int id = builder.add_state("u" + std::to_string(nodes.size()));
    ids.emplace(key, id);
    nodes.push_back(ThresholdProductMc::Node{state, age, deficit});
    worklist.push_back(key);
    if (deficit > bound)
      throw InternalError("threshold product deficit exceeds its declared bound");
    return id;
  };

  int init = intern(mc.initial(), 0, Integer(0));
  builder.set_initial(init);
  struct PendingEdge {
    int src, dst;
    Rational prob;
    Rational weight;
  };
  std::vector<PendingEdge> edges;
  std::vector<std::pair<int, Rational>> trap_edges;  // src -> accumulated probability

  size_t cursor = 0;
  while (cursor < worklist.size()) {
    Key key = worklist[cursor++];
    int src = ids[key];
    auto [state, age, deficit] = key;
    Rational to_trap;
    for (const auto& e : mc.out(state)) {
      Integer v = deficit - reduced(e.weight);
      if (v > 0 && age == l_max - 1) {
        to_trap += e.prob;
      } else if (v > 0) {
        int dst = intern(e.dst, age + 1, v);
        edges.push_back(PendingEdge{src, dst, e.prob, Rational(reduced(e.weight))});
      } else {
        int dst = intern(e.dst, 0, Integer(0));
        edges.push_back(PendingEdge{src, dst, e.prob, Rational(reduced(e.weight))});
      }
    }
    if (!to_trap.is_zero()) trap_edges.emplace_back(src, to_trap);
  }
  int trap = builder.add_state("trap");
  builder.add_edge(trap, trap, Rational(1), Rational(0));
  for (const auto& pe : edges) builder.add_edge(pe.src, pe.dst, pe.prob, pe.weight);
  for (const auto& [src, prob] : trap_edges) builder.add_edge(src, trap, prob, Rational(0));

  ThresholdProductMc product;
  product.chain = std::move(builder).build();
  product.nodes = std::move(nodes);
  product.trap = trap;
  product.lambda = lambda;
  product.deficit_bound = bound;
  return product;
}

namespace {

// Window mean-payoff values realized by l_max-step paths from reachable
// states. Returns nullopt when the enumeration would exceed `cap` nodes.
std::optional<std::set<Rational>> realized_window_values(const MarkovChain& mc, int l_max,
                                                         std::uint64_t cap) {
  auto reachable = reachable_states(mc);
  std::set<Rational> values;
  std::uint64_t budget = cap;
  std::vector<Rational> prefix;  // running prefix sums
  struct Frame {
    int state;
    size_t edge;
  };
  for (int s0 = 0; s0 < mc.num_states(); ++s0) {
    if (!reachable[static_cast<size_t>(s0)]) continue;
    std::vector<Frame> stack{{s0, 0}};
    prefix.clear();
    while (!stack.empty()) {
      Frame& f = stack.back();
      if (static_cast<int>(prefix.size()) == l_max) {
        Rational best = prefix[0];
        for (int k = 1; k < l_max; ++k) best = std::max(best, prefix[static_cast<size_t>(k)] / Rational(k + 1));
        // prefix[k] stores the sum of the first k+1 weights; divide lazily.
        values.insert(best);
        stack.pop_back();
        prefix.pop_back();
        continue;
      }
      if (f.edge >= mc.out(f.state).size()) {
        stack.pop_back();
        if (!prefix.empty() && stack.size() == prefix.size()) prefix.pop_back();
        continue;
      }
      const auto& e = mc.out(f.state)[f.edge++];
      if (budget-- == 0) return std::nullopt;
      Rational sum = prefix.empty() ? e.weight : prefix.back() + e.weight;
      prefix.push_back(sum);
      stack.push_back(Frame{e.dst, 0});
    }
  }
  return values;
}

}  // namespace

AnalysisResult expected_direct_fixed_window(const MarkovChain& mc, int l_max,
                                            const SolverOptions& opts) {
  if (l_max < 1) throw ValidationError("window length must be >= 1");
  auto norm = normalize(mc);
  const MarkovChain& m = norm.model;
  Integer w_max = m.max_weight().numerator();

  // Thresholds of interest: window values actually realized by some
  // l_max-step path, a subset of the full candidate set {p/q}.
  std::vector<Rational> lambdas;
  if (auto realized = realized_window_values(m, l_max, opts.realized_value_enum_cap)) {
    lambdas.assign(realized->begin(), realized->end());
  } else {
    lambdas = candidate_values(Integer(0), w_max, l_max);
  }
  std::sort(lambdas.begin(), lambdas.end(), std::greater<Rational>());

  auto tail_of = [&](const Rational& lambda) {
    auto product = build_threshold_product(m, lambda, l_max);
    auto reach = reachability_probabilities(product.chain, {product.trap});
    return Rational(1) - reach[static_cast<size_t>(product.chain.initial())];
  };

  std::vector<Rational> tails(lambdas.size());
  if (opts.threads <= 1) {
    // Tails are nondecreasing along descending thresholds; once a tail hits
    // 1 every later threshold has tail 1 as well.
    size_t i = 0;
    for (; i < lambdas.size(); ++i) {
      tails[i] = tail_of(lambdas[i]);
      if (tails[i] == Rational(1)) break;
    }
    for (size_t j = i + 1; j < lambdas.size(); ++j) tails[j] = Rational(1);
  } else {
    int workers = std::min<int>(opts.threads, static_cast<int>(lambdas.size()));
    if (workers < 1) workers = 1;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&, w]() {
        for (size_t i = static_cast<size_t>(w); i < lambdas.size(); i += static_cast<size_t>(workers))
          tails[i] = tail_of(lambdas[i]);
      });
    for (auto& th : pool) th.join();
  }

  ValueDistribution dist;
  Rational expected;
  Rational prev_tail;
  for (size_t i = 0; i < lambdas.size(); ++i) {
    Rational mass = tails[i] - prev_tail;
    if (mass.sign() < 0) throw InternalError("direct fixed window tails are not monotone");
    if (mass.sign() > 0) {
      dist[norm.transform.invert_value(lambdas[i])] = mass;
      expected += lambdas[i] * mass;
    }
    prev_tail = tails[i];
  }
  if (prev_tail != Rational(1))
    throw InternalError("direct fixed window distribution does not sum to 1");

  AnalysisResult result;
  result.objective = Objective::direct_fixed(l_max);
  result.transform = norm.transform;
  result.algorithm = "threshold-product";
  result.expected = norm.transform.invert_value(expected);
  result.distribution = std::move(dist);
  return result;
}

PathUnfolding build_path_unfolding(const MarkovChain& mc, int l_max, const SolverOptions& opts) {
  if (l_max < 1) throw ValidationError("window length must be >= 1");
  Integer declared;
  mpz_ui_pow_ui(declared.get_mpz_t(), static_cast<unsigned long>(mc.num_states()),
                static_cast<unsigned long>(l_max));
  if (declared > Integer(std::to_string(opts.unfold_cap)))
    throw SizeCapError("path unfolding needs |S|^l_max = " + declared.get_str() +
                       " states, above the cap of " + std::to_string(opts.unfold_cap));

  auto weight_of = [&](int u, int v) -> const Rational& {
    for (const auto& e : mc.out(u))
      if (e.dst == v) return e.weight;
    throw InternalError("missing edge in path unfolding");
  };
  auto wmp_of = [&](const std::vector<int>& seq) {
    Rational sum, best;
    bool first = true;
    for (size_t i = 0; i + 1 < seq.size(); ++i) {
      sum += weight_of(seq[i], seq[i + 1]);
      Rational mean = sum / Rational(static_cast<long long>(i + 1));
      if (first || mean > best) {
        best = mean;
        first = false;
      }
    }
    return best;
  };

  MarkovChain::Builder builder;
  std::map<std::vector<int>, int> ids;
  std::vector<std::vector<int>> path_states;
  std::vector<Rational> labels;
  int init = builder.add_state("u0");
  builder.set_initial(init);
  path_states.push_back({mc.initial()});
  labels.push_back(Rational(0));

  std::vector<std::vector<int>> worklist;
  auto intern = [&](const std::vector<int>& seq) {
    auto it = ids.find(seq);
    if (it != ids.end()) return it->second;
    int id = builder.add_state("u" + std::to_string(path_states.size()));
    ids.emplace(seq, id);
    path_states.push_back(seq);
    labels.push_back(wmp_of(seq));
    worklist.push_back(seq);
    return id;
  };

  // Edges from the artificial source: one per l_max-step path from the
  // initial state, carrying the path's probability.
  {
    struct Frame {
      int state;
      size_t edge;
    };
    std::vector<Frame> stack{{mc.initial(), 0}};
    std::vector<int> seq{mc.initial()};
    std::vector<Rational> prob{Rational(1)};
    while (!stack.empty()) {
      if (static_cast<int>(seq.size()) == l_max + 1) {
        builder.add_edge(init, intern(seq), prob.back(), Rational(0));
        stack.pop_back();
        seq.pop_back();
        prob.pop_back();
        continue;
      }
      Frame& f = stack.back();
      if (f.edge >= mc.out(f.state).size()) {
        stack.pop_back();
        seq.pop_back();
        prob.pop_back();
        continue;
      }
      const auto& e = mc.out(f.state)[f.edge++];
      stack.push_back(Frame{e.dst, 0});
      seq.push_back(e.dst);
      prob.push_back(prob.back() * e.prob);
    }
  }
  // Sliding edges between path states.
  size_t cursor = 0;
  while (cursor < worklist.size()) {
    std::vector<int> seq = worklist[cursor++];
    int src = ids[seq];
    int last = seq.back();
    std::vector<int> next(seq.begin() + 1, seq.end());
    next.push_back(0);
    for (const auto& e : mc.out(last)) {
      next.back() = e.dst;
      builder.add_edge(src, intern(next), e.prob, Rational(0));
    }
  }

  PathUnfolding unfolding;
  unfolding.chain = std::move(builder).build();
  unfolding.init = init;
  unfolding.label = std::move(labels);
  unfolding.path_states = std::move(path_states);
  return unfolding;
}

AnalysisResult expected_direct_fixed_window_unfold(const MarkovChain& mc, int l_max,
                                                   const SolverOptions& opts) {
  auto unfolding = build_path_unfolding(mc, l_max, opts);
  const MarkovChain& chain = unfolding.chain;
  int n = chain.num_states();

  std::set<Rational> value_set;
  for (int s = 0; s < n; ++s)
    if (s != unfolding.init) value_set.insert(unfolding.label[static_cast<size_t>(s)]);
  std::vector<Rational> values(value_set.begin(), value_set.end());  // ascending

  std::vector<char> greater(static_cast<size_t>(n), 1);  // labels >= current value
  greater[static_cast<size_t>(unfolding.init)] = 0;
  std::vector<int> smaller;  // states with labels below the current value

  ValueDistribution dist;
  Rational expected, total;
  for (const Rational& m : values) {
    std::vector<int> current;
    for (int s = 0; s < n; ++s)
      if (s != unfolding.init && greater[static_cast<size_t>(s)] &&
          unfolding.label[static_cast<size_t>(s)] == m)
        current.push_back(s);

    // First-visit probabilities: stay among labels > m (plus the source)
    // until stepping into a label-m state.
    std::vector<char> stay(static_cast<size_t>(n), 0);
    stay[static_cast<size_t>(unfolding.init)] = 1;
    for (int s = 0; s < n; ++s)
      if (greater[static_cast<size_t>(s)]) stay[static_cast<size_t>(s)] = 1;
    for (int s : current) stay[static_cast<size_t>(s)] = 0;
    auto visits = detail::expected_visits_before_exit(chain, stay, unfolding.init);

    std::vector<Rational> first_hit(static_cast<size_t>(n));
    for (int u = 0; u < n; ++u) {
      if (visits[static_cast<size_t>(u)].is_zero()) continue;
      for (const auto& e : chain.out(u))
        first_hit[static_cast<size_t>(e.dst)] += visits[static_cast<size_t>(u)] * e.prob;
    }
    auto reach_smaller = reachability_probabilities(chain, smaller);

    Rational prob_m;
    for (int s : current)
      prob_m += first_hit[static_cast<size_t>(s)] *
                (Rational(1) - reach_smaller[static_cast<size_t>(s)]);
    if (prob_m.sign() > 0) {
      dist[m] = prob_m;
      expected += m * prob_m;
      total += prob_m;
    }
    for (int s : current) {
      greater[static_cast<size_t>(s)] = 0;
      smaller.push_back(s);
    }
  }
  if (total != Rational(1))
    throw InternalError("path unfolding distribution does not sum to 1");

  AnalysisResult result;
  result.objective = Objective::direct_fixed(l_max);
  result.algorithm = "path-unfolding";
  result.expected = expected;
  result.distribution = std::move(dist);
  return result;
}

GoodWindowCheck check_good_window_everywhere(const MarkovChain& mc, const Rational& p, int l_max,
                                             const Rational& lambda) {
  if (l_max < 1) throw ValidationError("window length must be >= 1");
  int n = mc.num_states();
  GoodWindowCheck check;
  check.mass.assign(static_cast<size_t>(n), Rational(0));
  check.satisfied.assign(static_cast<size_t>(n), 0);

  // Probability mass of l_max-step paths whose window closes; once a prefix
  // mean reaches lambda every extension is counted, so the whole subtree
  // collapses to the prefix probability.
  struct Frame {
    int state;
    size_t edge;
  };
  for (int s0 = 0; s0 < n; ++s0) {
    Rational mass;
    std::vector<Frame> stack{{s0, 0}};
    std::vector<Rational> sums;
    std::vector<Rational> probs{Rational(1)};
    while (!stack.empty()) {
      Frame& f = stack.back();
      bool closed = false;
      if (!sums.empty() && sums.back() >= lambda * Rational(static_cast<long long>(sums.size())))
        closed = true;
      if (closed || static_cast<int>(sums.size()) == l_max) {
        if (closed) mass += probs.back();
        stack.pop_back();
        sums.pop_back();
        probs.pop_back();
        continue;
      }
      if (f.edge >= mc.out(f.state).size()) {
        stack.pop_back();
        if (!sums.empty()) {
          sums.pop_back();
          probs.pop_back();
        }
        continue;
      }
      const auto& e = mc.out(f.state)[f.edge++];
      sums.push_back(sums.empty() ? e.weight : sums.back() + e.weight);
      probs.push_back(probs.back() * e.prob);
      stack.push_back(Frame{e.dst, 0});
    }
    check.mass[static_cast<size_t>(s0)] = mass;
    check.satisfied[static_cast<size_t>(s0)] = mass >= p;
  }
  auto reachable = reachable_states(mc);
  check.all_reachable_satisfied = true;
  for (int s = 0; s < n; ++s)
    if (reachable[static_cast<size_t>(s)] && !check.satisfied[static_cast<size_t>(s)])
      check.all_reachable_satisfied = false;
  return check;
}

}  // namespace wmp
