#include "wmp/graph.hpp"

#include <algorithm>
#include <optional>

namespace wmp {

namespace detail {

std::vector<std::vector<int>> strongly_connected_components(const std::vector<std::vector<int>>& adj) {
  int n = static_cast<int>(adj.size());
  std::vector<int> index(static_cast<size_t>(n), -1), lowlink(static_cast<size_t>(n), 0);
  std::vector<char> on_stack(static_cast<size_t>(n), 0);
  std::vector<int> stack;
  std::vector<std::vector<int>> components;
  int next_index = 0;

  struct Frame {
    int v;
    size_t edge;
  };
  for (int root = 0; root < n; ++root) {
    if (index[static_cast<size_t>(root)] != -1) continue;
    std::vector<Frame> call{{root, 0}};
    index[static_cast<size_t>(root)] = lowlink[static_cast<size_t>(root)] = next_index++;
    stack.push_back(root);
    on_stack[static_cast<size_t>(root)] = 1;
    while (!call.empty()) {
      Frame& f = call.back();
      if (f.edge < adj[static_cast<size_t>(f.v)].size()) {
        int w = adj[static_cast<size_t>(f.v)][f.edge++];
        if (index[static_cast<size_t>(w)] == -1) {
          index[static_cast<size_t>(w)] = lowlink[static_cast<size_t>(w)] = next_index++;
          stack.push_back(w);
          on_stack[static_cast<size_t>(w)] = 1;
          call.push_back(Frame{w, 0});
        } else if (on_stack[static_cast<size_t>(w)]) {
          lowlink[static_cast<size_t>(f.v)] =
              std::min(lowlink[static_cast<size_t>(f.v)], index[static_cast<size_t>(w)]);
        }
      } else {
        int v = f.v;
        call.pop_back();
        if (!call.empty())
          lowlink[static_cast<size_t>(call.back().v)] =
              std::min(lowlink[static_cast<size_t>(call.back().v)], lowlink[static_cast<size_t>(v)]);
        if (lowlink[static_cast<size_t>(v)] == index[static_cast<size_t>(v)]) {
          std::vector<int> comp;
          while (true) {
            int w = stack.back();
            stack.pop_back();
            on_stack[static_cast<size_t>(w)] = 0;
            comp.push_back(w);
            if (w == v) break;
          }
          std::sort(comp.begin(), comp.end());
          components.push_back(std::move(comp));
        }
      }
    }
  }
  return components;
}

std::vector<Rational> solve_linear(std::vector<std::vector<Rational>> a, std::vector<Rational> b) {
  size_t n = a.size();
  for (size_t col = 0; col < n; ++col) {
    size_t pivot = col;
    while (pivot < n && a[pivot][col].is_zero()) ++pivot;
    if (pivot == n) throw InternalError("singular linear system");
    std::swap(a[pivot], a[col]);
    std::swap(b[pivot], b[col]);
    for (size_t row = 0; row < n; ++row) {
      if (row == col || a[row][col].is_zero()) continue;
      Rational factor = a[row][col] / a[col][col];
      for (size_t k = col; k < n; ++k) a[row][k] -= factor * a[col][k];
      b[row] -= factor * b[col];
    }
  }
  std::vector<Rational> x(n);
  for (size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
  return x;
}

namespace {

std::vector<char> backward_reachable(const MarkovChain& mc, const std::vector<char>& seeds,
                                     const std::vector<char>& allowed) {
  int n = mc.num_states();
  std::vector<std::vector<int>> pred(static_cast<size_t>(n));
  for (int s = 0; s < n; ++s)
    for (const auto& e : mc.out(s)) pred[static_cast<size_t>(e.dst)].push_back(s);
  std::vector<char> seen(static_cast<size_t>(n), 0);
  std::vector<int> queue;
  for (int s = 0; s < n; ++s)
    if (seeds[static_cast<size_t>(s)]) {
      seen[static_cast<size_t>(s)] = 1;
      queue.push_back(s);
    }
  while (!queue.empty()) {
    int v = queue.back();
    queue.pop_back();
    for (int p : pred[static_cast<size_t>(v)])
      if (!seen[static_cast<size_t>(p)] && allowed[static_cast<size_t>(p)]) {
        seen[static_cast<size_t>(p)] = 1;
        queue.push_back(p);
      }
  }
  return seen;
}

}  // namespace

std::vector<Rational> expected_visits_before_exit(const MarkovChain& mc, const std::vector<char>& stay,
                                                  int start) {
  int n = mc.num_states();
  std::vector<Rational> visits(static_cast<size_t>(n));
  if (!stay[static_cast<size_t>(start)]) return visits;
  // States of `stay` from which an exit is reachable inside `stay`.
  std::vector<char> exit_seed(static_cast<size_t>(n), 0);
  for (int s = 0; s < n; ++s) {
    if (!stay[static_cast<size_t>(s)]) continue;
    for (const auto& e : mc.out(s))
      if (!stay[static_cast<size_t>(e.dst)]) exit_seed[static_cast<size_t>(s)] = 1;
  }
  std::vector<char> live = backward_reachable(mc, exit_seed, stay);
  for (int s = 0; s < n; ++s)
    if (!stay[static_cast<size_t>(s)]) live[static_cast<size_t>(s)] = 0;
  if (!live[static_cast<size_t>(start)]) return visits;

  std::vector<int> live_states;
  std::vector<int> local(static_cast<size_t>(n), -1);
  for (int s = 0; s < n; ++s)
    if (live[static_cast<size_t>(s)]) {
      local[static_cast<size_t>(s)] = static_cast<int>(live_states.size());
      live_states.push_back(s);
    }
  size_t m = live_states.size();
  // z(u) = [u == start] + sum_v z(v) P(v, u), i.e. (I - P^T) z = e_start.
  std::vector<std::vector<Rational>> a(m, std::vector<Rational>(m));
  std::vector<Rational> rhs(m);
  for (size_t i = 0; i < m; ++i) a[i][i] = Rational(1);
  rhs[static_cast<size_t>(local[static_cast<size_t>(start)])] = Rational(1);
  for (size_t j = 0; j < m; ++j) {
    int v = live_states[j];
    for (const auto& e : mc.out(v)) {
      int lu = local[static_cast<size_t>(e.dst)];
      if (lu >= 0) a[static_cast<size_t>(lu)][j] -= e.prob;
    }
  }
  auto z = solve_linear(std::move(a), std::move(rhs));
  for (size_t i = 0; i < m; ++i) visits[static_cast<size_t>(live_states[i])] = z[i];
  return visits;
}

}  // namespace detail

std::vector<Rational> until_probabilities(const MarkovChain& mc, const std::vector<int>& stay,
                                          const std::vector<int>& target) {
  int n = mc.num_states();
  std::vector<char> in_stay(static_cast<size_t>(n), 0), in_target(static_cast<size_t>(n), 0);
  for (int s : stay) in_stay[static_cast<size_t>(s)] = 1;
  for (int s : target) in_target[static_cast<size_t>(s)] = 1;

  // Qualitative pass: prob-0 states are those that cannot reach the target
  // through stay states; prob-1 states cannot reach a prob-0 state without
  // first hitting the target.
  std::vector<char> allowed(static_cast<size_t>(n), 0);
  for (int s = 0; s < n; ++s)
    allowed[static_cast<size_t>(s)] =
        in_stay[static_cast<size_t>(s)] && !in_target[static_cast<size_t>(s)];
  std::vector<char> can_reach = detail::backward_reachable(mc, in_target, allowed);
  std::vector<char> prob0(static_cast<size_t>(n), 0);
  for (int s = 0; s < n; ++s) prob0[static_cast<size_t>(s)] = !can_reach[static_cast<size_t>(s)];

  std::vector<char> doomed_reach = detail::backward_reachable(mc, prob0, allowed);
  std::vector<Rational> prob(static_cast<size_t>(n));
  std::vector<int> unknown;
  for (int s = 0; s < n; ++s) {
    if (in_target[static_cast<size_t>(s)]) {
      prob[static_cast<size_t>(s)] = Rational(1);
    } else if (prob0[static_cast<size_t>(s)]) {
      prob[static_cast<size_t>(s)] = Rational(0);
    } else if (!doomed_reach[static_cast<size_t>(s)]) {
      prob[static_cast<size_t>(s)] = Rational(1);
    } else {
      unknown.push_back(s);
    }
  }
  if (unknown.empty()) return prob;

  std::vector<int> local(static_cast<size_t>(n), -1);
  for (size_t i = 0; i < unknown.size(); ++i)
    local[static_cast<size_t>(unknown[i])] = static_cast<int>(i);
  size_t m = unknown.size();
  std::vector<std::vector<Rational>> a(m, std::vector<Rational>(m));
  std::vector<Rational> b(m);
  for (size_t i = 0; i < m; ++i) {
    a[i][i] = Rational(1);
    int s = unknown[i];
    for (const auto& e : mc.out(s)) {
      int lj = local[static_cast<size_t>(e.dst)];
      if (lj >= 0) {
        a[i][static_cast<size_t>(lj)] -= e.prob;
      } else {
        b[i] += e.prob * prob[static_cast<size_t>(e.dst)];
      }
    }
  }
  auto x = detail::solve_linear(std::move(a), std::move(b));
  for (size_t i = 0; i < m; ++i) prob[static_cast<size_t>(unknown[i])] = x[i];
  return prob;
}

std::vector<Rational> reachability_probabilities(const MarkovChain& mc, const std::vector<int>& target) {
  std::vector<int> all(static_cast<size_t>(mc.num_states()));
  for (int s = 0; s < mc.num_states(); ++s) all[static_cast<size_t>(s)] = s;
  return until_probabilities(mc, all, target);
}

BsccPartition bscc_decomposition(const MarkovChain& mc) {
  int n = mc.num_states();
  std::vector<std::vector<int>> adj(static_cast<size_t>(n));
  for (int s = 0; s < n; ++s) adj[static_cast<size_t>(s)] = mc.support(s);
  auto sccs = detail::strongly_connected_components(adj);

  BsccPartition part;
  std::vector<char> in_bscc(static_cast<size_t>(n), 0);
  for (auto& comp : sccs) {
    std::vector<char> member(static_cast<size_t>(n), 0);
    for (int s : comp) member[static_cast<size_t>(s)] = 1;
    bool closed = true;
    for (int s : comp)
      for (const auto& e : mc.out(s))
        if (!member[static_cast<size_t>(e.dst)]) closed = false;
    if (closed) {
      for (int s : comp) in_bscc[static_cast<size_t>(s)] = 1;
      part.bsccs.push_back(std::move(comp));
    }
  }
  for (int s = 0; s < n; ++s)
    if (!in_bscc[static_cast<size_t>(s)]) part.transient_states.push_back(s);
  part.reachability.reserve(part.bsccs.size());
  for (const auto& comp : part.bsccs)
    part.reachability.push_back(reachability_probabilities(mc, comp)[static_cast<size_t>(mc.initial())]);
  Rational total;
  for (const auto& p : part.reachability) total += p;
  if (total != Rational(1)) throw InternalError("BSCC reachability probabilities do not sum to 1");
  return part;
}

MecPartition mec_decomposition(const Mdp& mdp) {
  int n = mdp.num_states();
  MecPartition part;
  // Work queue of candidate state sets; iteratively prune choices whose
  // distributions leave the candidate, then split by SCC.
  std::vector<std::vector<int>> work;
  {
    std::vector<int> all(static_cast<size_t>(n));
    for (int s = 0; s < n; ++s) all[static_cast<size_t>(s)] = s;
    work.push_back(std::move(all));
  }
  while (!work.empty()) {
    std::vector<int> cand = std::move(work.back());
    work.pop_back();
    std::vector<char> member(static_cast<size_t>(n), 0);
    for (int s : cand) member[static_cast<size_t>(s)] = 1;

    // Stabilize: drop choices leading outside, then states with no choices.
    std::vector<std::vector<int>> kept(static_cast<size_t>(n));
    bool changed = true;
    while (changed) {
      changed = false;
      for (int s : cand) {
        if (!member[static_cast<size_t>(s)]) continue;
        auto& k = kept[static_cast<size_t>(s)];
        k.clear();
        const auto& chs = mdp.choices(s);
        for (size_t ci = 0; ci < chs.size(); ++ci) {
          bool inside = true;
          for (const auto& e : chs[ci].edges)
            if (!member[static_cast<size_t>(e.dst)]) inside = false;
          if (inside) k.push_back(static_cast<int>(ci));
        }
        if (k.empty()) {
          member[static_cast<size_t>(s)] = 0;
          changed = true;
        }
      }
    }
    std::vector<int> remaining;
    for (int s : cand)
      if (member[static_cast<size_t>(s)]) remaining.push_back(s);
    if (remaining.empty()) continue;

    std::vector<int> local(static_cast<size_t>(n), -1);
    for (size_t i = 0; i < remaining.size(); ++i)
      local[static_cast<size_t>(remaining[i])] = static_cast<int>(i);
    std::vector<std::vector<int>> adj(remaining.size());
    for (size_t i = 0; i < remaining.size(); ++i) {
      int s = remaining[i];
      for (int ci : kept[static_cast<size_t>(s)])
        for (const auto& e : mdp.choices(s)[static_cast<size_t>(ci)].edges)
          adj[i].push_back(local[static_cast<size_t>(e.dst)]);
    }
    auto sccs = detail::strongly_connected_components(adj);
    if (sccs.size() == 1 && sccs.front().size() == remaining.size()) {
      // A single-state component without a kept self-choice is no end
      // component at all.
      if (remaining.size() == 1 && kept[static_cast<size_t>(remaining.front())].empty()) continue;
      Mec mec;
      mec.states = remaining;
      for (int s : remaining) mec.choice_indices.push_back(kept[static_cast<size_t>(s)]);
      part.mecs.push_back(std::move(mec));
    } else {
      for (auto& comp : sccs) {
        std::vector<int> sub;
        sub.reserve(comp.size());
        for (int lv : comp) sub.push_back(remaining[static_cast<size_t>(lv)]);
        // Singleton SCCs survive only if they keep a self-looping choice.
        if (sub.size() == 1) {
          int s = sub.front();
          bool self = false;
          for (int ci : kept[static_cast<size_t>(s)]) {
            bool loops = true;
            for (const auto& e : mdp.choices(s)[static_cast<size_t>(ci)].edges)
              if (e.dst != s) loops = false;
            if (loops && !mdp.choices(s)[static_cast<size_t>(ci)].edges.empty()) self = true;
          }
          if (!self) continue;
        }
        work.push_back(std::move(sub));
      }
    }
  }
  // Deterministic order: sort by smallest state id.
  std::sort(part.mecs.begin(), part.mecs.end(),
            [](const Mec& a, const Mec& b) { return a.states.front() < b.states.front(); });
  return part;
}

Rational min_mean_cycle(const WeightedDigraph& graph) {
  int n = graph.num_vertices();
  if (n == 0 || graph.num_edges() == 0)
    throw ValidationError("min_mean_cycle needs a nonempty strongly connected graph");
  // Karp: D[k][v] = minimum weight of a k-edge walk from the source to v.
  std::vector<std::vector<std::optional<Rational>>> d(
      static_cast<size_t>(n) + 1, std::vector<std::optional<Rational>>(static_cast<size_t>(n)));
  d[0][0] = Rational(0);
  for (int k = 1; k <= n; ++k) {
    for (int v = 0; v < n; ++v) {
      if (!d[static_cast<size_t>(k - 1)][static_cast<size_t>(v)]) continue;
      const Rational& base = *d[static_cast<size_t>(k - 1)][static_cast<size_t>(v)];
      for (const auto& [dst, w] : graph.adj[static_cast<size_t>(v)]) {
        Rational cand = base + w;
        auto& slot = d[static_cast<size_t>(k)][static_cast<size_t>(dst)];
        if (!slot || cand < *slot) slot = cand;
      }
    }
  }
  std::optional<Rational> best;
  for (int v = 0; v < n; ++v) {
    if (!d[static_cast<size_t>(n)][static_cast<size_t>(v)]) continue;
    std::optional<Rational> worst;
    for (int k = 0; k < n; ++k) {
      if (!d[static_cast<size_t>(k)][static_cast<size_t>(v)]) continue;
      Rational ratio = (*d[static_cast<size_t>(n)][static_cast<size_t>(v)] -
                        *d[static_cast<size_t>(k)][static_cast<size_t>(v)]) /
                       Rational(n - k);
      if (!worst || ratio > *worst) worst = ratio;
    }
    if (worst && (!best || *worst < *best)) best = *worst;
  }
  if (!best) throw InternalError("Karp recurrence found no cycle in a strongly connected graph");
  return *best;
}

}  // namespace wmp
