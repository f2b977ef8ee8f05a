#include "wmp/model.hpp"

#include <algorithm>
#include <set>

namespace wmp {

namespace {

template <typename Out>
Rational fold_weights(const Out& out_lists, bool want_max) {
  std::optional<Rational> best;
  for (const auto& out : out_lists)
    for (const auto& e : out) {
      if (!best || (want_max ? e.weight > *best : e.weight < *best)) best = e.weight;
    }
  if (!best) throw ValidationError("model has no edges");
  return *best;
}

void check_distribution_sum(const Rational& sum, const std::string& what) {
  if (sum != Rational(1))
    throw ValidationError("probability sum for " + what + " is " + sum.str() + ", expected 1");
}

}  // namespace

namespace {
Rational digraph_fold(const WeightedDigraph& g, bool want_max, bool absolute) {
  std::optional<Rational> best;
  for (const auto& out : g.adj)
    for (const auto& [dst, w] : out) {
      Rational v = absolute ? w.abs() : w;
      if (!best || (want_max ? v > *best : v < *best)) best = v;
    }
  if (!best) throw ValidationError("graph has no edges");
  return *best;
}
}  // namespace

Rational WeightedDigraph::max_weight() const { return digraph_fold(*this, true, false); }
Rational WeightedDigraph::min_weight() const { return digraph_fold(*this, false, false); }
Rational WeightedDigraph::max_abs_weight() const { return digraph_fold(*this, true, true); }

bool WeightedDigraph::is_strongly_connected() const {
  int n = num_vertices();
  if (n == 0) return false;
  auto reach = [&](const std::vector<std::vector<int>>& succ) {
    std::vector<char> seen(static_cast<size_t>(n), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int u : succ[static_cast<size_t>(v)])
        if (!seen[static_cast<size_t>(u)]) {
          seen[static_cast<size_t>(u)] = 1;
          stack.push_back(u);
        }
    }
    return seen;
  };
  std::vector<std::vector<int>> fwd(static_cast<size_t>(n)), bwd(static_cast<size_t>(n));
  for (int v = 0; v < n; ++v)
    for (const auto& [dst, w] : adj[static_cast<size_t>(v)]) {
      fwd[static_cast<size_t>(v)].push_back(dst);
      bwd[static_cast<size_t>(dst)].push_back(v);
    }
  auto f = reach(fwd);
  auto b = reach(bwd);
  for (int v = 0; v < n; ++v)
    if (!f[static_cast<size_t>(v)] || !b[static_cast<size_t>(v)]) return false;
  return true;
}

// --- MarkovChain ---

int MarkovChain::Builder::add_state(const std::string& name) {
  if (index_.count(name)) throw ValidationError("duplicate state '" + name + "'");
  int id = static_cast<int>(names_.size());
  names_.push_back(name);
  index_[name] = id;
  out_.emplace_back();
  return id;
}

int MarkovChain::Builder::state(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw ValidationError("unknown state '" + name + "'");
  return it->second;
}

void MarkovChain::Builder::set_initial(const std::string& name) { initial_ = state(name); }

void MarkovChain::Builder::add_edge(int src, int dst, Rational prob, Rational weight) {
  if (src < 0 || src >= static_cast<int>(out_.size()) || dst < 0 || dst >= static_cast<int>(out_.size()))
    throw ValidationError("edge endpoint out of range");
  for (const auto& e : out_[static_cast<size_t>(src)])
    if (e.dst == dst)
      throw ValidationError("duplicate edge " + names_[static_cast<size_t>(src)] + " -> " +
                            names_[static_cast<size_t>(dst)]);
  if (prob.sign() <= 0 || prob > Rational(1))
    throw ValidationError("edge probability must lie in (0, 1], got " + prob.str());
  out_[static_cast<size_t>(src)].push_back(Edge{dst, std::move(prob), std::move(weight)});
}

void MarkovChain::Builder::add_edge(const std::string& src, const std::string& dst, Rational prob,
                                    Rational weight) {
  add_edge(state(src), state(dst), std::move(prob), std::move(weight));
}

MarkovChain MarkovChain::Builder::build() && {
  if (names_.empty()) throw ValidationError("Markov chain needs at least one state");
  if (!initial_) throw ValidationError("no initial state declared");
  for (size_t s = 0; s < out_.size(); ++s) {
    if (out_[s].empty())
      throw ValidationError("state '" + names_[s] + "' has no outgoing edge");
    Rational sum;
    for (const auto& e : out_[s]) sum += e.prob;
    check_distribution_sum(sum, "state '" + names_[s] + "'");
  }
  MarkovChain mc;
  mc.names_ = std::move(names_);
  mc.index_ = std::move(index_);
  mc.initial_ = *initial_;
  mc.out_ = std::move(out_);
  return mc;
}

std::optional<int> MarkovChain::state_index(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<int> MarkovChain::support(int s) const {
  std::vector<int> r;
  for (const auto& e : out(s)) r.push_back(e.dst);
  return r;
}

Rational MarkovChain::max_weight() const { return fold_weights(out_, true); }
Rational MarkovChain::min_weight() const { return fold_weights(out_, false); }

bool MarkovChain::weights_integral() const {
  for (const auto& out : out_)
    for (const auto& e : out)
      if (!e.weight.is_integer()) return false;
  return true;
}

MarkovChain MarkovChain::with_weights(const std::function<Rational(const Rational&)>& f) const {
  MarkovChain mc(*this);
  for (auto& out : mc.out_)
    for (auto& e : out) e.weight = f(e.weight);
  return mc;
}

MarkovChain::Subgraph MarkovChain::subgraph(const std::vector<int>& states) const {
  std::vector<int> local(static_cast<size_t>(num_states()), -1);
  for (size_t i = 0; i < states.size(); ++i) local[static_cast<size_t>(states[i])] = static_cast<int>(i);
  WeightedDigraph g(static_cast<int>(states.size()));
  for (int s : states)
    for (const auto& e : out(s))
      if (local[static_cast<size_t>(e.dst)] >= 0)
        g.add_edge(local[static_cast<size_t>(s)], local[static_cast<size_t>(e.dst)], e.weight);
  return Subgraph{std::move(g), states};
}

// --- Mdp ---

int Mdp::Builder::add_state(const std::string& name) {
  if (index_.count(name)) throw ValidationError("duplicate state '" + name + "'");
  int id = static_cast<int>(names_.size());
  names_.push_back(name);
  index_[name] = id;
  choices_.emplace_back();
  return id;
}

int Mdp::Builder::state(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw ValidationError("unknown state '" + name + "'");
  return it->second;
}

int Mdp::Builder::action(const std::string& name) {
  auto it = action_index_.find(name);
  if (it != action_index_.end()) return it->second;
  int id = static_cast<int>(action_names_.size());
  action_names_.push_back(name);
  action_index_[name] = id;
  return id;
}

void Mdp::Builder::set_initial(const std::string& name) { initial_ = state(name); }

void Mdp::Builder::add_transition(int src, const std::string& action_name, int dst, Rational prob,
                                  Rational weight) {
  if (src < 0 || src >= static_cast<int>(choices_.size()) || dst < 0 ||
      dst >= static_cast<int>(choices_.size()))
    throw ValidationError("transition endpoint out of range");
  if (prob.sign() <= 0 || prob > Rational(1))
    throw ValidationError("transition probability must lie in (0, 1], got " + prob.str());
  int a = action(action_name);
  auto& chs = choices_[static_cast<size_t>(src)];
  auto it = std::find_if(chs.begin(), chs.end(), [&](const Choice& c) { return c.action == a; });
  if (it == chs.end()) {
    chs.push_back(Choice{a, {}});
    it = std::prev(chs.end());
  }
  for (const auto& e : it->edges)
    if (e.dst == dst)
      throw ValidationError("duplicate transition " + names_[static_cast<size_t>(src)] + " [" +
                            action_name + "] -> " + names_[static_cast<size_t>(dst)]);
  it->edges.push_back(Edge{dst, std::move(prob), std::move(weight)});
}

Mdp Mdp::Builder::build() && {
  if (names_.empty()) throw ValidationError("MDP needs at least one state");
  if (!initial_) throw ValidationError("no initial state declared");
  for (size_t s = 0; s < choices_.size(); ++s) {
    if (choices_[s].empty())
      throw ValidationError("state '" + names_[s] + "' has no enabled action");
    for (const auto& c : choices_[s]) {
      Rational sum;
      for (const auto& e : c.edges) sum += e.prob;
      check_distribution_sum(sum, "state '" + names_[s] + "' action '" +
                                      action_names_[static_cast<size_t>(c.action)] + "'");
    }
  }
  Mdp m;
  m.names_ = std::move(names_);
  m.index_ = std::move(index_);
  m.action_names_ = std::move(action_names_);
  m.action_index_ = std::move(action_index_);
  m.initial_ = *initial_;
  m.choices_ = std::move(choices_);
  return m;
}

std::optional<int> Mdp::state_index(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Rational Mdp::max_weight() const {
  std::optional<Rational> best;
  for (const auto& chs : choices_)
    for (const auto& c : chs)
      for (const auto& e : c.edges)
        if (!best || e.weight > *best) best = e.weight;
  if (!best) throw ValidationError("MDP has no transitions");
  return *best;
}

Rational Mdp::min_weight() const {
  std::optional<Rational> best;
  for (const auto& chs : choices_)
    for (const auto& c : chs)
      for (const auto& e : c.edges)
        if (!best || e.weight < *best) best = e.weight;
  if (!best) throw ValidationError("MDP has no transitions");
  return *best;
}

bool Mdp::weights_integral() const {
  for (const auto& chs : choices_)
    for (const auto& c : chs)
      for (const auto& e : c.edges)
        if (!e.weight.is_integer()) return false;
  return true;
}

bool Mdp::single_action() const {
  for (const auto& chs : choices_)
    if (chs.size() != 1) return false;
  return true;
}

MarkovChain Mdp::induced_chain() const {
  if (!single_action()) throw ValidationError("induced_chain requires a single-action MDP");
  MarkovChain::Builder b;
  for (int s = 0; s < num_states(); ++s) b.add_state(state_name(s));
  b.set_initial(initial_);
  for (int s = 0; s < num_states(); ++s)
    for (const auto& e : choices(s).front().edges) b.add_edge(s, e.dst, e.prob, e.weight);
  return std::move(b).build();
}

bool Mdp::operator==(const Mdp& o) const {
  if (names_ != o.names_ || initial_ != o.initial_) return false;
  if (choices_.size() != o.choices_.size()) return false;
  for (size_t s = 0; s < choices_.size(); ++s) {
    if (choices_[s].size() != o.choices_[s].size()) return false;
    for (size_t c = 0; c < choices_[s].size(); ++c) {
      if (action_name(choices_[s][c].action) != o.action_name(o.choices_[s][c].action)) return false;
      if (choices_[s][c].edges != o.choices_[s][c].edges) return false;
    }
  }
  return true;
}

Mdp Mdp::with_weights(const std::function<Rational(const Rational&)>& f) const {
  Mdp m(*this);
  for (auto& chs : m.choices_)
    for (auto& c : chs)
      for (auto& e : c.edges) e.weight = f(e.weight);
  return m;
}

Mdp::Restriction Mdp::restricted(const std::vector<int>& states,
                                 const std::vector<std::vector<int>>& choice_indices) const {
  if (states.size() != choice_indices.size())
    throw ValidationError("restricted: states and choice lists differ in length");
  std::vector<int> local(static_cast<size_t>(num_states()), -1);
  for (size_t i = 0; i < states.size(); ++i) local[static_cast<size_t>(states[i])] = static_cast<int>(i);
  Mdp::Builder b;
  for (int s : states) b.add_state(state_name(s));
  b.set_initial(0);
  for (size_t i = 0; i < states.size(); ++i) {
    int s = states[i];
    for (int ci : choice_indices[i]) {
      const Choice& c = choices(s).at(static_cast<size_t>(ci));
      for (const auto& e : c.edges) {
        int ld = local[static_cast<size_t>(e.dst)];
        if (ld < 0)
          throw ValidationError("restricted: kept action leaves the state set");
        b.add_transition(static_cast<int>(i), action_name(c.action), ld, e.prob, e.weight);
      }
    }
  }
  return Restriction{std::move(b).build(), states};
}

// --- TwoPlayerGame ---

int TwoPlayerGame::Builder::add_vertex(const std::string& name, Player owner) {
  if (index_.count(name)) throw ValidationError("duplicate vertex '" + name + "'");
  int id = static_cast<int>(names_.size());
  names_.push_back(name);
  index_[name] = id;
  owner_.push_back(owner);
  out_.emplace_back();
  return id;
}

int TwoPlayerGame::Builder::vertex(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw ValidationError("unknown vertex '" + name + "'");
  return it->second;
}

void TwoPlayerGame::Builder::set_initial(const std::string& name) { initial_ = vertex(name); }

void TwoPlayerGame::Builder::add_edge(int src, int dst, Rational weight) {
  if (src < 0 || src >= static_cast<int>(out_.size()) || dst < 0 || dst >= static_cast<int>(out_.size()))
    throw ValidationError("edge endpoint out of range");
  for (const auto& e : out_[static_cast<size_t>(src)])
    if (e.dst == dst)
      throw ValidationError("duplicate edge " + names_[static_cast<size_t>(src)] + " -> " +
                            names_[static_cast<size_t>(dst)]);
  out_[static_cast<size_t>(src)].push_back(Edge{dst, std::move(weight)});
}

void TwoPlayerGame::Builder::add_edge(const std::string& src, const std::string& dst, Rational weight) {
  add_edge(vertex(src), vertex(dst), std::move(weight));
}

TwoPlayerGame TwoPlayerGame::Builder::build() && {
  if (names_.empty()) throw ValidationError("game needs at least one vertex");
  if (!initial_) throw ValidationError("no initial vertex declared");
  for (size_t v = 0; v < out_.size(); ++v)
    if (out_[v].empty()) throw ValidationError("vertex '" + names_[v] + "' has no outgoing edge");
  TwoPlayerGame g;
  g.names_ = std::move(names_);
  g.index_ = std::move(index_);
  g.owner_ = std::move(owner_);
  g.initial_ = *initial_;
  g.out_ = std::move(out_);
  return g;
}

std::optional<int> TwoPlayerGame::vertex_index(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Rational TwoPlayerGame::max_weight() const { return fold_weights(out_, true); }
Rational TwoPlayerGame::min_weight() const { return fold_weights(out_, false); }

Rational TwoPlayerGame::max_abs_weight() const {
  std::optional<Rational> best;
  for (const auto& out : out_)
    for (const auto& e : out) {
      Rational v = e.weight.abs();
      if (!best || v > *best) best = v;
    }
  if (!best) throw ValidationError("game has no edges");
  return *best;
}

bool TwoPlayerGame::weights_integral() const {
  for (const auto& out : out_)
    for (const auto& e : out)
      if (!e.weight.is_integer()) return false;
  return true;
}

TwoPlayerGame TwoPlayerGame::with_weights(const std::function<Rational(const Rational&)>& f) const {
  TwoPlayerGame g(*this);
  for (auto& out : g.out_)
    for (auto& e : out) e.weight = f(e.weight);
  return g;
}

WeightedDigraph TwoPlayerGame::underlying_graph() const {
  WeightedDigraph g(num_vertices());
  for (int v = 0; v < num_vertices(); ++v)
    for (const auto& e : out(v)) g.add_edge(v, e.dst, e.weight);
  return g;
}

// --- FinitePath and window evaluators ---

FinitePath::FinitePath(int origin, std::vector<Step> steps) : origin_(origin), steps_(std::move(steps)) {
  int at = origin_;
  for (const auto& st : steps_) {
    if (st.src != at) throw ValidationError("path edges do not chain");
    at = st.dst;
  }
}

FinitePath FinitePath::from_weights(const std::vector<Rational>& weights) {
  std::vector<Step> steps;
  steps.reserve(weights.size());
  for (size_t i = 0; i < weights.size(); ++i)
    steps.push_back(Step{static_cast<int>(i), static_cast<int>(i) + 1, weights[i]});
  return FinitePath(0, std::move(steps));
}

Rational window_total_payoff(const FinitePath& path, int l) {
  if (l < 1) throw ValidationError("window length must be >= 1");
  if (path.length() < l)
    throw ValidationError("path of length " + std::to_string(path.length()) +
                          " is shorter than the window " + std::to_string(l));
  Rational sum = path.weight(0);
  Rational best = sum;
  for (int k = 1; k < l; ++k) {
    sum += path.weight(k);
    if (sum > best) best = sum;
  }
  return best;
}

Rational window_mean_payoff(const FinitePath& path, int l) {
  if (l < 1) throw ValidationError("window length must be >= 1");
  if (path.length() < l)
    throw ValidationError("path of length " + std::to_string(path.length()) +
                          " is shorter than the window " + std::to_string(l));
  Rational sum = path.weight(0);
  Rational best = sum;
  for (int k = 1; k < l; ++k) {
    sum += path.weight(k);
    Rational mean = sum / Rational(k + 1);
    if (mean > best) best = mean;
  }
  return best;
}

Rational finite_direct_window_value(const FinitePath& path, int l_max) {
  if (l_max < 1) throw ValidationError("window length must be >= 1");
  if (path.length() < l_max)
    throw ValidationError("path of length " + std::to_string(path.length()) +
                          " is shorter than the window " + std::to_string(l_max));
  std::optional<Rational> best;
  for (int i = 0; i + l_max <= path.length(); ++i) {
    Rational sum = path.weight(i);
    Rational wmp = sum;
    for (int k = 1; k < l_max; ++k) {
      sum += path.weight(i + k);
      Rational mean = sum / Rational(k + 1);
      if (mean > wmp) wmp = mean;
    }
    if (!best || wmp < *best) best = wmp;
  }
  return *best;
}

// --- normalization ---

namespace {

// scale = lcm of weight denominators, shift = -min scaled weight when that
// minimum is negative.
WeightTransform transform_for(const std::vector<Rational>& weights) {
  Integer scale(1);
  for (const auto& w : weights) scale = lcm(scale, w.denominator());
  std::optional<Integer> min_scaled;
  for (const auto& w : weights) {
    Integer v = w.numerator() * (scale / w.denominator());
    if (!min_scaled || v < *min_scaled) min_scaled = v;
  }
  Integer shift(0);
  if (min_scaled && *min_scaled < 0) shift = -*min_scaled;
  return WeightTransform{scale, shift};
}

}  // namespace

Normalized<MarkovChain> normalize(const MarkovChain& mc) {
  std::vector<Rational> ws;
  for (int s = 0; s < mc.num_states(); ++s)
    for (const auto& e : mc.out(s)) ws.push_back(e.weight);
  WeightTransform t = transform_for(ws);
  if (t.is_identity()) return {mc, t};
  return {mc.with_weights([&](const Rational& w) { return t.apply(w); }), t};
}

Normalized<Mdp> normalize(const Mdp& mdp) {
  std::vector<Rational> ws;
  for (int s = 0; s < mdp.num_states(); ++s)
    for (const auto& c : mdp.choices(s))
      for (const auto& e : c.edges) ws.push_back(e.weight);
  WeightTransform t = transform_for(ws);
  if (t.is_identity()) return {mdp, t};
  return {mdp.with_weights([&](const Rational& w) { return t.apply(w); }), t};
}

Normalized<TwoPlayerGame> normalize(const TwoPlayerGame& game) {
  std::vector<Rational> ws;
  for (int v = 0; v < game.num_vertices(); ++v)
    for (const auto& e : game.out(v)) ws.push_back(e.weight);
  WeightTransform t = transform_for(ws);
  if (t.is_identity()) return {game, t};
  return {game.with_weights([&](const Rational& w) { return t.apply(w); }), t};
}

}  // namespace wmp
