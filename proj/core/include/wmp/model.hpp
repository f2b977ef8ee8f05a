#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wmp/errors.hpp"
#include "wmp/rational.hpp"

namespace wmp {

enum class ObjectiveKind { Fixed, DirectFixed, Bounded, DirectBounded };
enum class Flavor { Payoff, Cost };

inline bool has_window(ObjectiveKind k) {
  return k == ObjectiveKind::Fixed || k == ObjectiveKind::DirectFixed;
}

// Which window function to compute. Fixed/DirectFixed carry the window
// length l_max >= 1; Bounded/DirectBounded carry none.
struct Objective {
  ObjectiveKind kind = ObjectiveKind::Fixed;
  std::optional<int> window;
  Flavor flavor = Flavor::Payoff;

  static Objective fixed(int l_max, Flavor f = Flavor::Payoff) { return make(ObjectiveKind::Fixed, l_max, f); }
  static Objective direct_fixed(int l_max, Flavor f = Flavor::Payoff) { return make(ObjectiveKind::DirectFixed, l_max, f); }
  static Objective bounded(Flavor f = Flavor::Payoff) { return Objective{ObjectiveKind::Bounded, std::nullopt, f}; }
  static Objective direct_bounded(Flavor f = Flavor::Payoff) { return Objective{ObjectiveKind::DirectBounded, std::nullopt, f}; }

  void validate() const {
    if (has_window(kind)) {
      if (!window || *window < 1) throw ValidationError("fixed window objectives require l_max >= 1");
    } else if (window) {
      throw ValidationError("bounded window objectives carry no window length");
    }
  }

 private:
  static Objective make(ObjectiveKind k, int l_max, Flavor f) {
    Objective o{k, l_max, f};
    o.validate();
    return o;
  }
};

// Affine map from user weights to the non-negative integer weights used
// internally: w_int = scale * w + shift. Window mean-payoff values transform
// the same way, so results map back through invert_value.
struct WeightTransform {
  Integer scale{1};
  Integer shift{0};

  bool is_identity() const { return scale == 1 && shift == 0; }
  Rational apply(const Rational& w) const { return Rational(scale) * w + Rational(shift); }
  Rational invert_value(const Rational& v) const { return (v - Rational(shift)) / Rational(scale); }
};

// Plain weighted digraph, the common shape handed to cycle and window
// machinery (BSCC subgraphs, product graphs).
struct WeightedDigraph {
  explicit WeightedDigraph(int n = 0) : adj(static_cast<size_t>(n)) {}

  int num_vertices() const { return static_cast<int>(adj.size()); }
  int add_vertex() {
    adj.emplace_back();
    return num_vertices() - 1;
  }
  void add_edge(int src, int dst, Rational weight) {
    adj.at(static_cast<size_t>(src)).emplace_back(dst, std::move(weight));
  }
  size_t num_edges() const {
    size_t m = 0;
    for (const auto& out : adj) m += out.size();
    return m;
  }
  bool every_vertex_has_successor() const {
    for (const auto& out : adj)
      if (out.empty()) return false;
    return true;
  }
  bool weights_integral() const {
    for (const auto& out : adj)
      for (const auto& [dst, w] : out)
        if (!w.is_integer()) return false;
    return true;
  }
  Rational max_weight() const;
  Rational min_weight() const;
  Rational max_abs_weight() const;
  bool is_strongly_connected() const;
  WeightedDigraph shifted(const Rational& delta) const {  // w - delta on every edge
    WeightedDigraph g(num_vertices());
    for (int v = 0; v < num_vertices(); ++v)
      for (const auto& [dst, w] : adj[static_cast<size_t>(v)]) g.add_edge(v, dst, w - delta);
    return g;
  }

  std::vector<std::vector<std::pair<int, Rational>>> adj;
};

// Weighted Markov chain. Immutable after construction; validated eagerly:
// out-probabilities sum to exactly 1 per state, every probability is
// positive, every state has a successor, at most one edge per (src, dst).
class MarkovChain {
 public:
  struct Edge {
    int dst;
    Rational prob;
    Rational weight;
    bool operator==(const Edge& o) const { return dst == o.dst && prob == o.prob && weight == o.weight; }
  };

  class Builder {
   public:
    int add_state(const std::string& name);
    int state(const std::string& name) const;
    void set_initial(const std::string& name);
    void set_initial(int s) { initial_ = s; }
    void add_edge(int src, int dst, Rational prob, Rational weight);
    void add_edge(const std::string& src, const std::string& dst, Rational prob, Rational weight);
    MarkovChain build() &&;

   private:
    std::vector<std::string> names_;
    std::map<std::string, int> index_;
    std::optional<int> initial_;
    std::vector<std::vector<Edge>> out_;
  };

  int num_states() const { return static_cast<int>(out_.size()); }
  int initial() const { return initial_; }
  const std::string& state_name(int s) const { return names_.at(static_cast<size_t>(s)); }
  std::optional<int> state_index(const std::string& name) const;
  const std::vector<Edge>& out(int s) const { return out_.at(static_cast<size_t>(s)); }
  std::vector<int> support(int s) const;

  Rational max_weight() const;
  Rational min_weight() const;
  bool weights_integral() const;

  // Same structure with every weight mapped through `f`.
  MarkovChain with_weights(const std::function<Rational(const Rational&)>& f) const;

  struct Subgraph {
    WeightedDigraph graph;
    std::vector<int> global_of_local;
  };
  // The weighted digraph induced on `states` (edges with both ends inside).
  Subgraph subgraph(const std::vector<int>& states) const;

  bool operator==(const MarkovChain& o) const {
    return names_ == o.names_ && initial_ == o.initial_ && out_ == o.out_;
  }

  // An empty placeholder; every usable instance comes from a Builder.
  MarkovChain() = default;

 private:
  friend class Builder;
  std::vector<std::string> names_;
  std::map<std::string, int> index_;
  int initial_ = 0;
  std::vector<std::vector<Edge>> out_;
};

// Weighted Markov decision process. Act(s) is nonempty for every state and
// every (state, action) distribution sums to exactly 1.
class Mdp {
 public:
  struct Edge {
    int dst;
    Rational prob;
    Rational weight;
    bool operator==(const Edge& o) const { return dst == o.dst && prob == o.prob && weight == o.weight; }
  };
  struct Choice {
    int action;  // index into action_names()
    std::vector<Edge> edges;
    bool operator==(const Choice& o) const { return action == o.action && edges == o.edges; }
  };

  class Builder {
   public:
    int add_state(const std::string& name);
    int state(const std::string& name) const;
    int action(const std::string& name);
    void set_initial(const std::string& name);
    void set_initial(int s) { initial_ = s; }
    void add_transition(int src, const std::string& action, int dst, Rational prob, Rational weight);
    Mdp build() &&;

   private:
    std::vector<std::string> names_;
    std::map<std::string, int> index_;
    std::vector<std::string> action_names_;
    std::map<std::string, int> action_index_;
    std::optional<int> initial_;
    std::vector<std::vector<Choice>> choices_;
  };

  int num_states() const { return static_cast<int>(choices_.size()); }
  int initial() const { return initial_; }
  const std::string& state_name(int s) const { return names_.at(static_cast<size_t>(s)); }
  std::optional<int> state_index(const std::string& name) const;
  const std::vector<std::string>& action_names() const { return action_names_; }
  const std::string& action_name(int a) const { return action_names_.at(static_cast<size_t>(a)); }
  const std::vector<Choice>& choices(int s) const { return choices_.at(static_cast<size_t>(s)); }

  Rational max_weight() const;
  Rational min_weight() const;
  bool weights_integral() const;
  bool single_action() const;
  // The Markov chain induced by the unique choice per state; requires
  // single_action().
  MarkovChain induced_chain() const;

  Mdp with_weights(const std::function<Rational(const Rational&)>& f) const;

  struct Restriction;
  // Sub-MDP on `states` keeping, per state, only the listed choice indices.
  // All kept distributions must stay inside `states`.
  Restriction restricted(const std::vector<int>& states,
                         const std::vector<std::vector<int>>& choice_indices) const;

  // Structural equality up to action interning order: choices compare by
  // action name, not id.
  bool operator==(const Mdp& o) const;

  // An empty placeholder; every usable instance comes from a Builder.
  Mdp() = default;

 private:
  friend class Builder;
  std::vector<std::string> names_;
  std::map<std::string, int> index_;
  std::vector<std::string> action_names_;
  std::map<std::string, int> action_index_;
  int initial_ = 0;
  std::vector<std::vector<Choice>> choices_;
};

struct Mdp::Restriction {
  Mdp mdp;
  std::vector<int> global_of_local;
};

enum class Player { One, Two };

// Weighted two-player game. Every vertex has at least one outgoing edge.
class TwoPlayerGame {
 public:
  struct Edge {
    int dst;
    Rational weight;
    bool operator==(const Edge& o) const { return dst == o.dst && weight == o.weight; }
  };

  class Builder {
   public:
    int add_vertex(const std::string& name, Player owner);
    int vertex(const std::string& name) const;
    void set_initial(const std::string& name);
    void set_initial(int v) { initial_ = v; }
    void add_edge(int src, int dst, Rational weight);
    void add_edge(const std::string& src, const std::string& dst, Rational weight);
    TwoPlayerGame build() &&;

   private:
    std::vector<std::string> names_;
    std::map<std::string, int> index_;
    std::vector<Player> owner_;
    std::optional<int> initial_;
    std::vector<std::vector<Edge>> out_;
  };

  int num_vertices() const { return static_cast<int>(out_.size()); }
  int initial() const { return initial_; }
  Player owner(int v) const { return owner_.at(static_cast<size_t>(v)); }
  const std::string& vertex_name(int v) const { return names_.at(static_cast<size_t>(v)); }
  std::optional<int> vertex_index(const std::string& name) const;
  const std::vector<Edge>& out(int v) const { return out_.at(static_cast<size_t>(v)); }

  Rational max_weight() const;
  Rational min_weight() const;
  Rational max_abs_weight() const;
  bool weights_integral() const;
  TwoPlayerGame with_weights(const std::function<Rational(const Rational&)>& f) const;
  TwoPlayerGame shifted(const Rational& delta) const {  // w - delta
    return with_weights([&](const Rational& w) { return w - delta; });
  }
  WeightedDigraph underlying_graph() const;

  bool operator==(const TwoPlayerGame& o) const {
    return names_ == o.names_ && owner_ == o.owner_ && initial_ == o.initial_ && out_ == o.out_;
  }

  // An empty placeholder; every usable instance comes from a Builder.
  TwoPlayerGame() = default;

 private:
  friend class Builder;
  std::vector<std::string> names_;
  std::map<std::string, int> index_;
  std::vector<Player> owner_;
  int initial_ = 0;
  std::vector<std::vector<Edge>> out_;
};

// A finite path: an origin state plus a chain of weighted edges.
class FinitePath {
 public:
  struct Step {
    int src;
    int dst;
    Rational weight;
  };

  FinitePath(int origin, std::vector<Step> steps);
  // Synthetic path along states 0, 1, 2, ... carrying the given weights.
  static FinitePath from_weights(const std::vector<Rational>& weights);

  int origin() const { return origin_; }
  int length() const { return static_cast<int>(steps_.size()); }
  const Rational& weight(int i) const { return steps_.at(static_cast<size_t>(i)).weight; }
  const std::vector<Step>& steps() const { return steps_; }

 private:
  int origin_;
  std::vector<Step> steps_;
};

// Maximum over k in [1..l] of the sum of the first k edge weights.
Rational window_total_payoff(const FinitePath& path, int l);
// Maximum over k in [1..l] of the mean of the first k edge weights.
Rational window_mean_payoff(const FinitePath& path, int l);
// Minimum over start positions with a full window of the window mean-payoff;
// the finite-horizon evaluator used by simulation and oracles.
Rational finite_direct_window_value(const FinitePath& path, int l_max);

template <typename Model>
struct Normalized {
  Model model;
  WeightTransform transform;
};

// Rescale and shift all weights to non-negative integers; the returned
// transform maps user weights to internal ones and window values back.
Normalized<MarkovChain> normalize(const MarkovChain& mc);
Normalized<Mdp> normalize(const Mdp& mdp);
Normalized<TwoPlayerGame> normalize(const TwoPlayerGame& game);

}  // namespace wmp
