#include "wmp/game.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "wmp/errors.hpp"

namespace wmp {

GameFromMdp game_from_mdp(const Mdp& mdp) {
  TwoPlayerGame::Builder builder;
  GameFromMdp result;
  result.state_vertex.resize(static_cast<size_t>(mdp.num_states()));
  for (int s = 0; s < mdp.num_states(); ++s) {
    int v = builder.add_vertex(mdp.state_name(s), Player::One);
    result.state_vertex[static_cast<size_t>(s)] = v;
    result.origin.emplace_back(s, -1);
  }
  builder.set_initial(result.state_vertex[static_cast<size_t>(mdp.initial())]);
  for (int s = 0; s < mdp.num_states(); ++s) {
    const auto& chs = mdp.choices(s);
    for (size_t ci = 0; ci < chs.size(); ++ci) {
      int v = builder.add_vertex(mdp.state_name(s) + "|" + mdp.action_name(chs[ci].action),
                                 Player::Two);
      result.origin.emplace_back(s, static_cast<int>(ci));
      builder.add_edge(result.state_vertex[static_cast<size_t>(s)], v, Rational(0));
      for (const auto& e : chs[ci].edges)
        builder.add_edge(v, result.state_vertex[static_cast<size_t>(e.dst)], e.weight);
    }
  }
  result.game = std::move(builder).build();
  return result;
}

namespace {

// good_win restricted to the vertices with mask set; the caller guarantees
// the masked subgame leaves every masked vertex a masked successor.
GoodWinResult good_win_masked(const TwoPlayerGame& game, int l_max, const std::vector<char>& mask) {
  int n = game.num_vertices();

  Integer den(1);
  for (int v = 0; v < n; ++v) {
    if (!mask[static_cast<size_t>(v)]) continue;
    for (const auto& e : game.out(v))
      if (mask[static_cast<size_t>(e.dst)]) den = lcm(den, e.weight.denominator());
  }
  Integer max_abs(0);
  for (int v = 0; v < n; ++v) {
    if (!mask[static_cast<size_t>(v)]) continue;
    for (const auto& e : game.out(v))
      if (mask[static_cast<size_t>(e.dst)]) {
        Integer scaled = abs(e.weight.numerator() * (den / e.weight.denominator()));
        if (scaled > max_abs) max_abs = scaled;
      }
  }
  Integer worst = max_abs * (l_max + 1);
  bool fast = worst.fits_slong_p() && to_long(worst) < (1L << 62) / 4;

  GoodWinResult result;
  result.value.assign(static_cast<size_t>(n), Rational(0));
  result.non_negative.assign(static_cast<size_t>(n), 0);

  if (fast) {
    std::vector<std::vector<std::pair<int, long>>> adj(static_cast<size_t>(n));
    for (int v = 0; v < n; ++v) {
      if (!mask[static_cast<size_t>(v)]) continue;
      for (const auto& e : game.out(v))
        if (mask[static_cast<size_t>(e.dst)])
          adj[static_cast<size_t>(v)].emplace_back(
              e.dst, to_long(Integer(e.weight.numerator() * (den / e.weight.denominator()))));
    }
    std::vector<long> c(static_cast<size_t>(n), 0), next(static_cast<size_t>(n), 0);
    for (int i = 0; i < l_max; ++i) {
      for (int v = 0; v < n; ++v) {
        if (!mask[static_cast<size_t>(v)]) continue;
        bool maximize = game.owner(v) == Player::One;
        bool first = true;
        long best = 0;
        for (const auto& [dst, w] : adj[static_cast<size_t>(v)]) {
          long cand = std::max(w, w + c[static_cast<size_t>(dst)]);
          if (first || (maximize ? cand > best : cand < best)) {
            best = cand;
            first = false;
          }
        }
        if (first) throw InternalError("masked subgame left a vertex without successors");
        next[static_cast<size_t>(v)] = best;
      }
      std::swap(c, next);
    }
    for (int v = 0; v < n; ++v) {
      if (!mask[static_cast<size_t>(v)]) continue;
      result.value[static_cast<size_t>(v)] =
          Rational(Integer(std::to_string(c[static_cast<size_t>(v)])), den);
      result.non_negative[static_cast<size_t>(v)] = c[static_cast<size_t>(v)] >= 0;
    }
    return result;
  }

  std::vector<Rational> c(static_cast<size_t>(n)), next(static_cast<size_t>(n));
  for (int i = 0; i < l_max; ++i) {
    for (int v = 0; v < n; ++v) {
      if (!mask[static_cast<size_t>(v)]) continue;
      bool maximize = game.owner(v) == Player::One;
      std::optional<Rational> best;
      for (const auto& e : game.out(v)) {
        if (!mask[static_cast<size_t>(e.dst)]) continue;
        Rational cand = std::max(e.weight, e.weight + c[static_cast<size_t>(e.dst)]);
        if (!best || (maximize ? cand > *best : cand < *best)) best = cand;
      }
      if (!best) throw InternalError("masked subgame left a vertex without successors");
      next[static_cast<size_t>(v)] = *best;
    }
    std::swap(c, next);
  }
  for (int v = 0; v < n; ++v) {
    if (!mask[static_cast<size_t>(v)]) continue;
    result.value[static_cast<size_t>(v)] = c[static_cast<size_t>(v)];
    result.non_negative[static_cast<size_t>(v)] = c[static_cast<size_t>(v)].sign() >= 0;
  }
  return result;
}

// Shrink the mask until it is a valid subgame: a Player-1 vertex needs some
// successor inside, a Player-2 vertex needs all of them inside (otherwise
// Player 2 escapes to the removed region).
void close_under_restriction(const TwoPlayerGame& game, std::vector<char>& mask) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (int v = 0; v < game.num_vertices(); ++v) {
      if (!mask[static_cast<size_t>(v)]) continue;
      bool any = false, all = true;
      for (const auto& e : game.out(v)) {
        if (mask[static_cast<size_t>(e.dst)])
          any = true;
        else
          all = false;
      }
      bool keep = game.owner(v) == Player::One ? any : all;
      if (!keep) {
        mask[static_cast<size_t>(v)] = 0;
        changed = true;
      }
    }
  }
}

}  // namespace

GoodWinResult good_win(const TwoPlayerGame& game, int l_max) {
  if (l_max < 0) throw ValidationError("window length must be >= 0");
  std::vector<char> mask(static_cast<size_t>(game.num_vertices()), 1);
  return good_win_masked(game, l_max, mask);
}

std::vector<char> direct_window_winning(const TwoPlayerGame& game, int l_max) {
  if (l_max < 1) throw ValidationError("window length must be >= 1");
  std::vector<char> mask(static_cast<size_t>(game.num_vertices()), 1);
  while (true) {
    close_under_restriction(game, mask);
    bool empty = true;
    for (char c : mask)
      if (c) empty = false;
    if (empty) return mask;
    auto gw = good_win_masked(game, l_max, mask);
    bool shrank = false;
    for (int v = 0; v < game.num_vertices(); ++v)
      if (mask[static_cast<size_t>(v)] && !gw.non_negative[static_cast<size_t>(v)]) {
        mask[static_cast<size_t>(v)] = 0;
        shrank = true;
      }
    if (!shrank) return mask;
  }
}

VertexValues max_direct_window_value(const TwoPlayerGame& game, int l_max) {
  if (l_max < 1) throw ValidationError("window length must be >= 1");
  if (!game.weights_integral())
    throw ValidationError("max_direct_window_value requires integer weights");
  int n = game.num_vertices();
  Integer lo = game.min_weight().numerator();
  Integer hi = game.max_weight().numerator();
  std::set<Rational> cand_set;
  for (int q = 1; q <= l_max; ++q)
    for (Integer p = lo * q; p <= hi * q; ++p) cand_set.insert(Rational(p, Integer(q)));
  std::vector<Rational> cands(cand_set.begin(), cand_set.end());

  std::map<size_t, std::vector<char>> memo;
  auto winning_at = [&](size_t idx) -> const std::vector<char>& {
    auto it = memo.find(idx);
    if (it != memo.end()) return it->second;
    auto win = direct_window_winning(game.shifted(cands[idx]), l_max);
    return memo.emplace(idx, std::move(win)).first->second;
  };

  VertexValues values;
  values.value.assign(static_cast<size_t>(n), Rational(0));
  for (int v = 0; v < n; ++v) {
    // Every vertex wins at the minimum weight; find the largest winning
    // candidate, using that winning sets shrink as the threshold grows.
    size_t lo_i = 0, hi_i = cands.size() - 1;
    while (lo_i < hi_i) {
      size_t mid = (lo_i + hi_i + 1) / 2;
      if (winning_at(mid)[static_cast<size_t>(v)])
        lo_i = mid;
      else
        hi_i = mid - 1;
    }
    if (!winning_at(lo_i)[static_cast<size_t>(v)])
      throw InternalError("vertex loses the window game at the minimum weight threshold");
    values.value[static_cast<size_t>(v)] = cands[lo_i];
  }
  values.maximum = *std::max_element(values.value.begin(), values.value.end());
  return values;
}

std::vector<Rational> mean_payoff_game_values(const TwoPlayerGame& game, const SolverOptions& opts) {
  if (!game.weights_integral())
    throw ValidationError("mean_payoff_game_values requires integer weights");
  int n = game.num_vertices();
  Integer w_bound = game.max_abs_weight().numerator();

  Integer iterations_z = Integer(4) * n * n * n * w_bound;
  if (iterations_z == 0) iterations_z = 1;
  if (iterations_z > Integer(std::to_string(opts.mean_payoff_iteration_cap)))
    throw SizeCapError("instance too large for exact mean-payoff solve: needs " +
                       iterations_z.get_str() + " iterations, cap " +
                       std::to_string(opts.mean_payoff_iteration_cap));
  long k = to_long(iterations_z);

  // Totals stay below (k+1) * W; refuse the solve rather than overflow.
  Integer magnitude = (iterations_z + 1) * w_bound;
  if (!magnitude.fits_slong_p() || to_long(magnitude) > (1L << 62))
    throw SizeCapError("instance too large for exact mean-payoff solve: totals exceed 2^62");

  std::vector<std::vector<std::pair<int, long>>> adj(static_cast<size_t>(n));
  for (int v = 0; v < n; ++v)
    for (const auto& e : game.out(v))
      adj[static_cast<size_t>(v)].emplace_back(e.dst, to_long(e.weight.numerator()));

  std::vector<long> val(static_cast<size_t>(n), 0), next(static_cast<size_t>(n), 0);
  for (long step = 0; step < k; ++step) {
    for (int v = 0; v < n; ++v) {
      bool maximize = game.owner(v) == Player::One;
      bool first = true;
      long best = 0;
      for (const auto& [dst, w] : adj[static_cast<size_t>(v)]) {
        long cand = w + val[static_cast<size_t>(dst)];
        if (first || (maximize ? cand > best : cand < best)) {
          best = cand;
          first = false;
        }
      }
      next[static_cast<size_t>(v)] = best;
    }
    std::swap(val, next);
  }

  // The k-step average sits within 2nW/k of the value, which is a rational
  // with denominator at most n; exactly one such rational lies in the
  // interval.
  Rational radius = Rational(Integer(2) * n * w_bound, Integer(std::to_string(k)));
  std::vector<Rational> result(static_cast<size_t>(n));
  for (int v = 0; v < n; ++v) {
    Rational estimate = Rational(Integer(std::to_string(val[static_cast<size_t>(v)])),
                                 Integer(std::to_string(k)));
    Rational lo = estimate - radius, hi = estimate + radius;
    std::set<Rational> inside;
    for (int q = 1; q <= n; ++q) {
      Integer p_lo = (lo * Rational(q)).ceil();
      Integer p_hi = (hi * Rational(q)).floor();
      for (Integer p = p_lo; p <= p_hi; ++p) inside.insert(Rational(p, Integer(q)));
    }
    if (inside.size() != 1)
      throw InternalError("mean-payoff rounding interval holds " + std::to_string(inside.size()) +
                          " candidates instead of exactly one");
    result[static_cast<size_t>(v)] = *inside.begin();
  }
  return result;
}

}  // namespace wmp
