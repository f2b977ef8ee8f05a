#pragma once

#include <string>
#include <variant>

#include "wmp/model.hpp"

namespace wmp {

using ParsedModel = std::variant<MarkovChain, Mdp, TwoPlayerGame>;

// Line-oriented model grammar:
//   line 1:   mc | mdp | game
//   state <id> [player1|player2]      (player tag required for games)
//   init <id>
//   edge <src> -> <dst> prob <rational> weight <rational>            (mc)
//   edge <src> [<action>] -> <dst> prob <rational> weight <rational> (mdp)
//   edge <src> -> <dst> weight <rational>                            (game)
// '#' starts a comment; rationals are `int` or `int/int`.
ParsedModel parse_model(const std::string& text);

std::string print_model(const MarkovChain& mc);
std::string print_model(const Mdp& mdp);
std::string print_model(const TwoPlayerGame& game);
std::string print_model(const ParsedModel& model);

const char* model_kind(const ParsedModel& model);

// FNV-1a over the canonical printed form, 16 hex digits.
std::string model_hash(const ParsedModel& model);

}  // namespace wmp
