#include "wmp/parse.hpp"

#include <cstdint>
#include <map>
#include <sstream>

#include "wmp/errors.hpp"

namespace wmp {

namespace {

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : line) {
    if (ch == '#') break;
    if (ch == ' ' || ch == '\t' || ch == '\r') {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(ch);
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

Rational parse_rational(const std::string& token, int line) {
  auto r = Rational::try_parse(token);
  if (!r) throw ParseError(line, "expected a rational, got '" + token + "'");
  return *r;
}

struct RawEdge {
  int line;
  std::string src;
  std::string action;  // mdp only
  std::string dst;
  Rational prob;  // mc/mdp only
  Rational weight;
};

struct RawModel {
  std::string kind;
  std::vector<std::pair<std::string, std::string>> states;  // name, player tag ("" if none)
  std::vector<int> state_lines;
  std::string init;
  int init_line = 0;
  std::vector<RawEdge> edges;
};

RawModel scan(const std::string& text) {
  RawModel raw;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto tok = tokenize(line);
    if (tok.empty()) continue;
    if (raw.kind.empty()) {
      if (tok.size() != 1 || (tok[0] != "mc" && tok[0] != "mdp" && tok[0] != "game"))
        throw ParseError(line_no, "expected model kind 'mc', 'mdp' or 'game'");
      raw.kind = tok[0];
      continue;
    }
    if (tok[0] == "state") {
      if (raw.kind == "game") {
        if (tok.size() != 3 || (tok[2] != "player1" && tok[2] != "player2"))
          throw ParseError(line_no, "game states need 'state <id> player1|player2'");
        raw.states.emplace_back(tok[1], tok[2]);
      } else {
        if (tok.size() != 2)
          throw ParseError(line_no, "expected 'state <id>'");
        raw.states.emplace_back(tok[1], "");
      }
      raw.state_lines.push_back(line_no);
    } else if (tok[0] == "init") {
      if (tok.size() != 2) throw ParseError(line_no, "expected 'init <id>'");
      if (!raw.init.empty()) throw ParseError(line_no, "duplicate init declaration");
      raw.init = tok[1];
      raw.init_line = line_no;
    } else if (tok[0] == "edge") {
      RawEdge e;
      e.line = line_no;
      if (raw.kind == "mc") {
        if (tok.size() != 8 || tok[2] != "->" || tok[4] != "prob" || tok[6] != "weight")
          throw ParseError(line_no, "expected 'edge <src> -> <dst> prob <rational> weight <rational>'");
        e.src = tok[1];
        e.dst = tok[3];
        e.prob = parse_rational(tok[5], line_no);
        e.weight = parse_rational(tok[7], line_no);
      } else if (raw.kind == "mdp") {
        if (tok.size() != 9 || tok[3] != "->" || tok[5] != "prob" || tok[7] != "weight" ||
            tok[2].size() < 3 || tok[2].front() != '[' || tok[2].back() != ']')
          throw ParseError(line_no,
                           "expected 'edge <src> [<action>] -> <dst> prob <rational> weight <rational>'");
        e.src = tok[1];
        e.action = tok[2].substr(1, tok[2].size() - 2);
        e.dst = tok[4];
        e.prob = parse_rational(tok[6], line_no);
        e.weight = parse_rational(tok[8], line_no);
      } else {
        if (tok.size() != 6 || tok[2] != "->" || tok[4] != "weight")
          throw ParseError(line_no, "expected 'edge <src> -> <dst> weight <rational>'");
        e.src = tok[1];
        e.dst = tok[3];
        e.weight = parse_rational(tok[5], line_no);
      }
      raw.edges.push_back(std::move(e));
    } else {
      throw ParseError(line_no, "unknown directive '" + tok[0] + "'");
    }
  }
  if (raw.kind.empty()) throw ParseError(0, "empty model file");
  if (raw.states.empty()) throw ParseError(0, "no states declared");
  if (raw.init.empty()) throw ParseError(0, "no init declared");
  return raw;
}

[[noreturn]] void rethrow(int line, const ValidationError& e) { throw ParseError(line, e.what()); }

}  // namespace

ParsedModel parse_model(const std::string& text) {
  RawModel raw = scan(text);
  std::map<std::string, int> declared;
  for (size_t i = 0; i < raw.states.size(); ++i) {
    if (declared.count(raw.states[i].first))
      throw ParseError(raw.state_lines[i], "duplicate state '" + raw.states[i].first + "'");
    declared[raw.states[i].first] = static_cast<int>(i);
  }
  auto check_id = [&](const std::string& id, int line) {
    if (!declared.count(id)) throw ParseError(line, "undeclared state '" + id + "'");
  };
  check_id(raw.init, raw.init_line);
  for (const auto& e : raw.edges) {
    check_id(e.src, e.line);
    check_id(e.dst, e.line);
  }

  if (raw.kind == "mc") {
    MarkovChain::Builder b;
    for (const auto& [name, tag] : raw.states) b.add_state(name);
    b.set_initial(raw.init);
    std::map<std::string, std::pair<Rational, int>> sums;  // state -> (sum, first line)
    for (const auto& e : raw.edges) {
      try {
        b.add_edge(e.src, e.dst, e.prob, e.weight);
      } catch (const ValidationError& err) {
        rethrow(e.line, err);
      }
      auto [it, fresh] = sums.emplace(e.src, std::make_pair(e.prob, e.line));
      if (!fresh) it->second.first += e.prob;
    }
    for (size_t i = 0; i < raw.states.size(); ++i) {
      auto it = sums.find(raw.states[i].first);
      if (it == sums.end())
        throw ParseError(raw.state_lines[i],
                         "state '" + raw.states[i].first + "' has no outgoing edge");
      if (it->second.first != Rational(1))
        throw ParseError(it->second.second, "probability sum for state '" + raw.states[i].first +
                                                "' is " + it->second.first.str() + ", expected 1");
    }
    return std::move(b).build();
  }
  if (raw.kind == "mdp") {
    Mdp::Builder b;
    for (const auto& [name, tag] : raw.states) b.add_state(name);
    b.set_initial(raw.init);
    std::map<std::pair<std::string, std::string>, std::pair<Rational, int>> sums;
    std::map<std::string, int> has_action;
    for (const auto& e : raw.edges) {
      try {
        b.add_transition(b.state(e.src), e.action, b.state(e.dst), e.prob, e.weight);
      } catch (const ValidationError& err) {
        rethrow(e.line, err);
      }
      auto key = std::make_pair(e.src, e.action);
      auto [it, fresh] = sums.emplace(key, std::make_pair(e.prob, e.line));
      if (!fresh) it->second.first += e.prob;
      has_action.emplace(e.src, e.line);
    }
    for (size_t i = 0; i < raw.states.size(); ++i)
      if (!has_action.count(raw.states[i].first))
        throw ParseError(raw.state_lines[i],
                         "state '" + raw.states[i].first + "' has no enabled action");
    for (const auto& [key, sum_line] : sums)
      if (sum_line.first != Rational(1))
        throw ParseError(sum_line.second, "probability sum for state '" + key.first + "' action '" +
                                              key.second + "' is " + sum_line.first.str() +
                                              ", expected 1");
    return std::move(b).build();
  }

  TwoPlayerGame::Builder b;
  for (const auto& [name, tag] : raw.states)
    b.add_vertex(name, tag == "player1" ? Player::One : Player::Two);
  b.set_initial(raw.init);
  std::map<std::string, int> has_edge;
  for (const auto& e : raw.edges) {
    try {
      b.add_edge(e.src, e.dst, e.weight);
    } catch (const ValidationError& err) {
      rethrow(e.line, err);
    }
    has_edge.emplace(e.src, e.line);
  }
  for (size_t i = 0; i < raw.states.size(); ++i)
    if (!has_edge.count(raw.states[i].first))
      throw ParseError(raw.state_lines[i],
                       "vertex '" + raw.states[i].first + "' has no outgoing edge");
  return std::move(b).build();
}

std::string print_model(const MarkovChain& mc) {
  std::ostringstream out;
  out << "mc\n";
  for (int s = 0; s < mc.num_states(); ++s) out << "state " << mc.state_name(s) << "\n";
  out << "init " << mc.state_name(mc.initial()) << "\n";
  for (int s = 0; s < mc.num_states(); ++s)
    for (const auto& e : mc.out(s))
      out << "edge " << mc.state_name(s) << " -> " << mc.state_name(e.dst) << " prob " << e.prob.str()
          << " weight " << e.weight.str() << "\n";
  return out.str();
}

std::string print_model(const Mdp& mdp) {
  std::ostringstream out;
  out << "mdp\n";
  for (int s = 0; s < mdp.num_states(); ++s) out << "state " << mdp.state_name(s) << "\n";
  out << "init " << mdp.state_name(mdp.initial()) << "\n";
  for (int s = 0; s < mdp.num_states(); ++s)
    for (const auto& c : mdp.choices(s))
      for (const auto& e : c.edges)
        out << "edge " << mdp.state_name(s) << " [" << mdp.action_name(c.action) << "] -> "
            << mdp.state_name(e.dst) << " prob " << e.prob.str() << " weight " << e.weight.str()
            << "\n";
  return out.str();
}

std::string print_model(const TwoPlayerGame& game) {
  std::ostringstream out;
  out << "game\n";
  for (int v = 0; v < game.num_vertices(); ++v)
    out << "state " << game.vertex_name(v) << " "
        << (game.owner(v) == Player::One ? "player1" : "player2") << "\n";
  out << "init " << game.vertex_name(game.initial()) << "\n";
  for (int v = 0; v < game.num_vertices(); ++v)
    for (const auto& e : game.out(v))
      out << "edge " << game.vertex_name(v) << " -> " << game.vertex_name(e.dst) << " weight "
          << e.weight.str() << "\n";
  return out.str();
}

std::string print_model(const ParsedModel& model) {
  return std::visit([](const auto& m) { return print_model(m); }, model);
}

const char* model_kind(const ParsedModel& model) {
  if (std::holds_alternative<MarkovChain>(model)) return "mc";
  if (std::holds_alternative<Mdp>(model)) return "mdp";
  return "game";
}

std::string model_hash(const ParsedModel& model) {
  std::string text = print_model(model);
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace wmp
