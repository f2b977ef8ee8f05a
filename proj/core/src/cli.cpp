#include "wmp/cli.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "wmp/mdp_window.hpp"
#include "wmp/oracle.hpp"

namespace wmp {

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open model file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

ObjectiveKind kind_from_string(const std::string& name) {
  if (name == "fixwmp") return ObjectiveKind::Fixed;
  if (name == "dirfixwmp") return ObjectiveKind::DirectFixed;
  if (name == "bwmp") return ObjectiveKind::Bounded;
  if (name == "dirbwmp") return ObjectiveKind::DirectBounded;
  throw UsageError("unknown objective '" + name + "' (fixwmp|dirfixwmp|bwmp|dirbwmp)");
}

const char* kind_to_string(ObjectiveKind kind) {
  switch (kind) {
    case ObjectiveKind::Fixed: return "fixwmp";
    case ObjectiveKind::DirectFixed: return "dirfixwmp";
    case ObjectiveKind::Bounded: return "bwmp";
    case ObjectiveKind::DirectBounded: return "dirbwmp";
  }
  return "?";
}

Objective objective_from_flags(const std::string& name, const std::string& flavor_name,
                               std::optional<int> lmax) {
  ObjectiveKind kind = kind_from_string(name);
  Flavor flavor;
  if (flavor_name == "payoff")
    flavor = Flavor::Payoff;
  else if (flavor_name == "cost")
    flavor = Flavor::Cost;
  else
    throw UsageError("unknown flavor '" + flavor_name + "' (payoff|cost)");
  if (has_window(kind)) {
    if (!lmax) throw UsageError("--lmax is required for fixed window objectives");
    if (*lmax < 1) throw UsageError("--lmax must be >= 1");
  } else if (lmax) {
    throw UsageError("--lmax does not apply to bounded window objectives");
  }
  Objective obj{kind, lmax, flavor};
  obj.validate();
  return obj;
}

const std::string& name_of_state(const ParsedModel& model, int s) {
  if (const auto* mc = std::get_if<MarkovChain>(&model)) return mc->state_name(s);
  if (const auto* mdp = std::get_if<Mdp>(&model)) return mdp->state_name(s);
  return std::get<TwoPlayerGame>(model).vertex_name(s);
}

ParsedModel negate_weights(const ParsedModel& model) {
  auto neg = [](const Rational& w) { return -w; };
  if (const auto* mc = std::get_if<MarkovChain>(&model)) return mc->with_weights(neg);
  if (const auto* mdp = std::get_if<Mdp>(&model)) return mdp->with_weights(neg);
  return std::get<TwoPlayerGame>(model).with_weights(neg);
}

}  // namespace

AnalysisResult analyze(const ParsedModel& model, const Objective& objective,
                       const std::string& algorithm, const SolverOptions& opts) {
  objective.validate();
  if (std::holds_alternative<TwoPlayerGame>(model))
    throw UsageError("window objectives are analyzed on mc and mdp models");
  if (!algorithm.empty() && algorithm != "product" && algorithm != "unfold")
    throw UsageError("unknown algorithm '" + algorithm + "' (product|unfold)");
  if (!algorithm.empty() && objective.kind != ObjectiveKind::DirectFixed)
    throw UsageError("--algorithm applies to the dirfixwmp objective only");
  if (algorithm == "unfold" && !std::holds_alternative<MarkovChain>(model))
    throw UsageError("--algorithm unfold is available for Markov chains only");

  if (objective.flavor == Flavor::Cost) {
    // Window mean-cost reduces to mean-payoff on the negated weights.
    Objective payoff = objective;
    payoff.flavor = Flavor::Payoff;
    AnalysisResult result = analyze(negate_weights(model), payoff, algorithm, opts);
    result.objective = objective;
    result.expected = -result.expected;
    if (result.distribution) {
      ValueDistribution flipped;
      for (const auto& [value, prob] : *result.distribution) flipped.emplace(-value, prob);
      result.distribution = std::move(flipped);
    }
    for (auto& comp : result.component_values) comp.value = -comp.value;
    return result;
  }

  const auto* mc = std::get_if<MarkovChain>(&model);
  const auto* mdp = std::get_if<Mdp>(&model);
  switch (objective.kind) {
    case ObjectiveKind::Fixed:
      return mc ? expected_fixed_window(*mc, *objective.window, opts)
                : expected_fixed_window(*mdp, *objective.window, opts);
    case ObjectiveKind::DirectFixed:
      if (mc)
        return algorithm == "unfold"
                   ? expected_direct_fixed_window_unfold(*mc, *objective.window, opts)
                   : expected_direct_fixed_window(*mc, *objective.window, opts);
      return expected_direct_fixed_window(*mdp, *objective.window, opts);
    case ObjectiveKind::Bounded:
    case ObjectiveKind::DirectBounded: {
      AnalysisResult result = mc ? expected_bounded_window(*mc, opts) : expected_bounded_window(*mdp, opts);
      result.objective.kind = objective.kind;
      return result;
    }
  }
  throw InternalError("unreachable objective kind");
}

ResultDocument analyze_document(const ParsedModel& model, const Objective& objective,
                                const std::string& algorithm, const SolverOptions& opts) {
  auto start = std::chrono::steady_clock::now();
  AnalysisResult result = analyze(model, objective, algorithm, opts);

  ResultDocument doc;
  doc.command = "analyze";
  doc.model_hash = model_hash(model);
  doc.model_kind = model_kind(model);
  doc.objective = kind_to_string(objective.kind);
  doc.flavor = objective.flavor == Flavor::Cost ? "cost" : "payoff";
  doc.lmax = objective.window;
  doc.algorithm = result.algorithm;
  doc.value_exact = result.expected.str();
  doc.value_decimal = result.expected.decimal();
  if (result.distribution)
    for (const auto& [value, prob] : *result.distribution)
      doc.distribution.emplace_back(value.str(), prob.str());
  const char* comp_kind = std::holds_alternative<MarkovChain>(model) ? "bscc" : "mec";
  for (const auto& comp : result.component_values) {
    std::string names = "{";
    for (size_t i = 0; i < comp.states.size(); ++i) {
      if (i) names += ",";
      names += name_of_state(model, comp.states[i]);
    }
    names += "}";
    doc.components.push_back(ResultDocument::Component{std::string(comp_kind) + names,
                                                       comp.value.str(), comp.value.decimal()});
  }
  doc.transform_scale = result.transform.scale.get_str();
  doc.transform_shift = result.transform.shift.get_str();
  if (objective.kind == ObjectiveKind::DirectBounded)
    doc.note = "the direct bounded window value coincides with the bounded one on every path; "
               "computed via the bounded pipeline";
  else if (objective.flavor == Flavor::Cost)
    doc.note = "cost flavor: weights negated, payoff analysis run, result negated";
  doc.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return doc;
}

namespace {

ResultDocument simulate_document(const ParsedModel& model, const Objective& objective,
                                 long long samples, int horizon, int burn_in, std::uint64_t seed) {
  auto start = std::chrono::steady_clock::now();
  const auto* mc = std::get_if<MarkovChain>(&model);
  if (!mc) throw UsageError("simulate works on Markov chain models");
  auto estimate = oracle::monte_carlo(*mc, objective, samples, horizon, burn_in, seed);

  ResultDocument doc;
  doc.command = "simulate";
  doc.model_hash = model_hash(model);
  doc.model_kind = model_kind(model);
  doc.objective = kind_to_string(objective.kind);
  doc.flavor = objective.flavor == Flavor::Cost ? "cost" : "payoff";
  doc.lmax = objective.window;
  doc.algorithm = "monte-carlo";
  doc.value_exact = estimate.mean.str();
  doc.value_decimal = estimate.mean.decimal();
  doc.extra.emplace_back("samples", std::to_string(estimate.samples));
  doc.extra.emplace_back("horizon", std::to_string(horizon));
  doc.extra.emplace_back("burn_in", std::to_string(burn_in));
  doc.extra.emplace_back("seed", std::to_string(seed));
  doc.extra.emplace_back("stddev_of_mean", std::to_string(estimate.stddev_of_mean()));
  doc.extra.emplace_back("ci95_low", std::to_string(estimate.ci_low(1.96)));
  doc.extra.emplace_back("ci95_high", std::to_string(estimate.ci_high(1.96)));
  doc.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return doc;
}

ResultDocument check_gw_document(const ParsedModel& model, const Rational& p, int lmax,
                                 const Rational& lambda) {
  auto start = std::chrono::steady_clock::now();
  const auto* mc = std::get_if<MarkovChain>(&model);
  if (!mc) throw UsageError("check-gw works on Markov chain models");
  auto check = check_good_window_everywhere(*mc, p, lmax, lambda);

  ResultDocument doc;
  doc.command = "check-gw";
  doc.model_hash = model_hash(model);
  doc.model_kind = model_kind(model);
  doc.lmax = lmax;
  doc.extra.emplace_back("p", p.str());
  doc.extra.emplace_back("lambda", lambda.str());
  doc.extra.emplace_back("verdict", check.all_reachable_satisfied ? "true" : "false");
  for (int s = 0; s < mc->num_states(); ++s)
    doc.extra.emplace_back("state " + mc->state_name(s),
                           std::string(check.satisfied[static_cast<size_t>(s)] ? "satisfied"
                                                                               : "violated") +
                               " mass=" + check.mass[static_cast<size_t>(s)].str());
  doc.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return doc;
}

Rational rational_flag(const std::string& text, const char* flag) {
  auto r = Rational::try_parse(text);
  if (!r) throw UsageError(std::string(flag) + " expects a rational like 3/2");
  return *r;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"window mean-payoff analysis for weighted Markov chains, MDPs and games"};
  app.name("wmp");
  app.require_subcommand(1);

  std::string model_path, objective_name = "fixwmp", flavor_name = "payoff", algorithm;
  int lmax = -1;
  int threads = 1;
  bool json = false, text = false;

  auto add_output_flags = [&](CLI::App* cmd) {
    auto* j = cmd->add_flag("--json", json, "machine-readable JSON output");
    auto* t = cmd->add_flag("--text", text, "human-readable text output (default)");
    j->excludes(t);
  };

  auto* analyze_cmd = app.add_subcommand("analyze", "compute an expected window value exactly");
  analyze_cmd->add_option("--model", model_path, "model file")->required();
  analyze_cmd->add_option("--objective", objective_name, "fixwmp|dirfixwmp|bwmp|dirbwmp")->required();
  analyze_cmd->add_option("--lmax", lmax, "window length for fixed objectives");
  analyze_cmd->add_option("--flavor", flavor_name, "payoff|cost (default payoff)");
  analyze_cmd->add_option("--algorithm", algorithm, "product|unfold (dirfixwmp only)");
  analyze_cmd->add_option("--threads", threads, "worker threads (results are identical)");
  add_output_flags(analyze_cmd);

  long long samples = 100000;
  int horizon = 1000, burn_in = 0;
  std::uint64_t seed = 1;
  auto* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo estimate of a window value");
  simulate_cmd->add_option("--model", model_path, "model file")->required();
  simulate_cmd->add_option("--objective", objective_name, "fixwmp|dirfixwmp")->required();
  simulate_cmd->add_option("--lmax", lmax, "window length");
  simulate_cmd->add_option("--flavor", flavor_name, "payoff|cost (default payoff)");
  simulate_cmd->add_option("--samples", samples, "number of sampled paths")->required();
  simulate_cmd->add_option("--horizon", horizon, "steps per sampled path")->required();
  simulate_cmd->add_option("--burn-in", burn_in, "positions skipped for the fixed objective");
  simulate_cmd->add_option("--seed", seed, "RNG seed")->required();
  add_output_flags(simulate_cmd);

  std::string p_text, lambda_text;
  auto* checkgw_cmd = app.add_subcommand("check-gw", "check the state-local good window property");
  checkgw_cmd->add_option("--model", model_path, "model file")->required();
  checkgw_cmd->add_option("--p", p_text, "probability threshold")->required();
  checkgw_cmd->add_option("--lmax", lmax, "window length")->required();
  checkgw_cmd->add_option("--lambda", lambda_text, "value threshold")->required();
  add_output_flags(checkgw_cmd);

  std::string gen_kind = "mc", out_path;
  oracle::RandomModelParams params;
  std::uint64_t gen_seed = 1;
  auto* gen_cmd = app.add_subcommand("gen", "generate a random model deterministically");
  gen_cmd->add_option("--kind", gen_kind, "mc|mdp|game")->required();
  gen_cmd->add_option("--seed", gen_seed, "RNG seed")->required();
  gen_cmd->add_option("--states", params.states, "number of states");
  gen_cmd->add_option("--min-out", params.min_out_degree, "minimum out-degree");
  gen_cmd->add_option("--max-out", params.max_out_degree, "maximum out-degree");
  gen_cmd->add_option("--min-actions", params.min_actions, "minimum actions per state (mdp)");
  gen_cmd->add_option("--max-actions", params.max_actions, "maximum actions per state (mdp)");
  gen_cmd->add_option("--weight-min", params.weight_min, "minimum weight");
  gen_cmd->add_option("--weight-max", params.weight_max, "maximum weight");
  gen_cmd->add_option("--weight-den-max", params.weight_denominator_max,
                      "maximum weight denominator (1 = integer weights)");
  gen_cmd->add_flag("--strongly-connected", params.strongly_connected,
                    "force one closed strongly connected component");
  gen_cmd->add_flag("--bipartite", params.bipartite, "games: alternating edges");
  gen_cmd->add_option("--out", out_path, "output file (default stdout)");

  try {
    std::vector<std::string> full;
    full.reserve(args.size());
    for (const auto& a : args) full.push_back(a);
    std::vector<char*> argv;
    std::string prog = "wmp";
    argv.push_back(prog.data());
    for (auto& a : full) argv.push_back(a.data());
    app.parse(static_cast<int>(argv.size()), argv.data());

    if (gen_cmd->parsed()) {
      std::string text_out;
      if (gen_kind == "mc")
        text_out = print_model(oracle::random_markov_chain(params, gen_seed));
      else if (gen_kind == "mdp")
        text_out = print_model(oracle::random_mdp(params, gen_seed));
      else if (gen_kind == "game")
        text_out = print_model(oracle::random_game(params, gen_seed));
      else
        throw UsageError("unknown kind '" + gen_kind + "' (mc|mdp|game)");
      if (out_path.empty()) {
        out << text_out;
      } else {
        std::ofstream f(out_path, std::ios::binary);
        if (!f) throw UsageError("cannot write '" + out_path + "'");
        f << text_out;
      }
      return 0;
    }

    ParsedModel model = parse_model(slurp(model_path));
    ResultDocument doc;
    if (analyze_cmd->parsed()) {
      std::optional<int> window;
      if (analyze_cmd->count("--lmax") > 0) window = lmax;
      Objective objective = objective_from_flags(objective_name, flavor_name, window);
      SolverOptions opts;
      if (threads < 1) throw UsageError("--threads must be >= 1");
      opts.threads = threads;
      doc = analyze_document(model, objective, algorithm, opts);
    } else if (simulate_cmd->parsed()) {
      std::optional<int> window;
      if (simulate_cmd->count("--lmax") > 0) window = lmax;
      Objective objective = objective_from_flags(objective_name, flavor_name, window);
      doc = simulate_document(model, objective, samples, horizon, burn_in, seed);
    } else {
      doc = check_gw_document(model, rational_flag(p_text, "--p"), lmax,
                              rational_flag(lambda_text, "--lambda"));
    }
    out << (json ? to_json(doc) : to_text(doc));
    return 0;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      out << app.help();
      return 0;
    }
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return 3;
  } catch (const SizeCapError& e) {
    err << "resource error: " << e.what() << "\n";
    return 5;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << "\n";
    return 4;
  } catch (const UnsupportedError& e) {
    err << "validation error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace wmp
