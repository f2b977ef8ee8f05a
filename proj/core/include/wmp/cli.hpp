#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "wmp/mc_window.hpp"
#include "wmp/model.hpp"
#include "wmp/options.hpp"
#include "wmp/parse.hpp"
#include "wmp/result.hpp"

namespace wmp {

// Analysis entry point shared by the CLI and tests: dispatches on model
// kind and objective, applies the cost-to-payoff reduction, and renders a
// result document. `algorithm` is "", "product" or "unfold".
ResultDocument analyze_document(const ParsedModel& model, const Objective& objective,
                                const std::string& algorithm, const SolverOptions& opts = {});

AnalysisResult analyze(const ParsedModel& model, const Objective& objective,
                       const std::string& algorithm = "", const SolverOptions& opts = {});

// Exit codes: 0 ok, 2 usage, 3 parse, 4 validation, 5 resource, 1 internal.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wmp
