#include "wmp/cli.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "test_util.hpp"
#include "wmp/oracle.hpp"

namespace wmp {
namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return CliRun{code, out.str(), err.str()};
}

std::string corpus(const std::string& name) {
  return (std::filesystem::path(WMP_CORPUS_DIR) / name).string();
}

std::string strip_timing(const std::string& text) {
  return std::regex_replace(text, std::regex(R"(("timing_seconds": |timing: )[^\n,]*)"), "$1X");
}

TEST(Cli, AnalyzeFig1FixedWindow) {
  auto r = run({"analyze", "--model", corpus("fig1.mc"), "--objective", "fixwmp", "--lmax", "2"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("value: 3/2"), std::string::npos);
  EXPECT_NE(r.out.find("bscc{s1} : 2"), std::string::npos);
  EXPECT_NE(r.out.find("bscc{s3,s4} : 1"), std::string::npos);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({"analyze", "--model", corpus("fig1.mc"), "--objective", "fixwmp"}).code, 2);
  EXPECT_EQ(run({"analyze", "--model", corpus("fig1.mc"), "--objective", "bwmp", "--lmax", "3"}).code,
            2);
  EXPECT_EQ(run({"analyze", "--model", corpus("fig1.mc"), "--objective", "nope", "--lmax", "1"}).code,
            2);
  EXPECT_EQ(run({"analyze", "--model", "/nonexistent.mc", "--objective", "bwmp"}).code, 2);
  EXPECT_EQ(run({"analyze", "--model", corpus("fig7.game"), "--objective", "bwmp"}).code, 2);
  EXPECT_EQ(run({"simulate", "--model", corpus("fig1.mc"), "--objective", "bwmp", "--samples",
                 "100", "--horizon", "50", "--seed", "1"})
                .code,
            4);
}

TEST(Cli, UnfoldIsChainOnly) {
  // Build a small MDP file and reject --algorithm unfold on it.
  auto mdp = oracle::random_mdp({}, 9);
  auto path = std::filesystem::temp_directory_path() / "wmp_cli_test.mdp";
  {
    std::ofstream f(path);
    f << print_model(mdp);
  }
  auto r = run({"analyze", "--model", path.string(), "--objective", "dirfixwmp", "--lmax", "2",
                "--algorithm", "unfold"});
  EXPECT_EQ(r.code, 2);
  auto ok = run({"analyze", "--model", path.string(), "--objective", "dirfixwmp", "--lmax", "2"});
  EXPECT_EQ(ok.code, 0) << ok.err;
}

TEST(Cli, ParseErrorExitCode) {
  auto path = std::filesystem::temp_directory_path() / "wmp_cli_bad.mc";
  {
    std::ofstream f(path);
    f << "mc\nstate a\ninit a\nedge a -> a prob 2/3 weight 0\n";
  }
  auto r = run({"analyze", "--model", path.string(), "--objective", "bwmp"});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("probability sum"), std::string::npos);
}

TEST(Cli, ResourceErrorExitCode) {
  oracle::RandomModelParams params;
  params.states = 6;
  params.weight_max = 3;
  auto mc = oracle::random_markov_chain(params, 21);
  auto path = std::filesystem::temp_directory_path() / "wmp_cli_big.mc";
  {
    std::ofstream f(path);
    f << print_model(mc);
  }
  // |S|^lmax = 6^9 > 10^6: the unfolding refuses.
  auto r = run({"analyze", "--model", path.string(), "--objective", "dirfixwmp", "--lmax", "9",
                "--algorithm", "unfold"});
  EXPECT_EQ(r.code, 5);
}

TEST(Cli, CostIsNegatedPayoffOfNegatedModel) {
  std::mt19937_64 seeds(193);
  for (int round = 0; round < 5; ++round) {
    oracle::RandomModelParams params;
    params.states = 3;
    params.weight_min = -2;
    params.weight_max = 3;
    auto mc = oracle::random_markov_chain(params, seeds());
    auto negated = mc.with_weights([](const Rational& w) { return -w; });
    std::vector<Objective> objectives{Objective::fixed(2, Flavor::Cost),
                                      Objective::direct_fixed(2, Flavor::Cost),
                                      Objective::bounded(Flavor::Cost),
                                      Objective::direct_bounded(Flavor::Cost)};
    for (const Objective& cost : objectives) {
      Objective payoff = cost;
      payoff.flavor = Flavor::Payoff;
      auto a = analyze(ParsedModel(mc), cost);
      auto b = analyze(ParsedModel(negated), payoff);
      EXPECT_EQ(a.expected, -b.expected);
    }
  }
}

TEST(Cli, DirbwmpNotesTheCoincidence) {
  auto r = run({"analyze", "--model", corpus("fig1.mc"), "--objective", "dirbwmp"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("value: 3/2"), std::string::npos);
  EXPECT_NE(r.out.find("note:"), std::string::npos);
}

TEST(Cli, ProductAndUnfoldBytesMatch) {
  auto a = run({"analyze", "--model", corpus("fig1.mc"), "--objective", "dirfixwmp", "--lmax", "2",
                "--algorithm", "product", "--json"});
  auto b = run({"analyze", "--model", corpus("fig1.mc"), "--objective", "dirfixwmp", "--lmax", "2",
                "--algorithm", "unfold", "--json"});
  ASSERT_EQ(a.code, 0);
  ASSERT_EQ(b.code, 0);
  // Identical distributions and values; the algorithm tag and timing differ.
  auto scrub = [](std::string s) {
    s = strip_timing(s);
    s = std::regex_replace(s, std::regex(R"("algorithm": "[^"]*")"), R"("algorithm": "X")");
    return s;
  };
  EXPECT_EQ(scrub(a.out), scrub(b.out));
}

TEST(Cli, DeterministicAcrossThreadCounts) {
  for (const char* fmt : {"--json", "--text"}) {
    auto one = run({"analyze", "--model", corpus("fig1.mc"), "--objective", "dirfixwmp", "--lmax",
                    "3", "--threads", "1", fmt});
    auto eight = run({"analyze", "--model", corpus("fig1.mc"), "--objective", "dirfixwmp", "--lmax",
                      "3", "--threads", "8", fmt});
    ASSERT_EQ(one.code, 0);
    ASSERT_EQ(eight.code, 0);
    EXPECT_EQ(strip_timing(one.out), strip_timing(eight.out));
  }
}

TEST(Cli, GenIsDeterministicAndValid) {
  auto a = run({"gen", "--kind", "mdp", "--states", "4", "--max-actions", "2", "--seed", "77"});
  auto b = run({"gen", "--kind", "mdp", "--states", "4", "--max-actions", "2", "--seed", "77"});
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_NO_THROW(parse_model(a.out));
}

TEST(Cli, SimulateMatchesExactWithinFourSigma) {
  auto r = run({"simulate", "--model", corpus("sim08.mc"), "--objective", "fixwmp", "--lmax", "2",
                "--samples", "20000", "--horizon", "200", "--burn-in", "40", "--seed", "5",
                "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("\"command\": \"simulate\""), std::string::npos);
}

TEST(Cli, CheckGwVerdicts) {
  auto good = run({"check-gw", "--model", corpus("fig1.mc"), "--p", "1", "--lmax", "2", "--lambda",
                   "0"});
  ASSERT_EQ(good.code, 0);
  EXPECT_NE(good.out.find("verdict: true"), std::string::npos);
  auto bad = run({"check-gw", "--model", corpus("fig1.mc"), "--p", "1", "--lmax", "2", "--lambda",
                  "3"});
  ASSERT_EQ(bad.code, 0);
  EXPECT_NE(bad.out.find("verdict: false"), std::string::npos);
}

}  // namespace
}  // namespace wmp
