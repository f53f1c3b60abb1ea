#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include "fixtures.hpp"
#include "typestate/dot.hpp"
#include "typestate/pipeline.hpp"

using namespace typestate;
namespace fs = std::filesystem;

namespace {

LearnConfig config(OracleKind k = OracleKind::dist) {
  LearnConfig c;
  c.oracle = k;
  return c;
}

using Edge = std::tuple<std::string, std::string, std::string>;

std::set<Edge> edges(const InterfaceAutomaton& a) {
  std::set<Edge> out;
  for (const auto& t : a.transitions())
    out.emplace(a.state_name(t.from), a.label_name(t.label), a.state_name(t.to));
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("typestate_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

/// Runs the CLI with `args`, capturing stdout into `out_file`; returns the exit code.
int cli(const std::string& args, const fs::path& out_file) {
  const auto cmd = std::string(TYPESTATE_CLI_PATH) + " " + args + " > " + out_file.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string model_arg(const std::string& file) { return "--model " + fixtures::model_path(file); }

}  // namespace

TEST(Metrics, JsonHasExactlyTheDocumentedKeys) {
  const auto j = metrics_to_json(Metrics{});
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"interface_states", "mealy_states", "time_ms", "mq_asked",
                                            "mq_executed", "eq", "mq_per_eq_avg", "mq_per_eq_max",
                                            "b_dist_used", "b_dist_needed"}));
  EXPECT_TRUE(j["b_dist_used"].is_null());
}

TEST(Metrics, StableAcrossRunsExceptTime) {
  auto a = metrics_to_json(run_learn(fixtures::model("mediaplayer.json"), config()).metrics);
  auto b = metrics_to_json(run_learn(fixtures::model("mediaplayer.json"), config()).metrics);
  a.erase("time_ms");
  b.erase("time_ms");
  EXPECT_EQ(a, b);
}

TEST(Dot, SingleStateGolden) {
  const InterfaceAutomaton a({"ping"}, {"pong"}, {"Idle"}, 0,
                             {{0, Label{LabelKind::input, 0}, 0}, {0, Label{LabelKind::output, 0}, 0}});
  EXPECT_EQ(export_dot(a),
            "digraph \"typestate\" {\n"
            "  rankdir=LR;\n"
            "  node [shape=circle];\n"
            "  __start [shape=point, label=\"\"];\n"
            "  n0 [label=\"Idle\"];\n"
            "  __start -> n0;\n"
            "  n0 -> n0 [label=\"ping\"];\n"
            "  n0 -> n0 [label=\"pong\", color=\"black:invis:black\"];\n"
            "}\n");
}

TEST(Dot, QuotesNames) {
  const InterfaceAutomaton a({"a\"b"}, {}, {"S\\1"}, 0, {});
  const auto dot = export_dot(a, "x");
  EXPECT_NE(dot.find("digraph \"x\""), std::string::npos);
  EXPECT_NE(dot.find("[label=\"S\\\\1\"]"), std::string::npos);
}

TEST(RunLearn, AsyncTaskIsIsomorphicToTheModel) {
  const auto o = run_learn(fixtures::model("asynctask.json"), config());
  ASSERT_EQ(o.exit_code, kExitOk) << o.message;
  EXPECT_TRUE(o.verified);
  ASSERT_TRUE(o.automaton);
  EXPECT_EQ(o.metrics.interface_states, 5u);
  EXPECT_EQ(o.metrics.mealy_states, 6u);
  EXPECT_GE(o.metrics.eq, 1u);
  const auto model = fixtures::automaton("asynctask.json");
  EXPECT_EQ(edges(*o.automaton), edges(model));
  EXPECT_EQ(o.automaton->state_name(o.automaton->initial()), model.state_name(model.initial()));
}

TEST(RunLearn, DotIsByteIdenticalAcrossRuns) {
  const auto a = run_learn(fixtures::model("asynctask.json"), config());
  const auto b = run_learn(fixtures::model("asynctask.json"), config());
  EXPECT_EQ(export_dot(*a.automaton), export_dot(*b.automaton));
}

TEST(RunLearn, MediaPlayer) {
  const auto o = run_learn(fixtures::model("mediaplayer.json"), config());
  ASSERT_EQ(o.exit_code, kExitOk) << o.message;
  EXPECT_EQ(o.metrics.interface_states, 10u);
  EXPECT_EQ(o.metrics.b_dist_needed, 1u);
  EXPECT_EQ(o.metrics.b_dist_used, 2u);
  EXPECT_LT(o.metrics.mq_executed, o.metrics.mq_asked);
  EXPECT_LT(o.metrics.mq_executed, 100000u);
  EXPECT_EQ(edges(*o.automaton), edges(fixtures::automaton("mediaplayer.json")));
}

TEST(RunLearn, MetricsAreConsistent) {
  const auto o = run_learn(fixtures::model("mediaplayer.json"), config());
  ASSERT_TRUE(o.lstar);
  EXPECT_EQ(o.metrics.eq, o.lstar->rounds.size());
  std::uint64_t total = 0;
  for (const auto& r : o.lstar->rounds) {
    total += r.asked;
    EXPECT_LE(r.asked, o.metrics.mq_per_eq_max);
  }
  EXPECT_DOUBLE_EQ(o.metrics.mq_per_eq_avg, static_cast<double>(total) / o.metrics.eq);
  EXPECT_EQ(o.metrics.mq_asked, o.lstar->learner_asked + total);
}

TEST(RunLearn, SqliteNeedsTheRefinement) {
  const auto refined = run_learn(fixtures::model("sqlite_open_helper_refined.json"), config());
  ASSERT_EQ(refined.exit_code, kExitOk) << refined.message;
  EXPECT_EQ(refined.metrics.b_dist_needed, 2u);
  const auto raw = run_learn(fixtures::model("sqlite_open_helper.json"), config());
  EXPECT_EQ(raw.exit_code, kExitNonDeterminism);
  ASSERT_TRUE(raw.nondeterminism);
  EXPECT_NE(raw.message.find("ctor"), std::string::npos);
}

TEST(RunLearn, CoinFlipAndItsMerge) {
  for (std::uint64_t seed : {1u, 2u, 3u, 99u}) {
    auto c = config();
    c.seed = seed;
    const auto o = run_learn(fixtures::model("speech_recognizer.json"), c);
    ASSERT_EQ(o.exit_code, kExitNonDeterminism) << seed;
    ASSERT_TRUE(o.nondeterminism);
    const auto& r = *o.nondeterminism;
    EXPECT_EQ(r.first.size(), r.prefix.size());
    EXPECT_NE(r.first, r.second);
  }
  const auto merged = run_learn(fixtures::model("speech_recognizer_merged.json"), config());
  ASSERT_EQ(merged.exit_code, kExitOk) << merged.message;
  EXPECT_EQ(merged.metrics.interface_states, 2u);
}

TEST(RunLearn, PurposeMakesTheCounterLearnable) {
  for (auto kind : {OracleKind::dist, OracleKind::perfect}) {
    auto c = config(kind);
    c.purpose = load_purpose_spec(fixtures::model_path("one_pending.purpose.json"));
    const auto o = run_learn(fixtures::model("request_response.json"), c);
    ASSERT_EQ(o.exit_code, kExitOk) << o.message;
    ASSERT_TRUE(o.automaton);
    EXPECT_EQ(o.metrics.interface_states, 2u);
    const auto& a = *o.automaton;
    const auto& e = edges(a);
    const auto idle = a.state_name(a.initial());
    std::string pending;
    for (const auto& [from, label, to] : e)
      if (from == idle && label == "getSuggestion") pending = to;
    ASSERT_FALSE(pending.empty());
    EXPECT_NE(pending, idle);
    EXPECT_TRUE(e.count({pending, "onGetSuggestions", idle}));
  }
}

TEST(RunLearn, CounterWithoutPurposeFails) {
  auto perfect = config(OracleKind::perfect);
  perfect.eq_cap = 20;
  EXPECT_EQ(run_learn(fixtures::model("request_response.json"), perfect).exit_code, kExitBudget);
  EXPECT_EQ(run_learn(fixtures::model("request_response.json"), config()).exit_code,
            kExitVerifyFailed);
}

TEST(RunLearn, OracleKindsAndBounds) {
  auto sb = config(OracleKind::state_bound);
  sb.bounds.b_state = 3;
  const auto s = run_learn(fixtures::model("tiny.json"), sb);
  ASSERT_EQ(s.exit_code, kExitOk) << s.message;
  EXPECT_EQ(s.metrics.b_dist_used, 2u);
  const auto p = run_learn(fixtures::model("tiny.json"), config(OracleKind::perfect));
  ASSERT_EQ(p.exit_code, kExitOk);
  EXPECT_FALSE(p.metrics.b_dist_used);
  auto d = config();
  d.bounds.b_dist = 1;
  EXPECT_EQ(run_learn(fixtures::model("tiny.json"), d).metrics.b_dist_used, 1u);
}

TEST(RunLearn, StateBoundOverBudgetExits) {
  auto sb = config(OracleKind::state_bound);
  sb.bounds.b_state = 12;
  EXPECT_EQ(run_learn(fixtures::model("mediaplayer.json"), sb).exit_code, kExitBudget);
}

TEST(RunCompare, TinyRunsBothOracles) {
  const auto r = run_compare(fixtures::model("tiny.json"), config());
  EXPECT_TRUE(r.state_ran);
  EXPECT_EQ(r.dist_verdict, "correct");
  EXPECT_EQ(r.state_verdict, "correct");
  EXPECT_LE(r.dist_executed_per_eq_max, r.dist_theoretical);
  ASSERT_TRUE(r.state_executed_per_eq_max);
  EXPECT_LE(*r.state_executed_per_eq_max, r.state_theoretical);
  const auto j = compare_to_json(r);
  EXPECT_EQ(j["state_bound"]["ran"], true);
}

TEST(RunCompare, MediaPlayerStateBoundIsInfeasible) {
  const auto r = run_compare(fixtures::model("mediaplayer.json"), config());
  EXPECT_FALSE(r.state_ran);
  EXPECT_EQ(r.state_verdict, "not run");
  EXPECT_GT(r.state_theoretical, 1e8L);
  EXPECT_LT(r.dist_executed, 100000u);
  EXPECT_GT(r.ratio, 1e3L);
  EXPECT_EQ(r.dist_verdict, "correct");
  EXPECT_LE(r.dist_executed_per_eq_max, r.dist_theoretical);
  EXPECT_TRUE(compare_to_json(r)["state_bound"]["executed"].is_null());
}

TEST(Cli, LearnWritesArtifacts) {
  const auto dir = scratch("learn");
  ASSERT_EQ(cli("learn " + model_arg("asynctask.json") + " --out-dir " + (dir / "out").string(),
                dir / "stdout"),
            kExitOk)
      << slurp(dir / "stdout");
  for (auto f : {"metrics.json", "learned.json", "learned.dot", "learned_mealy.json"})
    EXPECT_TRUE(fs::exists(dir / "out" / f)) << f;
  const auto metrics = parse_json_text(slurp(dir / "out" / "metrics.json"), "metrics");
  EXPECT_EQ(metrics["interface_states"], 5);
  const auto learned = parse_interface_automaton(read_json_file((dir / "out" / "learned.json").string()));
  EXPECT_EQ(edges(learned), edges(fixtures::automaton("asynctask.json")));
  EXPECT_EQ(slurp(dir / "out" / "learned.dot"), export_dot(learned));
}

TEST(Cli, DotOutputIsByteIdentical) {
  const auto dir = scratch("dot");
  ASSERT_EQ(cli("learn " + model_arg("mediaplayer.json") + " --out-dir " + (dir / "a").string(),
                dir / "s1"),
            kExitOk);
  ASSERT_EQ(cli("learn " + model_arg("mediaplayer.json") + " --out-dir " + (dir / "b").string(),
                dir / "s2"),
            kExitOk);
  EXPECT_EQ(slurp(dir / "a" / "learned.dot"), slurp(dir / "b" / "learned.dot"));
}

TEST(Cli, ExitCodes) {
  const auto dir = scratch("codes");
  const auto out = dir / "out";
  EXPECT_EQ(cli("learn", out), kExitUsage);
  EXPECT_EQ(cli("learn --model /nonexistent.json", out), kExitUsage);
  EXPECT_EQ(cli("learn " + model_arg("tiny.json") + " --oracle magic", out), kExitUsage);
  EXPECT_EQ(cli("learn " + model_arg("speech_recognizer.json"), out), kExitNonDeterminism);
  EXPECT_NE(slurp(out).find("non-deterministic"), std::string::npos);
  EXPECT_EQ(cli("learn " + model_arg("request_response.json") + " --oracle perfect --eq-cap 20", out),
            kExitBudget);
  EXPECT_EQ(cli("learn " + model_arg("request_response.json"), out), kExitVerifyFailed);
  EXPECT_EQ(cli("learn " + model_arg("request_response.json") + " --purpose " +
                    fixtures::model_path("one_pending.purpose.json"),
                out),
            kExitOk);
  EXPECT_EQ(cli("learn " + model_arg("mediaplayer.json") + " --oracle state-bound --state-bound 12", out),
            kExitBudget);
}

TEST(Cli, CompareAndExport) {
  const auto dir = scratch("compare");
  ASSERT_EQ(cli("compare " + model_arg("tiny.json") + " --metrics " + (dir / "c.json").string(),
                dir / "out"),
            kExitOk);
  const auto j = parse_json_text(slurp(dir / "c.json"), "compare");
  EXPECT_EQ(j["dist"]["verdict"], "correct");
  EXPECT_EQ(j["state_bound"]["verdict"], "correct");
  ASSERT_EQ(cli("export " + model_arg("asynctask.json") + " --format dot", dir / "dot"), kExitOk);
  EXPECT_EQ(slurp(dir / "dot"), export_dot(fixtures::automaton("asynctask.json")));
  ASSERT_EQ(cli("export " + model_arg("tiny.json") + " --format closure", dir / "closure"), kExitOk);
  EXPECT_EQ(parse_mealy(parse_json_text(slurp(dir / "closure"), "closure")),
            fixtures::closure_of("tiny.json"));
}
