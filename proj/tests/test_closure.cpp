#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "typestate/closure.hpp"
#include "typestate/generators.hpp"
#include "typestate/sul.hpp"

using namespace typestate;
using fixtures::closure_of;
using fixtures::outputs;
using Names = std::vector<std::string>;

namespace {

const char* const kBenchmarks[] = {"asynctask.json", "mediaplayer.json",
                                   "sqlite_open_helper_refined.json",
                                   "speech_recognizer_merged.json", "tiny.json"};

}  // namespace

TEST(Closure, MediaPlayerAsyncPrepareThenQuiescence) {
  const auto m = closure_of("mediaplayer.json");
  EXPECT_EQ(outputs(m, {"setDataSource", "prepareAsync", "wait", "wait"}),
            (Names{"lambda", "lambda", "onPrepared", "quiet"}));
  EXPECT_EQ(outputs(m, {"setDataSource", "prepareAsync", "wait", "wait", "wait"}).back(), "quiet");
}

TEST(Closure, MediaPlayerDisabledCallinPoisonsTheRest) {
  const auto m = closure_of("mediaplayer.json");
  EXPECT_EQ(outputs(m, {"start"}), (Names{"err"}));
  EXPECT_EQ(outputs(m, {"start", "setDataSource"}), (Names{"err", "err"}));
}

TEST(Closure, AsyncTaskCancelPaths) {
  const auto m = closure_of("asynctask.json");
  EXPECT_EQ(outputs(m, {"execute", "cancel", "wait"}), (Names{"lambda", "lambda", "onCancelled"}));
  EXPECT_EQ(outputs(m, {"cancel", "execute", "wait", "wait"}),
            (Names{"lambda", "lambda", "onCancelled", "quiet"}));
  EXPECT_EQ(outputs(m, {"execute", "execute"}), (Names{"lambda", "err"}));
}

TEST(Closure, QuiescentInitialStateAnswersQuiet) {
  EXPECT_EQ(outputs(closure_of("asynctask.json"), {"wait"}), (Names{"quiet"}));
}

TEST(Closure, StateMapAndSink) {
  const auto ia = fixtures::automaton("asynctask.json");
  const auto c = closure(ia);
  ASSERT_EQ(c.machine.state_count(), 6u);
  EXPECT_EQ(c.err_sink, 5u);
  EXPECT_FALSE(c.state_map[c.err_sink].source);
  EXPECT_EQ(c.machine.state_name(c.err_sink), "err");
  EXPECT_TRUE(is_sink(c.machine, c.err_sink, *c.machine.alphabet().err()));
  // Start has nothing pending, Running has onPostExecute pending.
  EXPECT_FALSE(c.state_map[0].pending);
  EXPECT_TRUE(c.state_map[1].pending);
  EXPECT_EQ(ia.state_name(*c.state_map[1].source), "Running");
}

TEST(Closure, ExactlyOneSinkAndSizeBound) {
  for (auto file : kBenchmarks) {
    const auto ia = fixtures::automaton(file);
    const auto c = closure(ia);
    EXPECT_LE(c.machine.state_count(), 2 * ia.state_count() + 1) << file;
    const auto err = *c.machine.alphabet().err();
    std::size_t sinks = 0;
    for (StateId q = 0; q < c.machine.state_count(); ++q) sinks += is_sink(c.machine, q, err);
    EXPECT_EQ(sinks, 1u) << file;
    EXPECT_NO_THROW(check_err_sink(c.machine)) << file;
  }
}

TEST(Closure, ErasingReservedSymbolsGivesSourceTraces) {
  for (auto file : kBenchmarks) {
    const auto ia = fixtures::automaton(file);
    const auto m = closure(ia).machine;
    const auto& alpha = m.alphabet();
    for (std::size_t n = 1; n <= 4; ++n)
      for (const auto& w : fixtures::all_words(m.input_count(), n)) {
        const auto out = mealy_output(m, w);
        if (std::find(out.begin(), out.end(), *alpha.err()) != out.end()) continue;
        StateId q = ia.initial();
        for (std::size_t k = 0; k < w.size(); ++k) {
          std::optional<StateId> to;
          if (w[k] != *alpha.wait()) {
            to = ia.next(q, Label{LabelKind::input, w[k]});
            ASSERT_TRUE(to) << file;
          } else if (out[k] != *alpha.quiet()) {
            to = ia.next(q, Label{LabelKind::output, out[k]});
            ASSERT_TRUE(to) << file;
          } else {
            to = q;
          }
          q = *to;
        }
      }
  }
}

TEST(ClosureOracle, EmptyWord) {
  AutomatonInterface sul(fixtures::automaton("asynctask.json"));
  ClosureOracle oracle(sul);
  EXPECT_TRUE(oracle.query(Word{}).empty());
}

TEST(ClosureOracle, AgreesWithClosureMachineUpToLengthSix) {
  for (auto file : {"asynctask.json", "tiny.json", "speech_recognizer_merged.json"}) {
    const auto ia = fixtures::automaton(file);
    const auto m = closure(ia).machine;
    AutomatonInterface sul(ia);
    ClosureOracle oracle(sul);
    for (const auto& w : fixtures::all_words(m.input_count(), 6))
      ASSERT_EQ(oracle.query(w), mealy_output(m, w)) << file;
  }
}

TEST(ClosureOracle, SimulatorAgreesWithClosureMachine) {
  for (auto file : kBenchmarks) {
    auto spec = fixtures::model(file);
    if (spec.refinement) spec = apply_refinement(spec, *spec.refinement);
    const auto m = closure(spec.to_interface_automaton()).machine;
    Simulator sim(spec);
    ClosureOracle oracle(sim);
    for (const auto& w : fixtures::all_words(m.input_count(), 6))
      ASSERT_EQ(oracle.query(w), mealy_output(m, w)) << file;
  }
}

TEST(ClosureOracle, RandomAutomata) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto ia = random_interface_automaton(4, 2, 2, seed);
    const auto m = closure(ia).machine;
    AutomatonInterface sul(ia);
    ClosureOracle oracle(sul);
    for (const auto& w : fixtures::all_words(m.input_count(), 5))
      ASSERT_EQ(oracle.query(w), mealy_output(m, w)) << "seed " << seed;
  }
}
