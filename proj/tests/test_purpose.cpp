#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "typestate/equivalence.hpp"
#include "typestate/io.hpp"
#include "typestate/learner.hpp"
#include "typestate/purpose.hpp"
#include "typestate/request_response.hpp"
#include "typestate/sul.hpp"

using namespace typestate;
using Names = std::vector<std::string>;

namespace {

PurposeSpec one_pending() { return load_purpose_spec(fixtures::model_path("one_pending.purpose.json")); }

CounterSemantics counter() { return CounterSemantics(fixtures::model("request_response.json")); }

PurposeSpec accept_all(const Alphabet& a) {
  PurposeSpec p{{"All"}, "All", {"All"}, {}};
  for (Input i = 0; i < a.input_count(); ++i) p.transitions.push_back({"All", a.input_name(i), "All"});
  return p;
}

Names run(MembershipOracle& o, std::initializer_list<std::string_view> w) {
  return output_names(o.alphabet(), o.query(parse_word(o.alphabet(), w)));
}

}  // namespace

TEST(PurposeFilter, SecondRequestIsOutOfPurpose) {
  SemanticsOracle inner(counter());
  PurposeFilter f(inner, one_pending());
  EXPECT_EQ(run(f, {"getSuggestion", "getSuggestion"}), (Names{"lambda", "oop"}));
  EXPECT_EQ(run(f, {"getSuggestion", "getSuggestion", "wait"}), (Names{"lambda", "oop", "oop"}));
  EXPECT_EQ(inner.asked(), 2u);
}

TEST(PurposeFilter, AcceptedWordsPassThrough) {
  SemanticsOracle inner(counter());
  PurposeFilter f(inner, one_pending());
  EXPECT_EQ(run(f, {"getSuggestion", "wait", "getSuggestion", "wait", "wait"}),
            (Names{"lambda", "onGetSuggestions", "lambda", "onGetSuggestions", "quiet"}));
}

TEST(PurposeFilter, AlphabetGainsOop) {
  SemanticsOracle inner(counter());
  PurposeFilter f(inner, one_pending());
  EXPECT_FALSE(inner.alphabet().oop());
  ASSERT_TRUE(f.alphabet().oop());
  EXPECT_TRUE(f.alphabet().is_absorbing(*f.alphabet().oop()));
  EXPECT_EQ(f.alphabet().input_count(), inner.alphabet().input_count());
}

TEST(PurposeFilter, IdentityPurposeChangesNothing) {
  const auto m = fixtures::closure_of("mediaplayer.json");
  MealyOracle inner(m);
  PurposeFilter f(inner, accept_all(m.alphabet()));
  for (const auto& w : fixtures::all_words(m.input_count(), 3)) ASSERT_EQ(f.query(w), inner.query(w));
}

TEST(PurposeFilter, RejectedStartNeverReachesTheSystem) {
  SemanticsOracle inner(counter());
  PurposeSpec p{{"Start", "Dead"}, "Dead", {"Start"}, {}};
  PurposeFilter f(inner, p);
  EXPECT_EQ(run(f, {"wait", "getSuggestion"}), (Names{"oop", "oop"}));
  EXPECT_EQ(inner.asked(), 0u);
}

TEST(PurposeFilter, PeekDefersToTheInnerCache) {
  SemanticsOracle sys(counter());
  QueryCache cache(sys);
  PurposeFilter f(cache, one_pending());
  const auto& a = f.alphabet();
  const auto w = parse_word(a, {"getSuggestion", "getSuggestion", "wait"});
  EXPECT_FALSE(f.peek(w));
  f.query(w);
  EXPECT_TRUE(f.peek(w));
  EXPECT_EQ(f.executed(), 1u);
}

TEST(PurposeSemantics, AgreesWithTheFilter) {
  PurposeSemantics<CounterSemantics> truth(counter(), one_pending());
  SemanticsOracle inner(counter());
  PurposeFilter f(inner, one_pending());
  ASSERT_EQ(truth.alphabet(), f.alphabet());
  for (std::size_t n = 1; n <= 7; ++n)
    for (const auto& w : fixtures::all_words(f.alphabet().input_count(), n))
      ASSERT_EQ(semantics_output(truth, w), f.query(w));
}

TEST(PurposeSemantics, IsFinite) {
  PurposeSemantics<CounterSemantics> truth(counter(), one_pending());
  const auto m = minimize(explore(truth).first);
  EXPECT_EQ(m.state_count(), 3u);
}

TEST(PurposeLearning, LearnsTheBoundedFragment) {
  PurposeSemantics<CounterSemantics> truth(counter(), one_pending());
  SemanticsOracle sys(counter());
  QueryCache cache(sys);
  PurposeFilter f(cache, one_pending());
  DistEquivalenceOracle eq(f, kDefaultDistinguisherBound);
  const auto r = lstar(f, eq);
  EXPECT_EQ(r.hypothesis.machine.state_count(), 3u);
  SemanticsEquivalenceOracle<PurposeSemantics<CounterSemantics>> exact(truth);
  EXPECT_TRUE(exact.find_counterexample(r.hypothesis).correct());
}

TEST(LearningPurpose, AcceptedPrefix) {
  const auto a = counter().alphabet();
  LearningPurpose p(one_pending(), a);
  EXPECT_EQ(p.accepted_prefix(parse_word(a, {"getSuggestion", "wait", "getSuggestion"})), 3u);
  EXPECT_EQ(p.accepted_prefix(parse_word(a, {"getSuggestion", "getSuggestion", "wait"})), 1u);
  EXPECT_EQ(p.accepted_prefix(Word{}), 0u);
  EXPECT_EQ(p.state_count(), 2u);
  EXPECT_TRUE(p.rejecting(p.reject()));
  EXPECT_EQ(p.next(p.reject(), 0), p.reject());
}

TEST(LearningPurpose, ValidationErrors) {
  const auto a = counter().alphabet();
  auto bad = [&](PurposeSpec s) { EXPECT_THROW(LearningPurpose(s, a), ModelError); };
  bad({{}, "A", {}, {}});
  bad({{"A", "A"}, "A", {"A"}, {}});
  bad({{"A"}, "B", {"A"}, {}});
  bad({{"A"}, "A", {"B"}, {}});
  bad({{"A"}, "A", {"A"}, {{"A", "nope", "A"}}});
  bad({{"A", "B"}, "A", {"A", "B"}, {{"A", "wait", "A"}, {"A", "wait", "B"}}});
  // A rejecting state must not lead back into the accepted region.
  bad({{"A", "R"}, "A", {"A"}, {{"A", "wait", "R"}, {"R", "wait", "A"}}});
  EXPECT_NO_THROW(LearningPurpose(PurposeSpec({{"A", "R"}, "A", {"A"}, {{"A", "wait", "R"}}}), a));
}

TEST(PurposeJson, ParsesAndRejectsUnknownFields) {
  auto j = read_json_file(fixtures::model_path("one_pending.purpose.json"));
  const auto p = parse_purpose_spec(j);
  EXPECT_EQ(p.states, (Names{"Idle", "Pending"}));
  EXPECT_EQ(p.transitions.size(), 3u);
  EXPECT_EQ(p.transitions[0].input, "getSuggestion");
  j["priority"] = 3;
  EXPECT_THROW(parse_purpose_spec(j), ModelError);
  auto k = read_json_file(fixtures::model_path("one_pending.purpose.json"));
  k["kind"] = "interface-automaton";
  EXPECT_THROW(parse_purpose_spec(k), ModelError);
}
