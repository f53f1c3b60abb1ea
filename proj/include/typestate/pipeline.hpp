#pragma once

#include <chrono>
#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "typestate/analysis.hpp"
#include "typestate/closure.hpp"
#include "typestate/convert.hpp"
#include "typestate/equivalence.hpp"
#include "typestate/io.hpp"
#include "typestate/learner.hpp"
#include "typestate/model.hpp"
#include "typestate/purpose.hpp"
#include "typestate/request_response.hpp"
#include "typestate/sul.hpp"

namespace typestate {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitNonDeterminism = 2,
  kExitBudget = 3,
  kExitVerifyFailed = 4,
};

enum class OracleKind { dist, state_bound, perfect };

inline std::optional<OracleKind> parse_oracle_kind(std::string_view s) {
  if (s == "dist") return OracleKind::dist;
  if (s == "state-bound") return OracleKind::state_bound;
  if (s == "perfect") return OracleKind::perfect;
  return std::nullopt;
}

struct LearnConfig {
  OracleKind oracle = OracleKind::dist;
  Bounds bounds;
  std::optional<PurposeSpec> purpose;
  /// Replaces the seed of the model's nondet fixture.
  std::optional<std::uint64_t> seed;
  std::uint64_t eq_cap = 100;
  long double word_budget = kDefaultWordBudget;
  /// Product states a ground-truth search may visit on infinite models.
  std::size_t search_cap = 1u << 16;
};

struct Metrics {
  std::size_t interface_states = 0;
  std::size_t mealy_states = 0;
  double time_ms = 0;
  std::uint64_t mq_asked = 0;
  std::uint64_t mq_executed = 0;
  std::uint64_t eq = 0;
  double mq_per_eq_avg = 0;
  std::uint64_t mq_per_eq_max = 0;
  std::optional<std::size_t> b_dist_used;
  std::size_t b_dist_needed = 0;
};

inline Json metrics_to_json(const Metrics& m) {
  Json j;
  j["interface_states"] = m.interface_states;
  j["mealy_states"] = m.mealy_states;
  j["time_ms"] = m.time_ms;
  j["mq_asked"] = m.mq_asked;
  j["mq_executed"] = m.mq_executed;
  j["eq"] = m.eq;
  j["mq_per_eq_avg"] = m.mq_per_eq_avg;
  j["mq_per_eq_max"] = m.mq_per_eq_max;
  j["b_dist_used"] = m.b_dist_used ? Json(*m.b_dist_used) : Json(nullptr);
  j["b_dist_needed"] = m.b_dist_needed;
  return j;
}

/// Ground truth of a model: a finite closure machine (minimized, with named
/// states) or, for the unbounded request/response fixture without a purpose,
/// the counter semantics itself.
struct GroundTruth {
  std::optional<MealyMachine> machine;
  std::optional<CounterSemantics> counter;
};

namespace detail {

template <ClosedSemantics S, class Name>
MealyMachine named_exploration(const S& s, Name&& name) {
  auto [m, states] = explore(s);
  std::vector<std::string> names;
  for (const auto& q : states) names.push_back(name(q));
  return MealyMachine(m.alphabet(), m.initial(), m.delta_table(), m.output_table(),
                      std::move(names));
}

inline std::string purpose_state_name(const PurposeSpec& p, StateId q) {
  return q < p.states.size() ? p.states[q] : std::string("reject");
}

}  // namespace detail

/// Throws ModelError when the model is not deterministic.
inline GroundTruth ground_truth(const ModelSpec& spec, const std::optional<PurposeSpec>& purpose) {
  GroundTruth t;
  if (spec.is_request_response()) {
    CounterSemantics c(spec);
    auto count = [](std::uint64_t n) { return std::to_string(n) + " pending"; };
    if (!purpose) {
      t.counter = c;
      return t;
    }
    PurposeSemantics<CounterSemantics> ps(c, *purpose);
    t.machine = minimize(detail::named_exploration(ps, [&](const auto& q) {
      if (q.second == purpose->states.size()) return std::string("out of purpose");
      return count(q.first) + " @ " + detail::purpose_state_name(*purpose, q.second);
    }));
    return t;
  }
  const auto ia = spec.to_interface_automaton();
  ClosureSemantics cs(ia);
  auto name = [&](StateId q) { return q == cs.sink() ? std::string(kErr) : ia.state_name(q); };
  if (!purpose) {
    t.machine = minimize(detail::named_exploration(cs, name));
  } else {
    PurposeSemantics<ClosureSemantics> ps(cs, *purpose);
    t.machine = minimize(detail::named_exploration(ps, [&](const auto& q) {
      if (q.second == purpose->states.size()) return std::string("out of purpose");
      return name(q.first) + " @ " + detail::purpose_state_name(*purpose, q.second);
    }));
  }
  return t;
}

/// Verification verdict: nullopt when `h` is trace-equivalent to the truth,
/// otherwise a word on which they differ (empty when the search gave up).
inline std::optional<Word> verify(const MealyMachine& h, const GroundTruth& t,
                                  std::size_t search_cap = 1u << 16) {
  if (t.machine) {
    if (!(h.alphabet() == t.machine->alphabet())) return Word{};
    return traces_equal(h, *t.machine);
  }
  auto r = first_difference(MealySemantics(h), *t.counter, search_cap);
  if (auto* w = std::get_if<Word>(&r)) return *w;
  if (std::holds_alternative<SearchExhausted>(r)) return Word{};
  return std::nullopt;
}

/// Copy of `h` whose states carry the name of an equivalent truth state.
inline MealyMachine name_after(const MealyMachine& h, const MealyMachine& truth) {
  std::vector<std::optional<std::string>> names(h.state_count());
  std::vector<std::pair<StateId, StateId>> queue{{h.initial(), truth.initial()}};
  names[h.initial()] = truth.state_name(truth.initial());
  for (std::size_t k = 0; k < queue.size(); ++k) {
    const auto [p, q] = queue[k];
    for (Input i = 0; i < h.input_count(); ++i) {
      const auto np = h.next(p, i);
      if (names[np]) continue;
      const auto nq = truth.next(q, i);
      names[np] = truth.state_name(nq);
      queue.emplace_back(np, nq);
    }
  }
  std::vector<std::string> out;
  for (StateId q = 0; q < h.state_count(); ++q) out.push_back(names[q].value_or(h.state_name(q)));
  return MealyMachine(h.alphabet(), h.initial(), h.delta_table(), h.output_table(),
                      std::move(out));
}

/// Simulated system and the oracle stack in front of it:
/// simulator -> closure -> cache [-> purpose filter].
class OracleStack {
 public:
  OracleStack(const ModelSpec& spec, const std::optional<PurposeSpec>& purpose) {
    if (spec.is_request_response()) sul_ = std::make_unique<RequestResponseSimulator>(spec);
    else sul_ = std::make_unique<Simulator>(spec);
    closure_ = std::make_unique<ClosureOracle>(*sul_);
    cache_ = std::make_unique<QueryCache>(*closure_);
    if (purpose) filter_ = std::make_unique<PurposeFilter>(*cache_, *purpose);
  }

  MembershipOracle& top() { return filter_ ? static_cast<MembershipOracle&>(*filter_) : *cache_; }
  QueryCache& cache() { return *cache_; }

 private:
  std::unique_ptr<AsyncInterface> sul_;
  std::unique_ptr<ClosureOracle> closure_;
  std::unique_ptr<QueryCache> cache_;
  std::unique_ptr<PurposeFilter> filter_;
};

/// Model after its own refinement block and the seed override.
inline ModelSpec prepare_model(const ModelSpec& spec, const LearnConfig& c) {
  ModelSpec m = spec.refinement ? apply_refinement(spec, *spec.refinement) : spec;
  if (c.seed && m.nondet) m.nondet->seed = *c.seed;
  return m;
}

struct LearnOutcome {
  int exit_code = kExitOk;
  std::string message;
  std::optional<NonDeterminismReport> nondeterminism;
  std::optional<MealyMachine> mealy;
  std::optional<InterfaceAutomaton> automaton;
  std::optional<LStarResult> lstar;
  Metrics metrics;
  bool verified = false;
};

/// Full pipeline: simulator, closure, L*, equivalence oracle, conversion,
/// post-hoc verification against the model's ground truth.
inline LearnOutcome run_learn(const ModelSpec& raw, const LearnConfig& c) {
  LearnOutcome out;
  const auto start = std::chrono::steady_clock::now();
  const auto spec = prepare_model(raw, c);
  std::optional<GroundTruth> truth;
  try {
    truth = ground_truth(spec, c.purpose);
  } catch (const ModelError&) {
    if (!spec.nondet) throw;
  }

  OracleStack stack(spec, c.purpose);
  auto& mq = stack.top();
  std::unique_ptr<EquivalenceOracle> eq;
  switch (c.oracle) {
    case OracleKind::dist: {
      const auto b = c.bounds.distinguisher().value_or(kDefaultDistinguisherBound);
      out.metrics.b_dist_used = b;
      eq = std::make_unique<DistEquivalenceOracle>(mq, b);
      break;
    }
    case OracleKind::state_bound: {
      auto b_state = c.bounds.b_state;
      if (!b_state && truth && truth->machine) b_state = truth->machine->state_count();
      if (!b_state) throw ModelError("the state-bound oracle needs --state-bound for this model");
      out.metrics.b_dist_used = *b_state == 0 ? 0 : *b_state - 1;
      eq = std::make_unique<StateBoundEquivalenceOracle>(mq, *b_state, c.word_budget);
      break;
    }
    case OracleKind::perfect:
      if (!truth) throw ModelError("the perfect oracle needs a deterministic model");
      if (truth->machine) eq = std::make_unique<PerfectEquivalenceOracle>(*truth->machine);
      else eq = std::make_unique<SemanticsEquivalenceOracle<CounterSemantics>>(*truth->counter,
                                                                               c.search_cap);
      break;
  }

  auto finish = [&] {
    out.metrics.mq_asked = mq.asked();
    out.metrics.mq_executed = mq.executed();
    out.metrics.time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
  };
  try {
    LStarOptions opts;
    opts.eq_cap = c.eq_cap;
    out.lstar = lstar(mq, *eq, opts);
  } catch (const NonDeterminismError& e) {
    out.exit_code = kExitNonDeterminism;
    out.message = e.what();
    out.nondeterminism = e.report();
    finish();
    return out;
  } catch (const InconsistentCounterexample& e) {
    out.exit_code = kExitNonDeterminism;
    out.message = e.what();
    finish();
    return out;
  } catch (const BudgetExceeded& e) {
    out.exit_code = kExitBudget;
    out.message = e.what();
    finish();
    return out;
  }
  finish();

  const auto& r = *out.lstar;
  auto h = r.hypothesis.machine;
  out.metrics.mealy_states = h.state_count();
  out.metrics.eq = r.eq;
  std::uint64_t total = 0;
  for (const auto& round : r.rounds) {
    total += round.asked;
    out.metrics.mq_per_eq_max = std::max(out.metrics.mq_per_eq_max, round.asked);
  }
  out.metrics.mq_per_eq_avg = r.eq ? static_cast<double>(total) / static_cast<double>(r.eq) : 0;
  out.metrics.b_dist_needed = distinguisher_bound(minimize(h)).bound;

  std::optional<Word> diff = Word{};
  if (truth) diff = verify(h, *truth, c.search_cap);
  if (!diff) {
    out.verified = true;
    if (truth->machine) h = name_after(h, *truth->machine);
  }
  out.mealy = h;
  try {
    out.automaton = mealy_to_interface_automaton(h);
    out.metrics.interface_states = out.automaton->state_count();
  } catch (const ModelError& e) {
    out.verified = false;
    out.message = std::string("learned machine is not a closure: ") + e.what();
  }
  if (!out.verified) {
    out.exit_code = kExitVerifyFailed;
    if (out.message.empty()) {
      if (!truth) out.message = "no deterministic ground truth to verify against";
      else if (diff->empty()) out.message = "verification was inconclusive";
      else
        out.message = "learned machine differs from the model on [" +
                      join(input_names(h.alphabet(), *diff), " ") + "]";
    }
  }
  return out;
}

/// Dist-oracle versus state-bound-oracle query cost on one model.
struct CompareReport {
  std::size_t closure_states = 0;
  std::size_t inputs = 0;
  std::size_t b_dist = 0;
  std::size_t b_state = 0;
  long double dist_theoretical = 0;
  std::uint64_t dist_executed = 0;
  std::uint64_t dist_executed_per_eq_max = 0;
  std::string dist_verdict;
  long double state_theoretical = 0;
  bool state_ran = false;
  std::optional<std::uint64_t> state_executed;
  std::optional<std::uint64_t> state_executed_per_eq_max;
  std::string state_verdict;
  long double ratio = 0;
};

inline Json compare_to_json(const CompareReport& r) {
  Json j;
  j["closure_states"] = r.closure_states;
  j["inputs"] = r.inputs;
  j["dist"] = {{"b_dist", r.b_dist},
               {"theoretical_per_eq", static_cast<double>(r.dist_theoretical)},
               {"executed", r.dist_executed},
               {"executed_per_eq_max", r.dist_executed_per_eq_max},
               {"verdict", r.dist_verdict}};
  Json s = {{"b_state", r.b_state},
            {"theoretical_per_eq", static_cast<double>(r.state_theoretical)},
            {"ran", r.state_ran}};
  s["executed"] = r.state_executed ? Json(*r.state_executed) : Json(nullptr);
  s["executed_per_eq_max"] =
      r.state_executed_per_eq_max ? Json(*r.state_executed_per_eq_max) : Json(nullptr);
  s["verdict"] = r.state_verdict;
  j["state_bound"] = s;
  j["ratio"] = static_cast<double>(r.ratio);
  return j;
}

namespace detail {
inline std::string verdict_of(const LearnOutcome& o) {
  switch (o.exit_code) {
    case kExitOk: return "correct";
    case kExitVerifyFailed: return "incorrect";
    case kExitBudget: return "over budget";
    case kExitNonDeterminism: return "non-deterministic";
    default: return "error";
  }
}
inline std::uint64_t max_executed(const LearnOutcome& o) {
  std::uint64_t m = 0;
  if (o.lstar)
    for (const auto& r : o.lstar->rounds) m = std::max(m, r.executed);
  return m;
}
}  // namespace detail

/// Theoretical per-call costs use the size of the model's closure: the dist
/// oracle runs at most |Q|·|Σ|^(b_dist+1) words, the state-bound oracle
/// |Σ|^(|Q| + b_state - 1). The state-bound oracle only runs when that count
/// fits the word budget.
inline CompareReport run_compare(const ModelSpec& raw, const LearnConfig& c) {
  const auto spec = prepare_model(raw, c);
  const auto truth = ground_truth(spec, c.purpose);
  if (!truth.machine) throw ModelError("compare needs a finite model");
  CompareReport r;
  const auto& m = *truth.machine;
  r.closure_states = m.state_count();
  r.inputs = m.input_count();
  r.b_state = c.bounds.b_state.value_or(m.state_count());
  r.b_dist = c.bounds.b_dist.value_or(r.b_state == 0 ? 0 : r.b_state - 1);
  if (!c.bounds.b_dist && !c.bounds.b_state) r.b_dist = kDefaultDistinguisherBound;
  r.dist_theoretical = static_cast<long double>(r.closure_states) *
                       std::pow(static_cast<long double>(r.inputs),
                                static_cast<long double>(r.b_dist + 1));
  r.state_theoretical = state_bound_word_count(r.inputs, r.closure_states, r.b_state);

  LearnConfig dc = c;
  dc.oracle = OracleKind::dist;
  dc.bounds = Bounds{r.b_dist, std::nullopt};
  const auto d = run_learn(raw, dc);
  r.dist_executed = d.metrics.mq_executed;
  r.dist_executed_per_eq_max = detail::max_executed(d);
  r.dist_verdict = detail::verdict_of(d);

  if (r.state_theoretical <= c.word_budget) {
    LearnConfig sc = c;
    sc.oracle = OracleKind::state_bound;
    sc.bounds = Bounds{std::nullopt, r.b_state};
    const auto s = run_learn(raw, sc);
    r.state_ran = true;
    r.state_executed = s.metrics.mq_executed;
    r.state_executed_per_eq_max = detail::max_executed(s);
    r.state_verdict = detail::verdict_of(s);
  } else {
    r.state_verdict = "not run";
  }
  r.ratio = r.dist_executed ? r.state_theoretical / static_cast<long double>(r.dist_executed) : 0;
  return r;
}

}  // namespace typestate
