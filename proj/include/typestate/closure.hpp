#pragma once

#include <deque>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "typestate/alphabet.hpp"
#include "typestate/interface_automaton.hpp"
#include "typestate/mealy.hpp"
#include "typestate/oracle.hpp"

namespace typestate {

/// Synchronous-closure semantics of an interface automaton, one step at a
/// time. States are source states plus a sentinel err-sink.
///
///   enabled callin i        -> lambda, follow i
///   disabled callin i       -> err, enter the sink
///   wait, pending callback  -> the callback, follow it
///   wait, quiescent         -> quiet, stay
///   anything in the sink    -> err, stay
class ClosureSemantics {
 public:
  using State = StateId;

  explicit ClosureSemantics(const InterfaceAutomaton& a)
      : a_(&a), alphabet_(Alphabet::closed(a.inputs(), a.outputs())) {}

  const Alphabet& alphabet() const { return alphabet_; }
  State initial() const { return a_->initial(); }
  State sink() const { return static_cast<State>(a_->state_count()); }

  std::pair<Output, State> step(State q, Input i) const {
    const auto err = *alphabet_.err();
    if (q == sink()) return {err, q};
    if (i == *alphabet_.wait()) {
      if (auto t = a_->pending_output(q)) return {t->label.index, t->to};
      return {*alphabet_.quiet(), q};
    }
    if (auto to = a_->next(q, Label{LabelKind::input, i}))
      return {*alphabet_.lambda(), *to};
    return {err, sink()};
  }

 private:
  const InterfaceAutomaton* a_;
  Alphabet alphabet_;
};

/// Source of a closure state: the interface state it stands for and whether a
/// callback is pending there; the err-sink has no source.
struct ClosureState {
  std::optional<StateId> source;
  bool pending = false;
};

struct ClosureResult {
  MealyMachine machine;
  std::vector<ClosureState> state_map;
  StateId err_sink = 0;
};

/// Synchronous closure as a Mealy machine. Reachable source states come first
/// in breadth-first order; the err-sink is always the last state.
inline ClosureResult closure(const InterfaceAutomaton& a) {
  const ClosureSemantics sem(a);
  const auto& alpha = sem.alphabet();
  std::vector<StateId> order{a.initial()};
  std::vector<std::optional<StateId>> id(a.state_count());
  id[a.initial()] = 0;
  for (std::size_t k = 0; k < order.size(); ++k)
    for (Input i = 0; i < alpha.input_count(); ++i) {
      auto next = sem.step(order[k], i).second;
      if (next == sem.sink() || id[next]) continue;
      id[next] = static_cast<StateId>(order.size());
      order.push_back(next);
    }
  const auto sink = static_cast<StateId>(order.size());
  MealyBuilder b(alpha, order.size() + 1);
  ClosureResult r;
  std::vector<std::string> names;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto q = order[k];
    names.push_back(a.state_name(q));
    r.state_map.push_back({q, a.pending_output(q).has_value()});
    for (Input i = 0; i < alpha.input_count(); ++i) {
      auto [o, next] = sem.step(q, i);
      b.set(static_cast<StateId>(k), i, o, next == sem.sink() ? sink : *id[next]);
    }
  }
  names.emplace_back(kErr);
  r.state_map.push_back({std::nullopt, false});
  for (Input i = 0; i < alpha.input_count(); ++i) b.set(sink, i, *alpha.err(), sink);
  r.machine = b.names(std::move(names)).build();
  r.err_sink = sink;
  return r;
}

/// Membership oracle of an asynchronous interface (callins in, callbacks out)
/// under observable quiescence.
class AsyncInterface {
 public:
  virtual ~AsyncInterface() = default;

  virtual const std::vector<std::string>& callins() const = 0;
  virtual const std::vector<std::string>& callbacks() const = 0;

  /// Fresh, isolated instance.
  virtual void reset() = 0;
  /// Invokes a callin; false if the callin is not enabled.
  virtual bool invoke(std::uint32_t callin) = 0;
  /// Waits for the next callback; nullopt once the instance is quiescent.
  virtual std::optional<std::uint32_t> await_callback() = 0;
};

/// Lifts an asynchronous interface to its synchronous closure: one output per
/// input, `wait` observes callbacks or quiescence, disabled callins poison the
/// rest of the query with err.
class ClosureOracle final : public MembershipOracle {
 public:
  explicit ClosureOracle(AsyncInterface& inner)
      : inner_(&inner), alphabet_(Alphabet::closed(inner.callins(), inner.callbacks())) {}

  const Alphabet& alphabet() const override { return alphabet_; }

 protected:
  OutputWord answer(std::span<const Input> w) override {
    OutputWord out;
    out.reserve(w.size());
    if (w.empty()) return out;
    const auto wait = *alphabet_.wait();
    const auto err = *alphabet_.err();
    inner_->reset();
    bool failed = false;
    for (auto i : w) {
      if (i >= alphabet_.input_count())
        throw InputDomainError("input index outside the closed alphabet");
      if (failed) {
        out.push_back(err);
      } else if (i == wait) {
        auto cb = inner_->await_callback();
        out.push_back(cb ? *cb : *alphabet_.quiet());
      } else if (inner_->invoke(i)) {
        out.push_back(*alphabet_.lambda());
      } else {
        failed = true;
        out.push_back(err);
      }
    }
    return out;
  }

 private:
  AsyncInterface* inner_;
  Alphabet alphabet_;
};

/// Untimed asynchronous interface that steps an interface automaton directly.
class AutomatonInterface final : public AsyncInterface {
 public:
  explicit AutomatonInterface(InterfaceAutomaton a) : a_(std::move(a)), q_(a_.initial()) {}

  const std::vector<std::string>& callins() const override { return a_.inputs(); }
  const std::vector<std::string>& callbacks() const override { return a_.outputs(); }
  void reset() override { q_ = a_.initial(); }
  bool invoke(std::uint32_t callin) override {
    auto to = a_.next(q_, Label{LabelKind::input, callin});
    if (!to) return false;
    q_ = *to;
    return true;
  }
  std::optional<std::uint32_t> await_callback() override {
    auto t = a_.pending_output(q_);
    if (!t) return std::nullopt;
    q_ = t->to;
    return t->label.index;
  }

 private:
  InterfaceAutomaton a_;
  StateId q_;
};

}  // namespace typestate
