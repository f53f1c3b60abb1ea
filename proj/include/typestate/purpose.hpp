#pragma once

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "typestate/alphabet.hpp"
#include "typestate/errors.hpp"
#include "typestate/oracle.hpp"
#include "typestate/semantics.hpp"

namespace typestate {

struct PurposeTransition {
  std::string from;
  std::string input;
  std::string to;
};

/// Named description of a learning purpose: a DFA over closed input names
/// (callins and `wait`). Missing transitions lead to an implicit rejecting
/// sink.
struct PurposeSpec {
  std::vector<std::string> states;
  std::string initial;
  std::vector<std::string> accepting;
  std::vector<PurposeTransition> transitions;
};

/// A purpose resolved against a closed alphabet. State `state_count()` is the
/// implicit rejecting sink.
class LearningPurpose {
 public:
  LearningPurpose(const PurposeSpec& spec, const Alphabet& alphabet)
      : inputs_(alphabet.input_count()), names_(spec.states) {
    auto id = [&](const std::string& n) -> StateId {
      auto it = std::find(names_.begin(), names_.end(), n);
      if (it == names_.end()) throw ModelError("purpose refers to unknown state '" + n + "'");
      return static_cast<StateId>(it - names_.begin());
    };
    if (names_.empty()) throw ModelError("purpose has no states");
    if (std::set<std::string>(names_.begin(), names_.end()).size() != names_.size())
      throw ModelError("duplicate purpose state names");
    initial_ = id(spec.initial);
    accepting_.assign(names_.size(), false);
    for (const auto& a : spec.accepting) accepting_[id(a)] = true;
    delta_.assign(names_.size() * inputs_, reject());
    std::vector<bool> defined(delta_.size(), false);
    for (const auto& t : spec.transitions) {
      auto i = alphabet.find_input(t.input);
      if (!i) throw ModelError("purpose uses unknown input '" + t.input + "'");
      const auto slot = id(t.from) * inputs_ + *i;
      if (defined[slot] && delta_[slot] != id(t.to))
        throw ModelError("purpose state '" + t.from + "' has two transitions on '" + t.input +
                         "'");
      defined[slot] = true;
      delta_[slot] = id(t.to);
    }
    for (StateId p = 0; p < names_.size(); ++p) {
      if (accepting_[p]) continue;
      for (std::size_t i = 0; i < inputs_; ++i)
        if (!rejecting(delta_[p * inputs_ + i]))
          throw ModelError("rejecting purpose state '" + names_[p] + "' is not absorbing");
    }
  }

  StateId initial() const noexcept { return initial_; }
  StateId reject() const noexcept { return static_cast<StateId>(names_.size()); }
  std::size_t state_count() const noexcept { return names_.size(); }
  bool rejecting(StateId p) const { return p == reject() || !accepting_[p]; }

  StateId next(StateId p, Input i) const {
    if (p == reject()) return p;
    return delta_.at(p * inputs_ + i);
  }

  /// Length of the longest prefix of `w` accepted by the purpose.
  std::size_t accepted_prefix(std::span<const Input> w) const {
    auto p = initial_;
    if (rejecting(p)) return 0;
    for (std::size_t k = 0; k < w.size(); ++k) {
      p = next(p, w[k]);
      if (rejecting(p)) return k;
    }
    return w.size();
  }

 private:
  std::size_t inputs_;
  std::vector<std::string> names_;
  StateId initial_ = 0;
  std::vector<bool> accepting_;
  std::vector<StateId> delta_;
};

/// Restricts a membership oracle to a purpose: the accepted prefix is asked,
/// the rest of the word is answered with `oop`.
class PurposeFilter final : public MembershipOracle {
 public:
  PurposeFilter(MembershipOracle& inner, const PurposeSpec& spec)
      : inner_(&inner),
        alphabet_(inner.alphabet().with_out_of_purpose()),
        purpose_(spec, inner.alphabet()) {}

  const Alphabet& alphabet() const override { return alphabet_; }
  std::uint64_t executed() const noexcept override { return inner_->executed(); }
  const LearningPurpose& purpose() const noexcept { return purpose_; }

  std::optional<OutputWord> peek(std::span<const Input> w) const override {
    const auto k = purpose_.accepted_prefix(w);
    OutputWord out;
    if (k > 0) {
      auto known = inner_->peek(w.first(k));
      if (!known) return std::nullopt;
      out = std::move(*known);
    }
    out.resize(w.size(), *alphabet_.oop());
    return out;
  }

 protected:
  OutputWord answer(std::span<const Input> w) override {
    const auto k = purpose_.accepted_prefix(w);
    OutputWord out;
    if (k > 0) out = inner_->query(w.first(k));
    out.resize(w.size(), *alphabet_.oop());
    return out;
  }

 private:
  MembershipOracle* inner_;
  Alphabet alphabet_;
  LearningPurpose purpose_;
};

/// Product of a closure semantics with a purpose: outputs `oop` from the first
/// input the purpose rejects onwards.
template <ClosedSemantics S>
class PurposeSemantics {
 public:
  using State = std::pair<typename S::State, StateId>;

  PurposeSemantics(S inner, const PurposeSpec& spec)
      : inner_(std::move(inner)),
        alphabet_(inner_.alphabet().with_out_of_purpose()),
        purpose_(spec, inner_.alphabet()) {}

  const Alphabet& alphabet() const { return alphabet_; }
  State initial() const {
    const auto p = purpose_.initial();
    return purpose_.rejecting(p) ? rejected() : State{inner_.initial(), p};
  }

  std::pair<Output, State> step(const State& s, Input i) const {
    const auto oop = *alphabet_.oop();
    if (s.second == purpose_.reject()) return {oop, s};
    const auto p = purpose_.next(s.second, i);
    if (purpose_.rejecting(p)) return {oop, rejected()};
    auto [o, q] = inner_.step(s.first, i);
    return {o, State{q, p}};
  }

 private:
  State rejected() const { return {inner_.initial(), purpose_.reject()}; }

  S inner_;
  Alphabet alphabet_;
  LearningPurpose purpose_;
};

}  // namespace typestate
