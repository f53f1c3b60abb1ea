#pragma once

#include <concepts>
#include <cstddef>
#include <map>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "typestate/alphabet.hpp"
#include "typestate/errors.hpp"
#include "typestate/mealy.hpp"

namespace typestate {

/// A (possibly infinite) deterministic transducer over a closed alphabet,
/// explored explicitly. Used for ground truths that are not finite Mealy
/// machines (counters, purpose products) and to build finite ones.
template <class S>
concept ClosedSemantics = requires(const S& s, const typename S::State& q, Input i) {
  typename S::State;
  { s.alphabet() } -> std::convertible_to<const Alphabet&>;
  { s.initial() } -> std::convertible_to<typename S::State>;
  { s.step(q, i) } -> std::convertible_to<std::pair<Output, typename S::State>>;
} && std::totally_ordered<typename S::State>;

class MealySemantics {
 public:
  using State = StateId;
  explicit MealySemantics(const MealyMachine& m) : m_(&m) {}
  const Alphabet& alphabet() const { return m_->alphabet(); }
  State initial() const { return m_->initial(); }
  std::pair<Output, State> step(State q, Input i) const {
    return {m_->output(q, i), m_->next(q, i)};
  }

 private:
  const MealyMachine* m_;
};

template <ClosedSemantics S>
OutputWord semantics_output(const S& s, std::span<const Input> w) {
  OutputWord out;
  auto q = s.initial();
  for (auto i : w) {
    auto [o, next] = s.step(q, i);
    out.push_back(o);
    q = std::move(next);
  }
  return out;
}

/// Outcome of a product search: no difference, a shortest distinguishing
/// word, or the exploration cap was reached first.
struct SearchExhausted {
  std::size_t explored;
};
using ProductSearch = std::variant<std::monostate, Word, SearchExhausted>;

/// Breadth-first search over the product of two semantics, expanding inputs in
/// alphabet order; the first word found is the shortlex-least word on which
/// the outputs differ. `cap` bounds the number of product states visited.
template <ClosedSemantics A, ClosedSemantics B>
ProductSearch first_difference(const A& a, const B& b,
                               std::size_t cap = static_cast<std::size_t>(-1)) {
  if (!(a.alphabet().inputs() == b.alphabet().inputs()))
    throw AlphabetMismatch("machines have different input alphabets");
  using Key = std::pair<typename A::State, typename B::State>;
  struct Node {
    Key key;
    std::size_t parent;
    Input via;
  };
  std::vector<Node> nodes;
  std::map<Key, std::size_t> seen;
  nodes.push_back({{a.initial(), b.initial()}, 0, 0});
  seen.emplace(nodes.back().key, 0);
  const auto n_in = static_cast<Input>(a.alphabet().input_count());
  const auto& out_a = a.alphabet().outputs();
  const auto& out_b = b.alphabet().outputs();

  auto word_to = [&](std::size_t k, Input last) {
    Word w{last};
    for (; k != 0; k = nodes[k].parent) w.push_back(nodes[k].via);
    return Word(w.rbegin(), w.rend());
  };

  for (std::size_t k = 0; k < nodes.size(); ++k) {
    for (Input i = 0; i < n_in; ++i) {
      auto [oa, na] = a.step(nodes[k].key.first, i);
      auto [ob, nb] = b.step(nodes[k].key.second, i);
      if (out_a.at(oa) != out_b.at(ob)) return word_to(k, i);
      Key key{std::move(na), std::move(nb)};
      if (seen.count(key)) continue;
      if (nodes.size() >= cap) return SearchExhausted{nodes.size()};
      seen.emplace(key, nodes.size());
      nodes.push_back({std::move(key), k, i});
    }
  }
  return std::monostate{};
}

/// Explores the reachable part of `s` into a finite Mealy machine, states in
/// breadth-first order. Throws BudgetExceeded past `cap` states.
template <ClosedSemantics S>
std::pair<MealyMachine, std::vector<typename S::State>> explore(
    const S& s, std::size_t cap = 1u << 20) {
  std::vector<typename S::State> states{s.initial()};
  std::map<typename S::State, StateId> index{{s.initial(), 0}};
  std::vector<StateId> delta;
  std::vector<Output> out;
  const auto n_in = static_cast<Input>(s.alphabet().input_count());
  for (std::size_t k = 0; k < states.size(); ++k) {
    for (Input i = 0; i < n_in; ++i) {
      auto [o, next] = s.step(states[k], i);
      auto it = index.find(next);
      if (it == index.end()) {
        if (states.size() >= cap)
          throw BudgetExceeded("semantics has more than " + std::to_string(cap) +
                                   " reachable states",
                               static_cast<long double>(cap));
        it = index.emplace(next, static_cast<StateId>(states.size())).first;
        states.push_back(next);
      }
      delta.push_back(it->second);
      out.push_back(o);
    }
  }
  return {MealyMachine(s.alphabet(), 0, std::move(delta), std::move(out)),
          std::move(states)};
}

}  // namespace typestate
