#pragma once

#include <deque>
#include <map>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "typestate/errors.hpp"
#include "typestate/mealy.hpp"
#include "typestate/semantics.hpp"

namespace typestate {

/// Result of an equivalence check: nullopt means Correct.
using Counterexample = std::optional<Word>;

/// Exact trace equivalence. Returns the shortlex-least shortest word on which
/// the machines disagree, or nullopt when they are trace-equivalent.
inline Counterexample traces_equal(const MealyMachine& m1, const MealyMachine& m2) {
  if (!(m1.alphabet() == m2.alphabet()))
    throw AlphabetMismatch("traces_equal requires identical alphabets");
  auto r = first_difference(MealySemantics(m1), MealySemantics(m2));
  if (auto* w = std::get_if<Word>(&r)) return *w;
  return std::nullopt;
}

namespace detail {

// Moore partition refinement. Round r groups states that agree on all words
// of length <= r; `rounds` receives the partition after each round.
inline std::vector<std::uint32_t> refine(
    const MealyMachine& m, std::vector<std::vector<std::uint32_t>>* rounds = nullptr) {
  const auto n = m.state_count();
  const auto n_in = m.input_count();
  std::vector<std::uint32_t> block(n, 0);
  std::size_t blocks = n ? 1 : 0;
  if (rounds) rounds->push_back(block);
  for (;;) {
    std::map<std::vector<std::uint32_t>, std::uint32_t> sig_index;
    std::vector<std::uint32_t> next(n);
    for (StateId q = 0; q < n; ++q) {
      std::vector<std::uint32_t> sig{block[q]};
      for (Input i = 0; i < n_in; ++i) {
        sig.push_back(m.output(q, i));
        sig.push_back(block[m.next(q, i)]);
      }
      auto [it, fresh] =
          sig_index.emplace(std::move(sig), static_cast<std::uint32_t>(sig_index.size()));
      next[q] = it->second;
    }
    const auto count = sig_index.size();
    block = std::move(next);
    if (count == blocks) break;
    blocks = count;
    if (rounds) rounds->push_back(block);
  }
  return block;
}

inline std::vector<StateId> reachable_order(const MealyMachine& m) {
  std::vector<StateId> order{m.initial()};
  std::vector<bool> seen(m.state_count(), false);
  seen[m.initial()] = true;
  for (std::size_t k = 0; k < order.size(); ++k)
    for (Input i = 0; i < m.input_count(); ++i) {
      auto q = m.next(order[k], i);
      if (!seen[q]) {
        seen[q] = true;
        order.push_back(q);
      }
    }
  return order;
}

}  // namespace detail

/// Trace-equivalent machine with reachable, pairwise-distinguishable states,
/// numbered in breadth-first order from the initial state.
inline MealyMachine minimize(const MealyMachine& m) {
  const auto block = detail::refine(m);
  const auto order = detail::reachable_order(m);
  // One representative per block, in order of first reachability.
  std::map<std::uint32_t, StateId> new_id;
  std::vector<StateId> reps;
  for (auto q : order)
    if (new_id.emplace(block[q], static_cast<StateId>(reps.size())).second)
      reps.push_back(q);
  std::vector<StateId> delta;
  std::vector<Output> out;
  std::vector<std::string> names;
  const bool named = !m.state_names().empty();
  for (auto q : reps) {
    if (named) names.push_back(m.state_name(q));
    for (Input i = 0; i < m.input_count(); ++i) {
      delta.push_back(new_id.at(block[m.next(q, i)]));
      out.push_back(m.output(q, i));
    }
  }
  return MealyMachine(m.alphabet(), 0, std::move(delta), std::move(out),
                      std::move(names));
}

/// Either the distinguisher bound or a pair of equivalent states.
struct DistinguisherBound {
  std::size_t bound = 0;
  std::optional<std::pair<StateId, StateId>> indistinguishable;

  explicit operator bool() const { return !indistinguishable; }
};

/// Smallest B such that every pair of distinct states is separated by some
/// word of length <= B. Refuses machines with equivalent states and reports
/// one such pair instead. Unreachable states count as states.
inline DistinguisherBound distinguisher_bound(const MealyMachine& m) {
  std::vector<std::vector<std::uint32_t>> rounds;
  const auto block = detail::refine(m, &rounds);
  DistinguisherBound r;
  std::map<std::uint32_t, StateId> first;
  for (StateId q = 0; q < m.state_count(); ++q) {
    auto [it, fresh] = first.emplace(block[q], q);
    if (!fresh) {
      r.indistinguishable = std::make_pair(it->second, q);
      return r;
    }
  }
  // rounds[r] is the partition induced by words of length <= r.
  r.bound = rounds.size() - 1;
  return r;
}

/// Shortest word separating states p and q (shortlex-least), or nullopt if
/// they are equivalent.
inline std::optional<Word> separating_word(const MealyMachine& m, StateId p, StateId q) {
  using Pair = std::pair<StateId, StateId>;
  struct Node {
    Pair states;
    std::size_t parent;
    Input via;
  };
  std::vector<Node> nodes{{{p, q}, 0, 0}};
  std::map<Pair, std::size_t> seen{{{p, q}, 0}};
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    for (Input i = 0; i < m.input_count(); ++i) {
      const auto [a, b] = nodes[k].states;
      if (m.output(a, i) != m.output(b, i)) {
        Word w{i};
        for (auto j = k; j != 0; j = nodes[j].parent) w.push_back(nodes[j].via);
        return Word(w.rbegin(), w.rend());
      }
      Pair next{m.next(a, i), m.next(b, i)};
      if (seen.emplace(next, nodes.size()).second) nodes.push_back({next, k, i});
    }
  }
  return std::nullopt;
}

}  // namespace typestate
