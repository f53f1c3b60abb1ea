#pragma once

#include <algorithm>
#include <compare>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "typestate/alphabet.hpp"
#include "typestate/errors.hpp"

namespace typestate {

enum class LabelKind : std::uint8_t { input, output };

/// Transition label of an interface automaton: a callin or a callback.
struct Label {
  LabelKind kind;
  std::uint32_t index;

  auto operator<=>(const Label&) const = default;
};

struct IaTransition {
  StateId from;
  Label label;
  StateId to;

  auto operator<=>(const IaTransition&) const = default;
};

/// Deterministic interface automaton: at most one transition per
/// (state, label) and at most one callback transition per state.
class InterfaceAutomaton {
 public:
  InterfaceAutomaton() = default;

  InterfaceAutomaton(std::vector<std::string> inputs,
                     std::vector<std::string> outputs,
                     std::vector<std::string> states, StateId initial,
                     std::vector<IaTransition> transitions)
      : inputs_(std::move(inputs)),
        outputs_(std::move(outputs)),
        states_(std::move(states)),
        initial_(initial),
        transitions_(std::move(transitions)) {
    validate();
    std::sort(transitions_.begin(), transitions_.end());
    transitions_.erase(std::unique(transitions_.begin(), transitions_.end()),
                       transitions_.end());
    index_.assign(states_.size(), {});
    for (std::size_t k = 0; k < transitions_.size(); ++k) {
      const auto& t = transitions_[k];
      for (auto j : index_[t.from])
        if (transitions_[j].label == t.label)
          throw ModelError("state '" + states_[t.from] +
                           "' has two transitions labelled '" +
                           label_name(t.label) + "'");
      if (t.label.kind == LabelKind::output && pending_output(t.from))
        throw ModelError("state '" + states_[t.from] +
                         "' has two outgoing callback transitions "
                         "(outputs must be deterministic)");
      index_[t.from].push_back(k);
    }
  }

  const std::vector<std::string>& inputs() const noexcept { return inputs_; }
  const std::vector<std::string>& outputs() const noexcept { return outputs_; }
  const std::vector<std::string>& state_names() const noexcept { return states_; }
  const std::vector<IaTransition>& transitions() const noexcept {
    return transitions_;
  }
  std::size_t state_count() const noexcept { return states_.size(); }
  StateId initial() const noexcept { return initial_; }
  const std::string& state_name(StateId q) const { return states_.at(q); }

  std::string label_name(Label l) const {
    return l.kind == LabelKind::input ? inputs_.at(l.index) : outputs_.at(l.index);
  }

  std::optional<StateId> next(StateId q, Label l) const {
    for (auto k : index_.at(q))
      if (transitions_[k].label == l) return transitions_[k].to;
    return std::nullopt;
  }

  /// The callback transition leaving `q`, if any.
  std::optional<IaTransition> pending_output(StateId q) const {
    for (auto k : index_.at(q))
      if (transitions_[k].label.kind == LabelKind::output) return transitions_[k];
    return std::nullopt;
  }

  std::vector<IaTransition> outgoing(StateId q) const {
    std::vector<IaTransition> out;
    for (auto k : index_.at(q)) out.push_back(transitions_[k]);
    return out;
  }

  std::optional<Label> find_label(std::string_view name) const {
    for (std::uint32_t k = 0; k < inputs_.size(); ++k)
      if (inputs_[k] == name) return Label{LabelKind::input, k};
    for (std::uint32_t k = 0; k < outputs_.size(); ++k)
      if (outputs_[k] == name) return Label{LabelKind::output, k};
    return std::nullopt;
  }

  /// Drops unreachable states and renumbers the rest in breadth-first order
  /// (callins in declaration order, then callbacks).
  InterfaceAutomaton normalized() const {
    std::vector<StateId> order;
    std::vector<std::optional<StateId>> renum(states_.size());
    std::deque<StateId> queue{initial_};
    renum[initial_] = 0;
    order.push_back(initial_);
    while (!queue.empty()) {
      auto q = queue.front();
      queue.pop_front();
      for (auto t : outgoing(q)) {
        if (renum[t.to]) continue;
        renum[t.to] = static_cast<StateId>(order.size());
        order.push_back(t.to);
        queue.push_back(t.to);
      }
    }
    std::vector<std::string> names;
    for (auto q : order) names.push_back(states_[q]);
    std::vector<IaTransition> ts;
    for (const auto& t : transitions_)
      if (renum[t.from]) ts.push_back({*renum[t.from], t.label, *renum[t.to]});
    return InterfaceAutomaton(inputs_, outputs_, std::move(names), 0, std::move(ts));
  }

 private:
  void validate() const {
    std::set<std::string> seen;
    for (const auto& s : inputs_) {
      validate_user_symbol(s);
      if (!seen.insert(s).second)
        throw ModelError("duplicate symbol '" + s + "'");
    }
    for (const auto& s : outputs_) {
      validate_user_symbol(s);
      if (!seen.insert(s).second)
        throw ModelError("duplicate symbol '" + s + "'");
    }
    if (states_.empty()) throw ModelError("interface automaton has no states");
    std::set<std::string> names(states_.begin(), states_.end());
    if (names.size() != states_.size())
      throw ModelError("duplicate state names");
    if (initial_ >= states_.size()) throw ModelError("initial state out of range");
    for (const auto& t : transitions_) {
      if (t.from >= states_.size() || t.to >= states_.size())
        throw ModelError("transition state out of range");
      const auto limit =
          t.label.kind == LabelKind::input ? inputs_.size() : outputs_.size();
      if (t.label.index >= limit) throw ModelError("transition symbol out of range");
    }
  }

  std::vector<std::string> inputs_;
  std::vector<std::string> outputs_;
  std::vector<std::string> states_;
  StateId initial_ = 0;
  std::vector<IaTransition> transitions_;
  std::vector<std::vector<std::size_t>> index_;
};

namespace detail {

// Maps labels of `b` onto labels of `a` by symbol name.
inline std::optional<Label> translate(const InterfaceAutomaton& from,
                                      const InterfaceAutomaton& to, Label l) {
  return to.find_label(from.label_name(l));
}

}  // namespace detail

/// Shortest trace (as symbol names) accepted by exactly one of the two
/// automata, or nullopt if their trace sets coincide. Symbols are matched by
/// name; a symbol missing from one automaton is simply never enabled there.
inline std::optional<std::vector<std::string>> trace_difference(
    const InterfaceAutomaton& a, const InterfaceAutomaton& b) {
  using Pair = std::pair<StateId, StateId>;
  struct Node {
    Pair states;
    std::size_t parent;
    std::string symbol;
  };
  std::vector<Node> nodes{{{a.initial(), b.initial()}, 0, ""}};
  std::set<Pair> seen{{a.initial(), b.initial()}};
  std::set<std::string> names;
  for (const auto& s : a.inputs()) names.insert(s);
  for (const auto& s : a.outputs()) names.insert(s);
  for (const auto& s : b.inputs()) names.insert(s);
  for (const auto& s : b.outputs()) names.insert(s);

  auto path = [&](std::size_t k, const std::string& last) {
    std::vector<std::string> p{last};
    for (; k != 0; k = nodes[k].parent) p.push_back(nodes[k].symbol);
    std::reverse(p.begin(), p.end());
    return p;
  };

  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const auto [qa, qb] = nodes[k].states;
    for (const auto& name : names) {
      auto la = a.find_label(name);
      auto lb = b.find_label(name);
      std::optional<StateId> na, nb;
      if (la) na = a.next(qa, *la);
      if (lb) nb = b.next(qb, *lb);
      if (na.has_value() != nb.has_value()) return path(k, name);
      if (!na) continue;
      if (seen.insert({*na, *nb}).second) nodes.push_back({{*na, *nb}, k, name});
    }
  }
  return std::nullopt;
}

inline bool trace_equivalent(const InterfaceAutomaton& a,
                             const InterfaceAutomaton& b) {
  return !trace_difference(a, b).has_value();
}

/// Label-preserving isomorphism of the reachable parts (symbols by name).
inline bool isomorphic(const InterfaceAutomaton& a, const InterfaceAutomaton& b) {
  const auto na = a.normalized();
  const auto nb = b.normalized();
  if (na.state_count() != nb.state_count() ||
      na.transitions().size() != nb.transitions().size())
    return false;
  std::vector<std::optional<StateId>> map(na.state_count());
  std::vector<bool> used(nb.state_count(), false);
  std::deque<StateId> queue{na.initial()};
  map[na.initial()] = nb.initial();
  used[nb.initial()] = true;
  while (!queue.empty()) {
    auto q = queue.front();
    queue.pop_front();
    const auto out_a = na.outgoing(q);
    if (out_a.size() != nb.outgoing(*map[q]).size()) return false;
    for (const auto& t : out_a) {
      auto lb = detail::translate(na, nb, t.label);
      if (!lb) return false;
      auto to = nb.next(*map[q], *lb);
      if (!to) return false;
      if (map[t.to]) {
        if (*map[t.to] != *to) return false;
      } else {
        if (used[*to]) return false;
        map[t.to] = *to;
        used[*to] = true;
        queue.push_back(t.to);
      }
    }
  }
  return true;
}

}  // namespace typestate
