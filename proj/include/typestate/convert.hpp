#pragma once

#include <string>
#include <vector>

#include "typestate/alphabet.hpp"
#include "typestate/errors.hpp"
#include "typestate/interface_automaton.hpp"
#include "typestate/mealy.hpp"

namespace typestate {

/// Reads a learned closure back as a callback typestate:
///   - err/oop transitions disappear, as do quiet self-loops on wait;
///   - a wait transition becomes a transition labelled by its callback;
///   - a callin transition keeps its callin (the lambda output is dropped).
/// Unreachable states are pruned. Throws ModelError on machines that are not
/// over a closed alphabet or break the err-sink invariant.
inline InterfaceAutomaton mealy_to_interface_automaton(const MealyMachine& m) {
  const auto& alpha = m.alphabet();
  if (!alpha.wait() || !alpha.quiet() || !alpha.lambda() || !alpha.err())
    throw ModelError("machine is not over a closed alphabet");
  check_err_sink(m);
  const auto wait = *alpha.wait();

  std::vector<std::string> inputs;
  std::vector<std::uint32_t> input_map(alpha.input_count(), 0);
  for (Input i = 0; i < alpha.input_count(); ++i)
    if (i != wait) {
      input_map[i] = static_cast<std::uint32_t>(inputs.size());
      inputs.push_back(alpha.input_name(i));
    }
  std::vector<std::string> outputs;
  std::vector<std::uint32_t> output_map(alpha.output_count(), 0);
  for (Output o = 0; o < alpha.output_count(); ++o)
    if (!is_reserved_name(alpha.output_name(o))) {
      output_map[o] = static_cast<std::uint32_t>(outputs.size());
      outputs.push_back(alpha.output_name(o));
    }

  std::vector<IaTransition> ts;
  for (StateId q = 0; q < m.state_count(); ++q)
    for (Input i = 0; i < alpha.input_count(); ++i) {
      const auto o = m.output(q, i);
      const auto to = m.next(q, i);
      if (alpha.is_absorbing(o)) continue;
      if (i == wait) {
        if (o == *alpha.quiet()) {
          if (to != q)
            throw ModelError("quiet output on wait changes state at " + m.state_name(q));
          continue;
        }
        if (is_reserved_name(alpha.output_name(o)))
          throw ModelError("wait answered by '" + alpha.output_name(o) + "' at " +
                           m.state_name(q));
        ts.push_back({q, Label{LabelKind::output, output_map[o]}, to});
      } else {
        if (o != *alpha.lambda())
          throw ModelError("callin '" + alpha.input_name(i) + "' answered by '" +
                           alpha.output_name(o) + "' at " + m.state_name(q));
        ts.push_back({q, Label{LabelKind::input, input_map[i]}, to});
      }
    }
  std::vector<std::string> names;
  for (StateId q = 0; q < m.state_count(); ++q) names.push_back(m.state_name(q));
  return InterfaceAutomaton(std::move(inputs), std::move(outputs), std::move(names),
                            m.initial(), std::move(ts))
      .normalized();
}

}  // namespace typestate
