#pragma once

#include <sstream>
#include <string>

#include "typestate/interface_automaton.hpp"

namespace typestate {

namespace detail {
inline std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}
}  // namespace detail

/// Graphviz rendering: states in id order, transitions in the automaton's
/// order, callins as plain edges and callbacks as double-line edges.
inline std::string export_dot(const InterfaceAutomaton& a, const std::string& name = "typestate") {
  std::ostringstream s;
  s << "digraph " << detail::dot_quote(name) << " {\n"
    << "  rankdir=LR;\n"
    << "  node [shape=circle];\n"
    << "  __start [shape=point, label=\"\"];\n";
  for (StateId q = 0; q < a.state_count(); ++q)
    s << "  n" << q << " [label=" << detail::dot_quote(a.state_name(q)) << "];\n";
  s << "  __start -> n" << a.initial() << ";\n";
  for (const auto& t : a.transitions()) {
    s << "  n" << t.from << " -> n" << t.to << " [label=" << detail::dot_quote(a.label_name(t.label));
    if (t.label.kind == LabelKind::output) s << ", color=\"black:invis:black\"";
    s << "];\n";
  }
  s << "}\n";
  return s.str();
}

}  // namespace typestate
