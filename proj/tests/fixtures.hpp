#pragma once

#include <string>
#include <vector>

#include "typestate/closure.hpp"
#include "typestate/io.hpp"
#include "typestate/mealy.hpp"
#include "typestate/model.hpp"

namespace fixtures {

inline std::string model_path(const std::string& file) {
  return std::string(TYPESTATE_MODELS_DIR) + "/" + file;
}

inline typestate::ModelSpec model(const std::string& file) {
  return typestate::load_model_spec(model_path(file));
}

inline typestate::InterfaceAutomaton automaton(const std::string& file) {
  auto spec = model(file);
  if (spec.refinement) spec = typestate::apply_refinement(spec, *spec.refinement);
  return spec.to_interface_automaton();
}

inline typestate::MealyMachine closure_of(const std::string& file) {
  return typestate::closure(automaton(file)).machine;
}

inline std::vector<std::string> outputs(const typestate::MealyMachine& m,
                                        std::initializer_list<std::string_view> word) {
  const auto w = typestate::parse_word(m.alphabet(), word);
  return typestate::output_names(m.alphabet(), typestate::mealy_output(m, w));
}

/// Every word of length exactly n over k inputs, lexicographic.
inline std::vector<typestate::Word> all_words(std::size_t k, std::size_t n) {
  std::vector<typestate::Word> out{{}};
  for (std::size_t d = 0; d < n; ++d) {
    std::vector<typestate::Word> next;
    for (const auto& w : out)
      for (typestate::Input i = 0; i < k; ++i) {
        auto v = w;
        v.push_back(i);
        next.push_back(v);
      }
    out = std::move(next);
  }
  return out;
}

/// Brute-force: first word of length <= max_len (by length, then
/// lexicographically) on which the machines differ.
inline std::optional<typestate::Word> brute_force_difference(const typestate::MealyMachine& a,
                                                             const typestate::MealyMachine& b,
                                                             std::size_t max_len) {
  for (std::size_t n = 1; n <= max_len; ++n)
    for (const auto& w : all_words(a.input_count(), n))
      if (typestate::mealy_output(a, w) != typestate::mealy_output(b, w)) return w;
  return std::nullopt;
}

/// Copy of `m` with one transition's output or target replaced.
inline typestate::MealyMachine corrupt(const typestate::MealyMachine& m, typestate::StateId q,
                                       typestate::Input i, std::optional<typestate::Output> o,
                                       std::optional<typestate::StateId> to) {
  auto delta = m.delta_table();
  auto out = m.output_table();
  const auto k = q * m.input_count() + i;
  if (o) out[k] = *o;
  if (to) delta[k] = *to;
  return typestate::MealyMachine(m.alphabet(), m.initial(), delta, out, m.state_names());
}

}  // namespace fixtures
