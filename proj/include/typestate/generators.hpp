#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "typestate/analysis.hpp"
#include "typestate/errors.hpp"
#include "typestate/interface_automaton.hpp"
#include "typestate/mealy.hpp"

// Random machines are drawn with std::mt19937_64 seeded with the caller's
// seed; retries reseed with seed + attempt * 0x9E3779B97F4A7C15. Ports to other
// languages agree on properties of the generated machines, not on bits.

namespace typestate {

inline Alphabet plain_alphabet(std::size_t n_inputs, std::size_t n_outputs) {
  std::vector<std::string> in, out;
  for (std::size_t k = 0; k < n_inputs; ++k) in.push_back("i" + std::to_string(k));
  for (std::size_t k = 0; k < n_outputs; ++k) out.push_back("o" + std::to_string(k));
  return Alphabet(std::move(in), std::move(out));
}

inline constexpr std::uint64_t kSeedStride = 0x9E3779B97F4A7C15ull;
inline constexpr int kGeneratorRetries = 10000;

/// Minimal, connected machine with exactly `n_states` states over inputs
/// i0.. and outputs o0... Deterministic in `seed`. States are drawn with a
/// random spanning tree from the initial state, then minimized; draws that
/// collapse are retried.
inline MealyMachine random_minimal_mealy(std::size_t n_states, std::size_t n_inputs,
                                         std::size_t n_outputs, std::uint64_t seed) {
  if (n_states < 1 || n_inputs < 1 || n_outputs < 2)
    throw std::invalid_argument("random_minimal_mealy needs n_states >= 1, "
                                "n_inputs >= 1, n_outputs >= 2");
  const auto alpha = plain_alphabet(n_inputs, n_outputs);
  for (int attempt = 0; attempt < kGeneratorRetries; ++attempt) {
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(attempt) * kSeedStride);
    auto pick = [&](std::size_t n) {
      return static_cast<std::uint32_t>(std::uniform_int_distribution<std::size_t>(0, n - 1)(rng));
    };
    std::vector<StateId> delta(n_states * n_inputs);
    std::vector<Output> out(n_states * n_inputs);
    for (auto& q : delta) q = pick(n_states);
    for (auto& o : out) o = pick(n_outputs);
    // Spanning tree: state k hangs off a random earlier state on a random input.
    for (StateId k = 1; k < n_states; ++k) delta[pick(k) * n_inputs + pick(n_inputs)] = k;
    MealyMachine m(alpha, 0, std::move(delta), std::move(out));
    auto min = minimize(m);
    if (min.state_count() == n_states) return min;
  }
  throw std::runtime_error("random_minimal_mealy gave up for seed " + std::to_string(seed));
}

/// Random deterministic interface automaton: each state enables each callin
/// with probability `p_input` and has a callback with probability
/// `p_output`. The result is normalized (reachable part only).
inline InterfaceAutomaton random_interface_automaton(std::size_t n_states,
                                                     std::size_t n_callins,
                                                     std::size_t n_callbacks,
                                                     std::uint64_t seed,
                                                     double p_input = 0.5,
                                                     double p_output = 0.35) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution in_coin(p_input), out_coin(p_output);
  auto pick = [&](std::size_t n) {
    return static_cast<std::uint32_t>(std::uniform_int_distribution<std::size_t>(0, n - 1)(rng));
  };
  std::vector<std::string> in, out, names;
  for (std::size_t k = 0; k < n_callins; ++k) in.push_back("c" + std::to_string(k));
  for (std::size_t k = 0; k < n_callbacks; ++k) out.push_back("cb" + std::to_string(k));
  for (std::size_t k = 0; k < n_states; ++k) names.push_back("q" + std::to_string(k));
  std::vector<IaTransition> ts;
  for (StateId q = 0; q < n_states; ++q) {
    for (std::uint32_t i = 0; i < n_callins; ++i)
      if (in_coin(rng))
        ts.push_back({q, Label{LabelKind::input, i}, pick(n_states)});
    if (n_callbacks > 0 && out_coin(rng))
      ts.push_back({q, Label{LabelKind::output, pick(n_callbacks)}, pick(n_states)});
  }
  return InterfaceAutomaton(in, out, names, 0, ts).normalized();
}

/// k-state combination lock over {a, b}: `a` advances, `b` resets, and only
/// `a` in the last state emits o1. States 0 and 1 need a word of length k-1.
inline MealyMachine combination_lock(std::size_t k) {
  if (k < 1) throw std::invalid_argument("combination lock needs k >= 1");
  MealyBuilder b(Alphabet({"a", "b"}, {"o0", "o1"}), k);
  for (StateId q = 0; q < k; ++q) {
    const bool last = q + 1 == k;
    b.set(q, 0, last ? 1 : 0, last ? 0 : q + 1);
    b.set(q, 1, 0, 0);
  }
  return b.build();
}

}  // namespace typestate
