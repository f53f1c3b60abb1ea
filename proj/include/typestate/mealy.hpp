#pragma once

#include <span>
#include <string>
#include <vector>

#include "typestate/alphabet.hpp"
#include "typestate/errors.hpp"

namespace typestate {

/// Complete deterministic Mealy machine. Transition and output tables are
/// stored row-major by state; the machine is immutable once built.
class MealyMachine {
 public:
  MealyMachine() = default;

  MealyMachine(Alphabet alphabet, StateId initial, std::vector<StateId> delta,
               std::vector<Output> out, std::vector<std::string> state_names = {})
      : alphabet_(std::move(alphabet)),
        initial_(initial),
        delta_(std::move(delta)),
        out_(std::move(out)),
        names_(std::move(state_names)) {
    const auto n_in = alphabet_.input_count();
    if (n_in == 0) throw ModelError("Mealy machine needs at least one input");
    if (delta_.size() != out_.size() || delta_.size() % n_in != 0 ||
        delta_.empty())
      throw ModelError("Mealy transition table is not total");
    const auto n = delta_.size() / n_in;
    if (initial_ >= n) throw ModelError("Mealy initial state out of range");
    for (auto q : delta_)
      if (q >= n) throw ModelError("Mealy transition target out of range");
    for (auto o : out_)
      if (o >= alphabet_.output_count())
        throw ModelError("Mealy output symbol out of range");
    if (!names_.empty() && names_.size() != n)
      throw ModelError("Mealy state name list has the wrong length");
  }

  const Alphabet& alphabet() const noexcept { return alphabet_; }
  StateId initial() const noexcept { return initial_; }
  std::size_t state_count() const noexcept {
    return delta_.size() / alphabet_.input_count();
  }
  std::size_t input_count() const noexcept { return alphabet_.input_count(); }

  StateId next(StateId q, Input i) const { return delta_[slot(q, i)]; }
  Output output(StateId q, Input i) const { return out_[slot(q, i)]; }

  /// Human-readable name of a state; falls back to `s<id>`.
  std::string state_name(StateId q) const {
    if (q < names_.size()) return names_[q];
    return "s" + std::to_string(q);
  }
  const std::vector<std::string>& state_names() const noexcept { return names_; }

  const std::vector<StateId>& delta_table() const noexcept { return delta_; }
  const std::vector<Output>& output_table() const noexcept { return out_; }

  bool operator==(const MealyMachine& o) const {
    return alphabet_ == o.alphabet_ && initial_ == o.initial_ &&
           delta_ == o.delta_ && out_ == o.out_;
  }

 private:
  std::size_t slot(StateId q, Input i) const {
    if (i >= alphabet_.input_count())
      throw InputDomainError("input index " + std::to_string(i) +
                             " outside the machine alphabet");
    return static_cast<std::size_t>(q) * alphabet_.input_count() + i;
  }

  Alphabet alphabet_;
  StateId initial_ = 0;
  std::vector<StateId> delta_;
  std::vector<Output> out_;
  std::vector<std::string> names_;
};

/// Incremental construction helper; `build()` validates totality.
class MealyBuilder {
 public:
  MealyBuilder(Alphabet alphabet, std::size_t states)
      : alphabet_(std::move(alphabet)),
        n_(states),
        delta_(states * alphabet_.input_count(), kUnset),
        out_(states * alphabet_.input_count(), kUnset) {}

  MealyBuilder& set(StateId from, Input i, Output o, StateId to) {
    if (from >= n_ || to >= n_) throw ModelError("state id out of range");
    if (i >= alphabet_.input_count())
      throw InputDomainError("input index out of range");
    const auto k = static_cast<std::size_t>(from) * alphabet_.input_count() + i;
    delta_[k] = to;
    out_[k] = o;
    return *this;
  }

  MealyBuilder& initial(StateId q) {
    initial_ = q;
    return *this;
  }

  MealyBuilder& names(std::vector<std::string> n) {
    names_ = std::move(n);
    return *this;
  }

  MealyMachine build() const {
    for (std::size_t k = 0; k < delta_.size(); ++k)
      if (delta_[k] == kUnset)
        throw ModelError("missing Mealy transition from state " +
                         std::to_string(k / alphabet_.input_count()) +
                         " on input '" +
                         alphabet_.input_name(k % alphabet_.input_count()) + "'");
    return MealyMachine(alphabet_, initial_, delta_, out_, names_);
  }

 private:
  static constexpr std::uint32_t kUnset = ~std::uint32_t{0};
  Alphabet alphabet_;
  std::size_t n_;
  StateId initial_ = 0;
  std::vector<StateId> delta_;
  std::vector<Output> out_;
  std::vector<std::string> names_;
};

inline StateId run(const MealyMachine& m, StateId from, std::span<const Input> w) {
  for (auto i : w) from = m.next(from, i);
  return from;
}

inline StateId run(const MealyMachine& m, std::span<const Input> w) {
  return run(m, m.initial(), w);
}

/// Output word produced from `from` on `w`; same length as `w`.
inline OutputWord mealy_output(const MealyMachine& m, StateId from,
                               std::span<const Input> w) {
  OutputWord out;
  out.reserve(w.size());
  for (auto i : w) {
    out.push_back(m.output(from, i));
    from = m.next(from, i);
  }
  return out;
}

inline OutputWord mealy_output(const MealyMachine& m, std::span<const Input> w) {
  return mealy_output(m, m.initial(), w);
}

/// True if `q` emits `o` on every input and loops on itself.
inline bool is_sink(const MealyMachine& m, StateId q, Output o) {
  for (Input i = 0; i < m.input_count(); ++i)
    if (m.output(q, i) != o || m.next(q, i) != q) return false;
  return true;
}

/// Throws ModelError if some transition emitting err (or oop) enters a state
/// that is not an absorbing sink for that symbol.
inline void check_err_sink(const MealyMachine& m) {
  for (StateId q = 0; q < m.state_count(); ++q)
    for (Input i = 0; i < m.input_count(); ++i) {
      const auto o = m.output(q, i);
      if (!m.alphabet().is_absorbing(o)) continue;
      if (!is_sink(m, m.next(q, i), o))
        throw ModelError("transition " + m.state_name(q) + " --" +
                         m.alphabet().input_name(i) + "/" +
                         m.alphabet().output_name(o) +
                         "--> enters a state that is not an absorbing sink");
    }
}

}  // namespace typestate
