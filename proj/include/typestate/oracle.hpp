#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "typestate/alphabet.hpp"
#include "typestate/mealy.hpp"
#include "typestate/semantics.hpp"

namespace typestate {

/// Membership oracle over a closed alphabet: maps an input word to the output
/// word of the same length. Every call to `query` counts as one asked query.
class MembershipOracle {
 public:
  virtual ~MembershipOracle() = default;

  OutputWord query(std::span<const Input> w) {
    ++asked_;
    return answer(w);
  }

  /// Answer for `w` if it is known without running anything.
  virtual std::optional<OutputWord> peek(std::span<const Input>) const {
    return std::nullopt;
  }

  virtual const Alphabet& alphabet() const = 0;

  std::uint64_t asked() const noexcept { return asked_; }
  /// Queries that actually reached the system; equals asked() unless cached.
  virtual std::uint64_t executed() const noexcept { return asked_; }

 protected:
  virtual OutputWord answer(std::span<const Input> w) = 0;

 private:
  std::uint64_t asked_ = 0;
};

/// Answers from a known Mealy machine.
class MealyOracle final : public MembershipOracle {
 public:
  explicit MealyOracle(MealyMachine m) : m_(std::move(m)) {}
  const Alphabet& alphabet() const override { return m_.alphabet(); }
  const MealyMachine& machine() const noexcept { return m_; }

 protected:
  OutputWord answer(std::span<const Input> w) override { return mealy_output(m_, w); }

 private:
  MealyMachine m_;
};

/// Answers by replaying a semantics from its initial state.
template <ClosedSemantics S>
class SemanticsOracle final : public MembershipOracle {
 public:
  explicit SemanticsOracle(S s) : s_(std::move(s)) {}
  const Alphabet& alphabet() const override { return s_.alphabet(); }

 protected:
  OutputWord answer(std::span<const Input> w) override {
    return semantics_output(s_, w);
  }

 private:
  S s_;
};

/// Last `n` symbols of `w`.
inline OutputWord last_n(const OutputWord& w, std::size_t n) {
  return OutputWord(w.end() - static_cast<std::ptrdiff_t>(std::min(n, w.size())),
                    w.end());
}

}  // namespace typestate
