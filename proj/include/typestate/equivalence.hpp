#pragma once

#include <cmath>
#include <cstdio>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "typestate/alphabet.hpp"
#include "typestate/analysis.hpp"
#include "typestate/errors.hpp"
#include "typestate/learner.hpp"
#include "typestate/mealy.hpp"
#include "typestate/oracle.hpp"
#include "typestate/semantics.hpp"
#include "typestate/sul.hpp"

namespace typestate {

inline constexpr std::size_t kDefaultDistinguisherBound = 2;
inline constexpr long double kDefaultWordBudget = 1e7L;

/// Distinguisher and state bounds; a lone state bound implies a distinguisher
/// bound one smaller.
struct Bounds {
  std::optional<std::size_t> b_dist;
  std::optional<std::size_t> b_state;

  std::optional<std::size_t> distinguisher() const {
    if (b_dist) return b_dist;
    if (b_state) return *b_state == 0 ? 0 : *b_state - 1;
    return std::nullopt;
  }
};

/// Shortest access word of every state (ties broken by input order), together
/// with the states in the order they were discovered.
struct Representatives {
  std::vector<Word> word;
  std::vector<StateId> order;
};

inline Representatives representatives(const MealyMachine& m) {
  Representatives r;
  r.word.assign(m.state_count(), {});
  std::vector<bool> seen(m.state_count(), false);
  seen[m.initial()] = true;
  r.order.push_back(m.initial());
  for (std::size_t k = 0; k < r.order.size(); ++k) {
    const auto q = r.order[k];
    for (Input i = 0; i < m.input_count(); ++i) {
      const auto to = m.next(q, i);
      if (seen[to]) continue;
      seen[to] = true;
      r.word[to] = concat(r.word[q], i);
      r.order.push_back(to);
    }
  }
  return r;
}

/// Calls `f(word)` for every word of length `n` over `n_inputs` symbols in
/// lexicographic order; stops early when `f` returns true.
template <class F>
bool for_each_word(std::size_t n_inputs, std::size_t n, F&& f) {
  Word w(n, 0);
  for (;;) {
    if (f(static_cast<const Word&>(w))) return true;
    std::size_t k = n;
    while (k > 0 && w[k - 1] + 1 == n_inputs) w[--k] = 0;
    if (k == 0) return false;
    ++w[k - 1];
  }
}

/// First suffix (by length, then lexicographically) of length 1..b_dist on
/// which the oracle's outputs after `w` and after `w2` differ.
inline std::optional<Word> check(std::span<const Input> w, std::span<const Input> w2,
                                 std::size_t b_dist, MembershipOracle& oracle) {
  if (std::equal(w.begin(), w.end(), w2.begin(), w2.end())) return std::nullopt;
  std::optional<Word> found;
  const auto n = oracle.alphabet().input_count();
  for (std::size_t len = 1; len <= b_dist && !found; ++len)
    for_each_word(n, len, [&](const Word& s) {
      if (last_n(oracle.query(concat(w, s)), len) != last_n(oracle.query(concat(w2, s)), len))
        found = s;
      return found.has_value();
    });
  return found;
}

/// Equivalence oracle from membership queries, complete whenever every pair of
/// target states is separated by a word of length at most `b_dist`. Behind a
/// caching oracle each call runs at most |Q|·|Σ|^(b_dist+1) words on the
/// system: a missing answer is obtained by running a word of the form
/// R(r)·i·s with |s| = b_dist that extends it.
class DistEquivalenceOracle final : public EquivalenceOracle {
 public:
  DistEquivalenceOracle(MembershipOracle& oracle, std::size_t b_dist)
      : oracle_(&oracle), b_dist_(b_dist) {}

  std::size_t bound() const noexcept { return b_dist_; }

  EquivalenceResult find_counterexample(const Hypothesis& hyp) override {
    const auto& h = hyp.machine;
    const auto& alpha = h.alphabet();
    const auto reps = representatives(h);

    auto frontier = [&](const Word& x) {
      // Longest representative prefix; the remainder must not be empty.
      std::size_t len = 0;
      StateId q = h.initial();
      for (std::size_t k = 0; k < x.size(); ++k) {
        q = h.next(q, x[k]);
        const auto& rq = reps.word[q];
        if (rq.size() != k + 1 || !std::equal(rq.begin(), rq.end(), x.begin())) break;
        len = k + 1;
      }
      if (len == x.size() && len > 0) --len;
      Word f(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(len));
      Word rest(x.begin() + static_cast<std::ptrdiff_t>(len), x.end());
      rest.resize(std::max(rest.size(), b_dist_ + 1), 0);
      f.insert(f.end(), rest.begin(), rest.end());
      return f;
    };
    // Every needed word is asked; a word the cache cannot answer is first
    // covered by running its frontier extension.
    auto fetch = [&](const Word& x) -> OutputWord {
      if (!oracle_->peek(x)) oracle_->query(frontier(x));
      return oracle_->query(x);
    };

    for (const auto q : reps.order) {
      for (Input i = 0; i < alpha.input_count(); ++i) {
        const auto o = h.output(q, i);
        const auto to = h.next(q, i);
        const auto w = concat(reps.word[q], i);
        if (fetch(w).back() != o) return {w, Word{i}};
        const bool quiet_loop =
            alpha.wait() && i == *alpha.wait() && alpha.quiet() && o == *alpha.quiet() && to == q;
        const bool absorbed = alpha.is_absorbing(o) && is_sink(h, to, o);
        if (quiet_loop || absorbed) continue;
        const auto& w2 = reps.word[to];
        if (w == w2) continue;
        std::optional<EquivalenceResult> found;
        for (std::size_t len = 1; len <= b_dist_ && !found; ++len)
          for_each_word(alpha.input_count(), len, [&](const Word& s) {
            const auto a = last_n(fetch(concat(w, s)), len);
            const auto b = last_n(fetch(concat(w2, s)), len);
            if (a == b) return false;
            if (a != mealy_output(h, to, s)) found = EquivalenceResult{concat(w, s), s};
            else found = EquivalenceResult{concat(w2, s), s};
            return true;
          });
        if (found) return *found;
      }
    }
    return {};
  }

 private:
  MembershipOracle* oracle_;
  std::size_t b_dist_;
};

inline EquivalenceResult dist_equivalence(const Hypothesis& h, std::size_t b_dist,
                                          MembershipOracle& oracle) {
  DistEquivalenceOracle eq(oracle, b_dist);
  return eq.find_counterexample(h);
}

inline EquivalenceResult dist_equivalence(const MealyMachine& h, std::size_t b_dist,
                                          MembershipOracle& oracle) {
  return dist_equivalence(Hypothesis{h, representatives(h).word}, b_dist, oracle);
}

/// Compact rendering of a possibly huge count, e.g. 1e+07.
inline std::string format_count(long double n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4Lg", n);
  return buf;
}

/// Number of words of length k + b_state - 1 over `n_inputs` symbols.
inline long double state_bound_word_count(std::size_t n_inputs, std::size_t k,
                                          std::size_t b_state) {
  const auto len = k + b_state == 0 ? 0 : k + b_state - 1;
  return std::pow(static_cast<long double>(n_inputs), static_cast<long double>(len));
}

/// Exhaustive equivalence check against a state bound: every word of length
/// k + b_state - 1 (k hypothesis states) is run, which also covers all shorter
/// words. Refuses with BudgetExceeded when the word count exceeds `budget`.
class StateBoundEquivalenceOracle final : public EquivalenceOracle {
 public:
  StateBoundEquivalenceOracle(MembershipOracle& oracle, std::size_t b_state,
                              long double budget = kDefaultWordBudget)
      : oracle_(&oracle), b_state_(b_state), budget_(budget) {}

  EquivalenceResult find_counterexample(const Hypothesis& hyp) override {
    const auto& h = hyp.machine;
    const auto n = h.input_count();
    const auto count = state_bound_word_count(n, h.state_count(), b_state_);
    if (count > budget_)
      throw BudgetExceeded("state-bound oracle needs " + format_count(count) +
                               " words, over the budget of " + format_count(budget_),
                           count);
    const auto len = h.state_count() + b_state_ == 0 ? 0 : h.state_count() + b_state_ - 1;
    std::optional<Word> cex;
    for_each_word(n, len, [&](const Word& w) {
      const auto got = oracle_->query(w);
      const auto want = mealy_output(h, w);
      for (std::size_t k = 0; k < w.size(); ++k)
        if (got[k] != want[k]) {
          cex = Word(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(k + 1));
          return true;
        }
      return false;
    });
    if (cex) return {cex, std::nullopt};
    return {};
  }

 private:
  MembershipOracle* oracle_;
  std::size_t b_state_;
  long double budget_;
};

inline EquivalenceResult state_bound_equivalence(const MealyMachine& h, std::size_t b_state,
                                                 MembershipOracle& oracle,
                                                 long double budget = kDefaultWordBudget) {
  StateBoundEquivalenceOracle eq(oracle, b_state, budget);
  return eq.find_counterexample(Hypothesis{h, {}});
}

/// Shortest counterexample against a known target.
inline EquivalenceResult perfect_equivalence(const MealyMachine& h, const MealyMachine& target) {
  if (!(h.alphabet() == target.alphabet()))
    throw AlphabetMismatch("hypothesis and target alphabets differ");
  if (auto cex = traces_equal(h, target)) return {cex, std::nullopt};
  return {};
}

class PerfectEquivalenceOracle final : public EquivalenceOracle {
 public:
  explicit PerfectEquivalenceOracle(MealyMachine target) : target_(std::move(target)) {}
  EquivalenceResult find_counterexample(const Hypothesis& h) override {
    return perfect_equivalence(h.machine, target_);
  }

 private:
  MealyMachine target_;
};

/// Perfect oracle against a ground-truth semantics that may be infinite:
/// breadth-first product search, giving up with BudgetExceeded once `cap`
/// product states have been visited without a difference.
template <ClosedSemantics S>
class SemanticsEquivalenceOracle final : public EquivalenceOracle {
 public:
  SemanticsEquivalenceOracle(S truth, std::size_t cap = 1u << 16)
      : truth_(std::move(truth)), cap_(cap) {}

  EquivalenceResult find_counterexample(const Hypothesis& h) override {
    auto r = first_difference(MealySemantics(h.machine), truth_, cap_);
    if (auto* w = std::get_if<Word>(&r)) return {*w, std::nullopt};
    if (std::holds_alternative<SearchExhausted>(r))
      throw BudgetExceeded("equivalence search visited " + std::to_string(cap_) +
                               " product states without a verdict",
                           static_cast<long double>(cap_));
    return {};
  }

 private:
  S truth_;
  std::size_t cap_;
};

}  // namespace typestate
