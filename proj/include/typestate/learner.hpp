#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "typestate/alphabet.hpp"
#include "typestate/errors.hpp"
#include "typestate/mealy.hpp"
#include "typestate/oracle.hpp"

namespace typestate {

/// Observation table T: (S ∪ S·Σ) × E → output words. S is prefix-closed and
/// its rows are pairwise distinct; E starts as every single input.
class ObservationTable {
 public:
  using Row = std::vector<OutputWord>;

  explicit ObservationTable(const Alphabet& alphabet, bool suppress_absorbing = true)
      : alphabet_(alphabet), suppress_(suppress_absorbing) {
    short_.push_back({});
    for (Input i = 0; i < alphabet_.input_count(); ++i) suffixes_.push_back({i});
  }

  const Alphabet& alphabet() const noexcept { return alphabet_; }
  const std::vector<Word>& short_prefixes() const noexcept { return short_; }
  const std::vector<Word>& suffixes() const noexcept { return suffixes_; }

  bool has_suffix(const Word& e) const {
    return std::find(suffixes_.begin(), suffixes_.end(), e) != suffixes_.end();
  }
  /// Adds `e` to E; false if it is already present or empty.
  bool add_suffix(const Word& e) {
    if (e.empty() || has_suffix(e)) return false;
    suffixes_.push_back(e);
    return true;
  }
  void add_short_prefix(const Word& s) {
    if (std::find(short_.begin(), short_.end(), s) == short_.end()) short_.push_back(s);
  }

  /// Every row of S followed by every row of S·Σ not already in S.
  std::vector<Word> all_rows() const {
    std::vector<Word> rows = short_;
    for (const auto& s : short_)
      for (Input i = 0; i < alphabet_.input_count(); ++i) {
        auto w = concat(s, i);
        if (std::find(short_.begin(), short_.end(), w) == short_.end()) rows.push_back(std::move(w));
      }
    return rows;
  }

  bool filled(const Word& row) const {
    auto it = cells_.find(row);
    return it != cells_.end() && it->second.size() == suffixes_.size();
  }

  const Row& row(const Word& w) const {
    auto it = cells_.find(w);
    if (it == cells_.end() || it->second.size() != suffixes_.size())
      throw std::logic_error("observation table row is not filled");
    return it->second;
  }
  const OutputWord& cell(const Word& w, std::size_t e) const { return row(w).at(e); }

  /// Absorbing symbol every cell of `w` is forced to, if the row lies behind an
  /// err/oop output of its parent.
  std::optional<Output> suppressed(const Word& w) const {
    if (!suppress_ || w.empty()) return std::nullopt;
    auto it = suppressed_.find(w);
    if (it != suppressed_.end()) return it->second;
    const Word parent(w.begin(), w.end() - 1);
    std::optional<Output> r = suppressed(parent);
    if (!r) {
      // Single-input columns come first and are filled with the parent row.
      const auto& c = cells_.at(parent).at(w.back());
      if (alphabet_.is_absorbing(c.front())) r = c.front();
    }
    suppressed_.emplace(w, r);
    return r;
  }

  /// Fills every missing cell with one batch per phase (S rows, then the
  /// extension rows). A word that is a prefix of an answered or batched word is
  /// not asked. An S-row cell s·i is asked as s·i·E[0], which also covers the
  /// first cell of the extension row s·i.
  void fill(MembershipOracle& oracle) {
    fill_rows(oracle, short_, true);
    std::vector<Word> ext;
    for (const auto& w : all_rows())
      if (std::find(short_.begin(), short_.end(), w) == short_.end()) ext.push_back(w);
    fill_rows(oracle, ext, false);
  }

  /// First extension row (row order, then input order) whose row is not a row
  /// of S.
  std::optional<Word> find_unclosed() const {
    for (const auto& s : short_)
      for (Input i = 0; i < alphabet_.input_count(); ++i) {
        auto w = concat(s, i);
        if (!representative(w)) return w;
      }
    return std::nullopt;
  }

  /// Index in S of the first row equal to row(w).
  std::optional<std::size_t> representative(const Word& w) const {
    const auto& r = row(w);
    for (std::size_t k = 0; k < short_.size(); ++k)
      if (row(short_[k]) == r) return k;
    return std::nullopt;
  }

 private:
  void fill_rows(MembershipOracle& oracle, const std::vector<Word>& rows, bool extend) {
    std::vector<Word> batch;
    std::vector<std::pair<Word, std::size_t>> wanted;
    for (const auto& w : rows) {
      auto& cells = cells_[w];
      if (cells.size() == suffixes_.size()) continue;
      if (auto sym = suppressed(w)) {
        for (std::size_t e = cells.size(); e < suffixes_.size(); ++e)
          cells.emplace_back(suffixes_[e].size(), *sym);
        continue;
      }
      for (std::size_t e = cells.size(); e < suffixes_.size(); ++e) {
        wanted.emplace_back(w, e);
        auto x = concat(w, suffixes_[e]);
        if (known(x)) continue;
        if (extend && suffixes_[e].size() == 1) x = concat(x, suffixes_.front());
        batch.push_back(std::move(x));
      }
    }
    std::sort(batch.begin(), batch.end());
    batch.erase(std::unique(batch.begin(), batch.end()), batch.end());
    for (std::size_t k = batch.size(); k-- > 0;)
      if (!(k + 1 < batch.size() && is_prefix(batch[k], batch[k + 1])) && !known(batch[k]))
        answers_.emplace(batch[k], oracle.query(batch[k]));
    for (const auto& [w, e] : wanted) {
      auto& cells = cells_[w];
      if (cells.size() != e) throw std::logic_error("observation table filled out of order");
      cells.push_back(last_n(*known(concat(w, suffixes_[e])), suffixes_[e].size()));
    }
  }

  /// Answer to `x` read off an answered word it is a prefix of.
  std::optional<OutputWord> known(const Word& x) const {
    auto it = answers_.lower_bound(x);
    if (it == answers_.end() || !is_prefix(x, it->first)) return std::nullopt;
    return OutputWord(it->second.begin(), it->second.begin() + static_cast<std::ptrdiff_t>(x.size()));
  }

  Alphabet alphabet_;
  bool suppress_;
  std::vector<Word> short_;
  std::vector<Word> suffixes_;
  std::map<Word, Row> cells_;
  std::map<Word, OutputWord> answers_;
  mutable std::map<Word, std::optional<Output>> suppressed_;
};

/// Hypothesis with the access word of each state.
struct Hypothesis {
  MealyMachine machine;
  std::vector<Word> access;
};

/// Machine of a closed table: one state per S row, the target of s·i is the
/// first S row equal to row(s·i), the output is T(s)(i).
inline Hypothesis build_hypothesis(const ObservationTable& t) {
  const auto& alpha = t.alphabet();
  const auto& s = t.short_prefixes();
  MealyBuilder b(alpha, s.size());
  for (std::size_t k = 0; k < s.size(); ++k)
    for (Input i = 0; i < alpha.input_count(); ++i) {
      auto to = t.representative(concat(s[k], i));
      if (!to) throw std::logic_error("hypothesis built from an unclosed table");
      b.set(static_cast<StateId>(k), i, t.cell(s[k], i).front(), static_cast<StateId>(*to));
    }
  return {b.build(), s};
}

/// Rivest-Schapire analysis: for each split u·v of the counterexample, keep the
/// hypothesis outputs on u and ask the oracle for v after the representative of
/// the state u reaches. Returns v at the first split whose answer disagrees
/// with the oracle's answer on the whole counterexample (the whole
/// counterexample when no proper split does).
inline Word analyze_counterexample(const Hypothesis& h, std::span<const Input> cex,
                                   MembershipOracle& oracle) {
  const auto target = oracle.query(cex);
  const auto& m = h.machine;
  StateId q = m.initial();
  OutputWord prefix_out;
  for (std::size_t k = 1; k < cex.size(); ++k) {
    prefix_out.push_back(m.output(q, cex[k - 1]));
    q = m.next(q, cex[k - 1]);
    const auto v = cex.subspan(k);
    auto tail = last_n(oracle.query(concat(h.access.at(q), v)), v.size());
    OutputWord out = prefix_out;
    out.insert(out.end(), tail.begin(), tail.end());
    if (out != target) return Word(v.begin(), v.end());
  }
  return Word(cex.begin(), cex.end());
}

/// Answer of an equivalence oracle: no counterexample means Correct. A
/// counterexample may come with a suffix that already separates two states.
struct EquivalenceResult {
  std::optional<Word> counterexample;
  std::optional<Word> suffix;

  bool correct() const noexcept { return !counterexample.has_value(); }
};

class EquivalenceOracle {
 public:
  virtual ~EquivalenceOracle() = default;
  virtual EquivalenceResult find_counterexample(const Hypothesis& h) = 0;
};

/// A counterexample that cannot refine the table: the system answered
/// inconsistently with a deterministic machine.
class InconsistentCounterexample : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LStarOptions {
  /// Equivalence queries after which learning gives up.
  std::uint64_t eq_cap = 1000;
  bool suppress_absorbing = true;
};

struct EqRound {
  std::uint64_t asked = 0;
  std::uint64_t executed = 0;
  std::size_t hypothesis_states = 0;
  std::optional<Word> counterexample;
};

struct LStarResult {
  Hypothesis hypothesis;
  std::uint64_t eq = 0;
  /// Membership queries issued by the learner itself (table and analysis).
  std::uint64_t learner_asked = 0;
  std::uint64_t learner_executed = 0;
  std::size_t max_cex_length = 0;
  std::size_t suffix_count = 0;
  std::vector<EqRound> rounds;
};

/// L* for Mealy machines. Throws BudgetExceeded when the equivalence oracle
/// still reports counterexamples after `eq_cap` rounds.
inline LStarResult lstar(MembershipOracle& mq, EquivalenceOracle& eq,
                         const LStarOptions& options = {}) {
  ObservationTable t(mq.alphabet(), options.suppress_absorbing);
  LStarResult r;
  auto learner = [&](auto&& f) {
    const auto a0 = mq.asked(), x0 = mq.executed();
    f();
    r.learner_asked += mq.asked() - a0;
    r.learner_executed += mq.executed() - x0;
  };
  auto close = [&] {
    t.fill(mq);
    while (auto w = t.find_unclosed()) {
      t.add_short_prefix(*w);
      t.fill(mq);
    }
  };
  learner(close);
  for (;;) {
    auto h = build_hypothesis(t);
    const auto a0 = mq.asked(), x0 = mq.executed();
    auto res = eq.find_counterexample(h);
    ++r.eq;
    r.rounds.push_back({mq.asked() - a0, mq.executed() - x0, h.machine.state_count(),
                        res.counterexample});
    if (res.correct()) {
      r.hypothesis = std::move(h);
      r.suffix_count = t.suffixes().size();
      return r;
    }
    const auto& cex = *res.counterexample;
    r.max_cex_length = std::max(r.max_cex_length, cex.size());
    if (r.eq >= options.eq_cap)
      throw BudgetExceeded("equivalence query cap of " + std::to_string(options.eq_cap) +
                               " reached without a correct hypothesis",
                           static_cast<long double>(options.eq_cap));
    bool progress = false;
    learner([&] {
      if (res.suffix && t.add_suffix(*res.suffix)) {
        t.fill(mq);
        progress = t.find_unclosed().has_value();
      }
      if (!progress && t.add_suffix(analyze_counterexample(h, cex, mq))) {
        t.fill(mq);
        progress = t.find_unclosed().has_value();
      }
      if (progress) close();
    });
    if (!progress)
      throw InconsistentCounterexample("counterexample [" + join(input_names(mq.alphabet(), cex), " ") +
                               "] does not refine the hypothesis; the system is not a "
                               "deterministic Mealy machine");
  }
}

}  // namespace typestate
