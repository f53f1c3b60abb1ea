#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "typestate/closure.hpp"
#include "typestate/model.hpp"
#include "typestate/oracle.hpp"

namespace typestate {

/// Discrete-time simulator of a model spec, used as the system under learning.
/// Callins run instantly; a callback is scheduled when its source state is
/// entered and delivered by the first `wait` whose clock reaches its due time.
/// Ambiguous choices are resolved by a seeded PRNG only when the model carries
/// a nondet fixture; otherwise they are rejected up front.
class Simulator final : public AsyncInterface {
 public:
  explicit Simulator(const ModelSpec& spec) : timing_(spec.timing.value_or(TimingModel{})) {
    if (spec.is_request_response())
      throw ModelError("use RequestResponseSimulator for request-response models");
    spec.validate();
    timing_.validate();
    callins_ = spec.inputs;
    callbacks_ = spec.outputs;
    states_ = spec.states;
    auto id = [&](const std::string& n) {
      return static_cast<StateId>(std::find(states_.begin(), states_.end(), n) - states_.begin());
    };
    initial_ = id(spec.initial);
    inputs_.assign(states_.size(), std::vector<std::vector<StateId>>(callins_.size()));
    outputs_.assign(states_.size(), {});
    for (const auto& t : spec.transitions) {
      const auto from = id(t.from), to = id(t.to);
      if (auto it = std::find(callins_.begin(), callins_.end(), t.symbol); it != callins_.end()) {
        auto& v = inputs_[from][static_cast<std::size_t>(it - callins_.begin())];
        if (std::find(v.begin(), v.end(), to) == v.end()) v.push_back(to);
      } else {
        const auto cb = static_cast<std::uint32_t>(
            std::find(callbacks_.begin(), callbacks_.end(), t.symbol) - callbacks_.begin());
        auto& v = outputs_[from];
        if (std::find(v.begin(), v.end(), std::pair{cb, to}) == v.end()) v.emplace_back(cb, to);
      }
    }
    if (spec.nondet) {
      rng_.emplace(spec.nondet->seed);
    } else {
      for (StateId q = 0; q < states_.size(); ++q) {
        for (std::size_t i = 0; i < callins_.size(); ++i)
          if (inputs_[q][i].size() > 1)
            throw ModelError("state '" + states_[q] + "' has several transitions on '" +
                             callins_[i] + "'");
        if (outputs_[q].size() > 1)
          throw ModelError("state '" + states_[q] + "' has several callbacks");
      }
    }
    reset();
  }

  const std::vector<std::string>& callins() const override { return callins_; }
  const std::vector<std::string>& callbacks() const override { return callbacks_; }

  void reset() override {
    q_ = initial_;
    clock_ = 0;
    ++runs_;
    schedule();
  }

  bool invoke(std::uint32_t callin) override {
    if (callin >= callins_.size()) throw InputDomainError("unknown callin index");
    const auto& choices = inputs_[q_][callin];
    if (choices.empty()) return false;
    const auto to = choose(choices);
    if (to != q_) {
      q_ = to;
      schedule();
    }
    return true;
  }

  std::optional<std::uint32_t> await_callback() override {
    clock_ += timing_.t_max;
    if (!pending_ || pending_->due > clock_) return std::nullopt;
    const auto cb = pending_->callback;
    q_ = pending_->to;
    schedule();
    return cb;
  }

  StateId state() const noexcept { return q_; }
  const std::string& state_name() const { return states_[q_]; }
  std::uint64_t clock() const noexcept { return clock_; }
  std::uint64_t runs() const noexcept { return runs_; }

 private:
  struct Pending {
    std::uint32_t callback;
    StateId to;
    std::uint64_t due;
  };

  template <class T>
  const T& choose(const std::vector<T>& v) {
    if (v.size() == 1 || !rng_) return v.front();
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(*rng_)];
  }

  void schedule() {
    pending_.reset();
    const auto& outs = outputs_[q_];
    if (outs.empty()) return;
    const auto& [cb, to] = choose(outs);
    pending_ = Pending{cb, to, clock_ + timing_.delay(callbacks_[cb])};
  }

  TimingModel timing_;
  std::vector<std::string> callins_, callbacks_, states_;
  StateId initial_ = 0;
  std::vector<std::vector<std::vector<StateId>>> inputs_;
  std::vector<std::vector<std::pair<std::uint32_t, StateId>>> outputs_;
  std::optional<std::mt19937_64> rng_;
  StateId q_ = 0;
  std::uint64_t clock_ = 0;
  std::uint64_t runs_ = 0;
  std::optional<Pending> pending_;
};

/// Two runs that agree on their inputs up to some position but disagree on the
/// output there.
struct NonDeterminismReport {
  Word prefix;
  OutputWord first;
  OutputWord second;
  Word first_query;
  Word second_query;

  std::string render(const Alphabet& a) const {
    std::ostringstream s;
    s << "non-deterministic behaviour after input prefix [" << join(input_names(a, prefix), " ")
      << "]\n  first:  " << format_trace(a, prefix, first)
      << "\n  second: " << format_trace(a, prefix, second)
      << "\n  first query:  [" << join(input_names(a, first_query), " ") << "]"
      << "\n  second query: [" << join(input_names(a, second_query), " ") << "]";
    return s.str();
  }
};

class NonDeterminismError : public std::runtime_error {
 public:
  NonDeterminismError(NonDeterminismReport report, const Alphabet& a)
      : std::runtime_error(report.render(a)), report_(std::move(report)) {}
  const NonDeterminismReport& report() const noexcept { return report_; }

 private:
  NonDeterminismReport report_;
};

/// Prefix-closed cache in front of a membership oracle. Answers every prefix
/// of a stored word, completes words that extend an err/oop prefix without
/// running them, and raises NonDeterminismError when two runs disagree.
class QueryCache final : public MembershipOracle {
 public:
  explicit QueryCache(MembershipOracle& inner) : inner_(&inner) { nodes_.emplace_back(); }

  const Alphabet& alphabet() const override { return inner_->alphabet(); }
  std::uint64_t executed() const noexcept override { return executed_; }
  std::uint64_t hits() const noexcept { return asked() - executed_; }
  std::size_t size() const noexcept { return nodes_.size() - 1; }

  std::optional<OutputWord> peek(std::span<const Input> w) const override {
    OutputWord out;
    out.reserve(w.size());
    std::uint32_t n = 0;
    for (std::size_t k = 0; k < w.size(); ++k) {
      auto it = nodes_[n].children.find(w[k]);
      if (it == nodes_[n].children.end()) {
        if (k > 0 && alphabet().is_absorbing(out.back())) {
          out.resize(w.size(), out.back());
          return out;
        }
        return std::nullopt;
      }
      n = it->second;
      out.push_back(nodes_[n].out);
    }
    return out;
  }

  /// First disagreement between `observed` (the answer to `w`) and the cache.
  std::optional<NonDeterminismReport> detect_nondeterminism(std::span<const Input> w,
                                                            const OutputWord& observed) const {
    std::uint32_t n = 0;
    OutputWord path;
    for (std::size_t k = 0; k < w.size() && k < observed.size(); ++k) {
      auto it = nodes_[n].children.find(w[k]);
      if (it == nodes_[n].children.end()) return std::nullopt;
      n = it->second;
      path.push_back(nodes_[n].out);
      if (nodes_[n].out != observed[k]) {
        NonDeterminismReport r;
        r.prefix.assign(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(k + 1));
        r.first = path;
        r.second.assign(observed.begin(), observed.begin() + static_cast<std::ptrdiff_t>(k + 1));
        r.first_query = origins_[nodes_[n].origin];
        r.second_query.assign(w.begin(), w.end());
        return r;
      }
    }
    return std::nullopt;
  }

 protected:
  OutputWord answer(std::span<const Input> w) override {
    if (auto hit = peek(w)) return *hit;
    auto out = inner_->query(w);
    ++executed_;
    if (auto r = detect_nondeterminism(w, out)) throw NonDeterminismError(*r, alphabet());
    insert(w, out);
    return out;
  }

 private:
  struct Node {
    std::map<Input, std::uint32_t> children;
    Output out = 0;
    std::uint32_t origin = 0;
  };

  void insert(std::span<const Input> w, const OutputWord& out) {
    const auto origin = static_cast<std::uint32_t>(origins_.size());
    origins_.emplace_back(w.begin(), w.end());
    std::uint32_t n = 0;
    for (std::size_t k = 0; k < w.size(); ++k) {
      auto it = nodes_[n].children.find(w[k]);
      if (it != nodes_[n].children.end()) {
        n = it->second;
        continue;
      }
      const auto fresh = static_cast<std::uint32_t>(nodes_.size());
      nodes_.push_back(Node{{}, out[k], origin});
      nodes_[n].children.emplace(w[k], fresh);
      n = fresh;
    }
  }

  MembershipOracle* inner_;
  std::vector<Node> nodes_;
  std::vector<Word> origins_;
  std::uint64_t executed_ = 0;
};

}  // namespace typestate
