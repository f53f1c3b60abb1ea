#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "typestate/errors.hpp"
#include "typestate/interface_automaton.hpp"

namespace typestate {

/// Discrete-time delivery model. A callback becomes deliverable `delay` ticks
/// after its source state is entered; `wait` advances the clock by t_max.
/// Callins take no time, so t_min > 0 guarantees two consecutive callins both
/// run before any callback. A real-device adapter would map ticks to
/// milliseconds and pick t_max above the slowest observed callback.
struct TimingModel {
  std::uint32_t t_min = 1;
  std::uint32_t t_max = 10;
  std::map<std::string, std::uint32_t> delays;

  std::uint32_t delay(const std::string& callback) const {
    auto it = delays.find(callback);
    return it == delays.end() ? t_min : it->second;
  }

  void validate() const {
    if (t_min == 0 || t_max == 0) throw ModelError("timing ticks must be positive");
    if (t_min >= t_max) throw ModelError("timing requires t_min < t_max");
    for (const auto& [cb, d] : delays)
      if (d < t_min || d >= t_max)
        throw ModelError("delay of '" + cb + "' is outside [t_min, t_max)");
  }
};

/// Test fixture switch: lets a model carry several transitions on one symbol
/// (or several callbacks per state); the simulator resolves them with a
/// PRNG seeded from `seed`.
struct NondetFixture {
  std::uint64_t seed = 0;
};

struct OutputMerge {
  std::vector<std::string> members;
  std::string into;
};

/// Alphabet refinement: split callins into variants, merge callbacks.
struct RefinementSpec {
  std::map<std::string, std::vector<std::string>> splits;
  std::vector<OutputMerge> merges;

  bool empty() const { return splits.empty() && merges.empty(); }
};

/// Parameters of the unbounded request/response fixture: every `request`
/// queues one `response`.
struct RequestResponse {
  std::string request;
  std::string response;
};

struct ModelTransition {
  std::string from;
  std::string symbol;
  std::string to;
  /// Split variant this branch belongs to (empty: shared by all variants).
  std::string variant;

  auto operator<=>(const ModelTransition&) const = default;
};

inline constexpr std::string_view kInterfaceAutomatonKind = "interface-automaton";
inline constexpr std::string_view kRequestResponseKind = "request-response";

/// Ground-truth description driving the simulator. Transitions are kept by
/// name and may be non-deterministic when a fixture asks for it.
struct ModelSpec {
  std::string kind{kInterfaceAutomatonKind};
  std::string source;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::vector<std::string> states;
  std::string initial;
  std::vector<ModelTransition> transitions;
  std::optional<TimingModel> timing;
  std::optional<NondetFixture> nondet;
  std::optional<RefinementSpec> refinement;
  std::optional<RequestResponse> request_response;

  bool is_request_response() const { return kind == kRequestResponseKind; }

  bool is_input(const std::string& s) const {
    return std::find(inputs.begin(), inputs.end(), s) != inputs.end();
  }
  bool is_output(const std::string& s) const {
    return std::find(outputs.begin(), outputs.end(), s) != outputs.end();
  }

  /// Checks names and references; does not require determinism.
  void validate() const {
    if (is_request_response()) {
      if (!request_response) throw ModelError("request-response model lacks its fields");
      validate_user_symbol(request_response->request);
      validate_user_symbol(request_response->response);
      return;
    }
    std::set<std::string> symbols;
    for (const auto& s : inputs) {
      validate_user_symbol(s);
      if (!symbols.insert(s).second) throw ModelError("duplicate symbol '" + s + "'");
    }
    for (const auto& s : outputs) {
      validate_user_symbol(s);
      if (!symbols.insert(s).second) throw ModelError("duplicate symbol '" + s + "'");
    }
    std::set<std::string> names(states.begin(), states.end());
    if (states.empty()) throw ModelError("model has no states");
    if (names.size() != states.size()) throw ModelError("duplicate state names");
    if (!names.count(initial)) throw ModelError("unknown initial state '" + initial + "'");
    for (const auto& t : transitions) {
      if (!names.count(t.from)) throw ModelError("unknown state '" + t.from + "'");
      if (!names.count(t.to)) throw ModelError("unknown state '" + t.to + "'");
      if (!symbols.count(t.symbol)) throw ModelError("unknown symbol '" + t.symbol + "'");
      if (!t.variant.empty() && !is_input(t.symbol))
        throw ModelError("only callin transitions may carry a variant");
    }
    if (timing) timing->validate();
  }

  /// Deterministic view; throws ModelError naming the offending state when a
  /// symbol has two targets or a state has two callbacks.
  InterfaceAutomaton to_interface_automaton() const {
    if (is_request_response())
      throw ModelError("request-response models have no finite automaton");
    validate();
    auto state_id = [&](const std::string& n) {
      return static_cast<StateId>(std::find(states.begin(), states.end(), n) - states.begin());
    };
    auto label = [&](const std::string& s) {
      auto it = std::find(inputs.begin(), inputs.end(), s);
      if (it != inputs.end())
        return Label{LabelKind::input, static_cast<std::uint32_t>(it - inputs.begin())};
      auto ot = std::find(outputs.begin(), outputs.end(), s);
      return Label{LabelKind::output, static_cast<std::uint32_t>(ot - outputs.begin())};
    };
    std::vector<IaTransition> ts;
    for (const auto& t : transitions) ts.push_back({state_id(t.from), label(t.symbol), state_id(t.to)});
    return InterfaceAutomaton(inputs, outputs, states, state_id(initial), std::move(ts));
  }
};

/// Applies splits and merges. Split variants replace the callin in place;
/// branches tagged with a variant move to that variant, untagged branches are
/// copied to every variant. Merged callbacks take the position of their first
/// member and identical transitions collapse.
inline ModelSpec apply_refinement(const ModelSpec& spec, const RefinementSpec& r) {
  ModelSpec out = spec;
  out.refinement.reset();
  if (r.empty()) return out;
  if (spec.is_request_response())
    throw ModelError("refinement is not supported on request-response models");

  for (const auto& [callin, variants] : r.splits) {
    if (!spec.is_input(callin)) throw ModelError("cannot split unknown callin '" + callin + "'");
    if (variants.empty()) throw ModelError("split of '" + callin + "' lists no variants");
    std::set<std::string> distinct(variants.begin(), variants.end());
    if (distinct.size() != variants.size())
      throw ModelError("split variants of '" + callin + "' are not distinct");
  }
  std::map<std::string, std::string> merged_into;
  for (const auto& m : r.merges) {
    if (m.members.empty()) throw ModelError("empty merge class");
    for (const auto& s : m.members) {
      if (!spec.is_output(s)) throw ModelError("cannot merge unknown callback '" + s + "'");
      if (!merged_into.emplace(s, m.into).second)
        throw ModelError("callback '" + s + "' appears in two merge classes");
    }
  }

  out.inputs.clear();
  for (const auto& s : spec.inputs) {
    auto it = r.splits.find(s);
    if (it == r.splits.end()) out.inputs.push_back(s);
    else out.inputs.insert(out.inputs.end(), it->second.begin(), it->second.end());
  }
  out.outputs.clear();
  std::set<std::string> placed;
  for (const auto& s : spec.outputs) {
    auto it = merged_into.find(s);
    const auto& name = it == merged_into.end() ? s : it->second;
    if (placed.insert(name).second) out.outputs.push_back(name);
  }

  out.transitions.clear();
  std::set<ModelTransition> seen;
  auto emit = [&](ModelTransition t) {
    if (seen.insert(t).second) out.transitions.push_back(std::move(t));
  };
  for (const auto& t : spec.transitions) {
    if (auto it = r.splits.find(t.symbol); it != r.splits.end()) {
      const auto& vs = it->second;
      if (t.variant.empty()) {
        for (const auto& v : vs) emit({t.from, v, t.to, ""});
      } else {
        if (std::find(vs.begin(), vs.end(), t.variant) == vs.end())
          throw ModelError("transition variant '" + t.variant + "' is not a split of '" +
                           t.symbol + "'");
        emit({t.from, t.variant, t.to, ""});
      }
    } else if (auto mt = merged_into.find(t.symbol); mt != merged_into.end()) {
      emit({t.from, mt->second, t.to, t.variant});
    } else {
      emit(t);
    }
  }

  if (out.timing) {
    std::map<std::string, std::uint32_t> delays;
    for (const auto& [cb, d] : out.timing->delays) {
      auto it = merged_into.find(cb);
      delays.emplace(it == merged_into.end() ? cb : it->second, d);
    }
    out.timing->delays = std::move(delays);
  }
  out.validate();
  return out;
}

}  // namespace typestate
