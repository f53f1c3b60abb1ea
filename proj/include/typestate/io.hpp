#pragma once

#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "typestate/errors.hpp"
#include "typestate/interface_automaton.hpp"
#include "typestate/mealy.hpp"
#include "typestate/model.hpp"
#include "typestate/purpose.hpp"

namespace typestate {

using Json = nlohmann::ordered_json;

namespace detail {

inline void allow_keys(const Json& j, std::string_view what,
                       std::initializer_list<std::string_view> keys) {
  if (!j.is_object()) throw ModelError(std::string(what) + " must be a JSON object");
  for (const auto& [k, v] : j.items()) {
    bool known = false;
    for (auto key : keys) known = known || k == key;
    if (!known) throw ModelError("unknown field '" + k + "' in " + std::string(what));
  }
}

inline const Json& need(const Json& j, const char* key, std::string_view what) {
  auto it = j.find(key);
  if (it == j.end()) throw ModelError(std::string(what) + " lacks field '" + key + "'");
  return *it;
}

inline std::string str(const Json& j, const char* key, std::string_view what) {
  const auto& v = need(j, key, what);
  if (!v.is_string()) throw ModelError(std::string(what) + "." + key + " must be a string");
  return v.get<std::string>();
}

inline std::vector<std::string> names(const Json& j, const char* key, std::string_view what) {
  const auto& v = need(j, key, what);
  if (!v.is_array()) throw ModelError(std::string(what) + "." + key + " must be an array");
  std::vector<std::string> out;
  for (const auto& e : v) {
    if (!e.is_string())
      throw ModelError(std::string(what) + "." + key + " must contain strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

inline std::uint64_t natural(const Json& j, const char* key, std::string_view what) {
  const auto& v = need(j, key, what);
  if (!v.is_number_unsigned())
    throw ModelError(std::string(what) + "." + key + " must be a non-negative integer");
  return v.get<std::uint64_t>();
}

inline TimingModel parse_timing(const Json& j) {
  allow_keys(j, "timing", {"t_min", "t_max", "delays"});
  TimingModel t;
  if (j.contains("t_min")) t.t_min = static_cast<std::uint32_t>(natural(j, "t_min", "timing"));
  if (j.contains("t_max")) t.t_max = static_cast<std::uint32_t>(natural(j, "t_max", "timing"));
  if (j.contains("delays")) {
    const auto& d = j.at("delays");
    if (!d.is_object()) throw ModelError("timing.delays must be an object");
    for (const auto& [cb, v] : d.items()) {
      if (!v.is_number_unsigned()) throw ModelError("timing.delays values must be naturals");
      t.delays[cb] = v.get<std::uint32_t>();
    }
  }
  return t;
}

inline RefinementSpec parse_refinement(const Json& j) {
  allow_keys(j, "refinement", {"splits", "merges"});
  RefinementSpec r;
  if (j.contains("splits")) {
    const auto& s = j.at("splits");
    if (!s.is_object()) throw ModelError("refinement.splits must be an object");
    for (const auto& [callin, v] : s.items()) {
      Json wrap = {{"variants", v}};
      r.splits[callin] = names(wrap, "variants", "refinement.splits");
    }
  }
  if (j.contains("merges")) {
    const auto& m = j.at("merges");
    if (!m.is_array()) throw ModelError("refinement.merges must be an array");
    for (const auto& e : m) {
      allow_keys(e, "merge", {"members", "into"});
      r.merges.push_back({names(e, "members", "merge"), str(e, "into", "merge")});
    }
  }
  return r;
}

inline Json timing_to_json(const TimingModel& t) {
  Json j = {{"t_min", t.t_min}, {"t_max", t.t_max}};
  if (!t.delays.empty()) {
    Json d = Json::object();
    for (const auto& [cb, v] : t.delays) d[cb] = v;
    j["delays"] = d;
  }
  return j;
}

}  // namespace detail

inline Json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ModelError(origin + ": malformed JSON: " + e.what());
  }
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_json_text(buf.str(), path);
}

/// Model spec: an interface automaton (optionally with timing, nondet and
/// refinement blocks and variant-tagged transitions) or a request-response
/// fixture.
inline ModelSpec parse_model_spec(const Json& j) {
  using namespace detail;
  if (!j.is_object()) throw ModelError("model spec must be a JSON object");
  ModelSpec m;
  m.kind = j.contains("kind") ? str(j, "kind", "model") : std::string(kInterfaceAutomatonKind);
  if (m.kind == kRequestResponseKind) {
    allow_keys(j, "model", {"kind", "source", "request", "response", "timing"});
    m.request_response = RequestResponse{str(j, "request", "model"), str(j, "response", "model")};
  } else if (m.kind == kInterfaceAutomatonKind) {
    allow_keys(j, "model", {"kind", "source", "inputs", "outputs", "states", "initial",
                            "transitions", "timing", "nondet", "refinement"});
    m.inputs = names(j, "inputs", "model");
    m.outputs = names(j, "outputs", "model");
    m.states = names(j, "states", "model");
    m.initial = str(j, "initial", "model");
    const auto& ts = need(j, "transitions", "model");
    if (!ts.is_array()) throw ModelError("model.transitions must be an array");
    for (const auto& t : ts) {
      allow_keys(t, "transition", {"from", "symbol", "to", "variant"});
      m.transitions.push_back({str(t, "from", "transition"), str(t, "symbol", "transition"),
                               str(t, "to", "transition"),
                               t.contains("variant") ? str(t, "variant", "transition") : ""});
    }
    if (j.contains("nondet")) {
      allow_keys(j.at("nondet"), "nondet", {"seed"});
      m.nondet = NondetFixture{natural(j.at("nondet"), "seed", "nondet")};
    }
    if (j.contains("refinement")) m.refinement = parse_refinement(j.at("refinement"));
  } else {
    throw ModelError("unsupported model kind '" + m.kind + "'");
  }
  if (j.contains("source")) m.source = str(j, "source", "model");
  if (j.contains("timing")) m.timing = parse_timing(j.at("timing"));
  m.validate();
  return m;
}

inline ModelSpec load_model_spec(const std::string& path) {
  return parse_model_spec(read_json_file(path));
}

inline Json model_spec_to_json(const ModelSpec& m) {
  Json j;
  j["kind"] = m.kind;
  if (!m.source.empty()) j["source"] = m.source;
  if (m.is_request_response()) {
    j["request"] = m.request_response->request;
    j["response"] = m.request_response->response;
  } else {
    j["inputs"] = m.inputs;
    j["outputs"] = m.outputs;
    j["states"] = m.states;
    j["initial"] = m.initial;
    Json ts = Json::array();
    for (const auto& t : m.transitions) {
      Json e = {{"from", t.from}, {"symbol", t.symbol}, {"to", t.to}};
      if (!t.variant.empty()) e["variant"] = t.variant;
      ts.push_back(e);
    }
    j["transitions"] = ts;
    if (m.nondet) j["nondet"] = {{"seed", m.nondet->seed}};
    if (m.refinement) {
      Json r = Json::object();
      if (!m.refinement->splits.empty()) {
        Json s = Json::object();
        for (const auto& [k, v] : m.refinement->splits) s[k] = v;
        r["splits"] = s;
      }
      if (!m.refinement->merges.empty()) {
        Json ms = Json::array();
        for (const auto& g : m.refinement->merges)
          ms.push_back({{"members", g.members}, {"into", g.into}});
        r["merges"] = ms;
      }
      j["refinement"] = r;
    }
  }
  if (m.timing) j["timing"] = detail::timing_to_json(*m.timing);
  return j;
}

inline InterfaceAutomaton parse_interface_automaton(const Json& j) {
  auto m = parse_model_spec(j);
  if (m.timing || m.nondet || m.refinement)
    throw ModelError("interface automaton files carry no simulator blocks");
  return m.to_interface_automaton();
}

inline Json interface_automaton_to_json(const InterfaceAutomaton& a,
                                        const std::string& source = "") {
  Json j;
  j["kind"] = kInterfaceAutomatonKind;
  if (!source.empty()) j["source"] = source;
  j["inputs"] = a.inputs();
  j["outputs"] = a.outputs();
  std::vector<std::string> states;
  for (StateId q = 0; q < a.state_count(); ++q) states.push_back(a.state_name(q));
  j["states"] = states;
  j["initial"] = a.state_name(a.initial());
  Json ts = Json::array();
  for (const auto& t : a.transitions())
    ts.push_back({{"from", a.state_name(t.from)},
                  {"symbol", a.label_name(t.label)},
                  {"to", a.state_name(t.to)}});
  j["transitions"] = ts;
  return j;
}

inline MealyMachine parse_mealy(const Json& j) {
  using namespace detail;
  allow_keys(j, "machine", {"kind", "source", "inputs", "outputs", "states", "initial",
                            "transitions"});
  if (str(j, "kind", "machine") != "mealy") throw ModelError("machine kind must be 'mealy'");
  Alphabet alpha(names(j, "inputs", "machine"), names(j, "outputs", "machine"));
  const auto states = names(j, "states", "machine");
  if (std::set<std::string>(states.begin(), states.end()).size() != states.size())
    throw ModelError("duplicate state names");
  auto id = [&](const std::string& n) {
    auto it = std::find(states.begin(), states.end(), n);
    if (it == states.end()) throw ModelError("unknown state '" + n + "'");
    return static_cast<StateId>(it - states.begin());
  };
  MealyBuilder b(alpha, states.size());
  const auto& ts = need(j, "transitions", "machine");
  if (!ts.is_array()) throw ModelError("machine.transitions must be an array");
  for (const auto& t : ts) {
    allow_keys(t, "transition", {"from", "input", "output", "to"});
    auto i = alpha.find_input(str(t, "input", "transition"));
    auto o = alpha.find_output(str(t, "output", "transition"));
    if (!i || !o) throw ModelError("transition uses an unknown symbol");
    b.set(id(str(t, "from", "transition")), *i, *o, id(str(t, "to", "transition")));
  }
  try {
    return b.initial(id(str(j, "initial", "machine"))).names(states).build();
  } catch (const std::invalid_argument& e) {
    throw ModelError(e.what());
  }
}

inline Json mealy_to_json(const MealyMachine& m) {
  Json j;
  j["kind"] = "mealy";
  j["inputs"] = m.alphabet().inputs();
  j["outputs"] = m.alphabet().outputs();
  std::vector<std::string> states;
  for (StateId q = 0; q < m.state_count(); ++q) states.push_back(m.state_name(q));
  j["states"] = states;
  j["initial"] = m.state_name(m.initial());
  Json ts = Json::array();
  for (StateId q = 0; q < m.state_count(); ++q)
    for (Input i = 0; i < m.input_count(); ++i)
      ts.push_back({{"from", m.state_name(q)},
                    {"input", m.alphabet().input_name(i)},
                    {"output", m.alphabet().output_name(m.output(q, i))},
                    {"to", m.state_name(m.next(q, i))}});
  j["transitions"] = ts;
  return j;
}

/// Purpose spec: states, initial, accepting and transitions {from, symbol, to}
/// over closed input names (callins and `wait`).
inline PurposeSpec parse_purpose_spec(const Json& j) {
  using namespace detail;
  allow_keys(j, "purpose", {"kind", "source", "states", "initial", "accepting", "transitions"});
  if (j.contains("kind") && str(j, "kind", "purpose") != "purpose")
    throw ModelError("purpose kind must be 'purpose'");
  PurposeSpec p;
  p.states = names(j, "states", "purpose");
  p.initial = str(j, "initial", "purpose");
  p.accepting = names(j, "accepting", "purpose");
  const auto& ts = need(j, "transitions", "purpose");
  if (!ts.is_array()) throw ModelError("purpose.transitions must be an array");
  for (const auto& t : ts) {
    allow_keys(t, "purpose transition", {"from", "symbol", "to"});
    p.transitions.push_back({str(t, "from", "purpose transition"),
                             str(t, "symbol", "purpose transition"),
                             str(t, "to", "purpose transition")});
  }
  return p;
}

inline PurposeSpec load_purpose_spec(const std::string& path) {
  return parse_purpose_spec(read_json_file(path));
}

}  // namespace typestate
