#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "typestate/errors.hpp"

namespace typestate {

using StateId = std::uint32_t;
using Input = std::uint32_t;
using Output = std::uint32_t;

/// Input word; symbols are indices into an Alphabet's input list.
using Word = std::vector<Input>;
using OutputWord = std::vector<Output>;

// Reserved symbols of the synchronous closure and of learning purposes.
inline constexpr std::string_view kWait = "wait";
inline constexpr std::string_view kQuiet = "quiet";
inline constexpr std::string_view kLambda = "lambda";
inline constexpr std::string_view kErr = "err";
inline constexpr std::string_view kOutOfPurpose = "oop";

inline constexpr std::array<std::string_view, 5> kReservedNames = {
    kWait, kQuiet, kLambda, kErr, kOutOfPurpose};

inline bool is_reserved_name(std::string_view name) {
  return std::find(kReservedNames.begin(), kReservedNames.end(), name) !=
         kReservedNames.end();
}

enum class SymbolKind { input, output, reserved };

struct Symbol {
  std::string name;
  SymbolKind kind;
};

/// Throws ModelError unless `name` is usable as a user-declared callin/callback.
inline void validate_user_symbol(std::string_view name) {
  if (name.empty()) throw ModelError("symbol names must be non-empty");
  if (is_reserved_name(name))
    throw ModelError("symbol name '" + std::string(name) + "' is reserved");
}

/// Ordered input and output symbol lists of a Mealy machine. Declaration
/// order fixes every enumeration order in the library.
class Alphabet {
 public:
  Alphabet() = default;

  Alphabet(std::vector<std::string> inputs, std::vector<std::string> outputs)
      : inputs_(std::move(inputs)), outputs_(std::move(outputs)) {
    index(inputs_, input_index_, "input");
    index(outputs_, output_index_, "output");
  }

  /// Closed alphabet over user callins/callbacks: inputs get `wait`, outputs
  /// get `quiet`, `lambda`, `err` (and `oop` when a learning purpose is used),
  /// reserved symbols last.
  static Alphabet closed(std::span<const std::string> callins,
                         std::span<const std::string> callbacks,
                         bool with_out_of_purpose = false) {
    std::vector<std::string> in(callins.begin(), callins.end());
    std::vector<std::string> out(callbacks.begin(), callbacks.end());
    for (const auto& s : in) validate_user_symbol(s);
    for (const auto& s : out) validate_user_symbol(s);
    in.emplace_back(kWait);
    out.emplace_back(kQuiet);
    out.emplace_back(kLambda);
    out.emplace_back(kErr);
    if (with_out_of_purpose) out.emplace_back(kOutOfPurpose);
    return Alphabet(std::move(in), std::move(out));
  }

  /// Same alphabet with `oop` appended to the outputs (no-op if present).
  Alphabet with_out_of_purpose() const {
    if (oop()) return *this;
    auto out = outputs_;
    out.emplace_back(kOutOfPurpose);
    return Alphabet(inputs_, std::move(out));
  }

  std::size_t input_count() const noexcept { return inputs_.size(); }
  std::size_t output_count() const noexcept { return outputs_.size(); }
  const std::vector<std::string>& inputs() const noexcept { return inputs_; }
  const std::vector<std::string>& outputs() const noexcept { return outputs_; }

  const std::string& input_name(Input i) const { return inputs_.at(i); }
  const std::string& output_name(Output o) const { return outputs_.at(o); }

  std::optional<Input> find_input(std::string_view name) const {
    return lookup(input_index_, name);
  }
  std::optional<Output> find_output(std::string_view name) const {
    return lookup(output_index_, name);
  }

  Input input(std::string_view name) const {
    if (auto i = find_input(name)) return *i;
    throw InputDomainError("unknown input symbol '" + std::string(name) + "'");
  }
  Output output(std::string_view name) const {
    if (auto o = find_output(name)) return *o;
    throw InputDomainError("unknown output symbol '" + std::string(name) + "'");
  }

  std::optional<Input> wait() const { return find_input(kWait); }
  std::optional<Output> quiet() const { return find_output(kQuiet); }
  std::optional<Output> lambda() const { return find_output(kLambda); }
  std::optional<Output> err() const { return find_output(kErr); }
  std::optional<Output> oop() const { return find_output(kOutOfPurpose); }

  /// err and oop: once emitted, every later output is the same symbol.
  bool is_absorbing(Output o) const {
    return (err() && *err() == o) || (oop() && *oop() == o);
  }

  /// Number of callins, i.e. inputs other than `wait`.
  std::size_t user_input_count() const {
    return inputs_.size() - (wait() ? 1 : 0);
  }

  bool operator==(const Alphabet& other) const {
    return inputs_ == other.inputs_ && outputs_ == other.outputs_;
  }

 private:
  using Index = std::unordered_map<std::string, std::uint32_t>;

  static void index(const std::vector<std::string>& names, Index& idx,
                    const char* what) {
    for (std::uint32_t k = 0; k < names.size(); ++k) {
      if (names[k].empty())
        throw ModelError(std::string(what) + " symbol names must be non-empty");
      if (!idx.emplace(names[k], k).second)
        throw ModelError("duplicate " + std::string(what) + " symbol '" +
                         names[k] + "'");
    }
  }

  static std::optional<std::uint32_t> lookup(const Index& idx,
                                             std::string_view name) {
    auto it = idx.find(std::string(name));
    if (it == idx.end()) return std::nullopt;
    return it->second;
  }

  std::vector<std::string> inputs_;
  std::vector<std::string> outputs_;
  Index input_index_;
  Index output_index_;
};

inline Word parse_word(const Alphabet& alphabet,
                       std::span<const std::string> names) {
  Word w;
  w.reserve(names.size());
  for (const auto& n : names) w.push_back(alphabet.input(n));
  return w;
}

inline Word parse_word(const Alphabet& alphabet,
                       std::initializer_list<std::string_view> names) {
  Word w;
  w.reserve(names.size());
  for (auto n : names) w.push_back(alphabet.input(n));
  return w;
}

inline std::vector<std::string> input_names(const Alphabet& alphabet,
                                            std::span<const Input> w) {
  std::vector<std::string> out;
  for (auto i : w) out.push_back(alphabet.input_name(i));
  return out;
}

inline std::vector<std::string> output_names(const Alphabet& alphabet,
                                             std::span<const Output> w) {
  std::vector<std::string> out;
  for (auto o : w) out.push_back(alphabet.output_name(o));
  return out;
}

inline std::string join(const std::vector<std::string>& parts,
                        std::string_view sep = " ") {
  std::string s;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    if (k) s += sep;
    s += parts[k];
  }
  return s;
}

/// Renders an alternating trace `i0/o0 i1/o1 ...`.
inline std::string format_trace(const Alphabet& alphabet,
                                std::span<const Input> in,
                                std::span<const Output> out) {
  std::string s;
  for (std::size_t k = 0; k < in.size(); ++k) {
    if (k) s += ' ';
    s += alphabet.input_name(in[k]);
    s += '/';
    s += k < out.size() ? alphabet.output_name(out[k]) : std::string("?");
  }
  return s;
}

inline bool is_prefix(std::span<const Input> prefix, std::span<const Input> w) {
  return prefix.size() <= w.size() &&
         std::equal(prefix.begin(), prefix.end(), w.begin());
}

inline Word concat(std::span<const Input> a, std::span<const Input> b) {
  Word w(a.begin(), a.end());
  w.insert(w.end(), b.begin(), b.end());
  return w;
}

inline Word concat(std::span<const Input> a, Input i) {
  Word w(a.begin(), a.end());
  w.push_back(i);
  return w;
}

}  // namespace typestate
