#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "typestate/closure.hpp"
#include "typestate/model.hpp"

namespace typestate {

/// Unbounded request/response interface: each request queues one response and
/// every wait delivers one. Its closure is not regular.
class RequestResponseSimulator final : public AsyncInterface {
 public:
  explicit RequestResponseSimulator(const ModelSpec& spec)
      : timing_(spec.timing.value_or(TimingModel{})) {
    if (!spec.is_request_response()) throw ModelError("not a request-response model");
    spec.validate();
    timing_.validate();
    callins_ = {spec.request_response->request};
    callbacks_ = {spec.request_response->response};
  }

  const std::vector<std::string>& callins() const override { return callins_; }
  const std::vector<std::string>& callbacks() const override { return callbacks_; }

  void reset() override {
    clock_ = 0;
    due_.clear();
  }

  bool invoke(std::uint32_t callin) override {
    if (callin != 0) throw InputDomainError("unknown callin index");
    due_.push_back(clock_ + timing_.delay(callbacks_[0]));
    return true;
  }

  std::optional<std::uint32_t> await_callback() override {
    clock_ += timing_.t_max;
    if (due_.empty() || due_.front() > clock_) return std::nullopt;
    due_.pop_front();
    return 0;
  }

  std::size_t outstanding() const noexcept { return due_.size(); }

 private:
  TimingModel timing_;
  std::vector<std::string> callins_, callbacks_;
  std::uint64_t clock_ = 0;
  std::deque<std::uint64_t> due_;
};

/// Closure semantics of the request/response interface; the state is the
/// number of outstanding responses.
class CounterSemantics {
 public:
  using State = std::uint64_t;

  CounterSemantics(const std::string& request, const std::string& response)
      : alphabet_(Alphabet::closed(std::vector<std::string>{request},
                                   std::vector<std::string>{response})) {}
  explicit CounterSemantics(const ModelSpec& spec)
      : CounterSemantics(spec.request_response.value().request,
                         spec.request_response.value().response) {}

  const Alphabet& alphabet() const { return alphabet_; }
  State initial() const { return 0; }

  std::pair<Output, State> step(State n, Input i) const {
    if (i == *alphabet_.wait()) {
      if (n == 0) return {*alphabet_.quiet(), 0};
      return {Output{0}, n - 1};
    }
    return {*alphabet_.lambda(), n + 1};
  }

 private:
  Alphabet alphabet_;
};

}  // namespace typestate
