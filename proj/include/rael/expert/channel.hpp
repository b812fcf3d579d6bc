#pragma once

#include <chrono>
#include <condition_variable>
#include <mutex>
#include <optional>
#include <string>

#include "rael/expert/advice.hpp"

namespace rael::expert {

/// Hands one advice request at a time from the training loop to a human
/// adviser. The trainer blocks in ask(); handlers read pending() and answer
/// with respond() from other threads.
class AdviceChannel {
 public:
  enum class Answer { Accepted, Invalid, Stale };
  struct Outcome {
    Answer answer;
    std::string reason;
  };

  explicit AdviceChannel(const env::EnvironmentSpec& spec) : spec_(spec) {}

  /// Publishes request and waits for a valid answer. nullopt on timeout or close.
  std::optional<AdviceResponse> ask(const AdviceRequest& request, std::chrono::milliseconds timeout);

  std::optional<AdviceRequest> pending() const;
  /// Invalid answers leave the request pending; a wrong or expired id is Stale.
  Outcome respond(const AdviceResponse& response);
  /// Wakes any waiting ask() and refuses further requests.
  void close();

 private:
  const env::EnvironmentSpec& spec_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::optional<AdviceRequest> pending_;
  std::optional<AdviceResponse> answer_;
  bool closed_ = false;
};

class InteractiveExpert : public Expert {
 public:
  InteractiveExpert(AdviceChannel& channel, std::chrono::milliseconds timeout) : channel_(channel), timeout_(timeout) {}

  std::optional<AdviceResponse> advise(const AdviceRequest& request) override {
    return channel_.ask(request, timeout_);
  }

 private:
  AdviceChannel& channel_;
  std::chrono::milliseconds timeout_;
};

}  // namespace rael::expert
