#include "rael/expert/channel.hpp"

namespace rael::expert {

std::optional<AdviceResponse> AdviceChannel::ask(const AdviceRequest& request, std::chrono::milliseconds timeout) {
  std::unique_lock lock(mu_);
  if (closed_) return std::nullopt;
  pending_ = request;
  answer_.reset();
  cv_.wait_for(lock, timeout, [&] { return answer_.has_value() || closed_; });
  pending_.reset();
  auto out = std::move(answer_);
  answer_.reset();
  return out;
}

std::optional<AdviceRequest> AdviceChannel::pending() const {
  std::lock_guard lock(mu_);
  return pending_;
}

AdviceChannel::Outcome AdviceChannel::respond(const AdviceResponse& response) {
  std::lock_guard lock(mu_);
  if (!pending_ || pending_->id != response.request_id || answer_)
    return {Answer::Stale, "no pending request with id " + std::to_string(response.request_id)};
  if (!response.declined) {
    try {
      to_entry(response, *pending_, spec_);
    } catch (const AdviceError& e) {
      return {Answer::Invalid, e.what()};
    }
  }
  answer_ = response;
  cv_.notify_all();
  return {Answer::Accepted, {}};
}

void AdviceChannel::close() {
  std::lock_guard lock(mu_);
  closed_ = true;
  cv_.notify_all();
}

}  // namespace rael::expert
