#include "rael/harness/service.hpp"

#include <chrono>

#include <httplib.h>
#include <spdlog/spdlog.h>

namespace rael::harness {

class Service::Observer : public engine::TrainObserver {
 public:
  explicit Observer(Service& s) : s_(s) {}

  void on_phase(int iteration, std::string_view phase) override {
    std::lock_guard lock(s_.mu_);
    s_.snap_.phase = std::string(phase);
    (void)iteration;
  }

  void on_iteration(const engine::IterationMetrics& m, const learner::BoostedQFunction&) override {
    std::lock_guard lock(s_.mu_);
    s_.snap_.metrics.push_back(m);
    s_.snap_.iteration = static_cast<int>(s_.snap_.metrics.size());
    s_.snap_.mean_return = m.mean_return;
    s_.snap_.budget_remaining = m.budget_remaining;
  }

  void on_query(const engine::QueryRecord& q) override {
    std::lock_guard lock(s_.mu_);
    s_.snap_.queries.push_back(q);
    s_.snap_.states[q.request_id] = q.state;
    if (q.entry) {
      s_.snap_.entries.push_back(*q.entry);
      --s_.snap_.budget_remaining;
    }
  }

 private:
  Service& s_;
};

namespace {

void reply(httplib::Response& res, int code, const json& body) {
  res.status = code;
  res.set_content(body.dump(), "application/json");
}

}  // namespace

Service::Service(ExperimentConfig config, std::string out_dir)
    : config_(std::move(config)),
      out_dir_(std::move(out_dir)),
      seed_(config_.seeds.front()),
      env_(make_environment(config_.environment)),
      channel_(env_->spec()),
      expert_(channel_, std::chrono::milliseconds(config_.advice_timeout_ms)),
      server_(std::make_unique<httplib::Server>()),
      observer_(std::make_unique<Observer>(*this)) {
  config_.expert = ExpertMode::Interactive;
  snap_.budget_remaining = config_.train.budget;
  // No SO_REUSEPORT: a second server on a taken port must fail to bind.
  server_->set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const char*>(&yes), sizeof yes);
  });
  routes();
}

Service::~Service() { stop(); }

json Service::status_json() const {
  std::lock_guard lock(mu_);
  return {{"iteration", snap_.iteration},
          {"phase", snap_.phase},
          {"status", snap_.status},
          {"budget_remaining", snap_.budget_remaining},
          {"budget", config_.train.budget},
          {"mean_return", snap_.mean_return},
          {"seed", seed_},
          {"iterations", config_.train.iterations},
          {"env", env_->name()}};
}

void Service::routes() {
  auto& srv = *server_;
  srv.Get("/status", [this](const httplib::Request&, httplib::Response& res) { reply(res, 200, status_json()); });

  srv.Get("/metrics", [this](const httplib::Request& req, httplib::Response& res) {
    std::size_t from = 0;
    if (req.has_param("from")) {
      try {
        from = std::stoul(req.get_param_value("from"));
      } catch (const std::exception&) {
        return reply(res, 400, {{"error", "from must be a non-negative integer"}});
      }
    }
    json rows = json::array();
    std::lock_guard lock(mu_);
    for (const auto& m : snap_.metrics)
      if (m.iteration >= static_cast<int>(from)) rows.push_back(to_json(m));
    reply(res, 200, {{"rows", rows}});
  });

  srv.Get("/advice/pending", [this](const httplib::Request&, httplib::Response& res) {
    const auto pending = channel_.pending();
    if (!pending) {
      res.status = 204;
      return;
    }
    {
      std::lock_guard lock(mu_);
      snap_.states[pending->id] = pending->state;
    }
    reply(res, 200, to_json(*pending));
  });

  srv.Post("/advice/respond", [this](const httplib::Request& req, httplib::Response& res) {
    expert::AdviceResponse response;
    try {
      response = response_from_json(json::parse(req.body));
    } catch (const json::parse_error& e) {
      return reply(res, 422, {{"result", "validation-error"}, {"reason", std::string("body is not JSON: ") + e.what()}});
    } catch (const WireError& e) {
      return reply(res, 422, {{"result", "validation-error"}, {"reason", e.what()}});
    }
    const auto outcome = channel_.respond(response);
    switch (outcome.answer) {
      case expert::AdviceChannel::Answer::Accepted:
        return reply(res, 200, {{"result", "accepted"}, {"declined", response.declined}});
      case expert::AdviceChannel::Answer::Invalid:
        return reply(res, 422, {{"result", "validation-error"}, {"reason", outcome.reason}});
      case expert::AdviceChannel::Answer::Stale:
        return reply(res, 409, {{"result", "stale-request"}, {"reason", outcome.reason}});
    }
  });

  srv.Get("/advice/ledger", [this](const httplib::Request&, httplib::Response& res) {
    json entries = json::array(), queries = json::array();
    std::lock_guard lock(mu_);
    for (const auto& e : snap_.entries) entries.push_back(to_json(e));
    for (const auto& q : snap_.queries) queries.push_back(to_json(q));
    reply(res, 200,
          {{"budget", config_.train.budget},
           {"remaining", snap_.budget_remaining},
           {"entries", entries},
           {"queries", queries}});
  });

  srv.Get("/state/render", [this](const httplib::Request& req, httplib::Response& res) {
    std::uint64_t id = 0;
    try {
      id = std::stoull(req.get_param_value("id"));
    } catch (const std::exception&) {
      return reply(res, 400, {{"error", "id must be a request id"}});
    }
    logic::SymbolicState state;
    {
      std::lock_guard lock(mu_);
      const auto it = snap_.states.find(id);
      if (it != snap_.states.end()) state = it->second;
    }
    if (state.size() == 0) {
      const auto pending = channel_.pending();
      if (!pending || pending->id != id) return reply(res, 404, {{"error", "unknown request id"}});
      state = pending->state;
    }
    auto body = render_json(*env_, state);
    body["id"] = id;
    reply(res, 200, body);
  });
}

int Service::bind(const std::string& host, int port) {
  int bound = port;
  if (port == 0)
    bound = server_->bind_to_any_port(host);
  else if (!server_->bind_to_port(host, port))
    bound = -1;
  if (bound <= 0) throw ServeError("cannot bind " + host + ":" + std::to_string(port) + " (port in use?)");
  bound_ = true;
  return bound;
}

void Service::start() {
  if (!bound_) throw ServeError("bind before start");
  http_thread_ = std::thread([this] { server_->listen_after_bind(); });
  train_thread_ = std::thread([this] {
    result_ = run_seed(config_, seed_, out_dir_, &expert_, observer_.get(), &cancel_);
    {
      std::lock_guard lock(mu_);
      snap_.phase = "idle";
      snap_.status = result_.ok ? "finished" : (result_.cancelled ? "stopped" : "crashed");
    }
    {
      std::lock_guard lock(done_mu_);
      done_ = true;
    }
    done_cv_.notify_all();
  });
}

void Service::wait_training() {
  std::unique_lock lock(done_mu_);
  done_cv_.wait(lock, [this] { return done_.load(); });
}

void Service::stop() {
  cancel_ = true;
  channel_.close();
  if (train_thread_.joinable()) train_thread_.join();
  if (server_) server_->stop();
  if (http_thread_.joinable()) http_thread_.join();
}

}  // namespace rael::harness
