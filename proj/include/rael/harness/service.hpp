#pragma once

#include <atomic>
#include <condition_variable>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "rael/expert/channel.hpp"
#include "rael/harness/run.hpp"
#include "rael/harness/wire.hpp"

namespace httplib {
class Server;
}

namespace rael::harness {

class ServeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A live training run with an interactive expert behind the HTTP advice
/// protocol. Training runs on its own thread; handlers only read a snapshot
/// and talk to the advice channel.
class Service {
 public:
  /// Trains config.seeds.front() into out_dir; the configured expert mode is
  /// replaced by the interactive channel.
  Service(ExperimentConfig config, std::string out_dir);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Binds host:port (0 picks a free port) and returns the bound port.
  /// Throws ServeError when the port is taken.
  int bind(const std::string& host, int port);
  /// Starts the HTTP listener and the training thread.
  void start();
  /// Blocks until training has finished or been stopped.
  void wait_training();
  bool training_done() const { return done_.load(); }
  /// Cancels training, waits for artifacts to be written and stops the listener.
  void stop();

  /// The run's outcome; valid once training is done.
  const SeedRun& result() const { return result_; }

 private:
  class Observer;
  struct Snapshot {
    int iteration = 0;
    std::string phase = "starting";
    std::string status = "training";
    int budget_remaining = 0;
    double mean_return = 0.0;
    std::vector<engine::IterationMetrics> metrics;
    std::vector<expert::AdviceEntry> entries;
    std::vector<engine::QueryRecord> queries;
    std::map<std::uint64_t, logic::SymbolicState> states;
  };

  void routes();
  json status_json() const;

  ExperimentConfig config_;
  std::string out_dir_;
  std::uint64_t seed_;
  std::unique_ptr<env::Environment> env_;
  expert::AdviceChannel channel_;
  expert::InteractiveExpert expert_;
  std::unique_ptr<httplib::Server> server_;
  std::unique_ptr<Observer> observer_;

  mutable std::mutex mu_;
  Snapshot snap_;

  std::atomic<bool> cancel_{false};
  std::atomic<bool> done_{false};
  std::mutex done_mu_;
  std::condition_variable done_cv_;
  SeedRun result_;
  std::thread http_thread_;
  std::thread train_thread_;
  bool bound_ = false;
};

}  // namespace rael::harness
