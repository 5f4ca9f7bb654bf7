#pragma once

#include <atomic>
#include <condition_variable>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "ctrlserver/http_api.hpp"
#include "runtime/scenario.hpp"

namespace digirr::runtime {

struct ServiceOptions {
  std::optional<int> port;   // replaces server.port
  double accel = 1.0;        // sim s per wall s, 0 = as fast as possible
  std::optional<std::uint64_t> seed;
};

// `serve`: the scenario advancing in wall-clock time behind the HTTP API.
// Binding happens in the constructor, which throws Error(io) when the port
// is taken. Durable server state is kept when server.state_dir is set.
class Service {
public:
  Service(const ScenarioConfig& config, ServiceOptions options);
  ~Service();

  int port() const { return port_; }
  // Blocks until stop(); flushes server state before returning.
  void run();
  // Safe from any thread.
  void stop();

  ctrlserver::ControlServer& server() { return scenario_->server(); }
  double sim_time() const;
  const std::vector<std::string>& warnings() const { return warnings_; }

private:
  std::unique_ptr<Scenario> scenario_;
  std::unique_ptr<ctrlserver::HttpApi> api_;
  double accel_;
  int port_ = -1;
  std::atomic<bool> stop_{false};
  std::atomic<double> sim_time_{0.0};
  std::mutex mu_;
  std::condition_variable cv_;
  std::vector<std::string> warnings_;
};

}  // namespace digirr::runtime
