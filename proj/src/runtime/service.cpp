#include "runtime/service.hpp"

#include <chrono>
#include <thread>

#include "common/error.hpp"

namespace digirr::runtime {

Service::Service(const ScenarioConfig& config, ServiceOptions options) : accel_(options.accel) {
  if (!(accel_ >= 0.0)) fail(ErrorKind::config, "accel must be >= 0");
  ScenarioOptions so;
  so.seed = options.seed;
  so.publish_events = true;
  so.resume = true;
  so.persist = config.server.state_dir.has_value();
  if (config.server.credentials) {
    so.users = ctrlserver::UserStore::load(*config.server.credentials);
  } else {
    warnings_.push_back("no credentials file configured; nobody can log in");
  }
  scenario_ = std::make_unique<Scenario>(config, std::move(so));
  for (const auto& w : scenario_->server().recovery_warnings()) warnings_.push_back(w);
  sim_time_ = scenario_->time();

  api_ = std::make_unique<ctrlserver::HttpApi>(scenario_->server());
  const int want = options.port.value_or(config.server.port);
  port_ = api_->bind(config.server.host, want);
  if (port_ < 0)
    fail(ErrorKind::io, "cannot bind " + config.server.host + ":" + std::to_string(want) + " (in use or not permitted)");
}

Service::~Service() {
  stop();
  api_.reset();
}

double Service::sim_time() const { return sim_time_.load(); }

void Service::stop() {
  stop_ = true;
  cv_.notify_all();
}

void Service::run() {
  std::thread http([this] { api_->run(); });

  using clock = std::chrono::steady_clock;
  const auto wall0 = clock::now();
  const double t0 = scenario_->time();
  while (!stop_) {
    scenario_->step();
    sim_time_ = scenario_->time();
    if (accel_ > 0.0) {
      const auto due = wall0 + std::chrono::duration_cast<clock::duration>(
                                   std::chrono::duration<double>((scenario_->time() - t0) / accel_));
      std::unique_lock lk(mu_);
      cv_.wait_until(lk, due, [this] { return stop_.load(); });
    }
  }

  scenario_->server().shutdown();
  // listen may not have started yet; stop() is a no-op until it has.
  const auto deadline = clock::now() + std::chrono::seconds(5);
  while (!api_->running() && clock::now() < deadline) std::this_thread::sleep_for(std::chrono::milliseconds(5));
  api_->stop();
  http.join();
}

}  // namespace digirr::runtime
