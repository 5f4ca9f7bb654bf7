#include "runtime/scenario.hpp"

#include <algorithm>
#include <cmath>

#include "common/csv.hpp"
#include "common/error.hpp"

namespace digirr::runtime {

class Scenario::Up final : public gateway::Upstream {
public:
  explicit Up(Scenario& s) : s_(s) {}
  bool push_snapshot(const Snapshot& snap) override {
    if (!s_.uplink_up(s_.t_)) return false;
    s_.server_->apply_snapshot(snap);  // a duplicate still counts as delivered
    return true;
  }
  std::optional<std::vector<FieldCommand>> pull_commands() override {
    if (!s_.uplink_up(s_.t_)) return std::nullopt;
    return s_.server_->take_dispatch();
  }
  bool push_report(const FieldReport& report) override {
    if (!s_.uplink_up(s_.t_)) return false;
    s_.server_->apply_report(report);
    return true;
  }

private:
  Scenario& s_;
};

class Scenario::Down final : public gateway::Downstream {
public:
  explicit Down(Scenario& s) : s_(s) {}
  std::optional<fieldctl::Ack> deliver(const FieldCommand& cmd, double now) override {
    if (!s_.field_up(now)) return std::nullopt;
    return s_.controller_->receive(cmd, now);
  }
  std::vector<CommandCompletion> take_completions() override {
    std::vector<CommandCompletion> out;
    for (const auto& c : s_.controller_->take_completions())
      out.push_back({c.command_id, c.outcome == fieldctl::CompletionOutcome::superseded, c.t});
    return out;
  }
  ActuatorState actuators() const override { return s_.controller_->state(); }

private:
  Scenario& s_;
};

Scenario::Scenario(const ScenarioConfig& config, ScenarioOptions options)
    : config_(config), seed_(options.seed.value_or(config.seed)), t_(options.start_time) {
  std::vector<gateway::SensorRegistration> regs;
  for (auto kind : kAllSensorKinds) regs.push_back({static_cast<std::uint8_t>(kind), kind});

  ctrlserver::ServerParams sp;
  sp.sensors = regs;
  sp.history_capacity = config_.gateway.history_capacity;
  sp.auth.session_ttl = config_.server.session_ttl;
  sp.auth.lockout_threshold = config_.server.lockout_threshold;
  sp.default_ack_timeout = config_.server.ack_timeout;
  if (options.persist) {
    if (!config_.server.state_dir) fail(ErrorKind::config, "persistence needs server.state_dir");
    sp.state_dir = config_.server.state_dir;
  }
  sp.publish_events = options.publish_events;
  server_ = std::make_unique<ctrlserver::ControlServer>(sp, std::move(options.users), options.session_clock);
  if (options.resume) t_ = std::max(t_, resume_time(server_->sim_time(), config_.dt));

  envsim::EnvParams ep = config_.env;
  ep.dt = config_.dt;
  ep.rng_seed = seed_;
  ep.initial.sim_time = t_;
  environment_ = std::make_unique<envsim::Environment>(ep);
  env_ = environment_->initial_state();

  const xducer::AdcSpec adc{config_.sensors.adc_bits, config_.sensors.adc_vfs};
  for (const auto& reg : regs) {
    fieldnet::NodeConfig nc;
    nc.node_id = reg.node_id;
    nc.transducer = xducer::default_spec(reg.kind, ep, adc);
    nc.transducer.noise_sigma = config_.sensors.noise_sigma;
    nc.eps_test_fraction = config_.sensors.eps_test_fraction;
    nodes_.emplace_back(nc, envsim::RngStreams::make(seed_, "node/" + std::string(key(reg.kind))));
    next_test_.push_back(t_);
  }
  next_sample_ = t_;

  channel_ = std::make_unique<fieldnet::Channel>(config_.channel, envsim::RngStreams::make(seed_, "channel"));
  gateway_ = std::make_unique<gateway::Gateway>(regs, config_.gateway);
  gateway_->set_next_sync_id(server_->last_sync_id() + 1);

  fieldctl::ControllerConfig cc = config_.controller;
  cc.dt = config_.dt;
  controller_ = std::make_unique<fieldctl::FieldController>(cc);
  controller_->set_standby_port([this](SensorKind k) {
    auto& n = node(k);
    n.connect_standby();
    return n.state().primary_retired;
  });

  up_ = std::make_unique<Up>(*this);
  down_ = std::make_unique<Down>(*this);

  faults_ = config_.sensors.faults;
  std::stable_sort(faults_.begin(), faults_.end(), [](auto& a, auto& b) { return a.at < b.at; });
  scripted_ = config_.commands;
  std::stable_sort(scripted_.begin(), scripted_.end(), [](auto& a, auto& b) { return a.at < b.at; });
  if (options.resume)  // issued before the restart
    while (next_command_ < scripted_.size() && scripted_[next_command_].at < t_) ++next_command_;
}

Scenario::~Scenario() = default;

fieldnet::SensorNode& Scenario::node(SensorKind kind) {
  for (auto& n : nodes_)
    if (n.kind() == kind) return n;
  fail(ErrorKind::not_found, "no node for sensor '" + std::string(key(kind)) + "'");
}

bool Scenario::uplink_up(double t) const {
  if (!uplink_forced_up_) return false;
  return std::none_of(config_.uplink_outages.begin(), config_.uplink_outages.end(),
                      [t](const Window& w) { return w.contains(t); });
}

bool Scenario::field_up(double t) const {
  if (!field_forced_up_) return false;
  return std::none_of(config_.field_outages.begin(), config_.field_outages.end(),
                      [t](const Window& w) { return w.contains(t); });
}

void Scenario::set_history_sink(std::function<void(const HistoryEntry&)> sink) {
  gateway_->set_history_sink(std::move(sink));
}

ctrlserver::CommandEnvelope Scenario::issue(std::string_view device, std::string_view command,
                                            std::optional<double> duration_s, std::string_view target) {
  return server_->issue_as("scenario", device, command, duration_s, target);
}

void Scenario::step() {
  const double t = t_;

  for (; next_fault_ < faults_.size() && faults_[next_fault_].at <= t; ++next_fault_) {
    const auto& f = faults_[next_fault_];
    node(f.sensor).unit(f.unit).set_fault(f.state);
  }
  for (; next_command_ < scripted_.size() && scripted_[next_command_].at <= t; ++next_command_) {
    const auto& c = scripted_[next_command_];
    try {
      issue(c.device, c.command, c.duration_s, c.target);
    } catch (const Error& e) {
      warnings_.push_back("t=" + csv::format_double(t) + ": " + c.device + " " + c.command + ": " + e.what());
    }
  }

  const bool sample = t >= next_sample_;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    auto& n = nodes_[i];
    if (t >= next_test_[i]) {
      n.self_test(env_, t);
      while (next_test_[i] <= t) next_test_[i] += config_.sensors.self_test_period;
    }
    if (sample) channel_->send(fieldnet::encode(n.sample_and_emit(env_, t)), t);
  }
  if (sample && config_.sensors.sample_period > 0.0)
    while (next_sample_ <= t) next_sample_ += config_.sensors.sample_period;

  for (const auto& d : channel_->deliver_until(t)) gateway_->ingest(d.frame, d.time);

  if (gateway_->sync_due(t)) gateway_->sync(t, *up_, *down_);

  if (const auto* r = gateway_->row(SensorKind::moisture); r && r->has_data) readings_.moisture = r->last_value;
  if (const auto* r = gateway_->row(SensorKind::lake_level); r && r->has_data) readings_.lake_level = r->last_value;
  if (const auto* r = gateway_->row(SensorKind::tank_level); r && r->has_data) readings_.tank_level = r->last_value;
  const ActuatorState act = controller_->tick(t, readings_);
  if (actuation_sink_)
    for (const auto& e : controller_->take_log()) actuation_sink_(e);
  else
    controller_->take_log();

  env_ = environment_->step(env_, act);
  ++ticks_;
  t_ = env_.sim_time;
}

void Scenario::run_until(double t_end) {
  while (t_ < t_end) step();
}

double resume_time(double server_time, double dt) {
  if (server_time <= 0.0) return 0.0;
  return (std::floor(server_time / dt) + 1.0) * dt;
}

std::string actuation_csv_header() { return "t,actuator,bit,cause\n"; }

void append_actuation_row(std::string& out, const fieldctl::ActuationLogEntry& e) {
  out += csv::format_double(e.t);
  out += ',';
  out += key(e.actuator);
  out += e.bit ? ",1," : ",0,";
  out += e.cause.to_string();
  out += '\n';
}

}  // namespace digirr::runtime
