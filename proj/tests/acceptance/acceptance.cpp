// Acceptance gate: one PASS/FAIL line per criterion, exit 1 if any fails.
// Every expected value here comes from an oracle written in this file, not
// from the library under test.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "analysis/finance.hpp"
#include "common/digest.hpp"
#include "common/error.hpp"
#include "ctrlserver/auth.hpp"
#include "ctrlserver/http_api.hpp"
#include "ctrlserver/server.hpp"
#include "fieldctl/controller.hpp"
#include "fieldnet/channel.hpp"
#include "fieldnet/frame.hpp"
#include "fieldnet/node.hpp"
#include "httplib.h"
#include "json.hpp"
#include "runtime/artifacts.hpp"
#include "runtime/config.hpp"
#include "runtime/scenario.hpp"
#include "xducer/chains.hpp"
#include "xducer/sensor.hpp"

using namespace digirr;
namespace fs = std::filesystem;
using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

const fs::path kConfigDir = DIGIRR_CONFIG_DIR;

struct Result {
  bool ok = true;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---------------------------------------------------------------------------
// Status window

struct PublishedRow {
  SensorKind kind;
  double value;
  const char* status;
};

// Column 2 of the published status window.
const std::array<PublishedRow, 10> kPublishedStatus = {{
    {SensorKind::temperature, 25.5, "OK"},
    {SensorKind::lake_level, 40.0, "OK"},
    {SensorKind::tank_level, 2.5, "Error"},
    {SensorKind::wind, 20.0, "OK"},
    {SensorKind::moisture, 0.5, "OK"},
    {SensorKind::ph, 5.0, "OK"},
    {SensorKind::humidity, 0.6, "OK"},
    {SensorKind::fire_smoke, 0.2, "OK"},
    {SensorKind::stream_flow, 0.7, "OK"},
    {SensorKind::light, 0.3, "OK"},
}};

Result table1() {
  const auto t0 = Clock::now();
  const auto cfg = runtime::load_scenario(kConfigDir / "table1_scenario.yaml");
  runtime::Scenario sc(cfg);
  sc.run_until(cfg.duration);
  const auto rows = sc.server().status_rows();
  const double wall = seconds_since(t0);

  Result r;
  for (const auto& p : kPublishedStatus) {
    const auto it = std::find_if(rows.begin(), rows.end(), [&](const auto& row) { return row.kind == p.kind; });
    const std::string name(key(p.kind));
    if (it == rows.end() || !it->has_data) return {false, name + ": no row"};
    const auto& spec = sc.node(p.kind).unit(fieldnet::ActiveUnit::primary).spec();
    const double lsb = xducer::engineering_lsb(spec, p.value);
    if (std::abs(it->present_data - p.value) > lsb)
      return {false, fmt("%s: %.6g vs %.6g (lsb %.3g)", name.c_str(), it->present_data, p.value, lsb)};
    if (!it->test_done_before || *it->test_done_before > 30.0)
      return {false, name + ": test done before missing or > 30 s"};
    if (it->test_status != p.status) return {false, name + ": status " + it->test_status};
  }
  if (wall >= 10.0) return {false, fmt("took %.2f s", wall)};
  r.detail = fmt("10 rows within 1 LSB, tank Error only, %.3f s", wall);
  return r;
}

// ---------------------------------------------------------------------------
// Control window

Result table2() {
  const auto cfg = runtime::load_scenario(kConfigDir / "table2_scenario.yaml");
  runtime::Scenario sc(cfg);
  std::vector<fieldctl::ActuationLogEntry> log;
  sc.set_actuation_sink([&](const fieldctl::ActuationLogEntry& e) { log.push_back(e); });

  std::optional<double> connected, ok_again;
  while (sc.time() <= cfg.duration) {
    sc.step();
    const double now = sc.time() - sc.dt();
    if (!connected) {
      for (const auto& c : sc.server().ledger())
        if (c.device == ctrlserver::Device::standby_selector && c.state == ctrlserver::CommandState::completed)
          connected = c.updated_at;
    } else if (!ok_again) {
      for (const auto& row : sc.server().status_rows())
        if (row.kind == SensorKind::tank_level && row.test_status == "OK") ok_again = now;
    }
  }

  auto first = [&](Actuator a, bool bit) -> std::optional<double> {
    for (const auto& e : log)
      if (e.actuator == a && e.bit == bit) return e.t;
    return std::nullopt;
  };
  const double sync = cfg.gateway.sync_period;
  const auto lake_on = first(Actuator::lake_pump, true), lake_off = first(Actuator::lake_pump, false);
  const auto water_on = first(Actuator::fwgs_water_valve, true);
  const auto water_off = first(Actuator::fwgs_water_valve, false);
  if (!lake_on || !lake_off || !water_on || !water_off) return {false, "missing actuation"};
  // Both ON commands are issued at t=30.
  if (*lake_on - 30 > sync || *water_on - 30 > sync)
    return {false, fmt("actuation lag %.1f / %.1f s", *lake_on - 30, *water_on - 30)};
  if (*lake_off - *lake_on != 30.0) return {false, fmt("lake pump ran %.1f s", *lake_off - *lake_on)};
  if (*water_off - *water_on != 100.0) return {false, fmt("water feed ran %.1f s", *water_off - *water_on)};
  if (!connected) return {false, "standby connect never completed"};
  if (!ok_again) return {false, "tank status never returned to OK"};
  const double recover = *ok_again - *connected;
  if (recover > cfg.sensors.self_test_period) return {false, fmt("tank OK %.1f s after connect", recover)};
  for (const auto& c : sc.server().ledger())
    if (c.state != ctrlserver::CommandState::completed)
      return {false, "command " + std::to_string(c.id) + " not completed"};
  return {true, fmt("lag %.0f s, runs 30/100 s, tank OK %.0f s after connect", *lake_on - 30, recover)};
}

// ---------------------------------------------------------------------------
// Override precedence against a brute-force model

struct OracleCmd {
  double at;
  std::uint64_t id;
  Actuator a;
  bool bit;
  double life;
};

bool oracle_window(double t, double start, double dur, double day) {
  double tod = std::fmod(t, day);
  if (tod < 0) tod += day;
  if (tod >= start && tod < start + dur) return true;
  return start + dur > day && tod < start + dur - day;  // wrapped past midnight
}

ActuatorState oracle_state(double t, const std::vector<fieldctl::ScheduleEntry>& sched,
                           const std::optional<fieldctl::SprayCycle>& spray, const std::vector<OracleCmd>& cmds) {
  ActuatorState bits;
  std::array<std::uint64_t, 5> src{};
  for (std::size_t i = 0; i < kAllActuators.size(); ++i) {
    const auto a = kAllActuators[i];
    bool on = false;
    for (const auto& e : sched)
      if (e.target == a && oracle_window(t, e.start_time_of_day, e.duration, 86400.0)) on = true;
    if (spray && (a == Actuator::fwgs_water_valve || a == Actuator::fwgs_drug_valve) && t >= spray->first_start) {
      const double period = spray->period_days * 86400.0;
      const double k = std::floor((t - spray->first_start) / period);
      if (t - spray->first_start - k * period < spray->duration) on = true;
    }
    // The newest command on this actuator decides while it lives; anything
    // older was cut off when it arrived.
    const OracleCmd* latest = nullptr;
    for (const auto& c : cmds)
      if (c.a == a && c.at <= t && (!latest || c.id > latest->id)) latest = &c;
    if (latest && t < latest->at + latest->life) {
      on = latest->bit;
      src[i] = latest->id;
    }
    bits.bits[i] = on;
  }
  const auto at = [](Actuator a) { return static_cast<std::size_t>(a); };
  if (bits.bits[at(Actuator::deep_well_pump)] && bits.bits[at(Actuator::lake_pump)]) {
    if (src[at(Actuator::deep_well_pump)] > src[at(Actuator::lake_pump)])
      bits.bits[at(Actuator::lake_pump)] = false;
    else
      bits.bits[at(Actuator::deep_well_pump)] = false;
  }
  const auto w = at(Actuator::fwgs_water_valve), d = at(Actuator::fwgs_drug_valve);
  if (bits.bits[d] && !bits.bits[w]) {
    if (src[w] != 0 && src[w] > src[d])
      bits.bits[d] = false;
    else
      bits.bits[w] = true;
  }
  return bits;
}

std::string bits_str(const ActuatorState& s) {
  std::string out;
  for (bool b : s.bits) out += b ? '1' : '0';
  return out;
}

Result override_precedence() {
  std::mt19937_64 rng(20240611);
  auto uni = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); };
  auto coin = [&](double p) { return uni(0, 1) < p; };
  std::uint64_t compared = 0;

  for (int trial = 0; trial < 1000; ++trial) {
    fieldctl::ControllerConfig cc;
    cc.dt = std::array{60.0, 300.0, 900.0}[pick(3)];
    cc.auto_pumps = false;
    cc.auto_irrigation = false;
    for (auto a : kAllActuators) {
      const int n = coin(0.5) ? 1 + pick(2) : 0;
      for (int k = 0; k < n; ++k) {
        fieldctl::ScheduleEntry e{60.0 * pick(1440), 60.0 * (1 + pick(360)), a};
        auto next = cc.schedule;
        next.push_back(e);
        try {
          fieldctl::validate_schedule(next);
          cc.schedule = std::move(next);
        } catch (const Error&) {
        }
      }
    }
    if (coin(0.3)) cc.spray = fieldctl::SprayCycle{1.0, 60.0 * (1 + pick(60)), 60.0 * pick(1440)};
    fieldctl::FieldController ctl(cc);

    const double horizon = 1.5 * 86400.0;
    struct Event {
      double at;
      fieldctl::FieldCommand cmd;
    };
    std::vector<Event> events;
    const int n = pick(41);
    for (int k = 0; k < n; ++k) {
      fieldctl::FieldCommand c;
      c.actuator = std::string(key(kAllActuators[pick(5)]));
      c.bit = coin(0.5);
      if (c.bit ? !coin(0.05) : coin(0.5)) c.duration_s = 10.0 * (1 + pick(720));
      events.push_back({10.0 * pick(static_cast<int>(horizon / 10)), c});
    }
    std::stable_sort(events.begin(), events.end(), [](const Event& a, const Event& b) { return a.at < b.at; });
    for (std::size_t k = 0; k < events.size(); ++k) events[k].cmd.id = k + 1;
    // Replays of already-delivered ids must change nothing.
    const std::size_t originals = events.size();
    for (std::size_t k = 0; k < originals; ++k)
      if (coin(0.1)) events.push_back({events[k].at + 10.0 * pick(100), events[k].cmd});
    std::stable_sort(events.begin(), events.end(), [](const Event& a, const Event& b) { return a.at < b.at; });

    std::vector<OracleCmd> accepted;
    std::map<std::uint64_t, bool> seen;
    std::size_t next = 0;
    const fieldctl::SensorSnapshot sensors;
    auto mismatch = [&](double t, const char* where) -> Result {
      return {false, fmt("trial %d %s t=%.0f: got %s want %s", trial, where, t, bits_str(ctl.state()).c_str(),
                         bits_str(oracle_state(t, cc.schedule, cc.spray, accepted)).c_str())};
    };
    for (double t = 0.0; t <= horizon; t += cc.dt) {
      // Commands due at or before this tick arrive first.
      for (; next < events.size() && events[next].at <= t; ++next) {
        const auto& e = events[next];
        const bool replay = seen.count(e.cmd.id) > 0;
        const auto ack = ctl.receive(e.cmd, e.at);
        if (replay) {
          if (ack.ok != seen[e.cmd.id]) return {false, fmt("trial %d: replay ack changed", trial)};
          continue;
        }
        const bool valid = !e.cmd.bit || e.cmd.duration_s.has_value();
        seen[e.cmd.id] = ack.ok;
        if (ack.ok != valid) return {false, fmt("trial %d: ack %d for command %llu", trial, ack.ok,
                                                static_cast<unsigned long long>(e.cmd.id))};
        if (!ack.ok) continue;
        accepted.push_back({e.at, e.cmd.id, *parse_actuator(e.cmd.actuator), e.cmd.bit,
                            e.cmd.duration_s.value_or(cc.off_hold_s)});
        ++compared;
        if (ctl.state() != oracle_state(e.at, cc.schedule, cc.spray, accepted)) return mismatch(e.at, "receive");
      }
      ctl.tick(t, sensors);
      ++compared;
      if (ctl.state() != oracle_state(t, cc.schedule, cc.spray, accepted)) return mismatch(t, "tick");
      if (!ctl.state().valid()) return {false, fmt("trial %d t=%.0f: invalid bits", trial, t)};
    }
  }
  return {true, fmt("1000 interleavings, %llu states match", static_cast<unsigned long long>(compared))};
}

// ---------------------------------------------------------------------------
// Frame protocol

std::uint16_t oracle_crc(const std::uint8_t* p, std::size_t n) {
  std::uint16_t crc = 0xFFFF;
  for (std::size_t i = 0; i < n; ++i) {
    crc ^= static_cast<std::uint16_t>(p[i]) << 8;
    for (int b = 0; b < 8; ++b) crc = (crc & 0x8000) ? static_cast<std::uint16_t>((crc << 1) ^ 0x1021) : crc << 1;
  }
  return crc;
}

Result frame_protocol() {
  const std::uint8_t check[] = {'1', '2', '3', '4', '5', '6', '7', '8', '9'};
  if (oracle_crc(check, 9) != 0x29B1 || fieldnet::crc16_ccitt_false(check) != 0x29B1)
    return {false, "CRC check value is not 0x29B1"};

  std::mt19937_64 rng(7);
  fieldnet::Channel ch({}, envsim::Engine(11));
  std::vector<fieldnet::Frame> sent;
  auto random_frame = [&] {
    fieldnet::Frame f;
    f.node_id = static_cast<std::uint8_t>(rng());
    f.sensor_kind = static_cast<std::uint8_t>(rng());
    f.seq = static_cast<std::uint16_t>(rng());
    f.value = std::bit_cast<float>(static_cast<std::uint32_t>(rng()));
    f.flags = static_cast<std::uint8_t>(rng());
    return f;
  };
  for (int i = 0; i < 100000; ++i) {
    const auto f = random_frame();
    const auto bytes = fieldnet::encode(f);
    if (bytes[0] != 0xA5) return {false, "bad sync byte"};
    const std::uint16_t crc = oracle_crc(bytes.data() + 1, 9);
    if (bytes[10] != crc >> 8 || bytes[11] != (crc & 0xFF)) return {false, fmt("frame %d: CRC bytes differ", i)};
    ch.send(bytes, i);
    sent.push_back(f);
  }
  const auto got = ch.deliver_until(1e9);
  if (got.size() != sent.size()) return {false, fmt("%zu of %zu delivered", got.size(), sent.size())};
  for (std::size_t i = 0; i < got.size(); ++i)
    if (!(got[i].frame == sent[i])) return {false, fmt("frame %zu changed in transit", i)};

  std::uint64_t flips = 0;
  for (int k = 0; k < 20; ++k) {
    const auto bytes = fieldnet::encode(random_frame());
    const std::size_t nbits = bytes.size() * 8;
    for (std::size_t i = 0; i < nbits; ++i) {
      auto one = bytes;
      one[i / 8] ^= static_cast<std::uint8_t>(1u << (i % 8));
      ++flips;
      if (fieldnet::decode(one)) return {false, fmt("single flip at bit %zu accepted", i)};
      for (std::size_t j = i + 1; j < nbits; ++j) {
        auto two = one;
        two[j / 8] ^= static_cast<std::uint8_t>(1u << (j % 8));
        ++flips;
        if (fieldnet::decode(two)) return {false, fmt("double flip at bits %zu,%zu accepted", i, j)};
      }
    }
  }
  return {true, fmt("1e5 round-trips, %llu corrupted frames rejected, CRC 0x29B1",
                    static_cast<unsigned long long>(flips))};
}

// ---------------------------------------------------------------------------
// Failover

// Reference automaton as an explicit table. States:
//   A primary active, nothing failed      OK
//   B standby active, primary failed      Error
//   C primary active, standby failed      Error
//   D both failed                         needs replacement
enum class Ref { A, B, C, D };

Ref ref_step(Ref s, bool p_ok, bool s_ok) {
  switch (s) {
    case Ref::A: return p_ok ? (s_ok ? Ref::A : Ref::C) : (s_ok ? Ref::B : Ref::D);
    case Ref::B: return s_ok ? Ref::B : Ref::D;
    case Ref::C: return p_ok ? Ref::C : Ref::D;
    case Ref::D: return Ref::D;
  }
  return s;
}

fieldnet::TestStatus ref_status(Ref s) {
  return s == Ref::A ? fieldnet::TestStatus::ok
         : s == Ref::D ? fieldnet::TestStatus::needs_replacement
                       : fieldnet::TestStatus::error;
}

fieldnet::ActiveUnit ref_unit(Ref s) {
  return s == Ref::A || s == Ref::C ? fieldnet::ActiveUnit::primary : fieldnet::ActiveUnit::standby;
}

std::uint8_t ref_flags(Ref s) {
  std::uint8_t f = 0;
  if (ref_unit(s) == fieldnet::ActiveUnit::standby) f |= 0x01;
  if (s == Ref::B || s == Ref::C) f |= 0x02;
  if (s == Ref::D) f |= 0x04;
  return f;
}

Result failover() {
  int sequences = 0;
  for (int code = 0; code < 4096; ++code, ++sequences) {
    fieldnet::NodeState st;
    Ref ref = Ref::A;
    for (int step = 0; step < 6; ++step) {
      const int o = (code >> (2 * step)) & 3;
      const bool p_ok = !(o & 1), s_ok = !(o & 2);
      st = fieldnet::apply_test_outcome(st, {p_ok, s_ok}, step * 30.0);
      ref = ref_step(ref, p_ok, s_ok);
      if (st.test_status != ref_status(ref) || st.active_unit != ref_unit(ref) ||
          (st.flags() & 0x07) != ref_flags(ref))
        return {false, fmt("sequence %d step %d disagrees", code, step)};
    }
  }

  // Latency on a live node: a primary fault is visible in the frames by
  // the next self-test at the latest.
  const double period = 30.0;
  std::mt19937_64 rng(5);
  double worst = 0.0;
  envsim::EnvState env;
  for (int trial = 0; trial < 200; ++trial) {
    fieldnet::NodeConfig nc;
    nc.node_id = 3;
    nc.transducer = xducer::default_spec(SensorKind::tank_level, envsim::EnvParams{});
    fieldnet::SensorNode node(nc, envsim::Engine(rng()));
    const double fault_at = std::uniform_real_distribution<double>(1.0, 600.0)(rng);
    bool faulted = false;
    std::optional<double> seen;
    for (double t = 0.0; t < 1200.0 && !seen; t += 1.0) {
      env.sim_time = t;
      if (!faulted && t >= fault_at) {
        node.unit(fieldnet::ActiveUnit::primary).set_fault(xducer::FaultState::open_circuit);
        faulted = true;
      }
      if (std::fmod(t, period) == 0.0) node.self_test(env, t);
      const auto f = node.sample_and_emit(env, t);
      if (faulted && (f.flags & fieldnet::kFlagStandbyActive)) seen = t;
    }
    if (!seen) return {false, fmt("trial %d: no failover", trial)};
    worst = std::max(worst, *seen - fault_at);
  }
  if (worst > period) return {false, fmt("failover latency %.1f s > %.0f s", worst, period)};
  return {true, fmt("%d sequences agree, worst latency %.1f s", sequences, worst)};
}

// ---------------------------------------------------------------------------
// ADC

Result adc_bound() {
  double worst_ratio = 0.0;
  for (int bits : {8, 10, 12, 16}) {
    const xducer::AdcSpec adc{bits, 5.0};
    const double lsb = 5.0 / std::ldexp(1.0, bits);
    for (int i = 0; i <= 100000; ++i) {
      const double v = 5.0 * i / 100000.0;
      const double err = std::abs(xducer::adc_decode(xducer::adc_quantize(v, adc), adc) - v);
      if (err > lsb / 2 * (1 + 1e-12)) return {false, fmt("%d bits: v=%.9g err %.3g > lsb/2", bits, v, err)};
      worst_ratio = std::max(worst_ratio, err / lsb);
    }
  }
  return {true, fmt("8/10/12/16-bit sweeps, worst %.4f LSB", worst_ratio)};
}

// ---------------------------------------------------------------------------
// Finance

Result finance() {
  const analysis::CashFlowParams p;
  const auto s = analysis::cumulative_cash_flow(p);
  for (int y = 0; y <= p.years; ++y) {
    const double closed = -p.initial_investment + p.first_year_savings * (std::pow(p.growth, y) - 1) / (p.growth - 1);
    if (std::abs(s.ccf[y] - closed) > 1e-6 * std::max(1.0, std::abs(closed)))
      return {false, fmt("year %d: %.6f vs %.6f", y, s.ccf[y], closed)};
  }
  const double multiple = s.ccf.back() / p.initial_investment;
  if (s.break_even_year != 2) return {false, fmt("break-even year %d", s.break_even_year)};
  if (multiple < 6.3 || multiple > 7.7) return {false, fmt("multiple %.3f", multiple)};
  return {true, fmt("break-even year 2, year-10 multiple %.3f", multiple)};
}

// ---------------------------------------------------------------------------
// Determinism

Result determinism() {
  auto cfg = runtime::load_scenario(kConfigDir / "default_scenario.yaml");
  cfg.server.state_dir.reset();
  const fs::path base = fs::temp_directory_path() / ("digirr_accept_" + random_hex(6));
  std::vector<std::string> hashes;
  std::vector<double> walls;
  for (int run = 0; run < 2; ++run) {
    runtime::RunRequest req;
    req.config = cfg;
    req.duration = 365 * 86400.0;
    req.out_dir = base / std::to_string(run);
    const auto t0 = Clock::now();
    const auto res = runtime::run_to_directory(req);
    walls.push_back(seconds_since(t0));
    hashes.push_back(res.artifacts.at("history.csv"));
  }
  std::error_code ec;
  fs::remove_all(base, ec);
  if (hashes[0] != hashes[1]) return {false, "history hashes differ"};
  const double slowest = std::max(walls[0], walls[1]);
  if (slowest >= 60.0) return {false, fmt("one simulated year took %.1f s", slowest)};
  return {true, fmt("identical history %s..., %.1f s per year", hashes[0].substr(0, 12).c_str(), slowest)};
}

// ---------------------------------------------------------------------------
// Security

Result security() {
  ctrlserver::UserStore users;
  users.add("op", "operator-pass", ctrlserver::Role::operator_);
  users.add("boss", "admin-pass-123", ctrlserver::Role::admin);
  ctrlserver::ServerParams params;
  params.sensors = {{1, SensorKind::temperature}, {3, SensorKind::tank_level}};
  ctrlserver::ControlServer server(params, users);
  ctrlserver::HttpApi api(server);
  const int port = api.bind("127.0.0.1", 0);
  if (port <= 0) return {false, "cannot bind loopback"};
  std::thread th([&] { api.run(); });
  for (int i = 0; i < 200 && !api.running(); ++i) std::this_thread::sleep_for(std::chrono::milliseconds(5));
  struct Stop {
    ctrlserver::ControlServer& s;
    ctrlserver::HttpApi& a;
    std::thread& t;
    ~Stop() {
      s.shutdown();
      a.stop();
      t.join();
    }
  } stop{server, api, th};

  httplib::Client c("127.0.0.1", port);
  c.set_read_timeout(5, 0);

  // A token that was valid once.
  std::string stale;
  {
    auto r = c.Post("/api/login", json{{"user", "boss"}, {"password", "admin-pass-123"}}.dump(), "application/json");
    if (!r || r->status != 200) return {false, "login failed"};
    stale = json::parse(r->body).at("token").get<std::string>();
    r = c.Post("/api/logout", {{"Authorization", "Bearer " + stale}}, "", "application/json");
    if (!r || r->status != 204) return {false, "logout failed"};
  }

  std::mt19937_64 rng(99);
  auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); };
  auto random_text = [&](int max) {
    std::string s(static_cast<std::size_t>(pick(max)), ' ');
    for (auto& ch : s) ch = static_cast<char>(32 + pick(95));
    return s;
  };
  const std::vector<std::string> valid_bodies = {
      json{{"device", "lake_pump"}, {"command", "ON"}, {"duration_s", 30}}.dump(),
      json{{"device", "standby_selector"}, {"command", "ConnectStandby"}, {"target", "tank_level"}}.dump(),
      json{{"actuator", "feed_tap"}, {"start_time_of_day", 3600}, {"duration_s", 600}}.dump(),
      "{}", "", "null"};

  int sent = 0, refused = 0;
  for (const char* path : {"/api/command", "/api/schedule", "/api/logout"}) {
    for (int i = 0; i < 300; ++i) {
      httplib::Headers h;
      std::string target = path;
      switch (pick(7)) {
        case 0: break;
        case 1: h.emplace("Authorization", "Bearer " + random_hex(16)); break;
        case 2: h.emplace("Authorization", "Bearer " + stale); break;
        case 3: h.emplace("Authorization", "Basic " + random_text(40)); break;
        case 4: h.emplace("Authorization", "Bearer"); break;
        case 5: target += "?token=" + random_hex(16); break;
        case 6: h.emplace("X-Token", random_hex(16)); h.emplace("Cookie", "token=" + stale); break;
      }
      const std::string body = pick(2) ? valid_bodies[static_cast<std::size_t>(pick(6))] : random_text(200);
      auto r = c.Post(target, h, body, pick(2) ? "application/json" : "text/plain");
      ++sent;
      if (r && r->status == 401) ++refused;
    }
  }
  if (refused != sent) return {false, fmt("%d of %d unauthenticated requests refused", refused, sent)};
  if (!server.ledger().empty()) return {false, "unauthenticated request changed the ledger"};

  const auto bad = json{{"user", "op"}, {"password", "wrong"}}.dump();
  for (int i = 1; i < 10; ++i) {
    auto r = c.Post("/api/login", bad, "application/json");
    if (!r || r->status != 401) return {false, fmt("bad login %d not 401", i)};
  }
  auto r = c.Post("/api/login", bad, "application/json");
  if (!r || r->status != 423) return {false, "10th bad login not locked out"};
  r = c.Post("/api/login", json{{"user", "op"}, {"password", "operator-pass"}}.dump(), "application/json");
  if (!r || r->status != 423) return {false, "correct password accepted while locked"};
  return {true, fmt("%d/%d unauthenticated mutations refused with 401, lockout on 10th failure", refused, sent)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Result()>>> checks = {
      {"status-table-reproduction", table1},
      {"control-window-reproduction", table2},
      {"override-precedence", override_precedence},
      {"frame-protocol", frame_protocol},
      {"failover-automaton", failover},
      {"adc-quantization-bound", adc_bound},
      {"finance-break-even", finance},
      {"determinism-and-throughput", determinism},
      {"api-security", security},
  };
  int failed = 0;
  for (const auto& [name, fn] : checks) {
    Result r;
    try {
      r = fn();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    if (!r.ok) ++failed;
    std::printf("%s  %-30s %s\n", r.ok ? "PASS" : "FAIL", name, r.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(checks.size()) - failed, checks.size());
  return failed == 0 ? 0 : 1;
}
