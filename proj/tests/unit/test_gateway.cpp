#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <vector>

#include "common/error.hpp"
#include "gateway/gateway.hpp"

using namespace digirr;
using namespace digirr::gateway;

namespace {

struct FakeUp : Upstream {
  bool up = true;
  std::vector<Snapshot> snapshots;
  std::vector<FieldCommand> pending;
  std::vector<FieldReport> reports;

  bool push_snapshot(const Snapshot& s) override {
    if (!up) return false;
    snapshots.push_back(s);
    return true;
  }
  std::optional<std::vector<FieldCommand>> pull_commands() override {
    if (!up) return std::nullopt;
    return pending;
  }
  bool push_report(const FieldReport& r) override {
    if (!up) return false;
    reports.push_back(r);
    return true;
  }
};

struct FakeDown : Downstream {
  bool up = true;
  std::vector<std::uint64_t> delivered;
  std::optional<fieldctl::Ack> deliver(const FieldCommand& c, double) override {
    if (!up) return std::nullopt;
    delivered.push_back(c.id);
    return fieldctl::Ack{c.id, true, {}};
  }
  std::vector<CommandCompletion> take_completions() override { return {}; }
  ActuatorState actuators() const override { return {}; }
};

const std::vector<SensorRegistration> kTwo{{1, SensorKind::temperature}, {3, SensorKind::tank_level}};

fieldnet::Frame frame(std::uint8_t node, SensorKind k, std::uint16_t seq, float v, std::uint8_t flags = 0) {
  return {node, static_cast<std::uint8_t>(k), seq, v, flags};
}

FieldCommand cmd(std::uint64_t id) {
  FieldCommand c;
  c.id = id;
  c.actuator = "feed_tap";
  return c;
}

}  // namespace

TEST_CASE("fifo evicts the oldest past capacity") {
  Fifo<int> f(3);
  for (int i = 0; i < 5; ++i) f.push(i);
  CHECK(f.size() == 3);
  CHECK(f.evicted() == 2);
  CHECK(f.items().front() == 2);
  CHECK(f.items().back() == 4);
}

TEST_CASE("serial-number comparison wraps") {
  CHECK(seq_newer(1, 0));
  CHECK(seq_newer(0, 65535));
  CHECK_FALSE(seq_newer(5, 5));
  CHECK_FALSE(seq_newer(4, 5));
  CHECK_FALSE(seq_newer(40000, 5));
}

TEST_CASE("rows start as no data and track the latest frame") {
  Gateway g(kTwo);
  REQUIRE(g.row(SensorKind::tank_level));
  CHECK_FALSE(g.row(SensorKind::tank_level)->has_data);
  CHECK(g.row(SensorKind::wind) == nullptr);
  CHECK(g.ingest(frame(3, SensorKind::tank_level, 10, 2.5f, fieldnet::kFlagTestReport | fieldnet::kFlagTestError), 7));
  const auto* r = g.row(SensorKind::tank_level);
  CHECK(r->has_data);
  CHECK(r->last_value == 2.5);
  CHECK(r->last_test_time == 7);
  CHECK(r->test_status == fieldnet::TestStatus::error);
  CHECK(g.ingest(frame(3, SensorKind::tank_level, 11, 2.6f), 8));
  CHECK(g.row(SensorKind::tank_level)->last_test_time == 7);
  CHECK(g.history(SensorKind::tank_level).size() == 2);
}

TEST_CASE("duplicates and stale frames are dropped, wrap is accepted") {
  Gateway g(kTwo);
  CHECK(g.ingest(frame(1, SensorKind::temperature, 65535, 20.0f), 0));
  CHECK_FALSE(g.ingest(frame(1, SensorKind::temperature, 65535, 20.0f), 1));
  CHECK(g.ingest(frame(1, SensorKind::temperature, 0, 21.0f), 2));
  CHECK_FALSE(g.ingest(frame(1, SensorKind::temperature, 65534, 19.0f), 3));
  CHECK(g.stats().duplicates == 2);
  CHECK(g.row(SensorKind::temperature)->last_value == 21.0);
}

TEST_CASE("unknown nodes and mismatched kinds are quarantined") {
  Gateway g(kTwo);
  CHECK_FALSE(g.ingest(frame(9, SensorKind::temperature, 0, 1.0f), 0));
  CHECK_FALSE(g.ingest(frame(1, SensorKind::wind, 0, 1.0f), 0));
  CHECK(g.stats().quarantined == 2);
  CHECK_FALSE(g.row(SensorKind::temperature)->has_data);
}

TEST_CASE("duplicate registrations are refused") {
  const std::vector<SensorRegistration> dup{{1, SensorKind::temperature}, {1, SensorKind::wind}};
  CHECK_THROWS_AS(Gateway{dup}, Error);
}

TEST_CASE("history sink sees every accepted entry") {
  Gateway g(kTwo);
  std::vector<HistoryEntry> seen;
  g.set_history_sink([&](const HistoryEntry& e) { seen.push_back(e); });
  g.ingest(frame(1, SensorKind::temperature, 0, 1.0f), 0);
  g.ingest(frame(1, SensorKind::temperature, 0, 1.0f), 1);
  g.ingest(frame(3, SensorKind::tank_level, 0, 2.0f), 2);
  REQUIRE(seen.size() == 2);
  CHECK(seen[1].kind == SensorKind::tank_level);
}

TEST_CASE("snapshots carry the delta and buffer while the uplink is down") {
  GatewayParams p;
  p.max_buffered_snapshots = 3;
  Gateway g(kTwo, p);
  FakeUp up;
  FakeDown down;
  g.ingest(frame(1, SensorKind::temperature, 0, 1.0f), 0);
  g.sync(0, up, down);
  REQUIRE(up.snapshots.size() == 1);
  CHECK(up.snapshots[0].sync_id == 1);
  CHECK(up.snapshots[0].history.size() == 1);
  CHECK_FALSE(g.sync_due(4.9));
  CHECK(g.sync_due(5));

  up.up = false;
  for (int i = 1; i <= 5; ++i) g.sync(5.0 * i, up, down);
  CHECK(g.buffered_snapshots() == 3);
  CHECK(g.stats().snapshots_dropped == 2);
  up.up = true;
  g.sync(30, up, down);
  CHECK(g.buffered_snapshots() == 0);
  // The reconnect round cuts its own snapshot first, evicting one more.
  CHECK(g.stats().snapshots_dropped == 3);
  REQUIRE(up.snapshots.size() == 4);
  CHECK(up.snapshots[1].sync_id == 5);
  CHECK(up.snapshots[3].sync_id == 7);
}

TEST_CASE("commands relay in id order, once, and wait for the field") {
  Gateway g(kTwo);
  FakeUp up;
  FakeDown down;
  up.pending = {cmd(3), cmd(1), cmd(2)};
  down.up = false;
  g.sync(0, up, down);
  CHECK(g.queued_commands() == 3);
  down.up = true;
  g.sync(5, up, down);
  CHECK(down.delivered == std::vector<std::uint64_t>{1, 2, 3});
  // Still listed upstream: not relayed twice.
  g.sync(10, up, down);
  CHECK(down.delivered.size() == 3);
  std::size_t acks = 0;
  for (const auto& r : up.reports) acks += r.acks.size();
  CHECK(acks == 3);
}

TEST_CASE("acks are retried until the report gets through") {
  Gateway g(kTwo);
  FakeUp up;
  FakeDown down;
  up.pending = {cmd(1)};
  g.sync(0, up, down);  // pulled while up
  up.pending.clear();
  REQUIRE(up.reports.size() == 1);
  CHECK(up.reports[0].acks.size() == 1);

  // Pull succeeds but the report is lost: the ack stays queued.
  struct LossyReport : FakeUp {
    bool push_report(const FieldReport&) override { return false; }
  } lossy;
  lossy.pending = {cmd(2)};
  g.sync(5, lossy, down);
  g.sync(10, up, down);
  REQUIRE(up.reports.size() == 2);
  REQUIRE(up.reports[1].acks.size() == 1);
  CHECK(up.reports[1].acks[0].command_id == 2);
}

TEST_CASE("restarted gateways continue the sync numbering") {
  Gateway g(kTwo);
  g.set_next_sync_id(42);
  FakeUp up;
  FakeDown down;
  g.sync(0, up, down);
  CHECK(up.snapshots.at(0).sync_id == 42);
  CHECK(g.next_sync_id() == 43);
  CHECK(g.dump(0).find("tank_level") != std::string::npos);
}
