#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "common/messages.hpp"
#include "fieldnet/frame.hpp"

namespace digirr::gateway {

// Bounded FIFO: pushing past capacity evicts the oldest entry.
template <class T>
class Fifo {
public:
  explicit Fifo(std::size_t capacity) : capacity_(capacity == 0 ? 1 : capacity) {}

  void push(T value) {
    if (items_.size() == capacity_) {
      items_.pop_front();
      ++evicted_;
    }
    items_.push_back(std::move(value));
  }

  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  std::uint64_t evicted() const { return evicted_; }
  bool empty() const { return items_.empty(); }
  const std::deque<T>& items() const { return items_; }
  void clear() { items_.clear(); }

private:
  std::size_t capacity_;
  std::deque<T> items_;
  std::uint64_t evicted_ = 0;
};

inline constexpr std::size_t kDefaultHistoryCapacity = 86'400;

// Serial-number arithmetic on the 16-bit frame counter: true if a is ahead
// of b by less than half the counter space.
constexpr bool seq_newer(std::uint16_t a, std::uint16_t b) {
  return static_cast<std::int16_t>(static_cast<std::uint16_t>(a - b)) > 0;
}

fieldnet::TestStatus status_from_flags(std::uint8_t flags);

struct SensorRegistration {
  std::uint8_t node_id = 0;
  SensorKind kind = SensorKind::temperature;
};

// Server side of the sync link as the gateway sees it. Methods return
// false / nullopt when the server cannot be reached.
class Upstream {
public:
  virtual ~Upstream() = default;
  virtual bool push_snapshot(const Snapshot& snapshot) = 0;
  virtual std::optional<std::vector<FieldCommand>> pull_commands() = 0;
  virtual bool push_report(const FieldReport& report) = 0;
};

// Field controller as the gateway sees it.
class Downstream {
public:
  virtual ~Downstream() = default;
  // nullopt: unreachable, the command stays queued.
  virtual std::optional<fieldctl::Ack> deliver(const FieldCommand& cmd, double now) = 0;
  virtual std::vector<CommandCompletion> take_completions() = 0;
  virtual ActuatorState actuators() const = 0;
};

struct GatewayParams {
  std::size_t history_capacity = kDefaultHistoryCapacity;
  double sync_period = 5.0;          // s
  std::size_t max_buffered_snapshots = 720;
};

struct GatewayStats {
  std::uint64_t accepted = 0;
  std::uint64_t duplicates = 0;
  std::uint64_t quarantined = 0;
  std::uint64_t snapshots_sent = 0;
  std::uint64_t snapshots_dropped = 0;
  std::uint64_t commands_relayed = 0;
};

class Gateway {
public:
  Gateway(std::span<const SensorRegistration> sensors, GatewayParams params = {});

  // Returns true when the frame was new and applied.
  bool ingest(const fieldnet::Frame& frame, double receive_time);

  const std::vector<LiveRow>& rows() const { return rows_; }
  const LiveRow* row(SensorKind kind) const;
  const Fifo<HistoryEntry>& history(SensorKind kind) const;

  // Every accepted entry is also handed to this sink (e.g. a CSV writer).
  void set_history_sink(std::function<void(const HistoryEntry&)> sink) { sink_ = std::move(sink); }

  // One sync round: cut and push a snapshot, pull new commands, relay them
  // in id order, and report acks, completions and actuator state upstream.
  void sync(double now, Upstream& up, Downstream& down);
  bool sync_due(double now) const { return now >= next_sync_; }
  // A restarted site continues the sync numbering the server already saw.
  void set_next_sync_id(std::uint64_t id) { next_sync_id_ = id; }
  std::uint64_t next_sync_id() const { return next_sync_id_; }

  std::size_t buffered_snapshots() const { return outbox_.size(); }
  std::size_t queued_commands() const { return relay_.size(); }
  const GatewayStats& stats() const { return stats_; }
  const GatewayParams& params() const { return params_; }

  // Human-readable dump for debugging.
  std::string dump(double now) const;

private:
  GatewayParams params_;
  std::vector<LiveRow> rows_;
  std::map<std::uint8_t, std::size_t> by_node_;
  std::vector<std::optional<std::uint16_t>> last_seq_;
  std::vector<Fifo<HistoryEntry>> history_;
  std::vector<HistoryEntry> delta_;
  std::function<void(const HistoryEntry&)> sink_;

  std::uint64_t next_sync_id_ = 1;
  double next_sync_ = 0.0;
  std::deque<Snapshot> outbox_;
  std::map<std::uint64_t, FieldCommand> relay_;
  std::uint64_t last_relayed_id_ = 0;
  FieldReport report_;
  bool report_dirty_ = false;
  GatewayStats stats_;
};

}  // namespace digirr::gateway
