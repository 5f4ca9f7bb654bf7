#include "gateway/gateway.hpp"

#include <cmath>
#include <sstream>

#include "common/error.hpp"

namespace digirr::gateway {

fieldnet::TestStatus status_from_flags(std::uint8_t flags) {
  if (flags & fieldnet::kFlagNeedsReplacement) return fieldnet::TestStatus::needs_replacement;
  if (flags & fieldnet::kFlagTestError) return fieldnet::TestStatus::error;
  return fieldnet::TestStatus::ok;
}

Gateway::Gateway(std::span<const SensorRegistration> sensors, GatewayParams params)
    : params_(params) {
  if (!(params_.sync_period > 0.0)) fail(ErrorKind::config, "gateway.sync_period must be > 0");
  if (params_.history_capacity == 0) fail(ErrorKind::config, "gateway.history_capacity must be > 0");
  for (const auto& s : sensors) {
    if (by_node_.count(s.node_id))
      fail(ErrorKind::config, "duplicate node id " + std::to_string(s.node_id));
    by_node_[s.node_id] = rows_.size();
    LiveRow r;
    r.kind = s.kind;
    r.node_id = s.node_id;
    rows_.push_back(r);
    history_.emplace_back(params_.history_capacity);
  }
  last_seq_.resize(rows_.size());
}

bool Gateway::ingest(const fieldnet::Frame& frame, double t) {
  const auto it = by_node_.find(frame.node_id);
  if (it == by_node_.end() || static_cast<std::uint8_t>(rows_[it->second].kind) != frame.sensor_kind) {
    ++stats_.quarantined;
    return false;
  }
  const std::size_t i = it->second;
  if (last_seq_[i] && !seq_newer(frame.seq, *last_seq_[i])) {
    ++stats_.duplicates;
    return false;
  }
  last_seq_[i] = frame.seq;

  LiveRow& r = rows_[i];
  r.has_data = true;
  r.last_value = frame.value;
  r.last_frame_time = t;
  r.flags = frame.flags;
  r.test_status = status_from_flags(frame.flags);
  if (frame.flags & fieldnet::kFlagTestReport) r.last_test_time = t;

  const HistoryEntry e{t, r.kind, static_cast<double>(frame.value), frame.flags};
  history_[i].push(e);
  delta_.push_back(e);
  if (sink_) sink_(e);
  ++stats_.accepted;
  return true;
}

const LiveRow* Gateway::row(SensorKind kind) const {
  for (const auto& r : rows_)
    if (r.kind == kind) return &r;
  return nullptr;
}

const Fifo<HistoryEntry>& Gateway::history(SensorKind kind) const {
  for (std::size_t i = 0; i < rows_.size(); ++i)
    if (rows_[i].kind == kind) return history_[i];
  fail(ErrorKind::not_found, "sensor not registered: " + std::string(key(kind)));
}

void Gateway::sync(double now, Upstream& up, Downstream& down) {
  next_sync_ = (std::floor(now / params_.sync_period) + 1.0) * params_.sync_period;

  Snapshot snap;
  snap.sync_id = next_sync_id_++;
  snap.time = now;
  snap.rows = rows_;
  snap.history = std::move(delta_);
  delta_.clear();
  outbox_.push_back(std::move(snap));
  while (outbox_.size() > params_.max_buffered_snapshots) {
    outbox_.pop_front();
    ++stats_.snapshots_dropped;
  }

  bool link_up = true;
  while (!outbox_.empty()) {
    if (!up.push_snapshot(outbox_.front())) {
      link_up = false;
      break;
    }
    outbox_.pop_front();
    ++stats_.snapshots_sent;
  }

  if (link_up) {
    if (auto cmds = up.pull_commands()) {
      for (auto& c : *cmds)
        if (c.id > last_relayed_id_) relay_.emplace(c.id, std::move(c));
    } else {
      link_up = false;
    }
  }

  while (!relay_.empty()) {
    const auto& [id, cmd] = *relay_.begin();
    auto ack = down.deliver(cmd, now);
    if (!ack) break;
    report_.acks.push_back({id, ack->ok, ack->reason, now});
    last_relayed_id_ = id;
    relay_.erase(relay_.begin());
    ++stats_.commands_relayed;
  }

  for (auto& c : down.take_completions()) report_.completions.push_back(c);
  report_.actuators = down.actuators();
  report_.time = now;

  if (link_up && up.push_report(report_)) {
    report_.acks.clear();
    report_.completions.clear();
  }
}

std::string Gateway::dump(double now) const {
  std::ostringstream os;
  os << "gateway t=" << now << " accepted=" << stats_.accepted << " dup=" << stats_.duplicates
     << " quarantined=" << stats_.quarantined << " buffered=" << outbox_.size()
     << " relay=" << relay_.size() << '\n';
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const auto& r = rows_[i];
    os << "  node " << int(r.node_id) << ' ' << key(r.kind) << ": ";
    if (!r.has_data)
      os << "no data";
    else
      os << r.last_value << " @" << r.last_frame_time << ' ' << fieldnet::to_string(r.test_status);
    os << " history=" << history_[i].size() << '\n';
  }
  return os.str();
}

}  // namespace digirr::gateway
