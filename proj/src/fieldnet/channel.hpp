#pragma once

#include <cstdint>
#include <optional>
#include <queue>
#include <vector>

#include "envsim/rng.hpp"
#include "fieldnet/frame.hpp"

namespace digirr::fieldnet {

enum class TransportProfile : std::uint8_t { local_wireless, satellite };

struct ChannelParams {
  double p_drop = 0.0;
  // Exactly one of p_bit / eb_n0_db is normally set; p_bit wins if both are.
  std::optional<double> p_bit;
  std::optional<double> eb_n0_db;
  double latency = 0.0;  // s
  TransportProfile profile = TransportProfile::local_wireless;

  // Effective binary-symmetric-channel flip probability.
  double bit_error_rate() const;
  void validate() const;

  static ChannelParams satellite();
};

// Gaussian tail Q(x) = erfc(x / sqrt 2) / 2.
double q_function(double x);
// Coherent BPSK after demodulation: Q(sqrt(2 Eb/N0)).
double bpsk_bit_error_rate(double eb_n0_db);

// One pass through the channel: dropped (nullopt) or delivered with
// independent bit flips. Frames are not checked here.
std::optional<FrameBytes> corrupt(const FrameBytes& bytes, const ChannelParams& params,
                                  envsim::Engine& rng);

struct Delivery {
  double time = 0.0;
  Frame frame;
};

struct ChannelStats {
  std::uint64_t sent = 0;
  std::uint64_t dropped = 0;
  std::uint64_t rejected = 0;  // sync or CRC failure at the receiver
  std::uint64_t delivered = 0;
};

// Lossy link with a single ordered delivery queue. Delivery order is by
// (delivery time, emit time, node id), then submission order.
class Channel {
public:
  Channel(ChannelParams params, envsim::Engine rng);

  void send(const FrameBytes& bytes, double emit_time);
  // Pops every frame due at or before `now` and returns the ones the
  // receiver accepts.
  std::vector<Delivery> deliver_until(double now);

  const ChannelStats& stats() const { return stats_; }
  const ChannelParams& params() const { return params_; }
  std::size_t in_flight() const { return queue_.size(); }

private:
  struct InFlight {
    double due;
    double emitted;
    std::uint8_t node_id;
    std::uint64_t order;
    FrameBytes bytes;
  };
  struct Later {
    bool operator()(const InFlight& a, const InFlight& b) const;
  };

  ChannelParams params_;
  envsim::Engine rng_;
  std::priority_queue<InFlight, std::vector<InFlight>, Later> queue_;
  std::uint64_t next_order_ = 0;
  ChannelStats stats_;
};

}  // namespace digirr::fieldnet
