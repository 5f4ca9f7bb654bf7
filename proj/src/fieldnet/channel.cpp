#include "fieldnet/channel.hpp"

#include <cmath>
#include <tuple>

#include "common/error.hpp"

namespace digirr::fieldnet {

double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

double bpsk_bit_error_rate(double eb_n0_db) {
  return q_function(std::sqrt(2.0 * std::pow(10.0, eb_n0_db / 10.0)));
}

double ChannelParams::bit_error_rate() const {
  if (p_bit) return *p_bit;
  if (eb_n0_db) return bpsk_bit_error_rate(*eb_n0_db);
  return 0.0;
}

void ChannelParams::validate() const {
  auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!prob(p_drop)) fail(ErrorKind::config, "channel.p_drop must be in [0, 1]");
  if (p_bit && !prob(*p_bit)) fail(ErrorKind::config, "channel.p_bit must be in [0, 1]");
  if (!(latency >= 0.0)) fail(ErrorKind::config, "channel.latency must be >= 0");
}

ChannelParams ChannelParams::satellite() {
  ChannelParams p;
  p.profile = TransportProfile::satellite;
  p.latency = 0.5;
  p.p_drop = 0.01;
  return p;
}

std::optional<FrameBytes> corrupt(const FrameBytes& bytes, const ChannelParams& params,
                                  envsim::Engine& rng) {
  if (params.p_drop > 0.0 && std::bernoulli_distribution(params.p_drop)(rng)) return std::nullopt;
  FrameBytes out = bytes;
  const double p = params.bit_error_rate();
  if (p <= 0.0) return out;
  constexpr std::size_t n_bits = kFrameSize * 8;
  if (p >= 1.0) {
    for (auto& b : out) b = static_cast<std::uint8_t>(~b);
    return out;
  }
  // Jump straight to the next flipped bit.
  std::geometric_distribution<std::size_t> gap(p);
  for (std::size_t bit = gap(rng); bit < n_bits; bit += 1 + gap(rng))
    out[bit / 8] ^= static_cast<std::uint8_t>(0x80u >> (bit % 8));
  return out;
}

bool Channel::Later::operator()(const InFlight& a, const InFlight& b) const {
  return std::tie(a.due, a.emitted, a.node_id, a.order) >
         std::tie(b.due, b.emitted, b.node_id, b.order);
}

Channel::Channel(ChannelParams params, envsim::Engine rng)
    : params_(std::move(params)), rng_(std::move(rng)) {
  params_.validate();
}

void Channel::send(const FrameBytes& bytes, double emit_time) {
  ++stats_.sent;
  auto received = corrupt(bytes, params_, rng_);
  if (!received) {
    ++stats_.dropped;
    return;
  }
  queue_.push({emit_time + params_.latency, emit_time, bytes[1], next_order_++, *received});
}

std::vector<Delivery> Channel::deliver_until(double now) {
  std::vector<Delivery> out;
  while (!queue_.empty() && queue_.top().due <= now) {
    const InFlight item = queue_.top();
    queue_.pop();
    if (auto frame = decode(item.bytes)) {
      ++stats_.delivered;
      out.push_back({item.due, *frame});
    } else {
      ++stats_.rejected;
    }
  }
  return out;
}

}  // namespace digirr::fieldnet
