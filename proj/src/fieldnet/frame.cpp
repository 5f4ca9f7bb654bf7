#include "fieldnet/frame.hpp"

#include <bit>
#include <cstdio>

#include "common/kinds.hpp"

namespace digirr::fieldnet {
namespace {

constexpr std::array<std::uint16_t, 256> make_table() {
  std::array<std::uint16_t, 256> table{};
  for (int i = 0; i < 256; ++i) {
    std::uint16_t crc = static_cast<std::uint16_t>(i << 8);
    for (int b = 0; b < 8; ++b)
      crc = (crc & 0x8000) ? static_cast<std::uint16_t>((crc << 1) ^ 0x1021)
                           : static_cast<std::uint16_t>(crc << 1);
    table[i] = crc;
  }
  return table;
}

constexpr auto kCrcTable = make_table();

}  // namespace

std::uint16_t crc16_ccitt_false(std::span<const std::uint8_t> data) {
  std::uint16_t crc = 0xFFFF;
  for (std::uint8_t byte : data)
    crc = static_cast<std::uint16_t>((crc << 8) ^ kCrcTable[((crc >> 8) ^ byte) & 0xFF]);
  return crc;
}

FrameBytes encode(const Frame& f) {
  FrameBytes b{};
  const std::uint32_t v = std::bit_cast<std::uint32_t>(f.value);
  b[0] = kSync;
  b[1] = f.node_id;
  b[2] = f.sensor_kind;
  b[3] = static_cast<std::uint8_t>(f.seq >> 8);
  b[4] = static_cast<std::uint8_t>(f.seq);
  b[5] = static_cast<std::uint8_t>(v >> 24);
  b[6] = static_cast<std::uint8_t>(v >> 16);
  b[7] = static_cast<std::uint8_t>(v >> 8);
  b[8] = static_cast<std::uint8_t>(v);
  b[9] = f.flags;
  const std::uint16_t crc = crc16_ccitt_false(std::span(b).subspan(1, 9));
  b[10] = static_cast<std::uint8_t>(crc >> 8);
  b[11] = static_cast<std::uint8_t>(crc);
  return b;
}

std::optional<Frame> decode(std::span<const std::uint8_t> b, DecodeError* why) {
  auto reject = [&](DecodeError e) -> std::optional<Frame> {
    if (why) *why = e;
    return std::nullopt;
  };
  if (b.size() != kFrameSize) return reject(DecodeError::bad_length);
  if (b[0] != kSync) return reject(DecodeError::bad_sync);
  const std::uint16_t crc = static_cast<std::uint16_t>((b[10] << 8) | b[11]);
  if (crc16_ccitt_false(b.subspan(1, 9)) != crc) return reject(DecodeError::bad_crc);
  Frame f;
  f.node_id = b[1];
  f.sensor_kind = b[2];
  f.seq = static_cast<std::uint16_t>((b[3] << 8) | b[4]);
  const std::uint32_t v = (std::uint32_t{b[5]} << 24) | (std::uint32_t{b[6]} << 16) |
                          (std::uint32_t{b[7]} << 8) | std::uint32_t{b[8]};
  f.value = std::bit_cast<float>(v);
  f.flags = b[9];
  return f;
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
  std::string out;
  char buf[4];
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    std::snprintf(buf, sizeof buf, i ? " %02X" : "%02X", bytes[i]);
    out += buf;
  }
  return out;
}

std::string describe(std::span<const std::uint8_t> bytes) {
  std::string out = "hex    " + to_hex(bytes) + "\n";
  DecodeError why{};
  const auto f = decode(bytes, &why);
  if (!f) {
    const char* reason = why == DecodeError::bad_length ? "bad length"
                         : why == DecodeError::bad_sync ? "bad sync byte"
                                                        : "crc mismatch";
    return out + "status REJECTED (" + reason + ")\n";
  }
  char buf[256];
  const auto kind = sensor_kind_from_code(f->sensor_kind);
  std::snprintf(buf, sizeof buf,
                "status ok\nnode   %u\nkind   %u (%s)\nseq    %u\nvalue  %.9g\nflags  0x%02X%s%s%s%s\n",
                f->node_id, f->sensor_kind,
                kind ? std::string(key(*kind)).c_str() : "unknown", f->seq,
                static_cast<double>(f->value), f->flags,
                (f->flags & kFlagStandbyActive) ? " standby" : "",
                (f->flags & kFlagTestError) ? " test-error" : "",
                (f->flags & kFlagNeedsReplacement) ? " needs-replacement" : "",
                (f->flags & kFlagTestReport) ? " test-report" : "");
  return out + buf;
}

}  // namespace digirr::fieldnet
