#pragma once

#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>

namespace digirr::fieldnet {

// Wire layout, 12 bytes, multi-byte fields big-endian:
//   0      sync 0xA5
//   1      node_id
//   2      sensor_kind
//   3..4   seq
//   5..8   value, IEEE-754 binary32, engineering units
//   9      flags
//   10..11 CRC-16/CCITT-FALSE over bytes 1..9
inline constexpr std::size_t kFrameSize = 12;
inline constexpr std::uint8_t kSync = 0xA5;

inline constexpr std::uint8_t kFlagStandbyActive = 0x01;
inline constexpr std::uint8_t kFlagTestError = 0x02;
inline constexpr std::uint8_t kFlagNeedsReplacement = 0x04;
// Reserved-bit extension: set on the first frame after a self-test ran.
inline constexpr std::uint8_t kFlagTestReport = 0x08;

using FrameBytes = std::array<std::uint8_t, kFrameSize>;

struct Frame {
  std::uint8_t node_id = 0;
  std::uint8_t sensor_kind = 0;
  std::uint16_t seq = 0;
  float value = 0.0f;
  std::uint8_t flags = 0;

  friend bool operator==(const Frame& a, const Frame& b) {
    // Bitwise on value so NaN payloads compare equal to themselves.
    return a.node_id == b.node_id && a.sensor_kind == b.sensor_kind && a.seq == b.seq &&
           std::bit_cast<std::uint32_t>(a.value) == std::bit_cast<std::uint32_t>(b.value) &&
           a.flags == b.flags;
  }
};

enum class DecodeError { bad_length, bad_sync, bad_crc };

// poly 0x1021, init 0xFFFF, no reflection, xorout 0.
std::uint16_t crc16_ccitt_false(std::span<const std::uint8_t> data);

FrameBytes encode(const Frame& frame);
std::optional<Frame> decode(std::span<const std::uint8_t> bytes, DecodeError* why = nullptr);

std::string to_hex(std::span<const std::uint8_t> bytes);
// Multi-line human-readable dump: hex plus decoded fields or the reject reason.
std::string describe(std::span<const std::uint8_t> bytes);

}  // namespace digirr::fieldnet
