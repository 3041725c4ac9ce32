#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace mcaimem {

inline constexpr std::uint8_t kPayloadMask = 0x7F;
inline constexpr int kPayloadBits = 7;

/// One INT8 word as stored in the mixed-cell array: the sign (control) bit
/// lives in an SRAM cell, the seven payload bits in eDRAM cells.
struct EncodedByte {
  bool sign = false;
  std::uint8_t payload = 0;  // bits 6..0, upper bit always clear

  /// Serialized form, (sign << 7) | payload.
  [[nodiscard]] constexpr std::uint8_t to_byte() const {
    return static_cast<std::uint8_t>((sign ? 0x80u : 0u) | (payload & kPayloadMask));
  }
  [[nodiscard]] static constexpr EncodedByte from_byte(std::uint8_t b) {
    return EncodedByte{(b & 0x80u) != 0, static_cast<std::uint8_t>(b & kPayloadMask)};
  }

  friend constexpr bool operator==(const EncodedByte&, const EncodedByte&) = default;
};

/// One-enhancement encoder. Positive words (sign 0) get their seven low
/// bits inverted so that values near zero become 1-dominant; negative words
/// are already 1-dominant near zero and pass through.
[[nodiscard]] constexpr EncodedByte encode(std::int8_t x) {
  const auto raw = static_cast<std::uint8_t>(x);
  const bool sign = (raw & 0x80u) != 0;
  const std::uint8_t flip = sign ? 0x00 : kPayloadMask;
  return EncodedByte{sign, static_cast<std::uint8_t>((raw ^ flip) & kPayloadMask)};
}

/// Inverse of encode(); the same conditional flip keyed on the sign bit.
[[nodiscard]] constexpr std::int8_t decode(EncodedByte e) {
  const std::uint8_t flip = e.sign ? 0x00 : kPayloadMask;
  const auto payload = static_cast<std::uint8_t>((e.payload ^ flip) & kPayloadMask);
  return static_cast<std::int8_t>((e.sign ? 0x80u : 0u) | payload);
}

std::vector<EncodedByte> encode_tensor(std::span<const std::int8_t> t);
std::vector<std::int8_t> decode_tensor(std::span<const EncodedByte> t);

/// Fraction of ones at each bit position of the serialized encoded bytes.
/// Index 7 is the sign bit. Throws DomainError on empty input.
std::array<double, 8> ones_histogram(std::span<const EncodedByte> t);

/// Fraction of zero bits among the eDRAM-mapped payload bits after encoding.
double encoded_payload_zero_fraction(std::span<const std::int8_t> t);

/// Fraction of zero bits over all eight raw two's-complement bits.
double raw_zero_fraction(std::span<const std::int8_t> t);

}  // namespace mcaimem
