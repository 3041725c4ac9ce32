#include "mcaimem/codec.hpp"

#include <algorithm>
#include <bit>

#include "mcaimem/error.hpp"

namespace mcaimem {

std::vector<EncodedByte> encode_tensor(std::span<const std::int8_t> t) {
  std::vector<EncodedByte> out(t.size());
  std::transform(t.begin(), t.end(), out.begin(), [](std::int8_t x) { return encode(x); });
  return out;
}

std::vector<std::int8_t> decode_tensor(std::span<const EncodedByte> t) {
  std::vector<std::int8_t> out(t.size());
  std::transform(t.begin(), t.end(), out.begin(), [](EncodedByte e) { return decode(e); });
  return out;
}

std::array<double, 8> ones_histogram(std::span<const EncodedByte> t) {
  if (t.empty()) throw DomainError("ones_histogram: empty tensor");
  std::array<std::uint64_t, 8> ones{};
  for (const auto& e : t) {
    const std::uint8_t b = e.to_byte();
    for (int bit = 0; bit < 8; ++bit) ones[bit] += (b >> bit) & 1u;
  }
  std::array<double, 8> out{};
  const auto n = static_cast<double>(t.size());
  for (int bit = 0; bit < 8; ++bit) out[bit] = static_cast<double>(ones[bit]) / n;
  return out;
}

double encoded_payload_zero_fraction(std::span<const std::int8_t> t) {
  if (t.empty()) return 0.0;
  std::uint64_t zeros = 0;
  for (auto x : t) zeros += kPayloadBits - std::popcount(encode(x).payload);
  return static_cast<double>(zeros) / (static_cast<double>(t.size()) * kPayloadBits);
}

double raw_zero_fraction(std::span<const std::int8_t> t) {
  if (t.empty()) return 0.0;
  std::uint64_t zeros = 0;
  for (auto x : t) zeros += 8 - std::popcount(static_cast<std::uint8_t>(x));
  return static_cast<double>(zeros) / (static_cast<double>(t.size()) * 8.0);
}

}  // namespace mcaimem
