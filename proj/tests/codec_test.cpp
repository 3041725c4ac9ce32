#include "mcaimem/codec.hpp"

#include <gtest/gtest.h>

#include <numeric>

#include "mcaimem/error.hpp"
#include "oracles.hpp"

using namespace mcaimem;

TEST(Codec, ScalarExamples) {
  EXPECT_EQ(encode(0), (EncodedByte{false, 0x7F}));
  EXPECT_EQ(encode(-1), (EncodedByte{true, 0x7F}));
  EXPECT_EQ(encode(7), (EncodedByte{false, 0x78}));
  EXPECT_EQ(decode({false, 0x7F}), 0);
  EXPECT_EQ(decode({true, 0x7F}), -1);
  EXPECT_EQ(decode({false, 0x78}), 7);
}

TEST(Codec, ExhaustiveAgainstBitwiseOracle) {
  for (int v = -128; v <= 127; ++v) {
    const auto x = static_cast<std::int8_t>(v);
    const EncodedByte e = encode(x);
    EXPECT_EQ(e.to_byte(), oracle::encode_byte(x)) << v;
    EXPECT_EQ(e.sign, v < 0) << v;
    EXPECT_EQ(decode(e), x) << v;
    EXPECT_EQ(EncodedByte::from_byte(e.to_byte()), e);
  }
}

TEST(Codec, EncodeIsInjective) {
  std::array<bool, 256> seen{};
  for (int v = -128; v <= 127; ++v) {
    const auto b = encode(static_cast<std::int8_t>(v)).to_byte();
    EXPECT_FALSE(seen[b]);
    seen[b] = true;
  }
}

TEST(Codec, TensorRoundTrip) {
  EXPECT_TRUE(encode_tensor(std::vector<std::int8_t>{}).empty());
  const std::vector<std::int8_t> t{0, -1, 7};
  const auto e = encode_tensor(t);
  ASSERT_EQ(e.size(), 3u);
  EXPECT_EQ(e[0], (EncodedByte{false, 0x7F}));
  EXPECT_EQ(e[1], (EncodedByte{true, 0x7F}));
  EXPECT_EQ(e[2], (EncodedByte{false, 0x78}));
  EXPECT_EQ(decode_tensor(e), t);
}

TEST(Codec, HistogramAllZeros) {
  const auto h = ones_histogram(encode_tensor(std::vector<std::int8_t>(100, 0)));
  for (int b = 0; b < 7; ++b) EXPECT_DOUBLE_EQ(h[b], 1.0);
  EXPECT_DOUBLE_EQ(h[7], 0.0);
}

TEST(Codec, HistogramSmallRange) {
  std::vector<std::int8_t> t(32);
  std::iota(t.begin(), t.end(), static_cast<std::int8_t>(-16));
  const auto h = ones_histogram(encode_tensor(t));
  EXPECT_DOUBLE_EQ(h[6], 1.0);
  EXPECT_DOUBLE_EQ(h[5], 1.0);
  EXPECT_DOUBLE_EQ(h[4], 1.0);
  EXPECT_DOUBLE_EQ(h[7], 0.5);
}

TEST(Codec, HistogramFullRangeIsBalanced) {
  std::vector<std::int8_t> t;
  for (int v = -128; v <= 127; ++v) t.push_back(static_cast<std::int8_t>(v));
  const auto h = ones_histogram(encode_tensor(t));
  for (double f : h) EXPECT_DOUBLE_EQ(f, 0.5);
}

TEST(Codec, HistogramRejectsEmpty) {
  EXPECT_THROW(ones_histogram(std::vector<EncodedByte>{}), DomainError);
}

TEST(Codec, PayloadFlipErrorEqualsPlaceValue) {
  for (int v = -128; v <= 127; ++v) {
    const EncodedByte e = encode(static_cast<std::int8_t>(v));
    for (int b = 0; b < 7; ++b) {
      if (e.payload & (1u << b)) continue;
      EncodedByte f = e;
      f.payload = static_cast<std::uint8_t>(f.payload | (1u << b));
      EXPECT_EQ(std::abs(decode(f) - v), 1 << b);
      EXPECT_EQ(f.sign, e.sign);
    }
  }
}

TEST(Codec, ZeroFractions) {
  EXPECT_DOUBLE_EQ(encoded_payload_zero_fraction(std::vector<std::int8_t>{0, -1}), 0.0);
  EXPECT_DOUBLE_EQ(raw_zero_fraction(std::vector<std::int8_t>{0}), 1.0);
  EXPECT_DOUBLE_EQ(raw_zero_fraction(std::vector<std::int8_t>{-1}), 0.0);
  // +127 encodes to payload 0: all seven cells hold zero.
  EXPECT_DOUBLE_EQ(encoded_payload_zero_fraction(std::vector<std::int8_t>{127}), 1.0);
}
