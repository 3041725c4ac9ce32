#include "mcaimem/fault.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <fmt/format.h>
#include <future>

#include "mcaimem/codec.hpp"
#include "mcaimem/error.hpp"

namespace mcaimem {

namespace {

std::uint8_t flip_zero_bits(std::uint8_t stored, double rate, RngStream& rng) {
  for (int bit = 0; bit < kPayloadBits; ++bit) {
    const double u = rng.uniform01();
    if (u < rate) stored |= static_cast<std::uint8_t>(1u << bit);
  }
  return stored;
}

std::uint8_t to_stored(std::int8_t x, bool encoder) {
  return encoder ? encode(x).to_byte() : static_cast<std::uint8_t>(x);
}

std::int8_t from_stored(std::uint8_t b, bool encoder) {
  return encoder ? decode(EncodedByte::from_byte(b)) : static_cast<std::int8_t>(b);
}

std::vector<std::int8_t> inject_through_array(std::span<const std::int8_t> tensor, const InjectionConfig& cfg,
                                              std::uint64_t stream) {
  MixedArray array(cfg.array, cfg.calibration, cfg.seed ^ (stream * 0x9E3779B97F4A7C15ull));
  const std::uint64_t cap = cfg.array.capacity_bytes();
  const std::uint32_t bpr = cfg.array.bytes_per_row;
  const std::uint32_t rows = cfg.array.rows_per_bank;
  auto address = [&](std::uint64_t i) {
    const std::uint64_t row_global = i / bpr;
    return Address{static_cast<std::uint32_t>(row_global / rows), static_cast<std::uint32_t>(row_global % rows),
                   static_cast<std::uint32_t>(i % bpr)};
  };

  std::vector<std::int8_t> out(tensor.size());
  Nanoseconds t = 0;
  for (std::uint64_t begin = 0; begin < tensor.size(); begin += cap) {
    const std::uint64_t end = std::min<std::uint64_t>(tensor.size(), begin + cap);
    for (std::uint64_t i = begin; i < end; ++i)
      array.write(address(i - begin), EncodedByte::from_byte(to_stored(tensor[i], cfg.encoder_enabled)), t);
    t += cfg.dwell_ns;
    for (std::uint64_t i = begin; i < end; ++i)
      out[i] = from_stored(array.read(address(i - begin), t).to_byte(), cfg.encoder_enabled);
    t += 1;
  }
  return out;
}

}  // namespace

void InjectionConfig::validate() const {
  if (!(rate >= 0.0 && rate <= 1.0)) throw DomainError("injection rate must lie in [0, 1]");
  if (mode == InjectionMode::FromArray) {
    array.validate();
    if (dwell_ns < 0) throw DomainError("dwell time must be non-negative");
  }
}

std::vector<std::int8_t> inject(std::span<const std::int8_t> tensor, const InjectionConfig& cfg,
                                std::uint64_t stream) {
  cfg.validate();
  if (cfg.mode == InjectionMode::FromArray) return inject_through_array(tensor, cfg, stream);

  RngStream rng(cfg.seed, stream);
  std::vector<std::int8_t> out(tensor.size());
  for (std::size_t i = 0; i < tensor.size(); ++i) {
    const std::uint8_t stored = to_stored(tensor[i], cfg.encoder_enabled);
    out[i] = from_stored(flip_zero_bits(stored, cfg.rate, rng), cfg.encoder_enabled);
  }
  return out;
}

DistortionReport distortion(std::span<const std::int8_t> original, std::span<const std::int8_t> corrupted) {
  if (original.size() != corrupted.size())
    throw DomainError("distortion: shape mismatch (" + std::to_string(original.size()) + " vs " +
                      std::to_string(corrupted.size()) + ")");
  DistortionReport r;
  if (original.empty()) return r;
  double rel = 0.0;
  double abs_sum = 0.0;
  for (std::size_t i = 0; i < original.size(); ++i) {
    const int o = original[i];
    const double d = std::abs(o - static_cast<int>(corrupted[i]));
    rel += d / std::max(std::abs(o), 1);
    abs_sum += d;
    r.max_absolute_error = std::max(r.max_absolute_error, d);
    // The encoder mask depends only on the preserved sign bit, so raw and
    // storage-domain bit differences coincide.
    r.flip_count += std::popcount(static_cast<unsigned>(static_cast<std::uint8_t>(original[i]) ^
                                                        static_cast<std::uint8_t>(corrupted[i])));
  }
  const auto n = static_cast<double>(original.size());
  r.mean_relative_error = rel / n;
  r.mean_absolute_error = abs_sum / n;
  return r;
}

std::vector<SweepRow> sweep(std::span<const std::int8_t> tensor, std::span<const double> rates,
                            std::span<const bool> encoder_modes, std::uint64_t seed, unsigned threads) {
  if (rates.empty()) throw DomainError("sweep needs at least one rate");
  if (encoder_modes.empty()) throw DomainError("sweep needs at least one mode");
  std::vector<SweepRow> rows;
  for (double rate : rates)
    for (bool enc : encoder_modes) rows.push_back({rate, enc, {}});

  auto run = [&](std::size_t i) {
    InjectionConfig cfg;
    cfg.rate = rows[i].rate;
    cfg.encoder_enabled = rows[i].encoder_enabled;
    cfg.seed = seed;
    rows[i].report = distortion(tensor, inject(tensor, cfg));
  };
  threads = std::max(1u, threads);
  std::vector<std::future<void>> workers;
  for (unsigned w = 0; w < threads; ++w)
    workers.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < rows.size(); i += threads) run(i);
    }));
  for (auto& f : workers) f.get();
  return rows;
}

std::string sweep_csv(std::span<const SweepRow> rows) {
  std::string out = "rate,mode,mre,mae,max_abs,flips\n";
  for (const auto& r : rows)
    out += fmt::format("{:.6f},{},{:.9e},{:.9e},{:.1f},{}\n", r.rate, r.encoder_enabled ? "encoder" : "raw",
                       r.report.mean_relative_error, r.report.mean_absolute_error, r.report.max_absolute_error,
                       r.report.flip_count);
  return out;
}

std::vector<std::int8_t> make_zero_heavy_tensor(std::size_t n, double zero_share, double laplace_scale,
                                                std::uint64_t seed) {
  if (!(zero_share >= 0.0 && zero_share <= 1.0)) throw DomainError("zero_share must lie in [0, 1]");
  if (!(laplace_scale > 0.0)) throw DomainError("laplace scale must be positive");
  RngStream rng(seed);
  std::vector<std::int8_t> out(n);
  for (auto& x : out) {
    if (rng.uniform01() < zero_share) {
      x = 0;
      continue;
    }
    const double u = rng.uniform01() - 0.5;
    const double v = laplace_scale * std::copysign(-std::log1p(-2.0 * std::abs(u)), u);
    x = static_cast<std::int8_t>(std::clamp(std::lround(v), -128L, 127L));
  }
  return out;
}

}  // namespace mcaimem
