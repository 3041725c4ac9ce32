#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mcaimem/mixed_array.hpp"
#include "mcaimem/retention.hpp"

namespace mcaimem {

enum class InjectionMode {
  Rate,       // each stored zero payload bit flips with probability `rate`
  FromArray,  // tensor is written to a MixedArray and read back after `dwell`
};

struct InjectionConfig {
  InjectionMode mode = InjectionMode::Rate;
  double rate = 0.0;
  bool encoder_enabled = true;
  std::uint64_t seed = 0;

  // FromArray only.
  ArrayConfig array;
  RetentionCalibration calibration;
  Nanoseconds dwell_ns = 0;

  void validate() const;
};

/// Asymmetric 0->1 fault injection in the storage domain. With the encoder,
/// bytes are encoded, zero payload bits flip, and the result is decoded;
/// without it the same flips hit raw bits 6..0. Bit 7 is SRAM and never
/// flips. In Rate mode one uniform draw is consumed per (element, payload
/// bit) regardless of content, so runs with the same seed share random
/// numbers across rates and modes. `stream` selects an independent substream.
std::vector<std::int8_t> inject(std::span<const std::int8_t> tensor, const InjectionConfig& cfg,
                                std::uint64_t stream = 0);

struct DistortionReport {
  double mean_relative_error = 0.0;
  double mean_absolute_error = 0.0;
  double max_absolute_error = 0.0;
  std::uint64_t flip_count = 0;  // differing storage bits
};

/// MRE uses |delta| / max(|original|, 1) per element. Shapes must match.
DistortionReport distortion(std::span<const std::int8_t> original, std::span<const std::int8_t> corrupted);

struct SweepRow {
  double rate = 0.0;
  bool encoder_enabled = true;
  DistortionReport report;
};

/// One report per (rate, mode), in rate-major order. All runs share `seed`.
std::vector<SweepRow> sweep(std::span<const std::int8_t> tensor, std::span<const double> rates,
                            std::span<const bool> encoder_modes, std::uint64_t seed, unsigned threads = 1);

std::string sweep_csv(std::span<const SweepRow> rows);

/// Zero-heavy INT8 tensor resembling pruned DNN data: `zero_share` exact
/// zeros, the rest a rounded Laplace(0, scale) clipped to INT8.
std::vector<std::int8_t> make_zero_heavy_tensor(std::size_t n, double zero_share, double laplace_scale,
                                                std::uint64_t seed);

}  // namespace mcaimem
