#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mcaimem/codec.hpp"
#include "mcaimem/retention.hpp"
#include "mcaimem/rng.hpp"

namespace mcaimem {

using Nanoseconds = std::int64_t;

struct ArrayConfig {
  std::uint32_t banks = 64;
  std::uint32_t rows_per_bank = 256;
  std::uint32_t bytes_per_row = 64;
  double v_ref = 0.8;
  bool refresh_enabled = true;
  double refresh_target_p = kDefaultTargetFlipProbability;
  double clock_hz = 1e8;

  [[nodiscard]] std::uint64_t capacity_bytes() const {
    return std::uint64_t{banks} * rows_per_bank * bytes_per_row;
  }
  [[nodiscard]] double capacity_mb() const { return static_cast<double>(capacity_bytes()) / (1024.0 * 1024.0); }
  void validate() const;

  friend bool operator==(const ArrayConfig&, const ArrayConfig&) = default;
};

struct Address {
  std::uint32_t bank = 0;
  std::uint32_t row = 0;
  std::uint32_t col = 0;
};

/// Global staggered refresh: event k (k >= 1) fires at k * period / rows and
/// restores row (k - 1) mod rows in every bank at once.
class RefreshSchedule {
 public:
  RefreshSchedule(double period_ns, std::uint32_t rows_per_bank);

  [[nodiscard]] double period_ns() const { return period_ns_; }
  [[nodiscard]] double stagger_ns() const { return period_ns_ / rows_; }

  /// Number of events with fire time in (0, t].
  [[nodiscard]] std::uint64_t events_through(Nanoseconds t) const;

  /// Integer time at which event k is applied: ceil(k * stagger).
  [[nodiscard]] Nanoseconds event_time(std::uint64_t k) const;
  [[nodiscard]] std::uint32_t event_row(std::uint64_t k) const {
    return static_cast<std::uint32_t>((k - 1) % rows_);
  }

 private:
  [[nodiscard]] bool due(std::uint64_t k, Nanoseconds t) const;

  double period_ns_;
  std::uint32_t rows_;
};

/// Overlays fields present in a JSON object onto the defaults. Unknown keys
/// are ignored so the same document can carry tool-level settings.
ArrayConfig array_config_from_json(const std::string& text);
std::string array_config_to_json(const ArrayConfig& config);

/// Refresh period in ns for a configuration: the time at which a stored
/// zero reaches the configured target flip probability.
double refresh_period_ns(const ArrayConfig& config, const RetentionCalibration& cal);

/// Bit-accurate mixed SRAM/eDRAM array. The sign bit of every byte is an
/// SRAM cell and never errs; payload zeros decay to one per the retention
/// model. Any restore (read, refresh) writes back the sensed value, so a
/// flip is permanent, and a surviving zero starts a fresh decay epoch.
///
/// Time is supplied by the caller in ns and must never go backwards.
/// Reads, writes and explicit refreshes first run every scheduled refresh
/// that is due at their timestamp. A fresh array holds encode(0) everywhere.
///
/// Single-threaded; callers serialize access.
class MixedArray {
 public:
  MixedArray(ArrayConfig config, RetentionCalibration cal, std::uint64_t seed);

  void write(Address addr, EncodedByte value, Nanoseconds t);

  /// Restores the whole addressed row (sense amplifiers are per row) and
  /// returns the sensed byte.
  EncodedByte read(Address addr, Nanoseconds t);

  void refresh_row(std::uint32_t bank, std::uint32_t row, Nanoseconds t);

  /// Runs every refresh event due in (now, t]; returns the number of row
  /// refreshes performed (events x banks). Zero when refresh is disabled.
  std::uint64_t advance(Nanoseconds t);

  /// Versioned binary snapshot: magic, version, JSON header (config, seed,
  /// calibration, clock and RNG state) and the raw cell payload.
  [[nodiscard]] std::vector<std::uint8_t> dump_state() const;
  static MixedArray restore_state(std::span<const std::uint8_t> snapshot);

  /// Stored value without sensing; does not disturb the array.
  [[nodiscard]] EncodedByte peek(Address addr) const;

  [[nodiscard]] const ArrayConfig& config() const { return config_; }
  [[nodiscard]] const RetentionCalibration& calibration() const { return cal_; }
  [[nodiscard]] std::uint64_t seed() const { return seed_; }
  [[nodiscard]] Nanoseconds now() const { return now_; }
  [[nodiscard]] std::uint64_t refresh_count() const { return refresh_count_; }
  [[nodiscard]] double refresh_period_ns() const { return schedule_.period_ns(); }
  [[nodiscard]] const RefreshSchedule& schedule() const { return schedule_; }
  [[nodiscard]] Nanoseconds last_refresh(std::uint32_t bank, std::uint32_t row) const;
  [[nodiscard]] Nanoseconds max_row_age() const;

  /// Fraction of payload cells currently storing zero.
  [[nodiscard]] double stored_payload_zero_fraction() const;

 private:
  [[nodiscard]] std::size_t byte_index(Address addr) const;
  [[nodiscard]] std::size_t row_index(std::uint32_t bank, std::uint32_t row) const;
  void check_address(Address addr) const;
  void check_time(Nanoseconds t) const;
  void run_due_refreshes(Nanoseconds t);
  void restore_row(std::size_t row_idx, Nanoseconds t);
  void set_byte(std::size_t idx, std::uint8_t value);

  ArrayConfig config_;
  RetentionCalibration cal_;
  std::uint64_t seed_;
  RngStream rng_;
  RefreshSchedule schedule_;

  Nanoseconds now_ = 0;
  std::uint64_t events_done_ = 0;
  std::uint64_t refresh_count_ = 0;

  std::vector<std::uint8_t> cells_;        // serialized EncodedByte per address
  std::vector<Nanoseconds> written_at_;    // last write per byte
  std::vector<Nanoseconds> last_refresh_;  // per row
  std::vector<std::uint16_t> row_zeros_;   // payload zero cells per row
  Nanoseconds cached_age_ = -1;            // memo of flip_probability at the last age seen
  double cached_p_ = 0.0;
};

}  // namespace mcaimem
