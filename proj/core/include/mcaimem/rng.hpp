#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace mcaimem {

/// Seeded random stream. Substreams are addressed by (master_seed, stream_id)
/// so parallel work can be split into fixed, independent chunks whose output
/// does not depend on how many threads consume them.
class RngStream {
 public:
  explicit RngStream(std::uint64_t master_seed, std::uint64_t stream_id = 0);

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform draw on the open interval (0, 1); never returns 0 or 1.
  double uniform01() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal via the inverse CDF of uniform01().
  double standard_normal();

  std::mt19937_64& engine() { return engine_; }

  [[nodiscard]] std::string state() const;
  void set_state(const std::string& s);

 private:
  std::mt19937_64 engine_;
};

}  // namespace mcaimem
