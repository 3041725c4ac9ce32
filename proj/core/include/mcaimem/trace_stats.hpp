#pragma once

#include <cstdint>

namespace mcaimem {

/// Bit statistics of one operand class as it would sit in the buffer.
struct BitStats {
  double raw_zero_fraction = 0.5;      // over all 8 two's-complement bits
  double encoded_zero_fraction = 0.5;  // over the 7 eDRAM payload bits after encoding
};

struct OperandStats {
  BitStats ifmap;
  BitStats filter;
  BitStats ofmap;
};

/// Cycle and buffer-access counts of a workload (one layer or a sum).
struct TraceStats {
  std::uint64_t cycles = 0;
  std::uint64_t ifmap_reads_bytes = 0;
  std::uint64_t filter_reads_bytes = 0;
  std::uint64_t ofmap_writes_bytes = 0;
  OperandStats operands;

  [[nodiscard]] std::uint64_t buffer_reads_bytes() const { return ifmap_reads_bytes + filter_reads_bytes; }
  [[nodiscard]] std::uint64_t buffer_writes_bytes() const { return ofmap_writes_bytes; }

  /// Adds counts; operand statistics are kept from *this.
  TraceStats& operator+=(const TraceStats& o) {
    cycles += o.cycles;
    ifmap_reads_bytes += o.ifmap_reads_bytes;
    filter_reads_bytes += o.filter_reads_bytes;
    ofmap_writes_bytes += o.ofmap_writes_bytes;
    return *this;
  }
};

}  // namespace mcaimem
