#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <span>
#include <string>
#include <vector>

#include "mcaimem/trace_stats.hpp"

namespace mcaimem {

/// One convolution layer in SCALE-Sim topology terms. Fully-connected
/// layers are 1x1 convolutions over a 1x1 ifmap.
struct LayerSpec {
  std::string name;
  std::uint32_t ifmap_h = 1;
  std::uint32_t ifmap_w = 1;
  std::uint32_t filter_h = 1;
  std::uint32_t filter_w = 1;
  std::uint32_t channels = 1;
  std::uint32_t num_filters = 1;
  std::uint32_t stride = 1;

  void validate() const;
  [[nodiscard]] std::uint64_t ofmap_h() const { return (ifmap_h - filter_h) / stride + 1; }
  [[nodiscard]] std::uint64_t ofmap_w() const { return (ifmap_w - filter_w) / stride + 1; }
  [[nodiscard]] std::uint64_t window_size() const { return std::uint64_t{filter_h} * filter_w * channels; }
  [[nodiscard]] std::uint64_t window_count() const { return ofmap_h() * ofmap_w(); }
};

struct AccelConfig {
  std::string preset = "custom";
  std::uint32_t array_rows = 1;
  std::uint32_t array_cols = 1;
  std::uint64_t buffer_capacity_bytes = 0;
  double clock_hz = 1e8;
  double buffer_power_share = 0.0;  // on-chip buffer share of chip power

  static AccelConfig eyeriss();
  static AccelConfig tpuv1();
  /// "eyeriss" or "tpuv1"; DomainError otherwise.
  static AccelConfig from_preset(const std::string& name);

  [[nodiscard]] double buffer_capacity_mb() const {
    return static_cast<double>(buffer_capacity_bytes) / (1024.0 * 1024.0);
  }
};

/// Parses `name,ifmap_h,ifmap_w,filter_h,filter_w,channels,num_filters,stride`
/// rows after a header line. Trailing empty fields (SCALE-Sim writes a
/// trailing comma) are ignored. ParseError names the offending line.
std::vector<LayerSpec> parse_topology(std::istream& in);
std::vector<LayerSpec> parse_topology_file(const std::filesystem::path& path);

/// Output-stationary analytical model: each fold maps array_rows windows
/// onto array_cols filters and takes W + rows + cols - 2 cycles. Every
/// window element and filter element is fetched once; every output is
/// written once.
TraceStats simulate_layer(const LayerSpec& spec, const AccelConfig& config);

struct LayerResult {
  std::string name;
  TraceStats stats;
};

struct NetworkStats {
  std::vector<LayerResult> layers;
  TraceStats total;
  double duration_s = 0.0;
};

NetworkStats run_network(std::span<const LayerSpec> layers, const AccelConfig& config,
                         const OperandStats& operands);

}  // namespace mcaimem
