#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "mcaimem/mixed_array.hpp"
#include "mcaimem/retention.hpp"
#include "mcaimem/trace_stats.hpp"

namespace mcaimem {

enum class Technology { Sram, Edram, Mcaimem, Rram };
enum class AccessKind { Read, Write };

std::string to_string(Technology t);
Technology technology_from_string(const std::string& s);

/// Characterization endpoints of one buffer technology for a 1 MB macro.
/// "min" is measured with all stored bits 1, "max" with all bits 0.
struct TechEnergy {
  double static_min_mw_per_mb = 0.0;
  double static_max_mw_per_mb = 0.0;
  double read_min_pj = 0.0;  // per byte access
  double read_max_pj = 0.0;
  double write_min_pj = 0.0;
  double write_max_pj = 0.0;
};

struct EnergyParams {
  TechEnergy sram{19.29, 19.29, 0.08, 0.08, 0.16, 0.16};
  TechEnergy edram{0.84, 5.03, 0.00016, 0.14, 0.00016, 0.0184};
  TechEnergy mcaimem{3.15, 6.82, 0.01014, 0.1325, 0.02014, 0.0361};
  // No defaults: RRAM numbers come from an external device model.
  std::optional<double> rram_read_pj;
  std::optional<double> rram_write_pj;
  // Plain 2T eDRAM with a current-mode sense amplifier refreshes on the
  // retention curve of this threshold.
  double edram_refresh_vref = 0.5;
  double edram_cell_area_ratio = 0.48;    // per bit, relative to a 6T cell
  double mcaimem_byte_area_ratio = 0.52;  // per byte, relative to 8 6T cells

  void validate() const;
  [[nodiscard]] const TechEnergy& tech(Technology t) const;
};

/// Overlays the fields present in a JSON document onto the defaults.
EnergyParams energy_params_from_json(const std::string& text);
std::string energy_params_to_json(const EnergyParams& p);

/// Static power in mW. eDRAM-based technologies interpolate linearly between
/// their min and max by the fraction of stored zero bits; RRAM has none.
double static_power_mw(const EnergyParams& p, Technology tech, double zero_fraction, double capacity_mb);

/// Energy of one byte access in pJ, interpolated like static_power_mw.
double access_energy_pj(const EnergyParams& p, Technology tech, AccessKind kind, double zero_fraction);

struct RefreshCost {
  double energy_j = 0.0;
  std::uint64_t count = 0;  // row refreshes
};

/// Row refreshes issued by the staggered schedule of `config` over
/// `duration`, each costing one read of a full row. `tech` selects the
/// access energies (MCAIMem or plain eDRAM); the schedule always follows
/// config.v_ref.
RefreshCost refresh_energy(const ArrayConfig& config, const RetentionCalibration& cal, Nanoseconds duration,
                           double zero_fraction, const EnergyParams& params = {},
                           Technology tech = Technology::Mcaimem);

/// Performance-per-watt gain from cutting the buffer energy to `ratio` of
/// the baseline when the buffer draws `share` of chip power.
double ops_per_watt_gain(double buffer_power_share, double buffer_energy_ratio);

/// Layout area in units of one 6T SRAM cell.
double area_units(const EnergyParams& p, Technology tech, std::uint64_t capacity_bytes);

struct EnergyReport {
  Technology tech = Technology::Sram;
  double static_j = 0.0;
  double read_j = 0.0;
  double write_j = 0.0;
  double refresh_j = 0.0;
  double total_j = 0.0;
  double duration_s = 0.0;
  std::uint64_t refresh_count = 0;
  double zero_fraction = 0.0;

  EnergyReport& operator+=(const EnergyReport& o);
};

/// Everything besides the trace that total_energy needs. Refresh is
/// evaluated on `reference_array` (the characterized 1 MB macro) and scaled
/// linearly to `capacity_mb`.
struct EnergyContext {
  EnergyParams params;
  ArrayConfig reference_array;
  RetentionCalibration calibration = default_calibration();
  double capacity_mb = 1.0;
  double clock_hz = 1e8;
};

EnergyReport total_energy(const TraceStats& stats, Technology tech, const EnergyContext& ctx);

std::string energy_report_csv_header();
std::string energy_report_csv_row(const std::string& label, const EnergyReport& r);
std::string energy_report_to_json(const EnergyReport& r);

}  // namespace mcaimem
