#include "mcaimem/energy.hpp"

#include <cmath>
#include <fmt/format.h>

#include "json.hpp"
#include "mcaimem/error.hpp"

namespace mcaimem {

namespace {

using nlohmann::json;

constexpr double kSramCellsPerByte = 8.0;

void check_fraction(double zf) {
  if (!(zf >= 0.0 && zf <= 1.0)) throw DomainError("zero_fraction must lie in [0, 1]");
}

double lerp(double lo, double hi, double zf) {
  if (zf == 0.0) return lo;
  if (zf == 1.0) return hi;
  return lo + zf * (hi - lo);
}

void overlay(TechEnergy& t, const json& j) {
  t.static_min_mw_per_mb = j.value("static_min_mw_per_mb", t.static_min_mw_per_mb);
  t.static_max_mw_per_mb = j.value("static_max_mw_per_mb", t.static_max_mw_per_mb);
  t.read_min_pj = j.value("read_min_pj", t.read_min_pj);
  t.read_max_pj = j.value("read_max_pj", t.read_max_pj);
  t.write_min_pj = j.value("write_min_pj", t.write_min_pj);
  t.write_max_pj = j.value("write_max_pj", t.write_max_pj);
}

json tech_json(const TechEnergy& t) {
  return {{"static_min_mw_per_mb", t.static_min_mw_per_mb}, {"static_max_mw_per_mb", t.static_max_mw_per_mb},
          {"read_min_pj", t.read_min_pj},                   {"read_max_pj", t.read_max_pj},
          {"write_min_pj", t.write_min_pj},                 {"write_max_pj", t.write_max_pj}};
}

// Access-weighted zero fraction of everything resident in the buffer.
double resident_zero_fraction(const TraceStats& s, bool encoded) {
  auto zf = [encoded](const BitStats& b) { return encoded ? b.encoded_zero_fraction : b.raw_zero_fraction; };
  const double wi = static_cast<double>(s.ifmap_reads_bytes);
  const double wf = static_cast<double>(s.filter_reads_bytes);
  const double wo = static_cast<double>(s.ofmap_writes_bytes);
  const double total = wi + wf + wo;
  if (total == 0.0) return (zf(s.operands.ifmap) + zf(s.operands.filter) + zf(s.operands.ofmap)) / 3.0;
  return (wi * zf(s.operands.ifmap) + wf * zf(s.operands.filter) + wo * zf(s.operands.ofmap)) / total;
}

}  // namespace

std::string to_string(Technology t) {
  switch (t) {
    case Technology::Sram: return "sram";
    case Technology::Edram: return "edram";
    case Technology::Mcaimem: return "mcaimem";
    case Technology::Rram: return "rram";
  }
  return "unknown";
}

Technology technology_from_string(const std::string& s) {
  if (s == "sram") return Technology::Sram;
  if (s == "edram") return Technology::Edram;
  if (s == "mcaimem") return Technology::Mcaimem;
  if (s == "rram") return Technology::Rram;
  throw DomainError("unknown technology '" + s + "' (expected sram, edram, mcaimem or rram)");
}

void EnergyParams::validate() const {
  for (const TechEnergy* t : {&sram, &edram, &mcaimem}) {
    const double vals[] = {t->static_min_mw_per_mb, t->static_max_mw_per_mb, t->read_min_pj,
                           t->read_max_pj,          t->write_min_pj,          t->write_max_pj};
    for (double v : vals)
      if (!(v >= 0.0)) throw DomainError("energy parameters must be non-negative");
    if (t->static_min_mw_per_mb > t->static_max_mw_per_mb || t->read_min_pj > t->read_max_pj ||
        t->write_min_pj > t->write_max_pj)
      throw DomainError("energy parameter min exceeds max");
  }
  if (rram_read_pj && !(*rram_read_pj >= 0.0)) throw DomainError("rram_read_pj must be non-negative");
  if (rram_write_pj && !(*rram_write_pj >= 0.0)) throw DomainError("rram_write_pj must be non-negative");
  if (!(edram_cell_area_ratio > 0.0) || !(mcaimem_byte_area_ratio > 0.0))
    throw DomainError("area ratios must be positive");
}

const TechEnergy& EnergyParams::tech(Technology t) const {
  switch (t) {
    case Technology::Sram: return sram;
    case Technology::Edram: return edram;
    case Technology::Mcaimem: return mcaimem;
    case Technology::Rram: break;
  }
  throw DomainError("RRAM has no static/interpolated characterization");
}

EnergyParams energy_params_from_json(const std::string& text) {
  EnergyParams p;
  try {
    const json j = json::parse(text);
    if (j.contains("sram")) overlay(p.sram, j.at("sram"));
    if (j.contains("edram")) overlay(p.edram, j.at("edram"));
    if (j.contains("mcaimem")) overlay(p.mcaimem, j.at("mcaimem"));
    if (j.contains("rram")) {
      const auto& r = j.at("rram");
      if (r.contains("read_pj")) p.rram_read_pj = r.at("read_pj").get<double>();
      if (r.contains("write_pj")) p.rram_write_pj = r.at("write_pj").get<double>();
    }
    p.edram_refresh_vref = j.value("edram_refresh_vref", p.edram_refresh_vref);
    p.edram_cell_area_ratio = j.value("edram_cell_area_ratio", p.edram_cell_area_ratio);
    p.mcaimem_byte_area_ratio = j.value("mcaimem_byte_area_ratio", p.mcaimem_byte_area_ratio);
  } catch (const json::exception& e) {
    throw ParseError(std::string("energy parameters JSON: ") + e.what());
  }
  p.validate();
  return p;
}

std::string energy_params_to_json(const EnergyParams& p) {
  json j = {{"sram", tech_json(p.sram)},
            {"edram", tech_json(p.edram)},
            {"mcaimem", tech_json(p.mcaimem)},
            {"edram_refresh_vref", p.edram_refresh_vref},
            {"edram_cell_area_ratio", p.edram_cell_area_ratio},
            {"mcaimem_byte_area_ratio", p.mcaimem_byte_area_ratio}};
  if (p.rram_read_pj || p.rram_write_pj) {
    json r = json::object();
    if (p.rram_read_pj) r["read_pj"] = *p.rram_read_pj;
    if (p.rram_write_pj) r["write_pj"] = *p.rram_write_pj;
    j["rram"] = r;
  }
  return j.dump(2) + "\n";
}

double static_power_mw(const EnergyParams& p, Technology tech, double zero_fraction, double capacity_mb) {
  check_fraction(zero_fraction);
  if (!(capacity_mb >= 0.0)) throw DomainError("capacity must be non-negative");
  if (tech == Technology::Rram) return 0.0;
  const TechEnergy& t = p.tech(tech);
  return lerp(t.static_min_mw_per_mb, t.static_max_mw_per_mb, zero_fraction) * capacity_mb;
}

double access_energy_pj(const EnergyParams& p, Technology tech, AccessKind kind, double zero_fraction) {
  check_fraction(zero_fraction);
  if (tech == Technology::Rram) {
    const auto& v = kind == AccessKind::Read ? p.rram_read_pj : p.rram_write_pj;
    if (!v) throw DomainError("RRAM access energies are not configured");
    return *v;
  }
  const TechEnergy& t = p.tech(tech);
  return kind == AccessKind::Read ? lerp(t.read_min_pj, t.read_max_pj, zero_fraction)
                                  : lerp(t.write_min_pj, t.write_max_pj, zero_fraction);
}

RefreshCost refresh_energy(const ArrayConfig& config, const RetentionCalibration& cal, Nanoseconds duration,
                           double zero_fraction, const EnergyParams& params, Technology tech) {
  check_fraction(zero_fraction);
  if (duration < 0) throw DomainError("duration must be non-negative");
  if (tech != Technology::Mcaimem && tech != Technology::Edram) return {};
  if (!config.refresh_enabled || duration == 0) return {};
  const RefreshSchedule schedule(refresh_period_ns(config, cal), config.rows_per_bank);
  RefreshCost cost;
  cost.count = schedule.events_through(duration) * config.banks;
  cost.energy_j = static_cast<double>(cost.count) * config.bytes_per_row *
                  access_energy_pj(params, tech, AccessKind::Read, zero_fraction) * 1e-12;
  return cost;
}

double ops_per_watt_gain(double share, double ratio) {
  if (!(share > 0.0 && share < 1.0)) throw DomainError("buffer power share must lie in (0, 1)");
  if (!(ratio > 0.0)) throw DomainError("buffer energy ratio must be positive");
  return 1.0 / ((1.0 - share) + share * ratio) - 1.0;
}

double area_units(const EnergyParams& p, Technology tech, std::uint64_t capacity_bytes) {
  if (capacity_bytes == 0) throw DomainError("capacity must be positive");
  const auto n = static_cast<double>(capacity_bytes);
  switch (tech) {
    case Technology::Sram: return n * kSramCellsPerByte;
    case Technology::Edram: return n * kSramCellsPerByte * p.edram_cell_area_ratio;
    case Technology::Mcaimem: {
      // One 6T cell for the sign bit plus seven width-stretched 2T cells.
      const double stretched = (p.mcaimem_byte_area_ratio * kSramCellsPerByte - 1.0) / 7.0;
      return n * (1.0 + 7.0 * stretched);
    }
    case Technology::Rram: break;
  }
  throw DomainError("no area model for " + to_string(tech));
}

EnergyReport& EnergyReport::operator+=(const EnergyReport& o) {
  const double bits_before = zero_fraction * duration_s;
  static_j += o.static_j;
  read_j += o.read_j;
  write_j += o.write_j;
  refresh_j += o.refresh_j;
  total_j += o.total_j;
  duration_s += o.duration_s;
  refresh_count += o.refresh_count;
  zero_fraction = duration_s > 0.0 ? (bits_before + o.zero_fraction * o.duration_s) / duration_s : zero_fraction;
  return *this;
}

EnergyReport total_energy(const TraceStats& stats, Technology tech, const EnergyContext& ctx) {
  EnergyReport r;
  r.tech = tech;
  if (!(ctx.clock_hz > 0.0)) throw DomainError("clock must be positive");
  const Nanoseconds duration_ns = std::llround(static_cast<double>(stats.cycles) * 1e9 / ctx.clock_hz);
  r.duration_s = static_cast<double>(stats.cycles) / ctx.clock_hz;

  const bool encoded = tech == Technology::Mcaimem;
  const auto zf = [encoded](const BitStats& b) { return encoded ? b.encoded_zero_fraction : b.raw_zero_fraction; };
  r.zero_fraction = resident_zero_fraction(stats, encoded);

  const auto& p = ctx.params;
  r.read_j = (static_cast<double>(stats.ifmap_reads_bytes) *
                  access_energy_pj(p, tech, AccessKind::Read, zf(stats.operands.ifmap)) +
              static_cast<double>(stats.filter_reads_bytes) *
                  access_energy_pj(p, tech, AccessKind::Read, zf(stats.operands.filter))) *
             1e-12;
  r.write_j = static_cast<double>(stats.ofmap_writes_bytes) *
              access_energy_pj(p, tech, AccessKind::Write, zf(stats.operands.ofmap)) * 1e-12;

  if (tech != Technology::Rram) {
    r.static_j = static_power_mw(p, tech, r.zero_fraction, ctx.capacity_mb) * 1e-3 * r.duration_s;
  }
  if (tech == Technology::Mcaimem || tech == Technology::Edram) {
    ArrayConfig array = ctx.reference_array;
    if (tech == Technology::Edram) array.v_ref = p.edram_refresh_vref;
    const RefreshCost rc = refresh_energy(array, ctx.calibration, duration_ns, r.zero_fraction, p, tech);
    const double scale = ctx.capacity_mb / array.capacity_mb();
    r.refresh_j = rc.energy_j * scale;
    r.refresh_count = static_cast<std::uint64_t>(std::llround(static_cast<double>(rc.count) * scale));
  }
  r.total_j = r.static_j + r.read_j + r.write_j + r.refresh_j;
  return r;
}

std::string energy_report_csv_header() {
  return "label,tech,duration_s,static_J,read_J,write_J,refresh_J,total_J,refresh_count,zero_fraction\n";
}

std::string energy_report_csv_row(const std::string& label, const EnergyReport& r) {
  return fmt::format("{},{},{:.9e},{:.9e},{:.9e},{:.9e},{:.9e},{:.9e},{},{:.6f}\n", label, to_string(r.tech),
                     r.duration_s, r.static_j, r.read_j, r.write_j, r.refresh_j, r.total_j, r.refresh_count,
                     r.zero_fraction);
}

std::string energy_report_to_json(const EnergyReport& r) {
  const json j = {{"tech", to_string(r.tech)},     {"duration_s", r.duration_s},   {"static_J", r.static_j},
                  {"read_J", r.read_j},            {"write_J", r.write_j},         {"refresh_J", r.refresh_j},
                  {"total_J", r.total_j},          {"refresh_count", r.refresh_count},
                  {"zero_fraction", r.zero_fraction}};
  return j.dump(2) + "\n";
}

}  // namespace mcaimem
