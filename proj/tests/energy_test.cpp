#include "mcaimem/energy.hpp"

#include <gtest/gtest.h>

#include "mcaimem/error.hpp"
#include "oracles.hpp"

using namespace mcaimem;

namespace {
const EnergyParams kDefaults{};
}

TEST(Energy, TableEndpointsAreExact) {
  struct Row {
    Technology tech;
    double s0, s1, r0, r1, w0, w1;  // zero fraction 0 (all ones) and 1 (all zeros)
  };
  const Row rows[] = {
      {Technology::Sram, 19.29, 19.29, 0.08, 0.08, 0.16, 0.16},
      {Technology::Edram, 0.84, 5.03, 0.00016, 0.14, 0.00016, 0.0184},
      {Technology::Mcaimem, 3.15, 6.82, 0.01014, 0.1325, 0.02014, 0.0361},
  };
  for (const auto& r : rows) {
    EXPECT_EQ(static_power_mw(kDefaults, r.tech, 0.0, 1.0), r.s0);
    EXPECT_EQ(static_power_mw(kDefaults, r.tech, 1.0, 1.0), r.s1);
    EXPECT_EQ(access_energy_pj(kDefaults, r.tech, AccessKind::Read, 0.0), r.r0);
    EXPECT_EQ(access_energy_pj(kDefaults, r.tech, AccessKind::Read, 1.0), r.r1);
    EXPECT_EQ(access_energy_pj(kDefaults, r.tech, AccessKind::Write, 0.0), r.w0);
    EXPECT_EQ(access_energy_pj(kDefaults, r.tech, AccessKind::Write, 1.0), r.w1);
  }
}

TEST(Energy, InterpolationAndScaling) {
  EXPECT_NEAR(static_power_mw(kDefaults, Technology::Mcaimem, 0.5, 2.0), (3.15 + 6.82), 1e-12);
  EXPECT_DOUBLE_EQ(static_power_mw(kDefaults, Technology::Sram, 0.37, 1.0), 19.29);
  EXPECT_NEAR(access_energy_pj(kDefaults, Technology::Edram, AccessKind::Read, 0.25), 0.00016 + 0.25 * (0.14 - 0.00016),
              1e-15);
  EXPECT_EQ(static_power_mw(kDefaults, Technology::Rram, 0.5, 8.0), 0.0);
}

TEST(Energy, DomainErrors) {
  EXPECT_THROW(static_power_mw(kDefaults, Technology::Sram, 1.5, 1.0), DomainError);
  EXPECT_THROW(access_energy_pj(kDefaults, Technology::Mcaimem, AccessKind::Read, -0.1), DomainError);
  EXPECT_THROW(access_energy_pj(kDefaults, Technology::Rram, AccessKind::Read, 0.5), DomainError);
  EXPECT_THROW(technology_from_string("flash"), DomainError);
  EXPECT_THROW(energy_params_from_json(R"({"mcaimem": {"static_min_mw_per_mb": 9.0}})"), DomainError);
}

TEST(Energy, ParamsJsonOverlay) {
  const EnergyParams p = energy_params_from_json(R"({"rram": {"read_pj": 1.5, "write_pj": 12}})");
  EXPECT_EQ(*p.rram_read_pj, 1.5);
  EXPECT_EQ(access_energy_pj(p, Technology::Rram, AccessKind::Write, 0.3), 12.0);
  EXPECT_EQ(p.mcaimem.static_min_mw_per_mb, 3.15);
  const EnergyParams back = energy_params_from_json(energy_params_to_json(p));
  EXPECT_EQ(back.mcaimem.read_max_pj, p.mcaimem.read_max_pj);
  EXPECT_EQ(*back.rram_write_pj, 12.0);
}

TEST(Energy, RefreshZeroDuration) {
  const RefreshCost c = refresh_energy(ArrayConfig{}, default_calibration(), 0, 0.0);
  EXPECT_EQ(c.count, 0u);
  EXPECT_EQ(c.energy_j, 0.0);
}

TEST(Energy, RefreshOneMillisecond) {
  const RefreshCost c = refresh_energy(ArrayConfig{}, default_calibration(), 1'000'000, 0.0);
  const std::uint64_t expected = oracle::enumerate_refresh_events(12570.0L, 256, 1'000'000) * 64;
  EXPECT_EQ(c.count, expected);
  EXPECT_NEAR(c.energy_j, static_cast<double>(expected) * 64 * 0.01014e-12, 1e-18);
  EXPECT_NEAR(c.energy_j, 0.85e-6, 0.01e-6);
}

TEST(Energy, RefreshDecreasesWithVref) {
  double prev = 1e9;
  for (double v : {0.5, 0.6, 0.7, 0.8}) {
    ArrayConfig c;
    c.v_ref = v;
    const double e = refresh_energy(c, default_calibration(), 1'000'000, 0.2).energy_j;
    EXPECT_LT(e, prev) << v;
    prev = e;
  }
}

TEST(Energy, RefreshDisabledOrSram) {
  ArrayConfig off;
  off.refresh_enabled = false;
  EXPECT_EQ(refresh_energy(off, default_calibration(), 1'000'000, 0.0).count, 0u);
  EXPECT_EQ(refresh_energy(ArrayConfig{}, default_calibration(), 1'000'000, 0.0, {}, Technology::Sram).count, 0u);
}

TEST(Energy, OpsPerWattGain) {
  EXPECT_NEAR(ops_per_watt_gain(0.425, 1.0 / 3.4), 0.432, 0.005);
  EXPECT_NEAR(ops_per_watt_gain(0.37, 1.0 / 3.4), 0.354, 0.005);
  EXPECT_DOUBLE_EQ(ops_per_watt_gain(0.3, 1.0), 0.0);
  EXPECT_THROW(ops_per_watt_gain(0.0, 0.5), DomainError);
  EXPECT_THROW(ops_per_watt_gain(0.5, 0.0), DomainError);
}

TEST(Energy, AreaRatios) {
  const double sram = area_units(kDefaults, Technology::Sram, 1 << 20);
  EXPECT_NEAR(area_units(kDefaults, Technology::Mcaimem, 1 << 20) / sram, 0.52, 1e-12);
  EXPECT_NEAR(area_units(kDefaults, Technology::Edram, 1 << 20) / sram, 0.48, 1e-12);
  EXPECT_THROW(area_units(kDefaults, Technology::Rram, 1 << 20), DomainError);
}

TEST(Energy, EmptyTraceIsZero) {
  EnergyContext ctx;
  for (Technology t : {Technology::Sram, Technology::Edram, Technology::Mcaimem}) {
    const EnergyReport r = total_energy(TraceStats{}, t, ctx);
    EXPECT_EQ(r.total_j, 0.0);
    EXPECT_EQ(r.refresh_count, 0u);
  }
}

TEST(Energy, TotalIsSumOfParts) {
  EnergyContext ctx;
  TraceStats s;
  s.cycles = 123456;
  s.ifmap_reads_bytes = 1000;
  s.filter_reads_bytes = 2000;
  s.ofmap_writes_bytes = 300;
  const EnergyReport r = total_energy(s, Technology::Mcaimem, ctx);
  EXPECT_DOUBLE_EQ(r.total_j, r.static_j + r.read_j + r.write_j + r.refresh_j);
  EXPECT_NEAR(r.duration_s, 123456 / 1e8, 1e-15);
  EXPECT_GT(r.refresh_count, 0u);
}

TEST(Energy, StaticOnlyLimitWithAllOnes) {
  // Long idle trace, all stored bits one, no refresh: only static power is left.
  EnergyContext ctx;
  ctx.reference_array.refresh_enabled = false;
  TraceStats s;
  s.cycles = 100'000'000;
  s.operands.ifmap = s.operands.filter = s.operands.ofmap = BitStats{0.0, 0.0};
  const double ratio = total_energy(s, Technology::Sram, ctx).total_j / total_energy(s, Technology::Mcaimem, ctx).total_j;
  EXPECT_NEAR(ratio, 19.29 / 3.15, 1e-9);
}

TEST(Energy, RefreshScalesWithCapacity) {
  EnergyContext one, eight;
  eight.capacity_mb = 8.0;
  TraceStats s;
  s.cycles = 1'000'000;
  const double e1 = total_energy(s, Technology::Mcaimem, one).refresh_j;
  const double e8 = total_energy(s, Technology::Mcaimem, eight).refresh_j;
  EXPECT_NEAR(e8 / e1, 8.0, 1e-12);
}

TEST(Energy, ReportAccumulates) {
  EnergyReport a, b;
  a.static_j = 1.0;
  a.total_j = 1.0;
  a.duration_s = 1.0;
  a.zero_fraction = 0.2;
  b.read_j = 2.0;
  b.total_j = 2.0;
  b.duration_s = 3.0;
  b.zero_fraction = 0.6;
  a += b;
  EXPECT_DOUBLE_EQ(a.total_j, 3.0);
  EXPECT_DOUBLE_EQ(a.duration_s, 4.0);
  EXPECT_DOUBLE_EQ(a.zero_fraction, 0.5);
}
