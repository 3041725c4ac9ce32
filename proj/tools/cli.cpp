#include "mcaimem/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fmt/format.h>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "json.hpp"
#include "mcaimem/classifier.hpp"
#include "mcaimem/codec.hpp"
#include "mcaimem/dataflow.hpp"
#include "mcaimem/energy.hpp"
#include "mcaimem/error.hpp"
#include "mcaimem/fault.hpp"
#include "mcaimem/io.hpp"
#include "mcaimem/mixed_array.hpp"
#include "mcaimem/retention.hpp"
#include "mcaimem/tensor_io.hpp"

namespace mcaimem::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Globals {
  std::uint64_t seed = 1;
  std::string out = "out";
  std::string format = "csv";
  std::string config;
};

struct Context {
  const Globals& g;
  std::ostream& out;
  std::ostream& err;

  [[nodiscard]] bool json_format() const { return g.format == "json"; }

  void emit(const std::string& name, std::string_view contents) const {
    write_file_atomic(fs::path(g.out) / name, contents);
  }
};

RetentionCalibration load_calibration(const std::string& path) {
  if (path.empty()) return default_calibration();
  return calibration_from_json(read_text_file(path));
}

std::string hex_byte(std::uint8_t b) { return fmt::format("{:02x}", b); }

// ---------------------------------------------------------------- calibrate

struct CalibrateOptions {
  std::string anchors;
};

void cmd_calibrate(const CalibrateOptions& o, const Context& ctx) {
  double v_dd = 1.0;
  const auto anchors = o.anchors.empty() ? default_anchors() : anchors_from_json(read_text_file(o.anchors), &v_dd);
  const RetentionCalibration cal = calibrate(anchors, v_dd);
  ctx.emit("calibration.json", calibration_to_json(cal));
  ctx.out << fmt::format("sigma={:.6f} beta={:.6f} A={:.6f}us\n", cal.sigma, cal.beta, cal.scale_us);
  for (double v : {0.5, 0.8})
    ctx.out << fmt::format("refresh_interval(v_ref={:.2f}V, 1%)={:.4f}us\n", v, refresh_interval_us(cal, v));
}

// ------------------------------------------------------------------- curves

struct CurvesOptions {
  std::vector<double> vrefs{0.5, 0.6, 0.7, 0.8};
  std::string tmax = "20us";
  std::size_t points = 201;
  std::string calibration;
};

void cmd_curves(const CurvesOptions& o, const Context& ctx) {
  const RetentionCalibration cal = load_calibration(o.calibration);
  const double tmax_us = static_cast<double>(parse_duration_ns(o.tmax)) / 1000.0;
  std::string csv = "v_ref,t_us,p_flip\n";
  std::string summary = "v_ref,t_1pct_us,extrapolated\n";
  json j = json::array();
  for (double v : o.vrefs) {
    const FlipCurve curve = generate_curve(cal, v, tmax_us, o.points);
    if (curve.extrapolated)
      ctx.err << fmt::format("warning: v_ref {:.3f} V is outside the characterized 0.5-0.8 V range\n", v);
    json pts = json::array();
    for (const auto& s : curve.samples) {
      csv += fmt::format("{:.3f},{:.6f},{:.9e}\n", v, s.t_us, s.p);
      pts.push_back({s.t_us, s.p});
    }
    const double t1 = refresh_interval_us(cal, v);
    summary += fmt::format("{:.3f},{:.6f},{}\n", v, t1, curve.extrapolated ? 1 : 0);
    j.push_back({{"v_ref", v}, {"t_1pct_us", t1}, {"extrapolated", curve.extrapolated}, {"samples", pts}});
  }
  if (ctx.json_format()) {
    ctx.emit("curves.json", j.dump(2) + "\n");
  } else {
    ctx.emit("curves.csv", csv);
    ctx.emit("curve_summary.csv", summary);
  }
  ctx.out << summary;
}

// ------------------------------------------------------------------- memsim

struct MemsimOptions {
  std::string trace;
  std::string calibration;
  std::string encoder = "on";
};

struct TraceOp {
  Nanoseconds t = 0;
  char op = 'R';
  Address addr;
  std::optional<std::uint8_t> value;
};

std::vector<TraceOp> parse_trace(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::vector<TraceOp> ops;
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& why) {
    throw ParseError(fmt::format("trace {} line {}: {}", path, line_no, why));
  };
  auto parse_u64 = [&](const std::string& f, const char* what) {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
    if (ec != std::errc{} || p != f.data() + f.size()) fail(std::string("bad ") + what + " '" + f + "'");
    return v;
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.rfind("t_ns", 0) == 0 || line[0] == '#') continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) f.push_back(field);
    if (f.size() == 5) f.emplace_back();
    if (f.size() != 6) fail("expected t_ns,op,bank,row,col,value_hex");
    TraceOp op;
    op.t = static_cast<Nanoseconds>(parse_u64(f[0], "t_ns"));
    if (f[1].size() != 1 || std::string("RWF").find(f[1][0]) == std::string::npos) fail("op must be R, W or F");
    op.op = f[1][0];
    op.addr = {static_cast<std::uint32_t>(parse_u64(f[2], "bank")), static_cast<std::uint32_t>(parse_u64(f[3], "row")),
               static_cast<std::uint32_t>(f[4].empty() ? 0 : parse_u64(f[4], "col"))};
    if (op.op == 'W') {
      std::string hex = f[5];
      if (hex.rfind("0x", 0) == 0 || hex.rfind("0X", 0) == 0) hex = hex.substr(2);
      unsigned v = 0;
      auto [p, ec] = std::from_chars(hex.data(), hex.data() + hex.size(), v, 16);
      if (hex.empty() || ec != std::errc{} || p != hex.data() + hex.size() || v > 0xFF) fail("bad value_hex");
      op.value = static_cast<std::uint8_t>(v);
    }
    ops.push_back(op);
  }
  return ops;
}

void cmd_memsim(const MemsimOptions& o, const Context& ctx) {
  const ArrayConfig config = ctx.g.config.empty() ? ArrayConfig{} : array_config_from_json(read_text_file(ctx.g.config));
  const RetentionCalibration cal = load_calibration(o.calibration);
  const bool encoder = o.encoder == "on";
  const auto ops = parse_trace(o.trace);

  MixedArray array(config, cal, ctx.g.seed);
  std::string events = "t_ns,op,bank,row,col,value_hex,result_hex\n";
  std::uint64_t reads = 0, writes = 0, explicit_refreshes = 0, written_zero_bits = 0;
  Nanoseconds end = 0;
  for (const auto& op : ops) {
    end = op.t;
    switch (op.op) {
      case 'W': {
        const auto raw = static_cast<std::int8_t>(*op.value);
        const EncodedByte stored = encoder ? encode(raw) : EncodedByte::from_byte(*op.value);
        array.write(op.addr, stored, op.t);
        written_zero_bits += kPayloadBits - std::popcount(static_cast<unsigned>(stored.payload));
        ++writes;
        events += fmt::format("{},W,{},{},{},{},\n", op.t, op.addr.bank, op.addr.row, op.addr.col, hex_byte(*op.value));
        break;
      }
      case 'R': {
        const EncodedByte sensed = array.read(op.addr, op.t);
        const auto value = encoder ? static_cast<std::uint8_t>(decode(sensed)) : sensed.to_byte();
        ++reads;
        events += fmt::format("{},R,{},{},{},,{}\n", op.t, op.addr.bank, op.addr.row, op.addr.col, hex_byte(value));
        break;
      }
      default:
        array.refresh_row(op.addr.bank, op.addr.row, op.t);
        ++explicit_refreshes;
        events += fmt::format("{},F,{},{},,,\n", op.t, op.addr.bank, op.addr.row);
        break;
    }
  }

  EnergyParams params;
  EnergyReport r;
  r.tech = Technology::Mcaimem;
  r.duration_s = static_cast<double>(end) * 1e-9;
  r.zero_fraction = writes ? static_cast<double>(written_zero_bits) / (static_cast<double>(writes) * kPayloadBits) : 0.0;
  r.refresh_count = array.refresh_count() + explicit_refreshes;
  r.static_j = static_power_mw(params, Technology::Mcaimem, r.zero_fraction, config.capacity_mb()) * 1e-3 * r.duration_s;
  const double read_pj = access_energy_pj(params, Technology::Mcaimem, AccessKind::Read, r.zero_fraction);
  r.read_j = static_cast<double>(reads) * read_pj * 1e-12;
  r.write_j = static_cast<double>(writes) *
              access_energy_pj(params, Technology::Mcaimem, AccessKind::Write, r.zero_fraction) * 1e-12;
  r.refresh_j = static_cast<double>(r.refresh_count) * config.bytes_per_row * read_pj * 1e-12;
  r.total_j = r.static_j + r.read_j + r.write_j + r.refresh_j;

  const auto snapshot = array.dump_state();
  ctx.emit("final_state.snap", std::string_view(reinterpret_cast<const char*>(snapshot.data()), snapshot.size()));
  ctx.emit("events.csv", events);
  if (ctx.json_format())
    ctx.emit("energy.json", energy_report_to_json(r));
  else
    ctx.emit("energy.csv", energy_report_csv_header() + energy_report_csv_row("trace", r));
  ctx.out << fmt::format("ops={} reads={} writes={} refreshes={} total_J={:.6e}\n", ops.size(), reads, writes,
                         r.refresh_count, r.total_j);
}

// ------------------------------------------------------------------- energy

struct EnergyOptions {
  std::string topology;
  std::string preset = "eyeriss";
  std::vector<std::string> techs;
  double vref = 0.8;
  std::string params;
  std::string tensor;
  std::string calibration;
};

OperandStats operand_stats_from(std::span<const std::int8_t> t) {
  const BitStats b{raw_zero_fraction(t), encoded_payload_zero_fraction(t)};
  return {b, b, b};
}

EnergyReport network_energy(const NetworkStats& net, Technology tech, const EnergyContext& ectx,
                            std::vector<EnergyReport>* per_layer = nullptr) {
  EnergyReport total;
  total.tech = tech;
  for (const auto& layer : net.layers) {
    const EnergyReport r = total_energy(layer.stats, tech, ectx);
    if (per_layer) per_layer->push_back(r);
    total += r;
  }
  return total;
}

void cmd_energy(const EnergyOptions& o, const Context& ctx) {
  const std::string params_path = o.params.empty() ? ctx.g.config : o.params;
  EnergyContext ectx;
  ectx.params = params_path.empty() ? EnergyParams{} : energy_params_from_json(read_text_file(params_path));
  ectx.calibration = load_calibration(o.calibration);
  ectx.reference_array.v_ref = o.vref;
  if (is_extrapolated(o.vref))
    ctx.err << fmt::format("warning: v_ref {:.3f} V is outside the characterized 0.5-0.8 V range\n", o.vref);

  const AccelConfig accel = AccelConfig::from_preset(o.preset);
  ectx.capacity_mb = accel.buffer_capacity_mb();
  ectx.clock_hz = accel.clock_hz;

  std::vector<std::int8_t> operand_tensor;
  if (!o.tensor.empty())
    operand_tensor = read_tensor(o.tensor).data;
  else
    operand_tensor = make_zero_heavy_tensor(1u << 16, 0.5, 4.0, ctx.g.seed);
  if (operand_tensor.empty()) throw DomainError("operand tensor is empty");
  const OperandStats operands = operand_stats_from(operand_tensor);

  std::vector<Technology> techs;
  if (o.techs.empty()) {
    techs = {Technology::Sram, Technology::Edram, Technology::Mcaimem};
    if (ectx.params.rram_read_pj && ectx.params.rram_write_pj) techs.push_back(Technology::Rram);
  } else {
    for (const auto& t : o.techs) techs.push_back(technology_from_string(t));
  }

  const auto layers = parse_topology_file(o.topology);
  const NetworkStats net = run_network(layers, accel, operands);

  std::string stats_csv = "layer,cycles,ifmap_reads_B,filter_reads_B,ofmap_writes_B\n";
  for (const auto& l : net.layers)
    stats_csv += fmt::format("{},{},{},{},{}\n", l.name, l.stats.cycles, l.stats.ifmap_reads_bytes,
                             l.stats.filter_reads_bytes, l.stats.ofmap_writes_bytes);
  stats_csv += fmt::format("TOTAL,{},{},{},{}\n", net.total.cycles, net.total.ifmap_reads_bytes,
                           net.total.filter_reads_bytes, net.total.ofmap_writes_bytes);

  std::string layers_csv = energy_report_csv_header();
  std::map<Technology, EnergyReport> totals;
  json j_layers = json::array();
  for (Technology tech : techs) {
    std::vector<EnergyReport> per_layer;
    totals[tech] = network_energy(net, tech, ectx, &per_layer);
    for (std::size_t i = 0; i < per_layer.size(); ++i) {
      layers_csv += energy_report_csv_row(net.layers[i].name, per_layer[i]);
      j_layers.push_back(json::parse(energy_report_to_json(per_layer[i])));
      j_layers.back()["layer"] = net.layers[i].name;
    }
    layers_csv += energy_report_csv_row("TOTAL", totals[tech]);
  }

  const EnergyParams& p = ectx.params;
  const std::uint64_t cap = accel.buffer_capacity_bytes;
  std::string comparison = "tech,total_J,static_J,read_J,write_J,refresh_J,sram_over_tech,area_over_sram\n";
  json j_cmp = json::array();
  for (Technology tech : techs) {
    const auto& r = totals[tech];
    const double ratio = totals.count(Technology::Sram) && r.total_j > 0.0
                             ? totals[Technology::Sram].total_j / r.total_j
                             : std::nan("");
    const std::string area = tech == Technology::Rram
                                 ? "n/a"
                                 : fmt::format("{:.6f}", area_units(p, tech, cap) / area_units(p, Technology::Sram, cap));
    comparison += fmt::format("{},{:.9e},{:.9e},{:.9e},{:.9e},{:.9e},{:.6f},{}\n", to_string(tech), r.total_j, r.static_j,
                              r.read_j, r.write_j, r.refresh_j, ratio, area);
    j_cmp.push_back({{"tech", to_string(tech)}, {"total_J", r.total_j}, {"sram_over_tech", ratio}, {"area_over_sram", area}});
  }

  std::set<double> sweep_vrefs{0.5, 0.6, 0.7, 0.8, o.vref};
  std::string sweep_csv = "v_ref,refresh_interval_us,refresh_J,total_J\n";
  json j_sweep = json::array();
  for (double v : sweep_vrefs) {
    EnergyContext sweep_ctx = ectx;
    sweep_ctx.reference_array.v_ref = v;
    const EnergyReport r = network_energy(net, Technology::Mcaimem, sweep_ctx);
    const double interval = refresh_interval_us(ectx.calibration, v, ectx.reference_array.refresh_target_p);
    sweep_csv += fmt::format("{:.3f},{:.6f},{:.9e},{:.9e}\n", v, interval, r.refresh_j, r.total_j);
    j_sweep.push_back({{"v_ref", v}, {"refresh_interval_us", interval}, {"refresh_J", r.refresh_j}, {"total_J", r.total_j}});
  }

  std::string opw = "basis,buffer_power_share,buffer_energy_ratio,ops_per_watt_gain\n";
  json j_opw = json::array();
  auto opw_row = [&](const std::string& basis, double share, double ratio) {
    const double gain = ops_per_watt_gain(share, ratio);
    opw += fmt::format("{},{:.4f},{:.6f},{:.6f}\n", basis, share, ratio, gain);
    j_opw.push_back({{"basis", basis}, {"buffer_power_share", share}, {"buffer_energy_ratio", ratio}, {"gain", gain}});
  };
  const AccelConfig presets[] = {AccelConfig::eyeriss(), AccelConfig::tpuv1()};
  if (totals.count(Technology::Sram) && totals.count(Technology::Mcaimem)) {
    const double measured = totals[Technology::Mcaimem].total_j / totals[Technology::Sram].total_j;
    for (const auto& a : presets) opw_row(a.preset + "_share_measured_ratio", a.buffer_power_share, measured);
  }
  for (const auto& a : presets) opw_row(a.preset + "_share_reference_3.4x", a.buffer_power_share, 1.0 / 3.4);

  if (ctx.json_format()) {
    const json j = {{"preset", accel.preset},
                    {"v_ref", o.vref},
                    {"operand_encoded_zero_fraction", operands.ifmap.encoded_zero_fraction},
                    {"operand_raw_zero_fraction", operands.ifmap.raw_zero_fraction},
                    {"layers", j_layers},
                    {"comparison", j_cmp},
                    {"refresh_sweep", j_sweep},
                    {"ops_per_watt", j_opw}};
    ctx.emit("energy.json", j.dump(2) + "\n");
  } else {
    ctx.emit("stats.csv", stats_csv);
    ctx.emit("layers.csv", layers_csv);
    ctx.emit("comparison.csv", comparison);
    ctx.emit("refresh_sweep.csv", sweep_csv);
    ctx.emit("ops_per_watt.csv", opw);
  }
  ctx.out << comparison << opw;
}

// ------------------------------------------------------------------- inject

struct InjectOptions {
  std::string tensor;
  std::vector<double> rates{0.01, 0.05, 0.10, 0.25};
  std::string modes = "both";
};

std::string histogram_csv(std::span<const std::int8_t> t) {
  const auto encoded = encode_tensor(t);
  const auto hist = ones_histogram(encoded);
  std::string csv = "bit_position,ones_fraction\n";
  for (int bit = 7; bit >= 0; --bit) csv += fmt::format("{},{:.6f}\n", bit, hist[bit]);
  return csv;
}

void cmd_inject(const InjectOptions& o, const Context& ctx) {
  const Int8Tensor t = read_tensor(o.tensor);
  bool modes[2] = {};
  std::size_t n_modes = 0;
  if (o.modes != "raw") modes[n_modes++] = true;
  if (o.modes != "encoder") modes[n_modes++] = false;
  const auto rows = sweep(t.data, o.rates, std::span<const bool>(modes, n_modes), ctx.g.seed);

  if (ctx.json_format()) {
    json j = json::array();
    for (const auto& r : rows)
      j.push_back({{"rate", r.rate},
                   {"mode", r.encoder_enabled ? "encoder" : "raw"},
                   {"mre", r.report.mean_relative_error},
                   {"mae", r.report.mean_absolute_error},
                   {"max_abs", r.report.max_absolute_error},
                   {"flips", r.report.flip_count}});
    ctx.emit("sweep.json", j.dump(2) + "\n");
  } else {
    ctx.emit("sweep.csv", sweep_csv(rows));
    ctx.emit("histogram.csv", histogram_csv(t.data));
  }
  ctx.out << sweep_csv(rows);
}

// ---------------------------------------------------------------- histogram

struct HistogramOptions {
  std::string tensor;
};

void cmd_histogram(const HistogramOptions& o, const Context& ctx) {
  const Int8Tensor t = read_tensor(o.tensor);
  const std::string csv = histogram_csv(t.data);
  ctx.emit("histogram.csv", csv);
  ctx.out << csv;
}

// ----------------------------------------------------------------- classify

struct ClassifyOptions {
  std::string model;
  std::string inputs;
  std::string labels;
  double rate = 0.01;
  std::string encoder = "on";
};

void cmd_classify(const ClassifyOptions& o, const Context& ctx) {
  const QuantModel model = QuantModel::load(o.model);
  const Dataset data = Dataset::load(o.inputs, o.labels);
  InjectionConfig cfg;
  cfg.rate = o.rate;
  cfg.encoder_enabled = o.encoder == "on";
  cfg.seed = ctx.g.seed;
  const ClassifierResult r = eval_classifier(model, data, cfg);
  const std::string csv =
      "rate,mode,accuracy_clean,accuracy_injected,drop_pp\n" +
      fmt::format("{:.6f},{},{:.6f},{:.6f},{:.4f}\n", o.rate, cfg.encoder_enabled ? "encoder" : "raw", r.accuracy_clean,
                  r.accuracy_injected, 100.0 * r.drop());
  ctx.emit("classify.csv", csv);
  ctx.out << csv;
}

// -------------------------------------------------------------------- synth

struct SynthOptions {
  std::size_t n = 65536;
  double zero_share = 0.5;
  double scale = 4.0;
  std::string name = "tensor.bin";
};

void cmd_synth(const SynthOptions& o, const Context& ctx) {
  Int8Tensor t;
  t.shape = {o.n};
  t.data = make_zero_heavy_tensor(o.n, o.zero_share, o.scale, ctx.g.seed);
  write_tensor(fs::path(ctx.g.out) / o.name, t);
  ctx.out << fmt::format("wrote {} elements, encoded payload zero fraction {:.4f}\n", o.n,
                         encoded_payload_zero_fraction(t.data));
}

// ------------------------------------------------------------------ helpers

std::vector<std::string> strip_out_flag(const std::vector<std::string>& args) {
  std::vector<std::string> kept;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--out") {
      ++i;
      continue;
    }
    if (args[i].rfind("--out=", 0) == 0) continue;
    kept.push_back(args[i]);
  }
  return kept;
}

void write_manifest(const std::string& command, const std::vector<std::string>& args, const Globals& g) {
  const json j = {{"tool", "mcaimem"},   {"version", kToolVersion}, {"command", command},
                  {"args", strip_out_flag(args)}, {"seed", g.seed},          {"format", g.format}};
  write_file_atomic(fs::path(g.out) / "manifest.json", j.dump(2) + "\n");
}

}  // namespace

std::int64_t parse_duration_ns(std::string_view text) {
  static constexpr std::pair<std::string_view, double> kUnits[] = {
      {"ns", 1.0}, {"us", 1e3}, {"ms", 1e6}, {"s", 1e9}};
  double scale = 1.0;
  std::string_view number = text;
  for (const auto& [suffix, mult] : kUnits) {
    if (text.size() > suffix.size() && text.substr(text.size() - suffix.size()) == suffix) {
      scale = mult;
      number = text.substr(0, text.size() - suffix.size());
      break;
    }
  }
  double v = 0.0;
  auto [p, ec] = std::from_chars(number.data(), number.data() + number.size(), v);
  if (number.empty() || ec != std::errc{} || p != number.data() + number.size() || !(v >= 0.0))
    throw DomainError("bad duration '" + std::string(text) + "' (expected e.g. 250ns, 20us, 1ms, 2s)");
  return std::llround(v * scale);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Globals g;
  CLI::App app{"Mixed SRAM/eDRAM AI buffer simulator"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--seed", g.seed, "master random seed")->capture_default_str();
  app.add_option("--out", g.out, "output directory")->capture_default_str();
  app.add_option("--format", g.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  app.add_option("--config", g.config, "command configuration file (JSON)");

  CalibrateOptions calibrate_o;
  auto* calibrate_cmd = app.add_subcommand("calibrate", "fit the retention model to anchor points");
  calibrate_cmd->add_option("--anchors", calibrate_o.anchors, "anchor JSON (default: built-in anchors)");

  CurvesOptions curves_o;
  auto* curves_cmd = app.add_subcommand("curves", "export flip-probability curves");
  curves_cmd->add_option("--vref", curves_o.vrefs, "comma-separated V_REF list (V)")->delimiter(',');
  curves_cmd->add_option("--tmax", curves_o.tmax, "curve span, e.g. 20us")->capture_default_str();
  curves_cmd->add_option("--points", curves_o.points, "grid points per curve")->capture_default_str();
  curves_cmd->add_option("--calibration", curves_o.calibration, "calibration JSON");

  MemsimOptions memsim_o;
  auto* memsim_cmd = app.add_subcommand("memsim", "replay an access trace on the mixed-cell array");
  memsim_cmd->add_option("--trace", memsim_o.trace, "trace CSV t_ns,op,bank,row,col,value_hex")->required();
  memsim_cmd->add_option("--calibration", memsim_o.calibration, "calibration JSON");
  memsim_cmd->add_option("--encoder", memsim_o.encoder, "on|off")->check(CLI::IsMember({"on", "off"}));

  EnergyOptions energy_o;
  auto* energy_cmd = app.add_subcommand("energy", "buffer energy of a network on an accelerator preset");
  energy_cmd->add_option("--topology", energy_o.topology, "topology CSV")->required();
  energy_cmd->add_option("--preset", energy_o.preset, "eyeriss|tpuv1")->check(CLI::IsMember({"eyeriss", "tpuv1"}));
  energy_cmd->add_option("--tech", energy_o.techs, "sram,edram,mcaimem,rram")->delimiter(',');
  energy_cmd->add_option("--vref", energy_o.vref, "MCAIMem V_REF (V)")->capture_default_str();
  energy_cmd->add_option("--params", energy_o.params, "energy parameter JSON (overrides --config)");
  energy_cmd->add_option("--tensor", energy_o.tensor, "INT8 tensor supplying operand bit statistics");
  energy_cmd->add_option("--calibration", energy_o.calibration, "calibration JSON");

  InjectOptions inject_o;
  auto* inject_cmd = app.add_subcommand("inject", "fault-injection sweep over rates and encoder modes");
  inject_cmd->add_option("--tensor", inject_o.tensor, "INT8 tensor file")->required();
  inject_cmd->add_option("--rates", inject_o.rates, "comma-separated flip rates")->delimiter(',');
  inject_cmd->add_option("--modes", inject_o.modes, "both|encoder|raw")->check(CLI::IsMember({"both", "encoder", "raw"}));

  HistogramOptions histogram_o;
  auto* histogram_cmd = app.add_subcommand("histogram", "per-bit ones fraction of an encoded tensor");
  histogram_cmd->add_option("--tensor", histogram_o.tensor, "INT8 tensor file")->required();

  ClassifyOptions classify_o;
  auto* classify_cmd = app.add_subcommand("classify", "INT8 classifier accuracy under injection");
  classify_cmd->add_option("--model", classify_o.model, "model manifest JSON")->required();
  classify_cmd->add_option("--inputs", classify_o.inputs, "INT8 input tensor")->required();
  classify_cmd->add_option("--labels", classify_o.labels, "labels CSV")->required();
  classify_cmd->add_option("--rate", classify_o.rate, "flip rate")->capture_default_str();
  classify_cmd->add_option("--encoder", classify_o.encoder, "on|off")->check(CLI::IsMember({"on", "off"}));

  SynthOptions synth_o;
  auto* synth_cmd = app.add_subcommand("synth", "write a synthetic zero-heavy INT8 tensor");
  synth_cmd->add_option("--n", synth_o.n, "element count")->capture_default_str();
  synth_cmd->add_option("--zero-share", synth_o.zero_share, "fraction of exact zeros")->capture_default_str();
  synth_cmd->add_option("--scale", synth_o.scale, "Laplace scale of the non-zero part")->capture_default_str();
  synth_cmd->add_option("--name", synth_o.name, "output file name")->capture_default_str();

  std::string manifest_path;
  auto* replay_cmd = app.add_subcommand("replay", "re-run a manifest into --out");
  replay_cmd->add_option("--manifest", manifest_path, "manifest.json of an earlier run")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (replay_cmd->parsed()) {
      const json m = json::parse(read_text_file(manifest_path));
      auto replay_args = m.at("args").get<std::vector<std::string>>();
      replay_args.push_back("--out");
      replay_args.push_back(g.out);
      return run(replay_args, out, err);
    }

    const Context ctx{g, out, err};
    std::string command;
    if (calibrate_cmd->parsed()) {
      command = "calibrate";
      cmd_calibrate(calibrate_o, ctx);
    } else if (curves_cmd->parsed()) {
      command = "curves";
      cmd_curves(curves_o, ctx);
    } else if (memsim_cmd->parsed()) {
      command = "memsim";
      cmd_memsim(memsim_o, ctx);
    } else if (energy_cmd->parsed()) {
      command = "energy";
      cmd_energy(energy_o, ctx);
    } else if (inject_cmd->parsed()) {
      command = "inject";
      cmd_inject(inject_o, ctx);
    } else if (histogram_cmd->parsed()) {
      command = "histogram";
      cmd_histogram(histogram_o, ctx);
    } else if (classify_cmd->parsed()) {
      command = "classify";
      cmd_classify(classify_o, ctx);
    } else if (synth_cmd->parsed()) {
      command = "synth";
      cmd_synth(synth_o, ctx);
    }
    write_manifest(command, args, g);
    return kExitOk;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const CalibrationError& e) {
    err << "calibration error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kExitIo;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const nlohmann::json::exception& e) {
    err << "parse error: " << e.what() << "\n";
    return kExitIo;
  }
}

}  // namespace mcaimem::cli
