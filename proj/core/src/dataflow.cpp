#include "mcaimem/dataflow.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "mcaimem/error.hpp"

namespace mcaimem {

namespace {

std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) { return (a + b - 1) / b; }

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::uint32_t parse_dim(const std::string& field, std::size_t line_no, const char* what) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size())
    throw ParseError("topology line " + std::to_string(line_no) + ": " + what + " '" + field + "' is not an integer");
  if (v < 1 || v > 0x7fffffff)
    throw ParseError("topology line " + std::to_string(line_no) + ": " + what + " must be >= 1, got " + field);
  return static_cast<std::uint32_t>(v);
}

}  // namespace

void LayerSpec::validate() const {
  if (ifmap_h < 1 || ifmap_w < 1 || filter_h < 1 || filter_w < 1 || channels < 1 || num_filters < 1 || stride < 1)
    throw DomainError("layer '" + name + "': all dimensions must be >= 1");
  if (filter_h > ifmap_h || filter_w > ifmap_w) throw DomainError("layer '" + name + "': filter larger than ifmap");
}

AccelConfig AccelConfig::eyeriss() {
  return AccelConfig{"eyeriss", 12, 14, 108 * 1024, 1e8, 0.425};
}

AccelConfig AccelConfig::tpuv1() {
  return AccelConfig{"tpuv1", 256, 256, 8ull * 1024 * 1024, 1e8, 0.37};
}

AccelConfig AccelConfig::from_preset(const std::string& name) {
  if (name == "eyeriss") return eyeriss();
  if (name == "tpuv1") return tpuv1();
  throw DomainError("unknown accelerator preset '" + name + "' (expected eyeriss or tpuv1)");
}

std::vector<LayerSpec> parse_topology(std::istream& in) {
  static constexpr const char* kColumns[] = {"ifmap_h",  "ifmap_w",     "filter_h", "filter_w",
                                             "channels", "num_filters", "stride"};
  std::vector<LayerSpec> layers;
  std::string line;
  std::size_t line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    if (!saw_header) {
      saw_header = true;
      continue;
    }
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(trim(f));
    while (!fields.empty() && fields.back().empty()) fields.pop_back();
    if (fields.size() != 8)
      throw ParseError("topology line " + std::to_string(line_no) + ": expected 8 fields, got " +
                       std::to_string(fields.size()));
    LayerSpec spec;
    spec.name = fields[0];
    std::uint32_t* dims[] = {&spec.ifmap_h,  &spec.ifmap_w,     &spec.filter_h, &spec.filter_w,
                             &spec.channels, &spec.num_filters, &spec.stride};
    for (int i = 0; i < 7; ++i) *dims[i] = parse_dim(fields[i + 1], line_no, kColumns[i]);
    try {
      spec.validate();
    } catch (const DomainError& e) {
      throw ParseError("topology line " + std::to_string(line_no) + ": " + e.what());
    }
    layers.push_back(std::move(spec));
  }
  if (!saw_header) throw ParseError("topology: missing header row");
  return layers;
}

std::vector<LayerSpec> parse_topology_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open topology " + path.string());
  return parse_topology(in);
}

TraceStats simulate_layer(const LayerSpec& spec, const AccelConfig& config) {
  spec.validate();
  if (config.array_rows == 0 || config.array_cols == 0) throw DomainError("systolic array dimensions must be >= 1");
  const std::uint64_t window = spec.window_size();
  const std::uint64_t windows = spec.window_count();
  const std::uint64_t filters = spec.num_filters;
  const std::uint64_t folds = ceil_div(windows, config.array_rows) * ceil_div(filters, config.array_cols);

  TraceStats s;
  s.cycles = folds * (window + config.array_rows + config.array_cols - 2);
  s.ifmap_reads_bytes = windows * window;
  s.filter_reads_bytes = filters * window;
  s.ofmap_writes_bytes = windows * filters;
  return s;
}

NetworkStats run_network(std::span<const LayerSpec> layers, const AccelConfig& config,
                         const OperandStats& operands) {
  NetworkStats net;
  net.total.operands = operands;
  for (const auto& layer : layers) {
    TraceStats s = simulate_layer(layer, config);
    s.operands = operands;
    net.total += s;
    net.layers.push_back({layer.name, s});
  }
  net.duration_s = static_cast<double>(net.total.cycles) / config.clock_hz;
  return net;
}

}  // namespace mcaimem
