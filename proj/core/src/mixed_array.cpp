#include "mcaimem/mixed_array.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <string>

#include "json.hpp"
#include "mcaimem/error.hpp"

namespace mcaimem {

namespace {

using nlohmann::json;

constexpr char kSnapshotMagic[8] = {'M', 'C', 'A', 'I', 'S', 'N', 'A', 'P'};
constexpr std::uint32_t kSnapshotVersion = 1;

int payload_zeros(std::uint8_t b) { return kPayloadBits - std::popcount(static_cast<unsigned>(b & kPayloadMask)); }

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> data) : data_(data) {}

  std::span<const std::uint8_t> take(std::size_t n) {
    if (n > data_.size() - pos_) throw ParseError("snapshot truncated");
    auto s = data_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  std::uint32_t u32() {
    auto s = take(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t{s[i]} << (8 * i);
    return v;
  }
  std::int64_t i64() {
    auto s = take(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t{s[i]} << (8 * i);
    return static_cast<std::int64_t>(v);
  }
  [[nodiscard]] bool done() const { return pos_ == data_.size(); }

 private:
  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

json config_to_json(const ArrayConfig& c) {
  return {{"banks", c.banks},
          {"rows_per_bank", c.rows_per_bank},
          {"bytes_per_row", c.bytes_per_row},
          {"v_ref", c.v_ref},
          {"refresh_enabled", c.refresh_enabled},
          {"refresh_target_p", c.refresh_target_p},
          {"clock_hz", c.clock_hz}};
}

ArrayConfig config_from_json(const json& j) {
  ArrayConfig c;
  c.banks = j.at("banks").get<std::uint32_t>();
  c.rows_per_bank = j.at("rows_per_bank").get<std::uint32_t>();
  c.bytes_per_row = j.at("bytes_per_row").get<std::uint32_t>();
  c.v_ref = j.at("v_ref").get<double>();
  c.refresh_enabled = j.at("refresh_enabled").get<bool>();
  c.refresh_target_p = j.at("refresh_target_p").get<double>();
  c.clock_hz = j.at("clock_hz").get<double>();
  return c;
}

}  // namespace

ArrayConfig array_config_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    ArrayConfig c;
    c.banks = j.value("banks", c.banks);
    c.rows_per_bank = j.value("rows_per_bank", c.rows_per_bank);
    c.bytes_per_row = j.value("bytes_per_row", c.bytes_per_row);
    c.v_ref = j.value("v_ref", c.v_ref);
    c.refresh_enabled = j.value("refresh_enabled", c.refresh_enabled);
    c.refresh_target_p = j.value("refresh_target_p", c.refresh_target_p);
    c.clock_hz = j.value("clock_hz", c.clock_hz);
    c.validate();
    return c;
  } catch (const json::exception& e) {
    throw ParseError(std::string("array config JSON: ") + e.what());
  }
}

std::string array_config_to_json(const ArrayConfig& config) { return config_to_json(config).dump(2) + "\n"; }

void ArrayConfig::validate() const {
  if (banks == 0 || rows_per_bank == 0 || bytes_per_row == 0) throw DomainError("array geometry must be non-zero");
  if (bytes_per_row > 9362) throw DomainError("bytes_per_row exceeds 9362");
  if (!(v_ref > 0.0)) throw DomainError("v_ref must be positive");
  if (!(refresh_target_p > 0.0 && refresh_target_p < 1.0)) throw DomainError("refresh_target_p must lie in (0, 1)");
  if (!(clock_hz > 0.0)) throw DomainError("clock_hz must be positive");
}

RefreshSchedule::RefreshSchedule(double period_ns, std::uint32_t rows_per_bank)
    : period_ns_(period_ns), rows_(rows_per_bank) {
  if (!(period_ns > 0.0) || !std::isfinite(period_ns)) throw DomainError("refresh period must be positive");
  if (rows_per_bank == 0) throw DomainError("refresh schedule needs at least one row");
}

bool RefreshSchedule::due(std::uint64_t k, Nanoseconds t) const {
  return static_cast<double>(k) * period_ns_ / rows_ <= static_cast<double>(t);
}

std::uint64_t RefreshSchedule::events_through(Nanoseconds t) const {
  if (t <= 0) return 0;
  auto k = static_cast<std::uint64_t>(std::floor(static_cast<double>(t) * rows_ / period_ns_));
  while (due(k + 1, t)) ++k;
  while (k > 0 && !due(k, t)) --k;
  return k;
}

Nanoseconds RefreshSchedule::event_time(std::uint64_t k) const {
  return static_cast<Nanoseconds>(std::ceil(static_cast<double>(k) * period_ns_ / rows_));
}

double refresh_period_ns(const ArrayConfig& config, const RetentionCalibration& cal) {
  return refresh_interval_us(cal, config.v_ref, config.refresh_target_p) * 1000.0;
}

MixedArray::MixedArray(ArrayConfig config, RetentionCalibration cal, std::uint64_t seed)
    : config_(config),
      cal_(std::move(cal)),
      seed_(seed),
      rng_(seed),
      schedule_((config.validate(), mcaimem::refresh_period_ns(config, cal_)), config.rows_per_bank) {
  const std::uint64_t cap = config_.capacity_bytes();
  const std::size_t rows = std::size_t{config_.banks} * config_.rows_per_bank;
  cells_.assign(cap, encode(0).to_byte());
  written_at_.assign(cap, 0);
  last_refresh_.assign(rows, 0);
  row_zeros_.assign(rows, static_cast<std::uint16_t>(payload_zeros(encode(0).to_byte()) * config_.bytes_per_row));
}

std::size_t MixedArray::row_index(std::uint32_t bank, std::uint32_t row) const {
  return std::size_t{bank} * config_.rows_per_bank + row;
}

std::size_t MixedArray::byte_index(Address a) const {
  return row_index(a.bank, a.row) * config_.bytes_per_row + a.col;
}

void MixedArray::check_address(Address a) const {
  if (a.bank >= config_.banks || a.row >= config_.rows_per_bank || a.col >= config_.bytes_per_row)
    throw DomainError("address (" + std::to_string(a.bank) + "," + std::to_string(a.row) + "," +
                      std::to_string(a.col) + ") out of range");
}

void MixedArray::check_time(Nanoseconds t) const {
  if (t < now_) throw DomainError("time regression: " + std::to_string(t) + " ns < " + std::to_string(now_) + " ns");
}

void MixedArray::set_byte(std::size_t idx, std::uint8_t value) {
  const std::size_t row = idx / config_.bytes_per_row;
  row_zeros_[row] = static_cast<std::uint16_t>(row_zeros_[row] - payload_zeros(cells_[idx]) + payload_zeros(value));
  cells_[idx] = value;
}

namespace {

// Zero cells passed over before the next flip when each flips independently
// with probability p: floor(ln u / ln(1 - p)) for u uniform on (0, 1).
std::uint64_t geometric_skip(double p, RngStream& rng) {
  if (p >= 1.0) return 0;
  const double k = std::floor(std::log(rng.uniform01()) / std::log1p(-p));
  return k >= 1e18 ? std::numeric_limits<std::uint64_t>::max() : static_cast<std::uint64_t>(k);
}

}  // namespace

// Every stored zero of age a flips with probability p(a): its crossing time
// F^-1(u) has elapsed iff u <= F(a). A byte's decay epoch is its last write
// or the last restore of its row, whichever is later. Bytes that share an
// age share p, so flips are drawn as geometric gaps over the row's zero
// cells in address and bit order rather than one uniform per cell.
void MixedArray::restore_row(std::size_t row_idx, Nanoseconds t) {
  const Nanoseconds restored_at = last_refresh_[row_idx];
  last_refresh_[row_idx] = t;
  if (row_zeros_[row_idx] == 0) return;
  const std::size_t begin = row_idx * config_.bytes_per_row;
  Nanoseconds current_age = -1;
  double p = 0.0;
  std::uint64_t skip = 0;
  for (std::size_t i = begin; i < begin + config_.bytes_per_row; ++i) {
    std::uint8_t b = cells_[i];
    const int zeros = payload_zeros(b);
    if (zeros == 0) continue;
    const Nanoseconds age = t - std::max(restored_at, written_at_[i]);
    if (age <= 0) continue;
    if (age != current_age) {
      current_age = age;
      if (age != cached_age_) {
        cached_age_ = age;
        cached_p_ = flip_probability(cal_, static_cast<double>(age) / 1000.0, config_.v_ref);
      }
      p = cached_p_;
      if (p > 0.0) skip = geometric_skip(p, rng_);
    }
    if (p <= 0.0) continue;
    if (skip >= static_cast<std::uint64_t>(zeros)) {
      skip -= static_cast<std::uint64_t>(zeros);
      continue;
    }
    for (int bit = 0; bit < kPayloadBits; ++bit) {
      const auto mask = static_cast<std::uint8_t>(1u << bit);
      if (b & mask) continue;
      if (skip == 0) {
        b |= mask;
        skip = geometric_skip(p, rng_);
      } else {
        --skip;
      }
    }
    set_byte(i, b);
  }
}

void MixedArray::run_due_refreshes(Nanoseconds t) {
  if (!config_.refresh_enabled) return;
  const std::uint64_t target = schedule_.events_through(t);
  for (std::uint64_t k = events_done_ + 1; k <= target; ++k) {
    const Nanoseconds te = schedule_.event_time(k);
    const std::uint32_t row = schedule_.event_row(k);
    for (std::uint32_t bank = 0; bank < config_.banks; ++bank) restore_row(row_index(bank, row), te);
    refresh_count_ += config_.banks;
  }
  events_done_ = std::max(events_done_, target);
}

void MixedArray::write(Address addr, EncodedByte value, Nanoseconds t) {
  check_address(addr);
  check_time(t);
  run_due_refreshes(t);
  now_ = t;
  const std::size_t idx = byte_index(addr);
  set_byte(idx, value.to_byte());
  written_at_[idx] = t;
}

EncodedByte MixedArray::read(Address addr, Nanoseconds t) {
  check_address(addr);
  check_time(t);
  run_due_refreshes(t);
  now_ = t;
  restore_row(row_index(addr.bank, addr.row), t);
  return EncodedByte::from_byte(cells_[byte_index(addr)]);
}

void MixedArray::refresh_row(std::uint32_t bank, std::uint32_t row, Nanoseconds t) {
  check_address({bank, row, 0});
  check_time(t);
  run_due_refreshes(t);
  now_ = t;
  restore_row(row_index(bank, row), t);
}

std::uint64_t MixedArray::advance(Nanoseconds t) {
  check_time(t);
  const std::uint64_t before = refresh_count_;
  run_due_refreshes(t);
  now_ = t;
  return refresh_count_ - before;
}

EncodedByte MixedArray::peek(Address addr) const {
  check_address(addr);
  return EncodedByte::from_byte(cells_[byte_index(addr)]);
}

Nanoseconds MixedArray::last_refresh(std::uint32_t bank, std::uint32_t row) const {
  check_address({bank, row, 0});
  return last_refresh_[row_index(bank, row)];
}

Nanoseconds MixedArray::max_row_age() const {
  Nanoseconds oldest = now_;
  for (auto r : last_refresh_) oldest = std::min(oldest, r);
  return now_ - oldest;
}

double MixedArray::stored_payload_zero_fraction() const {
  std::uint64_t zeros = 0;
  for (auto z : row_zeros_) zeros += z;
  return static_cast<double>(zeros) / (static_cast<double>(cells_.size()) * kPayloadBits);
}

std::vector<std::uint8_t> MixedArray::dump_state() const {
  json anchors = json::array();
  for (const auto& a : cal_.anchors) anchors.push_back({{"t_us", a.t_us}, {"v_ref", a.v_ref}, {"p", a.probability}});
  const json header = {
      {"format", "mcaimem-snapshot"},
      {"config", config_to_json(config_)},
      {"seed", seed_},
      {"calibration",
       {{"v_dd", cal_.v_dd}, {"sigma", cal_.sigma}, {"beta", cal_.beta}, {"A", cal_.scale_us}, {"anchors", anchors}}},
      {"now_ns", now_},
      {"events_done", events_done_},
      {"refresh_count", refresh_count_},
      {"rng_state", rng_.state()}};
  const std::string text = header.dump();

  std::vector<std::uint8_t> out(sizeof(kSnapshotMagic) + 8 + text.size() + cells_.size() +
                                8 * (written_at_.size() + last_refresh_.size()));
  auto* p = out.data();
  auto put = [&p](std::uint64_t v, int bytes) {
    for (int i = 0; i < bytes; ++i) *p++ = static_cast<std::uint8_t>(v >> (8 * i));
  };
  p = std::copy(std::begin(kSnapshotMagic), std::end(kSnapshotMagic), p);
  put(kSnapshotVersion, 4);
  put(text.size(), 4);
  p = std::copy(text.begin(), text.end(), p);
  p = std::copy(cells_.begin(), cells_.end(), p);
  for (auto e : written_at_) put(static_cast<std::uint64_t>(e), 8);
  for (auto r : last_refresh_) put(static_cast<std::uint64_t>(r), 8);
  return out;
}

MixedArray MixedArray::restore_state(std::span<const std::uint8_t> snapshot) {
  Reader in(snapshot);
  auto magic = in.take(sizeof(kSnapshotMagic));
  if (!std::equal(magic.begin(), magic.end(), std::begin(kSnapshotMagic))) throw ParseError("not an array snapshot");
  if (const auto v = in.u32(); v != kSnapshotVersion)
    throw ParseError("unsupported snapshot version " + std::to_string(v));
  const std::uint32_t header_len = in.u32();
  auto header_bytes = in.take(header_len);
  json header;
  try {
    header = json::parse(header_bytes.begin(), header_bytes.end());
  } catch (const json::exception& e) {
    throw ParseError(std::string("snapshot header: ") + e.what());
  }

  try {
    const auto& jc = header.at("calibration");
    RetentionCalibration cal;
    cal.v_dd = jc.at("v_dd").get<double>();
    cal.sigma = jc.at("sigma").get<double>();
    cal.beta = jc.at("beta").get<double>();
    cal.scale_us = jc.at("A").get<double>();
    for (const auto& a : jc.at("anchors"))
      cal.anchors.push_back({a.at("t_us").get<double>(), a.at("v_ref").get<double>(), a.at("p").get<double>()});

    MixedArray array(config_from_json(header.at("config")), std::move(cal), header.at("seed").get<std::uint64_t>());
    array.now_ = header.at("now_ns").get<Nanoseconds>();
    array.events_done_ = header.at("events_done").get<std::uint64_t>();
    array.refresh_count_ = header.at("refresh_count").get<std::uint64_t>();
    array.rng_.set_state(header.at("rng_state").get<std::string>());

    auto cells = in.take(array.cells_.size());
    std::copy(cells.begin(), cells.end(), array.cells_.begin());
    for (auto& e : array.written_at_) e = in.i64();
    for (auto& r : array.last_refresh_) r = in.i64();
    if (!in.done()) throw ParseError("trailing bytes after snapshot payload");

    const std::uint32_t bpr = array.config_.bytes_per_row;
    for (std::size_t row = 0; row < array.row_zeros_.size(); ++row) {
      int zeros = 0;
      for (std::size_t i = row * bpr; i < (row + 1) * bpr; ++i) zeros += payload_zeros(array.cells_[i]);
      array.row_zeros_[row] = static_cast<std::uint16_t>(zeros);
    }
    return array;
  } catch (const json::exception& e) {
    throw ParseError(std::string("snapshot header: ") + e.what());
  }
}

}  // namespace mcaimem
