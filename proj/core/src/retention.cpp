#include "mcaimem/retention.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <future>
#include <set>

#include "json.hpp"
#include "mcaimem/error.hpp"

namespace mcaimem {

namespace {

using nlohmann::json;

constexpr std::uint64_t kMonteCarloChunk = 1u << 14;

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_quantile(double p) { return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * p); }

void check_vref(const RetentionCalibration& cal, double v_ref) {
  if (!(v_ref > 0.0 && v_ref < cal.v_dd))
    throw DomainError("v_ref " + std::to_string(v_ref) + " V outside (0, " + std::to_string(cal.v_dd) + ") V");
}

// Normalized threshold distance: how far a stored zero must drift toward
// V_DD before the sense amplifier calls it a one.
double threshold_depth(double v_ref, double v_dd) { return -std::log1p(-v_ref / v_dd); }

void validate_anchor(const RetentionAnchor& a, double v_dd) {
  if (!(a.t_us > 0.0)) throw CalibrationError("anchor time must be positive");
  if (!(a.v_ref > 0.0 && a.v_ref < v_dd)) throw CalibrationError("anchor v_ref must lie in (0, v_dd)");
  if (!(a.probability > 0.0 && a.probability < 1.0)) throw CalibrationError("anchor probability must lie in (0, 1)");
}

}  // namespace

std::vector<RetentionAnchor> default_anchors() {
  return {{1.3, 0.5, 0.01}, {12.57, 0.8, 0.01}, {13.0, 0.8, 0.25}};
}

RetentionCalibration calibrate(std::span<const RetentionAnchor> anchors, double v_dd) {
  if (!(v_dd > 0.0)) throw CalibrationError("v_dd must be positive");
  if (anchors.size() < 3) throw CalibrationError("calibration needs at least 3 anchors");
  std::set<double> vrefs;
  for (const auto& a : anchors) {
    validate_anchor(a, v_dd);
    vrefs.insert(a.v_ref);
  }
  if (vrefs.size() < 2) throw CalibrationError("calibration needs anchors at >= 2 distinct V_REF values");

  const auto n = static_cast<Eigen::Index>(anchors.size());
  Eigen::MatrixXd design(n, 3);
  Eigen::VectorXd log_t(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& a = anchors[static_cast<std::size_t>(i)];
    design(i, 0) = 1.0;
    design(i, 1) = std::log(threshold_depth(a.v_ref, v_dd));
    design(i, 2) = normal_quantile(a.probability);
    log_t(i) = std::log(a.t_us);
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  qr.setThreshold(1e-10);
  if (qr.rank() < 3) throw CalibrationError("anchors do not determine scale, exponent and spread (rank-deficient)");
  const Eigen::VectorXd x = qr.solve(log_t);

  RetentionCalibration cal;
  cal.v_dd = v_dd;
  cal.scale_us = std::exp(x(0));
  cal.beta = x(1);
  cal.sigma = x(2);
  cal.anchors.assign(anchors.begin(), anchors.end());
  if (!(cal.sigma > 0.0) || !std::isfinite(cal.sigma))
    throw CalibrationError("anchors imply non-positive spread sigma");
  if (!(cal.scale_us > 0.0) || !std::isfinite(cal.scale_us) || !std::isfinite(cal.beta))
    throw CalibrationError("anchors imply a non-finite fit");
  return cal;
}

const RetentionCalibration& default_calibration() {
  static const RetentionCalibration cal = [] {
    const auto anchors = default_anchors();
    return calibrate(anchors);
  }();
  return cal;
}

bool is_extrapolated(double v_ref) {
  return v_ref < kCharacterizedVrefMin - 1e-12 || v_ref > kCharacterizedVrefMax + 1e-12;
}

double median_crossing_time_us(const RetentionCalibration& cal, double v_ref) {
  check_vref(cal, v_ref);
  return cal.scale_us * std::pow(threshold_depth(v_ref, cal.v_dd), cal.beta);
}

double flip_probability(const RetentionCalibration& cal, double t_us, double v_ref) {
  check_vref(cal, v_ref);
  if (!(t_us >= 0.0)) throw DomainError("access time must be non-negative");
  if (t_us == 0.0) return 0.0;
  const double t50 = median_crossing_time_us(cal, v_ref);
  return normal_cdf((std::log(t_us) - std::log(t50)) / cal.sigma);
}

double sample_crossing_time(const RetentionCalibration& cal, double v_ref, RngStream& rng) {
  const double t50 = median_crossing_time_us(cal, v_ref);
  return t50 * std::exp(cal.sigma * rng.standard_normal());
}

double monte_carlo_flip_probability(const RetentionCalibration& cal, double t_us, double v_ref,
                                    std::uint64_t samples, std::uint64_t seed, unsigned threads) {
  check_vref(cal, v_ref);
  if (samples == 0) throw DomainError("monte carlo needs at least one sample");
  const std::uint64_t chunks = (samples + kMonteCarloChunk - 1) / kMonteCarloChunk;
  auto run_chunk = [&](std::uint64_t c) {
    RngStream rng(seed, c);
    const std::uint64_t begin = c * kMonteCarloChunk;
    const std::uint64_t end = std::min(samples, begin + kMonteCarloChunk);
    std::uint64_t flips = 0;
    for (std::uint64_t i = begin; i < end; ++i) flips += sample_crossing_time(cal, v_ref, rng) <= t_us;
    return flips;
  };
  threads = std::max(1u, threads);
  std::vector<std::uint64_t> per_chunk(chunks, 0);
  std::vector<std::future<void>> workers;
  for (unsigned w = 0; w < threads; ++w) {
    workers.push_back(std::async(std::launch::async, [&, w] {
      for (std::uint64_t c = w; c < chunks; c += threads) per_chunk[c] = run_chunk(c);
    }));
  }
  for (auto& f : workers) f.get();
  std::uint64_t flips = 0;
  for (auto f : per_chunk) flips += f;
  return static_cast<double>(flips) / static_cast<double>(samples);
}

FlipCurve generate_curve(const RetentionCalibration& cal, double v_ref, double t_max_us, std::size_t n_points) {
  check_vref(cal, v_ref);
  if (n_points < 2) throw DomainError("curve needs at least 2 points");
  if (!(t_max_us > 0.0)) throw DomainError("curve t_max must be positive");
  FlipCurve curve;
  curve.v_ref = v_ref;
  curve.extrapolated = is_extrapolated(v_ref);
  curve.samples.reserve(n_points);
  const double step = t_max_us / static_cast<double>(n_points - 1);
  for (std::size_t i = 0; i < n_points; ++i) {
    const double t = (i + 1 == n_points) ? t_max_us : step * static_cast<double>(i);
    curve.samples.push_back({t, flip_probability(cal, t, v_ref)});
  }
  return curve;
}

double refresh_interval_us(const RetentionCalibration& cal, double v_ref, double target_p) {
  if (!(target_p > 0.0 && target_p < 1.0)) throw DomainError("target flip probability must lie in (0, 1)");
  return median_crossing_time_us(cal, v_ref) * std::exp(cal.sigma * normal_quantile(target_p));
}

std::string calibration_to_json(const RetentionCalibration& cal) {
  json anchors = json::array();
  for (const auto& a : cal.anchors) anchors.push_back({{"t_us", a.t_us}, {"v_ref", a.v_ref}, {"p", a.probability}});
  json j = {{"v_dd", cal.v_dd}, {"sigma", cal.sigma}, {"beta", cal.beta}, {"A", cal.scale_us}, {"anchors", anchors}};
  return j.dump(2) + "\n";
}

RetentionCalibration calibration_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    RetentionCalibration cal;
    cal.v_dd = j.at("v_dd").get<double>();
    cal.sigma = j.at("sigma").get<double>();
    cal.beta = j.at("beta").get<double>();
    cal.scale_us = j.at("A").get<double>();
    if (j.contains("anchors")) cal.anchors = anchors_from_json(j.at("anchors").dump());
    if (!(cal.sigma > 0.0) || !(cal.scale_us > 0.0) || !(cal.v_dd > 0.0))
      throw CalibrationError("calibration requires sigma > 0, A > 0, v_dd > 0");
    return cal;
  } catch (const json::exception& e) {
    throw ParseError(std::string("calibration JSON: ") + e.what());
  }
}

std::vector<RetentionAnchor> anchors_from_json(const std::string& text, double* v_dd) {
  try {
    const json j = json::parse(text);
    const json* list = &j;
    if (j.is_object()) {
      if (v_dd && j.contains("v_dd")) *v_dd = j.at("v_dd").get<double>();
      list = &j.at("anchors");
    }
    std::vector<RetentionAnchor> out;
    for (const auto& a : *list)
      out.push_back({a.at("t_us").get<double>(), a.at("v_ref").get<double>(), a.at("p").get<double>()});
    return out;
  } catch (const json::exception& e) {
    throw ParseError(std::string("anchor JSON: ") + e.what());
  }
}

}  // namespace mcaimem
