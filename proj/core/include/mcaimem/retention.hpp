#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mcaimem/rng.hpp"

namespace mcaimem {

/// A measured point of the 0->1 flip CDF: at access time t_us with sense
/// threshold v_ref, a fraction `probability` of stored zeros read as one.
struct RetentionAnchor {
  double t_us = 0.0;
  double v_ref = 0.0;
  double probability = 0.0;

  friend bool operator==(const RetentionAnchor&, const RetentionAnchor&) = default;
};

/// Crossing time of a stored zero past V_REF is lognormal with median
///   t50(V_REF) = scale_us * g(V_REF)^beta,   g(v) = -ln(1 - v / v_dd)
/// and log-standard-deviation sigma. Immutable once calibrated.
struct RetentionCalibration {
  double v_dd = 1.0;
  double sigma = 0.0;
  double beta = 0.0;
  double scale_us = 0.0;  // "A"
  std::vector<RetentionAnchor> anchors;
};

inline constexpr double kDefaultTargetFlipProbability = 0.01;
inline constexpr double kCharacterizedVrefMin = 0.5;
inline constexpr double kCharacterizedVrefMax = 0.8;

/// (1.3 us, 0.5 V, 1%), (12.57 us, 0.8 V, 1%), (13 us, 0.8 V, 25%).
std::vector<RetentionAnchor> default_anchors();

/// Least-squares fit of ln t = ln A + beta ln g(v) + sigma z(p) over the
/// anchors; exact when there are three. Needs >= 3 anchors over >= 2
/// distinct V_REF values and a full-rank design, and sigma > 0.
RetentionCalibration calibrate(std::span<const RetentionAnchor> anchors, double v_dd = 1.0);

/// Calibration fitted to default_anchors(), computed once.
const RetentionCalibration& default_calibration();

/// True when v_ref lies outside the characterized [0.5, 0.8] V window; the
/// formula still applies but the result is an extrapolation.
bool is_extrapolated(double v_ref);

double median_crossing_time_us(const RetentionCalibration& cal, double v_ref);

/// P(stored 0 reads as 1 after t_us). Throws DomainError unless
/// 0 < v_ref < v_dd and t_us >= 0.
double flip_probability(const RetentionCalibration& cal, double t_us, double v_ref);

/// Draws one crossing time (us) by inverting the CDF at a uniform draw.
double sample_crossing_time(const RetentionCalibration& cal, double v_ref, RngStream& rng);

/// Empirical flip fraction over `samples` crossing-time draws. Work is cut
/// into fixed substreams of (seed, chunk) so the result is identical for
/// any `threads` value.
double monte_carlo_flip_probability(const RetentionCalibration& cal, double t_us, double v_ref,
                                    std::uint64_t samples, std::uint64_t seed, unsigned threads = 1);

struct FlipCurvePoint {
  double t_us = 0.0;
  double p = 0.0;
};

struct FlipCurve {
  double v_ref = 0.0;
  bool extrapolated = false;
  std::vector<FlipCurvePoint> samples;
};

/// Analytic curve on a uniform grid over [0, t_max_us], n_points >= 2.
FlipCurve generate_curve(const RetentionCalibration& cal, double v_ref, double t_max_us, std::size_t n_points);

/// Time (us) at which the flip probability reaches target_p.
double refresh_interval_us(const RetentionCalibration& cal, double v_ref,
                           double target_p = kDefaultTargetFlipProbability);

std::string calibration_to_json(const RetentionCalibration& cal);
RetentionCalibration calibration_from_json(const std::string& text);

/// Accepts either {"v_dd": .., "anchors": [...]} or a bare anchor array;
/// anchor objects are {"t_us", "v_ref", "p"}.
std::vector<RetentionAnchor> anchors_from_json(const std::string& text, double* v_dd = nullptr);

}  // namespace mcaimem
