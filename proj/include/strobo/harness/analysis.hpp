#pragma once

#include <optional>
#include <vector>

namespace strobo::harness {

/// Least-squares line through (log x, log y). Both logs are natural; the
/// slope is base independent.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t points = 0;
  /// exp(intercept) x^slope.
  double at(double x) const;
};

/// Throws std::invalid_argument for fewer than two points or non-positive data.
LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

/// Indices whose error is at least `factor` times the plateau.
std::vector<std::size_t> above_plateau(const std::vector<double>& errors, double plateau, double factor);

/// True when `value` rounds to the printed value at `digits` significant
/// digits, i.e. |value - printed| <= half a unit in the last printed digit.
bool matches_significant(double value, double printed, int digits = 2);

/// First sample time at which values[i] >= threshold.
std::optional<double> activation_time(const std::vector<double>& times, const std::vector<double>& values,
                                      double threshold);

/// Points of a curve sharing an abscissa reduced to their minimum; output
/// sorted by x.
struct CurvePoint {
  double x = 0.0;
  double y = 0.0;
};
std::vector<CurvePoint> lower_envelope(std::vector<CurvePoint> points);

}  // namespace strobo::harness
