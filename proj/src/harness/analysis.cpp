#include "strobo/harness/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace strobo::harness {

double LineFit::at(double x) const { return std::exp(intercept + slope * std::log(x)); }

LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("fit_loglog: length mismatch");
  if (x.size() < 2) throw std::invalid_argument("fit_loglog: need at least two points");
  const double n = double(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw std::invalid_argument("fit_loglog: data must be positive");
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(y[i]) - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_loglog: abscissae coincide");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.points = x.size();
  return f;
}

std::vector<std::size_t> above_plateau(const std::vector<double>& errors, double plateau, double factor) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < errors.size(); ++i)
    if (errors[i] >= factor * plateau) out.push_back(i);
  return out;
}

bool matches_significant(double value, double printed, int digits) {
  if (!(printed != 0.0) || !std::isfinite(value)) return false;
  const double unit = std::pow(10.0, std::floor(std::log10(std::abs(printed))) - (digits - 1));
  // A hair of slack for the decimal representation of the printed value.
  return std::abs(value - printed) <= 0.5 * unit * (1.0 + 1e-9);
}

std::optional<double> activation_time(const std::vector<double>& times, const std::vector<double>& values,
                                      double threshold) {
  for (std::size_t i = 0; i < std::min(times.size(), values.size()); ++i)
    if (values[i] >= threshold) return times[i];
  return std::nullopt;
}

std::vector<CurvePoint> lower_envelope(std::vector<CurvePoint> points) {
  std::map<double, double> best;
  for (const auto& p : points) {
    if (!std::isfinite(p.y)) continue;
    auto it = best.find(p.x);
    if (it == best.end() || p.y < it->second) best[p.x] = p.y;
  }
  std::vector<CurvePoint> out;
  for (auto [x, y] : best) out.push_back({x, y});
  return out;
}

}  // namespace strobo::harness
