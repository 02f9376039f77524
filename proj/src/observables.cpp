#include "strobo/observables.hpp"

#include <cmath>

namespace strobo {

void ObservableTrace::push(double t, std::vector<double> row) {
  if (!times.empty() && !(t > times.back())) throw ConfigError("trace times must increase strictly");
  times.push_back(t);
  values.push_back(std::move(row));
}

std::vector<double> ObservableTrace::column(std::size_t i) const {
  std::vector<double> out;
  out.reserve(values.size());
  for (const auto& row : values) out.push_back(row.at(i));
  return out;
}

double mass(const SpectralBasis& b, const StateVector& u) {
  u.require_basis(b);
  const CVector grid = b.to_grid(u.coeffs());
  return (grid.cwiseAbs2().array() * b.weights().array()).sum();
}

double energy_torus(const SpectralBasis& b, const StateVector& u, double eps) {
  if (b.kind() != BasisKind::Fourier1D) throw ConfigError("energy_torus needs the 1D Fourier basis");
  u.require_basis(b);
  double kinetic = 0.0;
  for (Eigen::Index i = 0; i < b.size(); ++i) {
    const double k = b.mode_x(i);
    kinetic += k * k * std::norm(u[i]);
  }
  kinetic *= 0.5 * b.coefficient_weight();
  const CVector grid = b.to_grid(u.coeffs());
  double quartic = 0.0;
  for (Eigen::Index j = 0; j < grid.size(); ++j) {
    const double rho = std::norm(grid[j]);
    quartic += 2.0 * std::cos(2.0 * b.axis_x()[j]) * rho * rho * b.weights()[j];
  }
  return kinetic + 0.25 * eps * quartic;
}

std::vector<double> mode_magnitudes(const StateVector& u, const std::vector<ModeIndex>& modes) {
  std::vector<double> out;
  out.reserve(modes.size());
  for (auto [kx, ky] : modes) out.push_back(std::abs(u[u.basis().find_mode(kx, ky)]));
  return out;
}

DriftStatistics drift_statistics(const std::vector<double>& times, const std::vector<double>& values) {
  if (times.size() != values.size()) throw ConfigError("drift_statistics: length mismatch");
  if (times.size() < 2) throw ConfigError("drift_statistics: need at least two samples");
  const std::size_t n = times.size();
  DriftStatistics s;
  double mt = 0.0, me = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = values[i] - values[0];
    s.max_abs_error = std::max(s.max_abs_error, std::abs(e));
    mt += times[i];
    me += e;
  }
  mt /= double(n);
  me /= double(n);
  double stt = 0.0, ste = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dt = times[i] - mt;
    stt += dt * dt;
    ste += dt * (values[i] - values[0] - me);
  }
  s.linear_slope = stt > 0.0 ? ste / stt : 0.0;
  return s;
}

DriftStatistics drift_statistics(const ObservableTrace& trace) { return drift_statistics(trace.times, trace.column(0)); }

}  // namespace strobo
