#pragma once

#include <utility>
#include <vector>

#include "strobo/problem.hpp"

namespace strobo {

enum class ObservableKind { Mass, EnergyTorus, ModeMagnitudes };

struct ObservableTrace {
  ObservableKind kind = ObservableKind::Mass;
  std::vector<double> times;
  std::vector<std::vector<double>> values;  // one row per time

  void push(double t, std::vector<double> row);
  /// Single-valued traces as a flat column.
  std::vector<double> column(std::size_t i = 0) const;
};

/// int |psi|^2 by grid quadrature.
double mass(const SpectralBasis& b, const StateVector& u);

/// 1/2 int |psi_x|^2 + eps/4 int 2cos(2x) |psi|^4 on the 2pi-torus.
double energy_torus(const SpectralBasis& b, const StateVector& u, double eps);

using ModeIndex = std::pair<int, int>;
/// |coefficient| for each (kx, ky); throws ConfigError for modes outside the basis.
std::vector<double> mode_magnitudes(const StateVector& u, const std::vector<ModeIndex>& modes);

struct DriftStatistics {
  double max_abs_error = 0.0;
  double linear_slope = 0.0;  // least-squares slope of value(t) - value(0)
};

DriftStatistics drift_statistics(const std::vector<double>& times, const std::vector<double>& values);
DriftStatistics drift_statistics(const ObservableTrace& trace);

}  // namespace strobo
