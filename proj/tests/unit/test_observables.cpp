#include <gtest/gtest.h>

#include <cmath>

#include "strobo/observables.hpp"
#include "strobo/splitting.hpp"
#include "test_util.hpp"

using namespace strobo;

TEST(Mass, InitialStates) {
  auto t = torus_nls_1d(0.1, 64);
  EXPECT_NEAR(mass(t.basis(), t.initial_state()), kTwoPi, 1e-12);
  auto g = gross_pitaevskii_1d(0.1, 40);
  EXPECT_NEAR(mass(g.basis(), g.initial_state()), 2.0, 1e-12);
  auto a = aniso_torus_2d(0.1, 16, 16);
  // 1 + 2cos x + 2cos y has squared L2 norm (1 + 2 + 2) (2 pi)^2
  EXPECT_NEAR(mass(a.basis(), a.initial_state()), 5.0 * kTwoPi * kTwoPi, 1e-10);
}

TEST(Mass, EqualsWeightedCoefficientSum) {
  for (auto b : {SpectralBasis::fourier_1d(32), SpectralBasis::hermite_1d(30), SpectralBasis::hermite_2d(8, 9)}) {
    StateVector u = test::random_state(b, 51);
    EXPECT_NEAR(mass(*b, u) / (b->coefficient_weight() * u.coeffs().squaredNorm()), 1.0, 1e-12);
  }
}

TEST(Energy, TorusInitialStateAndZero) {
  for (double eps : {0.5, 0.01}) {
    auto p = torus_nls_1d(eps, 64);
    EXPECT_NEAR(energy_torus(p.basis(), p.initial_state(), eps), kPi, 1e-12);
  }
  auto b = SpectralBasis::fourier_1d(16);
  EXPECT_EQ(energy_torus(*b, StateVector::zeros(b), 0.1), 0.0);
  auto h = SpectralBasis::hermite_1d(10);
  EXPECT_THROW(energy_torus(*h, StateVector::zeros(h), 0.1), ConfigError);
}

TEST(Energy, PlaneWave) {
  // psi = e^{3ix}: kinetic 9 pi, quartic term integrates cos 2x to zero
  auto b = SpectralBasis::fourier_1d(16);
  EXPECT_NEAR(energy_torus(*b, StateVector::mode(b, 3), 0.3), 9.0 * kPi, 1e-12);
}

TEST(Energy, ConservedByFineSplitting) {
  const double eps = 1.0 / 32;
  auto p = torus_nls_1d(eps, 64);
  auto run = integrate_splitting(p, SplittingScheme::for_period(4, kTwoPi, 1024, 1, SplitOrdering::PotentialFirst),
                                 0.0, kTwoPi);
  std::vector<double> e;
  for (const auto& s : run.samples) e.push_back(energy_torus(p.basis(), s, eps));
  auto stats = drift_statistics(run.sample_times, e);
  EXPECT_LT(stats.max_abs_error, 1e-8);
  EXPECT_NEAR(mass(p.basis(), run.final_state), kTwoPi, 1e-10);
}

TEST(Modes, MagnitudesAndFreeFlowInvariance) {
  auto b = SpectralBasis::fourier_1d(16);
  auto m = mode_magnitudes(StateVector::mode(b, 3), {{0, 0}, {3, 0}, {-3, 0}});
  EXPECT_EQ(m, (std::vector<double>{0.0, 1.0, 0.0}));
  auto g = gross_pitaevskii_1d(0.1, 10);
  auto gm = mode_magnitudes(g.initial_state(), {{0, 0}, {1, 0}, {2, 0}});
  EXPECT_EQ(gm, (std::vector<double>{1.0, 1.0, 0.0}));
  StateVector u = test::random_state(g.basis_ptr(), 52);
  auto before = mode_magnitudes(u, {{0, 0}, {4, 0}, {9, 0}});
  auto after = mode_magnitudes(free_flow(g, 1.234, u), {{0, 0}, {4, 0}, {9, 0}});
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(before[i], after[i], 1e-14);
  EXPECT_THROW(mode_magnitudes(u, {{11, 0}}), ConfigError);
}

TEST(Drift, ConstantAndLinearSeries) {
  std::vector<double> t{0, 1, 2, 3};
  auto flat = drift_statistics(t, {2, 2, 2, 2});
  EXPECT_EQ(flat.max_abs_error, 0.0);
  EXPECT_EQ(flat.linear_slope, 0.0);
  auto line = drift_statistics(t, {1, 1.5, 2, 2.5});
  EXPECT_DOUBLE_EQ(line.max_abs_error, 1.5);
  EXPECT_NEAR(line.linear_slope, 0.5, 1e-15);
  EXPECT_THROW(drift_statistics({0.0}, {1.0}), ConfigError);
  EXPECT_THROW(drift_statistics(t, {1.0, 2.0}), ConfigError);
}

TEST(Trace, TimesMustIncrease) {
  ObservableTrace tr;
  tr.push(0.0, {1.0});
  tr.push(1.0, {3.0});
  EXPECT_THROW(tr.push(1.0, {4.0}), ConfigError);
  EXPECT_NEAR(drift_statistics(tr).linear_slope, 2.0, 1e-15);
}
