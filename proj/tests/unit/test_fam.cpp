#include <gtest/gtest.h>

#include <cmath>

#include "strobo/fam.hpp"
#include "test_util.hpp"

using namespace strobo;

TEST(FamField, ResonantSumOnTruncatedTorus) {
  // F_1(u)_k = -i sum u_l conj(u_m) u_n over l - m + n = k +- 2 (the two
  // Fourier modes of 2cos 2x) with k^2 - l^2 + m^2 - n^2 = 0
  const int band = 5;
  auto p = torus_nls_1d(0.1, 64);
  const auto& b = p.basis();
  StateVector u = test::random_state(p.basis_ptr(), 41, band, 0.5);
  auto at = [&](int k) { return u[b.find_mode(k)]; };
  CVector want = CVector::Zero(b.size());
  for (int l = -band; l <= band; ++l)
    for (int m = -band; m <= band; ++m)
      for (int n = -band; n <= band; ++n)
        for (int shift : {-2, 2}) {
          const int k = l - m + n + shift;
          if (k * k - l * l + m * m - n * n != 0) continue;
          want[b.find_mode(k)] += Complex(0.0, -1.0) * at(l) * std::conj(at(m)) * at(n);
        }
  // output modes reach |k| = 17, so phase frequencies reach 17^2 + 5^2; the
  // time rule must resolve them
  StateVector got = fam_field(p, 1024, u);
  EXPECT_LT((got.coeffs() - want).cwiseAbs().maxCoeff(), 1e-12 * want.cwiseAbs().maxCoeff());
}

TEST(FamField, IndependentOfEpsilon) {
  for (auto [a, b] : {std::pair{torus_nls_1d(0.1, 32), torus_nls_1d(0.001, 32)},
                      std::pair{gross_pitaevskii_1d(0.1, 20), gross_pitaevskii_1d(0.01, 20)}}) {
    StateVector u = a.initial_state();
    EXPECT_LT(test::rel_diff(fam_field(a, 32, u), fam_field(b, 32, u)), 1e-14);
  }
}

TEST(FamField, VanishesWithoutCoupling) {
  auto p = torus_nls_1d(0.1, 32).with_coupling_scale(0.0);
  EXPECT_EQ(fam_field(p, 16, test::random_state(p.basis_ptr(), 42)).coeffs().norm(), 0.0);
}

TEST(FamField, QuadratureExactOnceResolved) {
  auto p = torus_nls_1d(0.1, 32);
  StateVector u = p.initial_state();
  EXPECT_LT(test::rel_diff(fam_field(p, 32, u), fam_field(p, 128, u)), 1e-13);
  EXPECT_THROW(fam_field(p, 7, u), ConfigError);
}

TEST(FamField, ConservesMass) {
  // Re <u, F_1(u)> = 0
  for (auto p : {torus_nls_1d(0.1, 32), gross_pitaevskii_1d(0.1, 20), aniso_torus_2d(0.1, 8, 8)}) {
    StateVector u = test::random_state(p.basis_ptr(), 43, 3);
    StateVector f = fam_field(p, 64, u);
    const double re = u.coeffs().dot(f.coeffs()).real();
    EXPECT_LT(std::abs(re), 1e-12 * u.coeffs().norm() * f.coeffs().norm()) << to_string(p.model());
  }
}

TEST(FamIntegrate, StepsRecordsAndValidation) {
  auto p = torus_nls_1d(0.125, 32);
  FamConfig cfg = FamConfig::make(p, kTwoPi / 4, 32);
  cfg.record_every = 2;
  FamReport r = fam_integrate(cfg);
  EXPECT_EQ(r.steps, 4);
  EXPECT_EQ(r.field_evals, 16);
  ASSERT_EQ(r.times.size(), 3u);
  EXPECT_NEAR(r.times.back(), kTwoPi, 1e-12);
  EXPECT_THROW(FamConfig::make(p, 1.0, 32), ConfigError);
  EXPECT_THROW(FamConfig::make(p, kTwoPi, 31), ConfigError);
}

TEST(FamIntegrate, ZeroCouplingKeepsInitialState) {
  auto p = torus_nls_1d(0.125, 32).with_coupling_scale(0.0);
  FamReport r = fam_integrate(FamConfig::make(p, kTwoPi, 16));
  EXPECT_LT(test::rel_diff(r.states.back(), r.states.front()), 1e-15);
}

TEST(FamIntegrate, FourthOrderInStep) {
  auto p = torus_nls_1d(0.125, 32);
  auto run = [&](double step) { return fam_integrate(FamConfig::make(p, step, 32)).states.back(); };
  StateVector ref = run(kTwoPi / 64);
  const double e1 = l2_norm_and_error(p.basis(), run(kTwoPi / 4), ref);
  const double e2 = l2_norm_and_error(p.basis(), run(kTwoPi / 8), ref);
  EXPECT_NEAR(e1 / e2, 16.0, 3.0);
}
