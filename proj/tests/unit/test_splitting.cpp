#include <gtest/gtest.h>

#include <cmath>

#include "strobo/splitting.hpp"
#include "test_util.hpp"

using namespace strobo;

namespace {

std::vector<ProblemSpec> all_models(double eps = 0.125) {
  return {torus_nls_1d(eps, 32), gross_pitaevskii_1d(eps, 24), aniso_torus_2d(eps, 16, 16),
          aniso_gp_2d(eps, 11, 13)};
}

const SplitOrdering kOrderings[] = {SplitOrdering::KineticFirst, SplitOrdering::PotentialFirst};

}  // namespace

TEST(Yoshida, WeightsSumToOne) {
  const double w1 = YoshidaWeights::outer();
  const double w0 = YoshidaWeights::middle();
  EXPECT_EQ(2.0 * w1 + w0, 1.0);
  EXPECT_NEAR(w1, 1.3512071919596578, 1e-15);
  EXPECT_NEAR(2.0 * std::pow(w1, 3) + std::pow(w0, 3), 0.0, 1e-14);
}

TEST(Scheme, StepMustDividePeriod) {
  EXPECT_EQ(SplittingScheme::for_period(4, kTwoPi, 64).steps_per_period(kTwoPi), 64);
  SplittingScheme bad{4, kTwoPi / 2.5};
  EXPECT_THROW(bad.steps_per_period(kTwoPi), ConfigError);
  EXPECT_THROW(SplittingScheme::for_period(3, kTwoPi, 8), ConfigError);
  EXPECT_THROW(SplittingScheme::for_period(2, kTwoPi, 0), ConfigError);
  EXPECT_EQ(parse_split_ordering(to_string(SplitOrdering::PotentialFirst)), SplitOrdering::PotentialFirst);
  EXPECT_THROW(parse_split_ordering("pk"), ConfigError);
}

TEST(SubFlows, KineticIdentityGroupAndNorm) {
  for (const auto& p : all_models()) {
    StateVector u = test::random_state(p.basis_ptr(), 21);
    EXPECT_EQ((kinetic_flow(p, 0.0, u).coeffs() - u.coeffs()).norm(), 0.0);
    EXPECT_LT(test::rel_diff(kinetic_flow(p, 0.2, kinetic_flow(p, 0.3, u)), kinetic_flow(p, 0.5, u)), 1e-13);
    EXPECT_NEAR(l2_norm(kinetic_flow(p, 0.9, u)) / l2_norm(u), 1.0, 1e-13);
  }
}

TEST(SubFlows, PotentialKeepsModulusPointwise) {
  for (const auto& p : all_models()) {
    StateVector u = test::random_state(p.basis_ptr(), 22, 4);
    EXPECT_LT(test::rel_diff(potential_flow(p, 0.0, u), u), 1e-14);
    StateVector v = potential_flow(p, 3.0, u);
    CVector gu = p.basis().to_grid(u.coeffs());
    CVector gv = p.basis().to_grid(v.coeffs());
    EXPECT_LT((gu.cwiseAbs() - gv.cwiseAbs()).cwiseAbs().maxCoeff(), 1e-12 * gu.cwiseAbs().maxCoeff());
    StateVector w = potential_flow(p.with_coupling_scale(0.0), 3.0, u);
    EXPECT_LT(test::rel_diff(w, u), 1e-14);
  }
}

TEST(SubFlows, PotentialIsTheExactPhaseRotation) {
  auto p = torus_nls_1d(0.25, 16);
  StateVector u = StateVector::mode(p.basis_ptr(), 0);  // |psi| = 1
  const double t = 0.7;
  CVector g = p.basis().to_grid(potential_flow(p, t, u).coeffs());
  for (Eigen::Index j = 0; j < g.size(); ++j) {
    const double x = p.basis().axis_x()[j];
    EXPECT_LT(std::abs(g[j] - std::polar(1.0, -t * 0.25 * 2.0 * std::cos(2.0 * x))), 1e-14);
  }
}

TEST(Strang, ReducesToKineticWithoutCoupling) {
  auto p = torus_nls_1d(0.1, 32).with_coupling_scale(0.0);
  StateVector u = test::random_state(p.basis_ptr(), 23);
  for (SplitOrdering o : kOrderings) {
    SplittingScheme s{2, 0.3, o};
    EXPECT_LT(test::rel_diff(strang_step(p, s, u), kinetic_flow(p, 0.3, u)), 1e-14);
  }
}

TEST(Splitting, SymmetricAndUnitary) {
  for (const auto& p : all_models()) {
    StateVector u = test::random_state(p.basis_ptr(), 24, 3);
    for (SplitOrdering o : kOrderings) {
      for (int order : {2, 4}) {
        SplittingScheme fwd{order, kTwoPi / 32, o};
        SplittingScheme bwd{order, -kTwoPi / 32, o};
        StateVector v = splitting_step(p, fwd, u);
        EXPECT_LT(test::rel_diff(splitting_step(p, bwd, v), u), 1e-11) << to_string(p.model()) << order;
        EXPECT_NEAR(l2_norm(v) / l2_norm(u), 1.0, 1e-12);
      }
    }
  }
}

TEST(Splitting, ErrorRatiosUnderStepHalving) {
  // Fixed horizon, eps = 2^-3: Strang error drops 4x, triple jump 16x.
  auto p = torus_nls_1d(0.125, 64);
  const double T = kTwoPi;
  auto solve = [&](int order, long n) {
    return integrate_splitting(p, SplittingScheme::for_period(order, kTwoPi, n), T).final_state;
  };
  StateVector ref = solve(4, 4096);
  for (auto [order, expect, n] : {std::tuple{2, 4.0, 256L}, std::tuple{4, 16.0, 64L}}) {
    const double e1 = l2_norm_and_error(p.basis(), solve(order, n), ref);
    const double e2 = l2_norm_and_error(p.basis(), solve(order, 2 * n), ref);
    EXPECT_NEAR(e1 / e2, expect, 0.1 * expect) << order;
  }
}

TEST(Splitting, ErrorHalvesWithEpsilon) {
  // Over [0, T0/eps] the triple-jump error is linear in eps at fixed h.
  auto err = [](double eps) {
    auto p = torus_nls_1d(eps, 64);
    auto run = [&](long n) {
      return integrate_splitting(p, SplittingScheme::for_period(4, kTwoPi, n, 1, SplitOrdering::PotentialFirst))
          .final_state;
    };
    return l2_norm_and_error(p.basis(), run(128), run(2048));
  };
  const double r = err(0.125) / err(0.0625);
  EXPECT_GT(r, 2.0 / 1.2);
  EXPECT_LT(r, 2.0 * 1.2);
}

TEST(Periods, IdentityMassAndReversibility) {
  for (const auto& p : all_models()) {
    StateVector u = p.initial_state();
    for (SplitOrdering o : kOrderings) {
      auto s = SplittingScheme::for_period(4, p.period(), 32, 1, o);
      EXPECT_EQ((propagate_periods(p, s, u, 0).coeffs() - u.coeffs()).norm(), 0.0);
      StateVector v = propagate_periods(p, s, u, 3);
      EXPECT_NEAR(l2_norm(v) / l2_norm(u), 1.0, 1e-12);
      StateVector w = propagate_periods(p, s, v, -3);
      EXPECT_LT(test::rel_diff(w, u), 1e-10) << to_string(p.model());
    }
  }
}

TEST(Propagator, MatchesRepeatedSteps) {
  for (const auto& p : all_models()) {
    // small amplitude: large data makes the coarse map chaotic and amplifies rounding
    StateVector u = test::random_state(p.basis_ptr(), 25, 3, 0.2);
    for (SplitOrdering o : kOrderings) {
      for (int order : {2, 4}) {
        SplittingScheme s{order, -kTwoPi / 16, o};
        StateVector v = u;
        for (int i = 0; i < 7; ++i) v = splitting_step(p, s, v);
        SplittingPropagator prop(p, order, o);
        EXPECT_LT(test::rel_diff(prop.advance(u, 7, s.h), v), 1e-13) << to_string(p.model()) << order;
      }
    }
  }
}

TEST(Propagator, SnapshotsMatchPropagatePeriods) {
  auto p = gross_pitaevskii_1d(0.1, 20);
  SplittingPropagator prop(p, 4, SplitOrdering::PotentialFirst);
  auto snaps = prop.period_snapshots(p.initial_state(), 3, -1, 16);
  ASSERT_EQ(snaps.size(), 3u);
  auto s = SplittingScheme::for_period(4, p.period(), 16, 1, SplitOrdering::PotentialFirst);
  for (int m = 1; m <= 3; ++m)
    EXPECT_LT(test::rel_diff(snaps[m - 1], propagate_periods(p, s, p.initial_state(), -m)), 1e-13);
}

TEST(IntegrateSplitting, SamplesAndHorizon) {
  auto p = torus_nls_1d(0.25, 32);
  auto s = SplittingScheme::for_period(4, p.period(), 16);
  auto run = integrate_splitting(p, s, 4 * kTwoPi, kTwoPi);
  ASSERT_EQ(run.samples.size(), 5u);
  EXPECT_EQ(run.steps, 64);
  EXPECT_NEAR(run.sample_times.back(), 4 * kTwoPi, 1e-12);
  EXPECT_LT(test::rel_diff(run.samples.back(), run.final_state), 1e-15);
  EXPECT_THROW(integrate_splitting(p, s, 1.0), ConfigError);
}
