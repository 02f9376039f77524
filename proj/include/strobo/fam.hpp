#pragma once

#include <vector>

#include "strobo/problem.hpp"

namespace strobo {

/// First averaged model u' = eps_eff F_1(u), F_1 = period average of the
/// filtered right-hand side, integrated with RK4.
struct FamConfig {
  ProblemSpec problem;
  int n_quad = 64;
  double step = 0.0;        // h_fam
  double final_time = 0.0;  // defaults to problem.final_time()
  int record_every = 1;

  static FamConfig make(ProblemSpec p, double step, int n_quad = 64, double final_time = 0.0);
  long step_count() const;
  void validate() const;
};

/// Rectangle rule over n_quad equispaced points of one period.
StateVector fam_field(const ProblemSpec& p, int n_quad, const StateVector& u);
StateVector fam_field(const FamConfig& cfg, const StateVector& u);

struct FamReport {
  std::vector<double> times;
  std::vector<StateVector> states;
  long steps = 0;
  long field_evals = 0;
  double wall_time_s = 0.0;
};

FamReport fam_integrate(const FamConfig& cfg);

}  // namespace strobo
