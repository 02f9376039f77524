#pragma once

#include <string>

#include "strobo/harness/config.hpp"

namespace strobo::harness {

enum class ReferenceBranch { Splitting, Sam8 };

std::string_view to_string(ReferenceBranch b);

/// Branch chosen by a policy: "auto" uses full-interval splitting for
/// eps >= 2^-8 (torus) or eps >= 2^-7 (Gross-Pitaevskii) and SAM with the
/// 8th-order stencil below; the 2D models always use splitting.
ReferenceBranch select_reference_branch(Model model, double eps, const ReferencePolicy& policy);

/// Concrete steps of a reference run.
struct ReferencePlan {
  ReferenceBranch branch = ReferenceBranch::Splitting;
  long splitting_n = 0;      // steps per period (splitting branch)
  long sam_macro_steps = 0;  // over the requested horizon (sam8 branch)
  long sam_micro_n = 0;
  SplitOrdering ordering = SplitOrdering::PotentialFirst;
  std::string describe() const;
};

ReferencePlan plan_reference(const ProblemSpec& p, const ReferencePolicy& policy, double final_time,
                             SplitOrdering ordering);

struct ReferenceSolution {
  StateVector state;
  ReferencePlan plan;
  bool from_cache = false;
  double wall_time_s = 0.0;
};

/// Reference state psi(final_time) for p, cached on disk keyed by model, eps,
/// basis, horizon and plan. A cache entry whose sidecar or checksum does not
/// match is recomputed and overwritten.
ReferenceSolution reference_solution(const ProblemSpec& p, const ReferencePolicy& policy, double final_time,
                                     SplitOrdering ordering = SplitOrdering::PotentialFirst);

/// STROBO_CACHE_DIR, else policy.cache_dir, else <tmp>/strobo-cache.
std::string cache_directory(const ReferencePolicy& policy);

/// Physical state at time t from a SAM state u(t): multiplies by s^k at
/// t = kP and post-processes otherwise.
StateVector sam_to_physical(const SamConfig& cfg, const StateVector& u, double t);

}  // namespace strobo::harness
