#pragma once

#include <optional>
#include <string>
#include <vector>

#include "outctrl/lti_model.hpp"
#include "outctrl/numerics.hpp"
#include "outctrl/types.hpp"

namespace outctrl {

/// Which decision procedure produced a verdict.
enum class Criterion { kKalman, kHautusOutput, kHautusState, kGramian };

std::string to_string(Criterion criterion);

/// Outcome of one controllability test, with the numerical evidence that
/// produced the decision.
struct Verdict {
  bool controllable = false;
  Criterion criterion = Criterion::kKalman;
  int required_rank = 0;
  int found_rank = 0;
  /// Singular values (rank tests) or Hermitian eigenvalues (Gramian test) at
  /// the decisive evaluation point, in descending order.
  RealVector singular_values;
  /// The cutoff those values were compared against.
  double threshold = 0.0;
  /// For a failing frequency-domain test: the spectrum point where the rank
  /// dropped.  Only set on negative Hautus verdicts.
  std::optional<Complex> witness;
};

/// Output controllability matrix [CB, CAB, ..., CA^{n-1}B]  (p x nm).
Matrix kalman_output_matrix(const LtiSystem& sys);

/// Rank test on the output controllability matrix: controllable iff the rank
/// equals the output dimension p.
Verdict kalman_output_test(const LtiSystem& sys,
                           const ToleranceConfig& tol = {});

/// Frequency-domain test for state controllability: rank [zI - A, B] = n for
/// every eigenvalue z of A.
Verdict hautus_state_test(const LtiSystem& sys,
                          const ToleranceConfig& tol = {});

/// Frequency-domain test for output controllability:
/// rank [C(zI - A), CB] = p for every eigenvalue z of A.  The rank cutoff at
/// each spectrum point is raised by the cluster's eigenvalue uncertainty
/// (scaled by |C|_2), so that an eigenvalue known only to delta accuracy
/// cannot manufacture a spurious rank drop.
Verdict hautus_output_test(const LtiSystem& sys,
                           const ToleranceConfig& tol = {});

/// Finite-horizon output Gramian W(t) = C P(t) C^* together with its
/// eigendecomposition (descending eigenvalue order).
struct Gramian {
  Matrix W;
  double horizon = 0.0;
  RealVector eigenvalues;
  Matrix eigenvectors;
};

/// Definiteness test on the output Gramian at horizon t: controllable iff
/// the smallest eigenvalue clears tol.psd_atol * (1 + |W|_2).
struct GramianVerdict {
  Verdict verdict;
  Gramian gramian;
};
GramianVerdict gramian_output_test(const LtiSystem& sys, double t,
                                   const ToleranceConfig& tol = {});

/// All three output controllability criteria side by side.
struct CrossCheckReport {
  Verdict kalman;
  Verdict hautus;
  Verdict gramian;
  bool agree = false;
  /// True when at least one verdict rests on a statistic within a factor of
  /// 10 of its cutoff, i.e. the instance is numerically borderline and a
  /// disagreement between criteria is explainable.
  bool near_threshold = false;
  ToleranceConfig tolerance;
  double gramian_horizon = 0.0;
};

/// Runs the Kalman, frequency-domain, and Gramian tests and reports whether
/// the decisions coincide.
CrossCheckReport cross_check(const LtiSystem& sys, double gramian_horizon = 1.0,
                             const ToleranceConfig& tol = {});

/// True when some boundary statistic of the verdict lies within [cutoff /
/// factor, cutoff * factor]; such verdicts should not be trusted to break
/// ties between criteria.
bool near_threshold(const Verdict& verdict, double factor = 10.0);

/// Sufficiency check for a parallel connection: if every member is output
/// controllable and the member spectra are pairwise disjoint, the connection
/// is output controllable.  The converse does not hold, so `applicable ==
/// false` says nothing about the connection; its own verdict is always
/// reported alongside.
struct ParallelCheck {
  bool applicable = false;
  bool disjoint_spectra = false;
  /// Smallest distance between eigenvalue clusters of different members
  /// (infinity for a single member).
  double min_spectral_gap = 0.0;
  std::vector<Verdict> member_verdicts;
  Verdict connected_verdict;
  LtiSystem connected;
};

ParallelCheck parallel_sufficiency_check(const SystemCollection& members,
                                         const ToleranceConfig& tol = {});

}  // namespace outctrl
