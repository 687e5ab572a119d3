#include "outctrl/controllability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace outctrl {

namespace {

double spectral_norm(const Matrix& M) {
  if (M.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(M);
  return svd.singularValues()(0);
}

// Shared core of both Hautus-style tests.  `pencil` maps a spectrum point z
// to the matrix whose rank is checked, `sensitivity` bounds how fast its
// singular values move per unit change of z, and `required` is the full rank.
template <typename PencilFn>
Verdict hautus_scan(const Spectrum& spectrum, PencilFn&& pencil,
                    double sensitivity, int required, Criterion criterion,
                    const ToleranceConfig& tol) {
  Verdict verdict;
  verdict.criterion = criterion;
  verdict.required_rank = required;

  // Decisive point: the one whose boundary singular value sits lowest
  // relative to its cutoff.  Any ratio <= 1 is a rank drop.
  double worst_ratio = std::numeric_limits<double>::infinity();
  bool any_failure = false;

  for (const EigenvalueCluster& cluster : spectrum.clusters) {
    const Matrix M = pencil(cluster.value);
    // An eigenvalue known only to `uncertainty` cannot certify a rank drop
    // smaller than what that perturbation could produce, so the cutoff is
    // floored accordingly (factor 4 of headroom over the first-order bound).
    const double floor = 4.0 * sensitivity * cluster.uncertainty;
    const RankResult rr = rank_of(M, tol, floor);
    const bool fails = rr.rank < required;
    const double boundary =
        (rr.singular_values.size() >= required && required >= 1)
            ? rr.singular_values(required - 1)
            : 0.0;
    const double ratio =
        rr.threshold > 0.0
            ? boundary / rr.threshold
            : (boundary > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);

    const bool better = any_failure
                            ? (fails && ratio < worst_ratio)
                            : (fails || ratio < worst_ratio);
    if (better || verdict.singular_values.size() == 0) {
      worst_ratio = ratio;
      verdict.found_rank = rr.rank;
      verdict.singular_values = rr.singular_values;
      verdict.threshold = rr.threshold;
      verdict.witness = fails ? std::optional<Complex>(cluster.value)
                              : std::nullopt;
    }
    any_failure = any_failure || fails;
  }
  verdict.controllable = !any_failure;
  if (verdict.controllable) verdict.witness.reset();
  return verdict;
}

}  // namespace

std::string to_string(Criterion criterion) {
  switch (criterion) {
    case Criterion::kKalman:
      return "kalman";
    case Criterion::kHautusOutput:
      return "hautus_output";
    case Criterion::kHautusState:
      return "hautus_state";
    case Criterion::kGramian:
      return "gramian";
  }
  throw DomainError("unknown criterion");
}

Matrix kalman_output_matrix(const LtiSystem& sys) {
  validate(sys);
  const Eigen::Index n = sys.state_dim();
  const Eigen::Index m = sys.input_dim();
  const Eigen::Index p = sys.output_dim();
  Matrix K(p, n * m);
  Matrix lead = sys.C;  // C A^k, built by iterated products
  for (Eigen::Index k = 0; k < n; ++k) {
    K.middleCols(k * m, m) = lead * sys.B;
    if (k + 1 < n) lead = lead * sys.A;
  }
  return K;
}

Verdict kalman_output_test(const LtiSystem& sys, const ToleranceConfig& tol) {
  const Matrix K = kalman_output_matrix(sys);
  const RankResult rr = rank_of(K, tol);
  Verdict verdict;
  verdict.criterion = Criterion::kKalman;
  verdict.required_rank = static_cast<int>(sys.output_dim());
  verdict.found_rank = rr.rank;
  verdict.singular_values = rr.singular_values;
  verdict.threshold = rr.threshold;
  verdict.controllable = rr.rank == verdict.required_rank;
  return verdict;
}

Verdict hautus_state_test(const LtiSystem& sys, const ToleranceConfig& tol) {
  validate(sys);
  const Eigen::Index n = sys.state_dim();
  const Eigen::Index m = sys.input_dim();
  const Spectrum spectrum = spectrum_of(sys.A, tol);
  const Matrix I = Matrix::Identity(n, n);
  auto pencil = [&](const Complex& z) {
    Matrix M(n, n + m);
    M.leftCols(n) = z * I - sys.A;
    M.rightCols(m) = sys.B;
    return M;
  };
  // d/dz [zI - A, B] = [I, 0], so singular values move at unit speed.
  return hautus_scan(spectrum, pencil, 1.0, static_cast<int>(n),
                     Criterion::kHautusState, tol);
}

Verdict hautus_output_test(const LtiSystem& sys, const ToleranceConfig& tol) {
  validate(sys);
  const Eigen::Index n = sys.state_dim();
  const Eigen::Index m = sys.input_dim();
  const Eigen::Index p = sys.output_dim();
  const Spectrum spectrum = spectrum_of(sys.A, tol);
  const Matrix CB = sys.C * sys.B;
  const Matrix CA = sys.C * sys.A;
  auto pencil = [&](const Complex& z) {
    Matrix M(p, n + m);
    M.leftCols(n) = z * sys.C - CA;  // C (zI - A)
    M.rightCols(m) = CB;
    return M;
  };
  // d/dz [C(zI - A), CB] = [C, 0]; |C|_2 bounds the singular value drift.
  return hautus_scan(spectrum, pencil, spectral_norm(sys.C),
                     static_cast<int>(p), Criterion::kHautusOutput, tol);
}

GramianVerdict gramian_output_test(const LtiSystem& sys, double t,
                                   const ToleranceConfig& tol) {
  validate(sys);
  tol.validate();
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw DomainError("Gramian horizon must be positive and finite");
  }
  const Eigen::Index p = sys.output_dim();

  const Matrix P = state_gramian(sys.A, sys.B, t);
  Matrix W = sys.C * P * sys.C.adjoint();
  W = 0.5 * (W + W.adjoint()).eval();

  Eigen::SelfAdjointEigenSolver<Matrix> es(W);
  if (es.info() != Eigen::Success) {
    throw NumericError("Hermitian eigenvalue iteration did not converge");
  }

  GramianVerdict out;
  out.gramian.W = W;
  out.gramian.horizon = t;
  out.gramian.eigenvalues = es.eigenvalues().reverse();  // descending
  out.gramian.eigenvectors = es.eigenvectors().rowwise().reverse();

  const RealVector& lambda = out.gramian.eigenvalues;
  const double scale = std::max(std::abs(lambda(0)), std::abs(lambda(p - 1)));
  const double floor = tol.psd_atol * (1.0 + scale);

  Verdict& v = out.verdict;
  v.criterion = Criterion::kGramian;
  v.required_rank = static_cast<int>(p);
  v.found_rank = static_cast<int>((lambda.array() > floor).count());
  v.singular_values = lambda;
  v.threshold = floor;
  v.controllable = lambda(p - 1) > floor;
  return out;
}

bool near_threshold(const Verdict& verdict, double factor) {
  if (!(factor > 1.0)) {
    throw DomainError("near-threshold factor must exceed 1");
  }
  if (verdict.threshold <= 0.0) return false;  // decision was exact
  const double lo = verdict.threshold / factor;
  const double hi = verdict.threshold * factor;
  for (Eigen::Index i = 0; i < verdict.singular_values.size(); ++i) {
    const double v = std::abs(verdict.singular_values(i));
    if (v >= lo && v <= hi) return true;
  }
  return false;
}

CrossCheckReport cross_check(const LtiSystem& sys, double gramian_horizon,
                             const ToleranceConfig& tol) {
  CrossCheckReport report;
  report.kalman = kalman_output_test(sys, tol);
  report.hautus = hautus_output_test(sys, tol);
  report.gramian = gramian_output_test(sys, gramian_horizon, tol).verdict;
  report.agree =
      report.kalman.controllable == report.hautus.controllable &&
      report.hautus.controllable == report.gramian.controllable;
  report.near_threshold = near_threshold(report.kalman) ||
                          near_threshold(report.hautus) ||
                          near_threshold(report.gramian);
  report.tolerance = tol;
  report.gramian_horizon = gramian_horizon;
  return report;
}

ParallelCheck parallel_sufficiency_check(const SystemCollection& members,
                                         const ToleranceConfig& tol) {
  ParallelCheck check;
  check.connected = parallel_connect(members);

  std::vector<Spectrum> spectra;
  spectra.reserve(members.size());
  double max_norm = 0.0;
  bool all_members_pass = true;
  for (const LtiSystem& sys : members) {
    check.member_verdicts.push_back(hautus_output_test(sys, tol));
    all_members_pass =
        all_members_pass && check.member_verdicts.back().controllable;
    spectra.push_back(spectrum_of(sys.A, tol));
    max_norm = std::max(max_norm, sys.A.norm());
  }

  // Spectra are disjoint when every cross-member cluster pair is separated
  // by more than the merge radius the clustering itself would have used.
  const double base_radius = tol.eig_cluster_atol * (1.0 + max_norm);
  double min_gap = std::numeric_limits<double>::infinity();
  bool disjoint = true;
  for (size_t a = 0; a + 1 < spectra.size(); ++a) {
    for (size_t b = a + 1; b < spectra.size(); ++b) {
      for (const auto& ca : spectra[a].clusters) {
        for (const auto& cb : spectra[b].clusters) {
          const double gap = std::abs(ca.value - cb.value);
          min_gap = std::min(min_gap, gap);
          const double radius =
              std::max(base_radius, ca.uncertainty + cb.uncertainty);
          if (gap <= radius) disjoint = false;
        }
      }
    }
  }
  check.min_spectral_gap = min_gap;
  check.disjoint_spectra = disjoint;
  check.applicable = disjoint && all_members_pass;
  check.connected_verdict = hautus_output_test(check.connected, tol);
  return check;
}

}  // namespace outctrl
