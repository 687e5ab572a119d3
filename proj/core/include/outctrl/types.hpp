#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace outctrl {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Base class for every error thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Matrix or vector dimensions are inconsistent.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// An argument is outside its mathematical domain (non-finite entries,
/// non-positive horizon, tolerance outside (0,1), ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An underlying matrix decomposition failed to converge.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// A randomized generator exhausted its retry budget.
class GenerationError : public Error {
 public:
  using Error::Error;
};

/// Input files that do not parse or do not match the expected schema.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A linear system `W x = b` has no solution within tolerance; carries the
/// best least-squares residual that was achieved.
class TargetUnreachableError : public Error {
 public:
  TargetUnreachableError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// Tolerances shared by all rank / spectrum / definiteness decisions.
///
/// rank_rtol scales the usual singular-value cutoff
/// `rank_rtol * max(rows, cols) * sigma_max`.  eig_cluster_atol is the base
/// radius used when merging computed eigenvalues into clusters, scaled by
/// (1 + |A|_F).  psd_atol is the floor, scaled by (1 + |W|_2), below which a
/// Hermitian eigenvalue is treated as zero.
struct ToleranceConfig {
  double rank_rtol = 2.220446049250313e-16;  // unit roundoff for double
  double eig_cluster_atol = 1e-8;
  double psd_atol = 1e-12;

  /// Throws DomainError unless every field lies strictly inside (0, 1).
  void validate() const;
};

/// One eigenvalue cluster: a representative value, the total algebraic
/// multiplicity merged into it, and a bound on how far the true eigenvalues
/// may lie from the representative.
struct EigenvalueCluster {
  Complex value;
  int multiplicity = 0;
  double uncertainty = 0.0;
};

/// Clustered spectrum of a square matrix, sorted by (real, imag).
struct Spectrum {
  std::vector<EigenvalueCluster> clusters;
  /// Schur residual |U T U^* - A|_F / max(1, |A|_F).
  double backward_error = 0.0;

  /// Sum of cluster multiplicities (equals the matrix order).
  int total_multiplicity() const;
  /// Smallest distance from z to any cluster representative.
  double distance_to(const Complex& z) const;
};

}  // namespace outctrl
