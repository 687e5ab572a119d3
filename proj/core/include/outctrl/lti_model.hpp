#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "outctrl/types.hpp"

namespace outctrl {

/// Continuous-time linear time-invariant system
///   x' = A x + B u,   y = C x
/// with complex state dimension n, input dimension m, output dimension p.
struct LtiSystem {
  Matrix A;  // n x n
  Matrix B;  // n x m
  Matrix C;  // p x n
  std::string name;

  Eigen::Index state_dim() const { return A.rows(); }
  Eigen::Index input_dim() const { return B.cols(); }
  Eigen::Index output_dim() const { return C.rows(); }
};

using SystemCollection = std::vector<LtiSystem>;

/// Throws DimensionError if the shapes of A, B, C are inconsistent or any
/// dimension is zero, and DomainError if any entry is non-finite.
void validate(const LtiSystem& sys);

/// Parallel connection of systems sharing one input: block-diagonal A and C,
/// vertically stacked B.  All members must have the same input dimension.
LtiSystem parallel_connect(const SystemCollection& members);

/// Flavours of randomly generated test systems.
enum class SystemKind {
  /// Independent complex Gaussian entries everywhere.
  kGeneric,
  /// C is forced to have rank < p, so the output map itself is deficient.
  kRankDeficientC,
  /// Resampled until the output controllability rank test passes; requires
  /// m >= p.
  kForcedOutputControllable,
  /// A is built from Jordan blocks with repeated eigenvalues via a
  /// well-conditioned similarity, so the spectrum is intentionally defective.
  kJordan,
};

/// Deterministic random system: the same (n, m, p, seed, kind) always yields
/// the same system, independent of platform.
LtiSystem random_system(int n, int m, int p, std::uint64_t seed,
                        SystemKind kind = SystemKind::kGeneric);

/// Matrix of independent circular complex Gaussians (unit variance),
/// reproducible from the seed.  Useful for building test ensembles.
Matrix random_gaussian_matrix(Eigen::Index rows, Eigen::Index cols,
                              std::uint64_t seed);

/// Derives an independent sub-seed from (seed, index); used to give each
/// sample of an ensemble its own deterministic stream.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

/// Name used in CLI flags and reports for each generator kind.
std::string to_string(SystemKind kind);
SystemKind system_kind_from_string(const std::string& name);

/// JSON representation: {"name": ..., "A": [[...]], "B": ..., "C": ...},
/// where each matrix entry is either a plain number (real) or a two-element
/// array [re, im].
nlohmann::json to_json(const LtiSystem& sys);
LtiSystem system_from_json(const nlohmann::json& j);

/// File round trip; load validates the parsed system.  Parse and schema
/// problems surface as ParseError with file and field context.
LtiSystem load_system(const std::filesystem::path& path);
void save_system(const LtiSystem& sys, const std::filesystem::path& path);

}  // namespace outctrl
