#include "outctrl/lti_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "outctrl/numerics.hpp"
#include "rng.hpp"

namespace outctrl {

namespace {

constexpr int kRetryBudget = 64;

// Largest state-matrix norm the generators hand out.  Downstream Gramians
// exponentiate A, so runaway norms turn into overflow long before they turn
// into interesting test cases.
constexpr double kMaxStateNorm = 8.0;

bool kalman_output_rank_full(const Matrix& A, const Matrix& B,
                             const Matrix& C) {
  const Eigen::Index n = A.rows();
  const Eigen::Index m = B.cols();
  const Eigen::Index p = C.rows();
  Matrix K(p, n * m);
  Matrix lead = C;  // C A^k as k advances
  for (Eigen::Index k = 0; k < n; ++k) {
    K.middleCols(k * m, m) = lead * B;
    if (k + 1 < n) lead = lead * A;
  }
  return rank_of(K).rank == p;
}

}  // namespace

void validate(const LtiSystem& sys) {
  const Eigen::Index n = sys.A.rows();
  if (sys.A.cols() != n) {
    std::ostringstream os;
    os << "A must be square, got " << sys.A.rows() << "x" << sys.A.cols();
    throw DimensionError(os.str());
  }
  if (n < 1 || sys.B.cols() < 1 || sys.C.rows() < 1) {
    throw DimensionError("system dimensions must all be at least 1");
  }
  if (sys.B.rows() != n) {
    std::ostringstream os;
    os << "B has " << sys.B.rows() << " rows, expected state dimension " << n;
    throw DimensionError(os.str());
  }
  if (sys.C.cols() != n) {
    std::ostringstream os;
    os << "C has " << sys.C.cols() << " columns, expected state dimension "
       << n;
    throw DimensionError(os.str());
  }
  require_finite(sys.A, "A");
  require_finite(sys.B, "B");
  require_finite(sys.C, "C");
}

LtiSystem parallel_connect(const SystemCollection& members) {
  if (members.empty()) {
    throw DomainError("parallel connection needs at least one member");
  }
  const Eigen::Index m = members.front().B.cols();
  Eigen::Index n_total = 0;
  Eigen::Index p_total = 0;
  for (size_t i = 0; i < members.size(); ++i) {
    validate(members[i]);
    if (members[i].B.cols() != m) {
      std::ostringstream os;
      os << "parallel connection requires a common input dimension: member 0"
         << " has m=" << m << " but member " << i << " has m="
         << members[i].B.cols();
      throw DimensionError(os.str());
    }
    n_total += members[i].state_dim();
    p_total += members[i].output_dim();
  }

  LtiSystem out;
  out.A = Matrix::Zero(n_total, n_total);
  out.B = Matrix::Zero(n_total, m);
  out.C = Matrix::Zero(p_total, n_total);
  Eigen::Index row_n = 0;
  Eigen::Index row_p = 0;
  std::string joined;
  for (const LtiSystem& sys : members) {
    const Eigen::Index n_i = sys.state_dim();
    const Eigen::Index p_i = sys.output_dim();
    out.A.block(row_n, row_n, n_i, n_i) = sys.A;
    out.B.middleRows(row_n, n_i) = sys.B;
    out.C.block(row_p, row_n, p_i, n_i) = sys.C;
    row_n += n_i;
    row_p += p_i;
    if (!sys.name.empty()) {
      if (!joined.empty()) joined += "+";
      joined += sys.name;
    }
  }
  out.name = joined;
  return out;
}

LtiSystem random_system(int n, int m, int p, std::uint64_t seed,
                        SystemKind kind) {
  if (n < 1 || m < 1 || p < 1) {
    throw DomainError("system dimensions must all be at least 1");
  }
  internal::GaussianStream rng(seed);
  LtiSystem sys;

  switch (kind) {
    case SystemKind::kGeneric: {
      sys.A = rng.matrix(n, n);
      sys.B = rng.matrix(n, m);
      sys.C = rng.matrix(p, n);
      break;
    }
    case SystemKind::kRankDeficientC: {
      sys.A = rng.matrix(n, n);
      sys.B = rng.matrix(n, m);
      if (p == 1) {
        sys.C = Matrix::Zero(1, n);
      } else {
        sys.C = rng.matrix(p, p - 1) * rng.matrix(p - 1, n);
      }
      break;
    }
    case SystemKind::kForcedOutputControllable: {
      if (m < p) {
        throw GenerationError(
            "forced output-controllable systems need input dimension >= "
            "output dimension");
      }
      if (n < p) {
        // rank C <= n caps the Kalman rank, so p > n is unsatisfiable.
        throw GenerationError(
            "forced output-controllable systems need state dimension >= "
            "output dimension");
      }
      bool done = false;
      for (int attempt = 0; attempt < kRetryBudget && !done; ++attempt) {
        sys.A = rng.matrix(n, n);
        sys.C = rng.matrix(p, n);
        // B = C^* R puts full-rank inputs squarely inside the output map.
        sys.B = sys.C.adjoint() * rng.matrix(p, m);
        done = kalman_output_rank_full(sys.A, sys.B, sys.C);
      }
      if (!done) {
        throw GenerationError(
            "could not generate an output-controllable system within the "
            "retry budget");
      }
      break;
    }
    case SystemKind::kJordan: {
      // A couple of distinct eigenvalues, each spread over Jordan blocks, so
      // the spectrum has genuine multiplicity (defective once a block has
      // size >= 2).
      const int distinct = (n <= 2) ? 1 : 2;
      std::vector<Complex> values(distinct);
      for (int i = 0; i < distinct; ++i) {
        values[i] = 2.0 * rng.complex_normal();
      }
      std::vector<int> sizes;
      int remaining = n;
      while (remaining > 0) {
        const int block = 1 + static_cast<int>(rng.below(
                                  static_cast<std::uint64_t>(
                                      std::min(3, remaining))));
        sizes.push_back(block);
        remaining -= block;
      }
      Matrix J = Matrix::Zero(n, n);
      int offset = 0;
      for (size_t b = 0; b < sizes.size(); ++b) {
        const Complex lambda = values[b % values.size()];
        for (int i = 0; i < sizes[b]; ++i) {
          J(offset + i, offset + i) = lambda;
          if (i + 1 < sizes[b]) J(offset + i, offset + i + 1) = 1.0;
        }
        offset += sizes[b];
      }
      // Well-conditioned similarity keeps the intended structure visible.
      Matrix T;
      bool found = false;
      for (int attempt = 0; attempt < kRetryBudget && !found; ++attempt) {
        T = rng.matrix(n, n);
        Eigen::JacobiSVD<Matrix> svd(T);
        const double smin = svd.singularValues().minCoeff();
        if (smin > 0.0 && svd.singularValues().maxCoeff() <= 100.0 * smin) {
          found = true;
        }
      }
      if (!found) {
        throw GenerationError(
            "could not draw a well-conditioned similarity within the retry "
            "budget");
      }
      sys.A = T * J * T.partialPivLu().inverse();
      if (sys.A.norm() > kMaxStateNorm) {
        sys.A *= kMaxStateNorm / sys.A.norm();
      }
      sys.B = rng.matrix(n, m);
      sys.C = rng.matrix(p, n);
      break;
    }
  }
  validate(sys);
  return sys;
}

Matrix random_gaussian_matrix(Eigen::Index rows, Eigen::Index cols,
                              std::uint64_t seed) {
  if (rows < 0 || cols < 0) {
    throw DomainError("matrix dimensions must be non-negative");
  }
  internal::GaussianStream rng(seed);
  return rng.matrix(rows, cols);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 step keyed by the index; decorrelates per-sample streams.
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::string to_string(SystemKind kind) {
  switch (kind) {
    case SystemKind::kGeneric:
      return "generic";
    case SystemKind::kRankDeficientC:
      return "rank_deficient_C";
    case SystemKind::kForcedOutputControllable:
      return "forced_output_controllable";
    case SystemKind::kJordan:
      return "jordan";
  }
  throw DomainError("unknown system kind");
}

SystemKind system_kind_from_string(const std::string& name) {
  if (name == "generic") return SystemKind::kGeneric;
  if (name == "rank_deficient_C") return SystemKind::kRankDeficientC;
  if (name == "forced_output_controllable") {
    return SystemKind::kForcedOutputControllable;
  }
  if (name == "jordan") return SystemKind::kJordan;
  throw DomainError("unknown system kind '" + name +
                    "' (expected generic, rank_deficient_C, "
                    "forced_output_controllable, or jordan)");
}

}  // namespace outctrl
