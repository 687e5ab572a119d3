#include "outctrl/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/LU>

#include "outctrl/numerics.hpp"

namespace outctrl {

namespace {

constexpr int kBlock = 4;  // intervals per interpolation block
constexpr double kFactorial[5] = {1.0, 1.0, 2.0, 6.0, 24.0};

// Maps the five samples of a block (at local abscissae x = 0..4) to the
// monomial coefficients of the interpolating quartic: inverse of the
// Vandermonde matrix V(j, k) = j^k.
const Eigen::Matrix<double, 5, 5>& vandermonde_inverse() {
  static const Eigen::Matrix<double, 5, 5> inv = [] {
    Eigen::Matrix<double, 5, 5> V;
    for (int j = 0; j < 5; ++j) {
      for (int k = 0; k < 5; ++k) {
        V(j, k) = std::pow(static_cast<double>(j), k);
      }
    }
    return Eigen::Matrix<double, 5, 5>(V.inverse());
  }();
  return inv;
}

void check_node_count(Eigen::Index count) {
  if (count < kBlock + 1 || (count - 1) % kBlock != 0) {
    std::ostringstream os;
    os << "control grid needs 4k+1 nodes with k >= 1, got " << count;
    throw DomainError(os.str());
  }
}

void check_grid(const ControlSignal& signal) {
  if (!(signal.horizon > 0.0) || !std::isfinite(signal.horizon)) {
    throw DomainError("control horizon must be positive and finite");
  }
  const Eigen::Index count = signal.nodes.size();
  check_node_count(count);
  if (static_cast<Eigen::Index>(signal.samples.size()) != count) {
    std::ostringstream os;
    os << "control has " << signal.samples.size() << " samples for " << count
       << " nodes";
    throw DimensionError(os.str());
  }
  const double h = signal.horizon / static_cast<double>(count - 1);
  const double slack = 1e-9 * std::max(1.0, signal.horizon);
  for (Eigen::Index j = 0; j < count; ++j) {
    if (std::abs(signal.nodes(j) - static_cast<double>(j) * h) > slack) {
      throw DomainError("control grid must be uniform over [0, horizon]");
    }
  }
  const Eigen::Index m = signal.samples.front().size();
  if (m < 1) throw DimensionError("control samples must be non-empty");
  for (const Vector& u : signal.samples) {
    if (u.size() != m) {
      throw DimensionError("control samples have inconsistent dimensions");
    }
    require_finite(u, "control sample");
  }
}

RealVector uniform_nodes(double horizon, Eigen::Index count) {
  RealVector nodes(count);
  const double h = horizon / static_cast<double>(count - 1);
  for (Eigen::Index j = 0; j < count; ++j) {
    nodes(j) = static_cast<double>(j) * h;
  }
  nodes(count - 1) = horizon;
  return nodes;
}

// Monomial coefficients (rows k = 0..4, one column per input channel) of the
// quartic through the five samples starting at `base`.
Matrix block_coefficients(const ControlSignal& signal, Eigen::Index base) {
  const Eigen::Index m = signal.samples.front().size();
  Matrix S(5, m);
  for (int i = 0; i < 5; ++i) {
    S.row(i) = signal.samples[static_cast<size_t>(base + i)].transpose();
  }
  return vandermonde_inverse().cast<Complex>() * S;
}

// Composite quadrature weights matching the degree-4 blocks:
// (2h/45) * [7, 32, 12, 32, 7] on each block, shared nodes accumulated.
RealVector composite_weights(Eigen::Index count, double h) {
  static const double pattern[5] = {7.0, 32.0, 12.0, 32.0, 7.0};
  RealVector w = RealVector::Zero(count);
  for (Eigen::Index base = 0; base + kBlock < count + 1; base += kBlock) {
    for (int i = 0; i < 5; ++i) {
      w(base + i) += pattern[i] * 2.0 * h / 45.0;
    }
  }
  return w;
}

}  // namespace

ControlSignal sampled_control(double horizon, int nodes,
                              const std::function<Vector(double)>& u) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw DomainError("control horizon must be positive and finite");
  }
  check_node_count(nodes);
  ControlSignal signal;
  signal.horizon = horizon;
  signal.nodes = uniform_nodes(horizon, nodes);
  signal.samples.reserve(static_cast<size_t>(nodes));
  for (Eigen::Index j = 0; j < nodes; ++j) {
    signal.samples.push_back(u(signal.nodes(j)));
  }
  check_grid(signal);
  return signal;
}

ControlSignal constant_control(double horizon, int nodes,
                               const Vector& value) {
  return sampled_control(horizon, nodes, [&value](double) { return value; });
}

Trajectory simulate(const LtiSystem& sys, const ControlSignal& u,
                    const Vector& x0) {
  validate(sys);
  check_grid(u);
  const Eigen::Index n = sys.state_dim();
  const Eigen::Index m = sys.input_dim();
  if (u.samples.front().size() != m) {
    std::ostringstream os;
    os << "control sample dimension " << u.samples.front().size()
       << " does not match system input dimension " << m;
    throw DimensionError(os.str());
  }
  if (x0.size() != n) {
    std::ostringstream os;
    os << "initial state has length " << x0.size()
       << ", expected state dimension " << n;
    throw DimensionError(os.str());
  }
  require_finite(x0, "initial state");

  const Eigen::Index count = u.nodes.size();
  const double h = u.horizon / static_cast<double>(count - 1);

  // Augment the state with the input interpolant: w_k carries the k-th
  // derivative weights, chained so that w_0(tau) reproduces the quartic.
  // One exponential of the augmented generator advances x across a grid
  // interval with no further time-stepping error.
  const Eigen::Index dim = n + 5 * m;
  Matrix H = Matrix::Zero(dim, dim);
  H.topLeftCorner(n, n) = sys.A;
  H.block(0, n, n, m) = sys.B;
  for (int k = 0; k < 4; ++k) {
    H.block(n + k * m, n + (k + 1) * m, m, m) = Matrix::Identity(m, m);
  }
  const Matrix E = expm(H * h);

  Trajectory traj;
  traj.times = u.nodes;
  traj.states.reserve(static_cast<size_t>(count));
  traj.outputs.reserve(static_cast<size_t>(count));
  Vector x = x0;
  traj.states.push_back(x);
  traj.outputs.push_back(sys.C * x);

  Vector z(dim);
  for (Eigen::Index base = 0; base + kBlock < count + 1; base += kBlock) {
    const Matrix coeff = block_coefficients(u, base);
    z.head(n) = x;
    for (int k = 0; k < 5; ++k) {
      // Local polynomial sum c_k (tau/h)^k rewritten as
      // sum w_k tau^k / k! with w_k = c_k k! / h^k.
      z.segment(n + k * m, m) =
          coeff.row(k).transpose() * (kFactorial[k] / std::pow(h, k));
    }
    for (int step = 0; step < kBlock; ++step) {
      z = E * z;
      x = z.head(n);
      traj.states.push_back(x);
      traj.outputs.push_back(sys.C * x);
    }
  }
  return traj;
}

SteeringResult min_norm_control(const SteeringProblem& problem, int nodes,
                                const ToleranceConfig& tol) {
  validate(problem.sys);
  tol.validate();
  const Eigen::Index n = problem.sys.state_dim();
  const Eigen::Index m = problem.sys.input_dim();
  const Eigen::Index p = problem.sys.output_dim();
  if (problem.x0.size() != n) {
    throw DimensionError("initial state does not match the state dimension");
  }
  if (problem.y_target.size() != p) {
    throw DimensionError("target does not match the output dimension");
  }
  require_finite(problem.x0, "initial state");
  require_finite(problem.y_target, "target output");
  if (!(problem.horizon > 0.0) || !std::isfinite(problem.horizon)) {
    throw DomainError("steering horizon must be positive and finite");
  }
  check_node_count(nodes);

  const Verdict gate = hautus_output_test(problem.sys, tol);
  if (!gate.controllable) {
    throw NotOutputControllableError(
        "synthesis refused: the frequency-domain output controllability "
        "test failed",
        gate);
  }

  const double T = problem.horizon;
  const Matrix& A = problem.sys.A;
  const Matrix& B = problem.sys.B;
  const Matrix& C = problem.sys.C;

  // Gramian equation W eta = y_target - C e^{TA} x0.
  const Vector drift = C * (expm(A * T) * problem.x0);
  const Vector gap = problem.y_target - drift;
  const Matrix P = state_gramian(A, B, T);
  Matrix W = C * P * C.adjoint();
  W = 0.5 * (W + W.adjoint()).eval();
  Vector eta;
  try {
    eta = solve_hermitian(W, gap, tol).solution;
  } catch (const TargetUnreachableError& e) {
    throw TargetUnreachableError(
        std::string("steering target is outside the reachable output set: ") +
            e.what(),
        e.residual());
  }

  // Minimum-energy control u(s) = B^* e^{(T-s) A^*} C^* eta, sampled by
  // stepping the adjoint propagator backwards across the grid.
  SteeringResult result;
  result.control.horizon = T;
  result.control.nodes = uniform_nodes(T, nodes);
  result.control.samples.assign(static_cast<size_t>(nodes), Vector(m));
  const double h = T / static_cast<double>(nodes - 1);
  const Matrix step = expm(A.adjoint() * h);
  Vector costate = C.adjoint() * eta;  // e^{(T-s) A^*} C^* eta at s = T
  result.control.samples[static_cast<size_t>(nodes - 1)] =
      B.adjoint() * costate;
  for (Eigen::Index j = nodes - 2; j >= 0; --j) {
    costate = step * costate;
    result.control.samples[static_cast<size_t>(j)] = B.adjoint() * costate;
  }

  const Trajectory traj = simulate(problem.sys, result.control, problem.x0);
  result.predicted_output = traj.outputs.back();
  result.residual = (result.predicted_output - problem.y_target).norm();

  const RealVector weights = composite_weights(nodes, h);
  double energy = 0.0;
  for (Eigen::Index j = 0; j < nodes; ++j) {
    energy += weights(j) *
              result.control.samples[static_cast<size_t>(j)].squaredNorm();
  }
  result.energy = energy;
  return result;
}

bool verify_steering(const SteeringProblem& problem,
                     const SteeringResult& result, double rtol) {
  if (!(rtol > 0.0) || !std::isfinite(rtol)) {
    throw DomainError("verification tolerance must be positive and finite");
  }
  const ControlSignal fine = refine(result.control);
  const Trajectory traj = simulate(problem.sys, fine, problem.x0);
  const double error = (traj.outputs.back() - problem.y_target).norm();
  return error <= rtol * (1.0 + problem.y_target.norm());
}

ControlSignal refine(const ControlSignal& signal) {
  check_grid(signal);
  const Eigen::Index count = signal.nodes.size();
  const Eigen::Index fine_count = 2 * (count - 1) + 1;

  ControlSignal fine;
  fine.horizon = signal.horizon;
  fine.nodes = uniform_nodes(signal.horizon, fine_count);
  fine.samples.resize(static_cast<size_t>(fine_count));
  for (Eigen::Index base = 0; base + kBlock < count + 1; base += kBlock) {
    const Matrix coeff = block_coefficients(signal, base);
    for (int half = 0; half <= 2 * kBlock; ++half) {
      const Eigen::Index g = 2 * base + half;
      if (half % 2 == 0) {
        // Original nodes carry over exactly.
        fine.samples[static_cast<size_t>(g)] =
            signal.samples[static_cast<size_t>(base + half / 2)];
        continue;
      }
      const double x = 0.5 * static_cast<double>(half);
      Vector value = coeff.row(4).transpose();
      for (int k = 3; k >= 0; --k) {
        value = value * x + coeff.row(k).transpose();
      }
      fine.samples[static_cast<size_t>(g)] = value;
    }
  }
  return fine;
}

}  // namespace outctrl
