#pragma once

#include <filesystem>
#include <functional>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "outctrl/controllability.hpp"
#include "outctrl/lti_model.hpp"
#include "outctrl/types.hpp"

namespace outctrl {

/// Sampled control trajectory on a uniform grid over [0, horizon].  The node
/// count N satisfies N >= 5 and (N - 1) % 4 == 0: the simulator integrates
/// the samples through a degree-4 interpolant on each block of four
/// intervals, and the grid must close an integral number of blocks.
struct ControlSignal {
  double horizon = 0.0;
  RealVector nodes;             // N ascending times, 0 to horizon
  std::vector<Vector> samples;  // N input vectors of dimension m
};

/// Uniform grid with the sample at each node supplied by a callback.
ControlSignal sampled_control(double horizon, int nodes,
                              const std::function<Vector(double)>& u);

/// Uniform grid holding one constant input value.
ControlSignal constant_control(double horizon, int nodes, const Vector& value);

/// State/output trajectory produced by the simulator, one entry per grid
/// node.
struct Trajectory {
  RealVector times;
  std::vector<Vector> states;
  std::vector<Vector> outputs;
};

/// Integrates x' = A x + B u(t), y = C x from x(0) = x0 across the control
/// grid.  Each block of four intervals is advanced with a single augmented
/// matrix exponential that carries the degree-4 interpolant of u exactly, so
/// the only discretization error is polynomial interpolation of the input
/// (global order 5; exact for polynomial inputs of degree <= 4).
Trajectory simulate(const LtiSystem& sys, const ControlSignal& u,
                    const Vector& x0);

/// Output steering task: drive y(horizon) to y_target starting from x0.
struct SteeringProblem {
  LtiSystem sys;
  Vector x0;
  Vector y_target;
  double horizon = 0.0;
};

/// Thrown when synthesis is refused because the frequency-domain test judged
/// the system not output controllable; carries that verdict.
class NotOutputControllableError : public Error {
 public:
  NotOutputControllableError(const std::string& what, Verdict verdict)
      : Error(what), verdict_(std::move(verdict)) {}
  const Verdict& verdict() const { return verdict_; }

 private:
  Verdict verdict_;
};

/// Minimum-norm steering control and its predicted effect.
struct SteeringResult {
  ControlSignal control;
  /// Simulated y(horizon) under the synthesized control.
  Vector predicted_output;
  /// |predicted_output - y_target|.
  double residual = 0.0;
  /// Energy integral_0^T |u(s)|^2 ds of the sampled control.
  double energy = 0.0;
};

/// Synthesizes the minimum-energy control
///   u(s) = B^* e^{(T-s) A^*} C^* eta,   W(T) eta = y_target - C e^{TA} x0,
/// sampled on a uniform grid with `nodes` points, and simulates it to report
/// the achieved output.  Throws NotOutputControllableError when the
/// frequency-domain test fails, and TargetUnreachableError when the target
/// lies outside the range of a singular output Gramian.
SteeringResult min_norm_control(const SteeringProblem& problem, int nodes = 257,
                                const ToleranceConfig& tol = {});

/// Re-simulates the synthesized control on a once-refined grid (intervals
/// halved, samples taken from the stored interpolant) and accepts when
/// |y(T) - y_target| <= rtol * (1 + |y_target|).
bool verify_steering(const SteeringProblem& problem,
                     const SteeringResult& result, double rtol = 1e-6);

/// Grid with intervals halved; new samples are evaluated from the per-block
/// degree-4 interpolant of the original signal.
ControlSignal refine(const ControlSignal& signal);

/// JSON representation {"T": ..., "nodes": [...], "samples": [[...], ...]}
/// with entries either plain numbers or [re, im] pairs.
nlohmann::json to_json(const ControlSignal& signal);
ControlSignal control_from_json(const nlohmann::json& j);
ControlSignal load_control(const std::filesystem::path& path);
void save_control(const ControlSignal& signal,
                  const std::filesystem::path& path);

}  // namespace outctrl
