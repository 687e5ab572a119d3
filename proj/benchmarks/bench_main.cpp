#include <benchmark/benchmark.h>

#include "outctrl/controllability.hpp"
#include "outctrl/lti_model.hpp"
#include "outctrl/numerics.hpp"
#include "outctrl/synthesis.hpp"

namespace {

using namespace outctrl;

void BM_Expm(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const Matrix A = random_gaussian_matrix(n, n, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(expm(A));
  }
}
BENCHMARK(BM_Expm)->Arg(4)->Arg(8)->Arg(16)->Arg(32);

void BM_StateGramian(benchmark::State& state) {
  const LtiSystem sys = random_system(6, 3, 3, 2);
  const double t = static_cast<double>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(state_gramian(sys.A, sys.B, t));
  }
}
BENCHMARK(BM_StateGramian)->Arg(1)->Arg(10);

void BM_SpectrumOf(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const Matrix A = random_gaussian_matrix(n, n, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(spectrum_of(A));
  }
}
BENCHMARK(BM_SpectrumOf)->Arg(6)->Arg(16);

void BM_HautusOutputTest(benchmark::State& state) {
  const LtiSystem sys = random_system(6, 4, 4, 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(hautus_output_test(sys));
  }
}
BENCHMARK(BM_HautusOutputTest);

void BM_CrossCheck(benchmark::State& state) {
  const LtiSystem sys = random_system(6, 4, 4, 5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(cross_check(sys));
  }
}
BENCHMARK(BM_CrossCheck);

void BM_MinNormControl(benchmark::State& state) {
  LtiSystem sys =
      random_system(4, 3, 2, 6, SystemKind::kForcedOutputControllable);
  if (sys.A.norm() > 2.0) sys.A *= 2.0 / sys.A.norm();
  SteeringProblem prob;
  prob.sys = sys;
  prob.x0 = Vector::Zero(4);
  prob.y_target = Vector::Ones(2);
  prob.horizon = 1.0;
  const int nodes = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(min_norm_control(prob, nodes));
  }
}
BENCHMARK(BM_MinNormControl)->Arg(65)->Arg(257);

void BM_Simulate(benchmark::State& state) {
  const LtiSystem sys = random_system(5, 3, 2, 7);
  const ControlSignal u = constant_control(1.0, static_cast<int>(state.range(0)),
                                           Vector::Ones(3));
  const Vector x0 = Vector::Ones(5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate(sys, u, x0));
  }
}
BENCHMARK(BM_Simulate)->Arg(65)->Arg(257);

}  // namespace

BENCHMARK_MAIN();
