#include <linrk/linrk.hpp>

#include <benchmark/benchmark.h>

namespace {

using namespace linrk;

void BM_LuFactor(benchmark::State& state) {
    const auto n = static_cast<Index>(state.range(0));
    const Matrix m = stage_matrix(heat1d_matrix(n, 1.0), 0.01, StageForm::shifted_jacobian);
    for (auto _ : state) {
        auto lu = factor(m);
        benchmark::DoNotOptimize(lu.packed().data());
    }
}
BENCHMARK(BM_LuFactor)->Arg(20)->Arg(50)->Arg(200);

void BM_LuSolve(benchmark::State& state) {
    const auto n = static_cast<Index>(state.range(0));
    const auto lu = factor(stage_matrix(heat1d_matrix(n, 1.0), 0.01, StageForm::shifted_jacobian));
    const Vector rhs = Vector::Ones(n);
    for (auto _ : state) benchmark::DoNotOptimize(lu.solve(rhs));
}
BENCHMARK(BM_LuSolve)->Arg(20)->Arg(50)->Arg(200);

void BM_RowStep(benchmark::State& state) {
    const auto mode = state.range(0) == 0 ? StepMode::direct : StepMode::transformed;
    const auto sys = make_heat1d(100, 1.0);
    const JacobianSample jac{heat1d_matrix(100, 1.0), next_jacobian_stamp()};
    const auto t = row3n();
    const auto tt = transform(t);
    StageSolver solver;
    for (auto _ : state) {
        if (mode == StepMode::direct) {
            benchmark::DoNotOptimize(row_step(sys, t, sys.u0, 0.0, 0.01, jac, solver));
        } else {
            benchmark::DoNotOptimize(row_step(sys, tt, sys.u0, 0.0, 0.01, jac, solver));
        }
    }
    state.SetLabel(mode == StepMode::direct ? "direct" : "transformed");
}
BENCHMARK(BM_RowStep)->Arg(0)->Arg(1);

void BM_HeatIntegration(benchmark::State& state) {
    auto sys = make_heat1d(100, 1.0);
    sys.t_end = 0.1;
    IntegrationControl ctrl;
    ctrl.fixed_step = true;
    ctrl.h0 = 0.1 / 200;
    if (state.range(0) > 0) ctrl.jacobian = jacobian::Frozen{static_cast<int>(state.range(0))};
    std::size_t factorizations = 0;
    for (auto _ : state) {
        const auto tr = integrate(sys, ros2d(), ctrl);
        factorizations = tr.factorizations;
        benchmark::DoNotOptimize(tr.final_state().data());
    }
    state.counters["factorizations"] = static_cast<double>(factorizations);
}
BENCHMARK(BM_HeatIntegration)->Arg(0)->Arg(5)->Arg(20);

void BM_PeerIntegration(benchmark::State& state) {
    const auto sys = make_heat1d(100, 1.0);
    TwoStepControl ctrl;
    ctrl.n_steps = 100;
    for (auto _ : state) benchmark::DoNotOptimize(integrate_twostep(sys, peer2(), ctrl).final_state().data());
}
BENCHMARK(BM_PeerIntegration);

void BM_Classify(benchmark::State& state) {
    const auto t = row3n();
    for (auto _ : state) benchmark::DoNotOptimize(classify(t));
}
BENCHMARK(BM_Classify);

}  // namespace

BENCHMARK_MAIN();
