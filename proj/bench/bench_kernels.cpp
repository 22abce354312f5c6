// Serial vs OpenMP kernels. Thread count comes from OMP_NUM_THREADS.
#include <benchmark/benchmark.h>

#include "ks/dynamics.hpp"
#include "ks/spectral.hpp"
#include "ks/traveling_wave.hpp"

namespace {

const ks::TravelingWave& wave() {
    static const ks::TravelingWave tw = ks::exact_tw(0.05, 50, ks::Grid(256));
    return tw;
}

const Eigen::MatrixXd& tc() {
    static const Eigen::MatrixXd A = ks::assemble_t_c(wave(), 64, 1024).A;
    return A;
}

void BM_TcD_Serial(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(ks::assemble_t_c_d_serial(wave(), static_cast<int>(st.range(0)), 1024));
}
void BM_TcD_Parallel(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(ks::assemble_t_c_d(wave(), static_cast<int>(st.range(0)), 1024));
}

// A 6 x 11 slice of the default resolvent grid.
const std::vector<double> kRe = {0, 10, 20, 30, 40, 50};
const std::vector<double> kIm = {-200, -50, -10, -1, -0.1, 0, 0.1, 1, 10, 50, 200};

void BM_Resolvent_Serial(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(ks::resolvent_grid_serial(tc(), kRe, kIm));
}
void BM_Resolvent_Parallel(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(ks::resolvent_grid(tc(), kRe, kIm));
}

void BM_StepC(benchmark::State& st) {
    const ks::Grid g(static_cast<int>(st.range(0)));
    const auto p = ks::ModelParams::model_c(1, 5);
    ks::CellState s{ks::axpby(1, ks::Field::constant(g, 1, ks::FieldKind::myosin), 1e-3, ks::band_limited(g, 1))};
    const double dt = ks::dt_max(s, p);
    for (auto _ : st) s = ks::step_c(s, p, dt);
}

}  // namespace

BENCHMARK(BM_TcD_Serial)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TcD_Parallel)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Resolvent_Serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Resolvent_Parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_StepC)->Arg(256)->Arg(1024)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
