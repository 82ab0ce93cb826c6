#include <benchmark/benchmark.h>

#include <random>

#include "rns/attractor.hpp"
#include "rns/dynamics.hpp"

using namespace rns;
using spectral::GalerkinModel;
using spectral::StateVector;

namespace {

StateVector random_state(const GalerkinModel& m, std::mt19937& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    StateVector u(m.n_modes());
    for (auto& x : u.c) x = g(rng);
    return u;
}

dynamics::DiffusionSpec additive_spec() {
    dynamics::DiffusionSpec spec;
    spec.eta2.push_back({{1, 0, 0}, 0.3, 0.0});
    spec.eta2.push_back({{0, 1, 0}, 0.0, 0.2});
    return spec;
}

} // namespace

static void BM_ColoredNoiseBuild(benchmark::State& state) {
    const auto samples = static_cast<double>(state.range(0));
    const double dt = 0.001;
    const noise::WienerPath path =
        noise::sample_wiener(1, -samples * dt / 2.0, samples * dt / 2.0, dt);
    for (auto _ : state) {
        noise::NoiseProcess proc(path, 0.5);
        benchmark::DoNotOptimize(proc.zeta_at(path.size() / 2));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ColoredNoiseBuild)->Arg(10000)->Arg(100000);

static void BM_TrilinearForm(benchmark::State& state) {
    const GalerkinModel m =
        spectral::build_torus_model(3, static_cast<int>(state.range(0)), 1.0);
    std::mt19937 rng(1);
    const StateVector u = random_state(m, rng);
    const StateVector v = random_state(m, rng);
    const StateVector w = random_state(m, rng);
    for (auto _ : state) benchmark::DoNotOptimize(spectral::trilinear_b(m, u, v, w));
}
BENCHMARK(BM_TrilinearForm)->Arg(1)->Arg(2)->Arg(3)->Arg(4);

static void BM_NonlinearTerm(benchmark::State& state) {
    const GalerkinModel m =
        spectral::build_torus_model(3, static_cast<int>(state.range(0)), 1.0);
    std::mt19937 rng(2);
    const StateVector u = random_state(m, rng);
    for (auto _ : state) benchmark::DoNotOptimize(spectral::nonlinear_term(m, u));
}
BENCHMARK(BM_NonlinearTerm)->Arg(1)->Arg(2)->Arg(4);

static void BM_StepAdditive(benchmark::State& state) {
    const GalerkinModel m = spectral::build_torus_model(3, 1, 1.0);
    const dynamics::DiffusionOperator G(m, additive_spec());
    std::mt19937 rng(3);
    const StateVector u = random_state(m, rng);
    for (auto _ : state) benchmark::DoNotOptimize(dynamics::step(m, G, u, 1e-3, 0.7));
}
BENCHMARK(BM_StepAdditive);

static void BM_StepPowerLaw(benchmark::State& state) {
    const GalerkinModel m = spectral::build_torus_model(3, 1, 1.0);
    dynamics::DiffusionSpec spec = additive_spec();
    spec.kind = dynamics::DiffusionKind::power;
    spec.p = 0.5;
    spec.eta1.push_back({{0, 0, 1}, 0.2, 0.0});
    spec.collocation_n = static_cast<int>(state.range(0));
    const dynamics::DiffusionOperator G(m, spec);
    std::mt19937 rng(4);
    const StateVector u = random_state(m, rng);
    for (auto _ : state) benchmark::DoNotOptimize(dynamics::step(m, G, u, 1e-3, 0.7));
}
BENCHMARK(BM_StepPowerLaw)->Arg(6)->Arg(12);

static void BM_HausdorffCloud(benchmark::State& state) {
    const GalerkinModel m = spectral::build_torus_model(3, 1, 1.0);
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto A = attractor::low_discrepancy_sphere(n, m.n_modes(), 1.0);
    const auto B = attractor::low_discrepancy_sphere(n, m.n_modes(), 1.1);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            attractor::hausdorff_distance(A, B, attractor::Metric::strong));
    state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}
BENCHMARK(BM_HausdorffCloud)->Arg(64)->Arg(256);

BENCHMARK_MAIN();
