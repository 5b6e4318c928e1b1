#include "qnet/decay.hpp"
#include "qnet/fixtures.hpp"
#include "qnet/interconnect.hpp"
#include "qnet/qham.hpp"
#include "qnet/synthesis.hpp"
#include "qnet/vfit.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace qnet;

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

void BM_SweepChain(benchmark::State& st) {
    const auto chain = fixtures::tl_coupler_chain();
    const auto freqs = linspace(1e9, 22.5e9, static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(sweep_chain(chain, freqs));
}
BENCHMARK(BM_SweepChain)->Arg(2000);

void BM_FitTLCoupler(benchmark::State& st) {
    const SampledNetwork data = sweep_chain(fixtures::tl_coupler_chain(), linspace(1e9, 22.5e9, 2000));
    FitConfig cfg;
    cfg.n_pole_pairs = 4;
    cfg.band_lo_hz = 1e9;
    cfg.band_hi_hz = 22.5e9;
    cfg.refine_max_evals = static_cast<int>(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(fit(data, cfg));
}
BENCHMARK(BM_FitTLCoupler)->Arg(0)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_CascadeToRational(benchmark::State& st) {
    std::mt19937_64 rng(1);
    const CLCascade c = fixtures::random_cascade(rng, 5, static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(cascade_to_rational(c));
}
BENCHMARK(BM_CascadeToRational)->Arg(10)->Arg(40);

void BM_ConnectRational(benchmark::State& st) {
    std::mt19937_64 rng(2);
    const std::vector<RationalImpedance> zs = {fixtures::random_rational(rng, 3, 4, 3e9, 9e9),
                                               fixtures::random_rational(rng, 3, 4, 3e9, 9e9)};
    ConnectionPlan plan;
    plan.networks = {"a", "b"};
    plan.joins = {{"a.P2", "b.P1"}, {"a.P3", "b.P3"}};
    for (auto _ : st) benchmark::DoNotOptimize(connect_rational(zs, plan));
}
BENCHMARK(BM_ConnectRational);

void BM_LossyPoles(benchmark::State& st) {
    const CLCascade c = fixtures::decay_circuit(true);
    const LossSpec loss = fixtures::decay_loss();
    for (auto _ : st) benchmark::DoNotOptimize(lossy_mode_poles(c, loss));
}
BENCHMARK(BM_LossyPoles);

void BM_FockOracle(benchmark::State& st) {
    const CLCascade c = fixtures::tc_circuit();
    TransmonSpec spec;
    spec.junctions = {{"Q1", 1.0}, {"QC", 1.0}, {"Q2", 1.0}};
    spec = tune_junctions(junction_charging_energies(c, spec), spec,
                          {{"Q1", two_pi * 4e9}, {"Q2", two_pi * 4e9}, {"QC", two_pi * 6e9}});
    const HamiltonianParams hp = hamiltonian_params(c, spec);
    for (auto _ : st) benchmark::DoNotOptimize(oracle_resonant_coupling(hp, "Q1", "Q2", two_pi * 50e6));
}
BENCHMARK(BM_FockOracle)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
