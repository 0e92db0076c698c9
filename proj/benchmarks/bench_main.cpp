#include <benchmark/benchmark.h>

#include "spincharge/analytic.hpp"
#include "spincharge/decompose.hpp"
#include "spincharge/faddeev.hpp"
#include "spincharge/lagrangian.hpp"
#include "spincharge/topology.hpp"

namespace sc = spincharge;

namespace {

sc::FaddeevConfig hopfion(int n) {
  const sc::LatticeGrid g = sc::make_lattice({n, n, n}, 0.35, sc::Boundary::vacuum_padded);
  return sc::FaddeevConfig::with_constant_rho(sc::toroidal_ansatz(1, 1, 0.3 * n * 0.35, g), 1.0, {});
}

void BM_FaddeevEnergy(benchmark::State& state) {
  const sc::FaddeevConfig c = hopfion(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(sc::faddeev_energy(c).total);
  state.SetItemsProcessed(state.iterations() * c.n.size());
}
BENCHMARK(BM_FaddeevEnergy)->Arg(24)->Arg(48)->Unit(benchmark::kMillisecond);

void BM_FaddeevGradient(benchmark::State& state) {
  const sc::FaddeevConfig c = hopfion(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(sc::faddeev_gradient(c));
  state.SetItemsProcessed(state.iterations() * c.n.size());
}
BENCHMARK(BM_FaddeevGradient)->Arg(24)->Arg(48)->Unit(benchmark::kMillisecond);

void BM_HopfSpectral(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const sc::LatticeGrid g = sc::make_lattice({n, n, n}, 0.1, sc::Boundary::vacuum_padded);
  const sc::DirectorField f = sc::toroidal_ansatz(1, 1, 0.45 * n * 0.1, g);
  for (auto _ : state) benchmark::DoNotOptimize(sc::hopf_charge(f).raw);
}
BENCHMARK(BM_HopfSpectral)->Arg(32)->Arg(48)->Unit(benchmark::kMillisecond);

void BM_HopfLinkingOracle(benchmark::State& state) {
  const sc::LatticeGrid g = sc::make_lattice({48, 48, 48}, 0.1, sc::Boundary::vacuum_padded);
  const sc::DirectorField f = sc::toroidal_ansatz(1, 1, 2.2, g);
  for (auto _ : state) benchmark::DoNotOptimize(sc::hopf_charge_oracle(f).linking);
}
BENCHMARK(BM_HopfLinkingOracle)->Unit(benchmark::kMillisecond);

void BM_DecomposeLattice(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const sc::LatticeGrid g = sc::make_lattice({n, n, n}, 3.0 / n, sc::Boundary::periodic);
  const auto fam = sc::random_smooth_family(7, {.time_dependent = false});
  const sc::SampledFields s = sc::sample_family(*fam, g);
  sc::SimulationParams p;
  for (auto _ : state) {
    sc::SpinChargeFields scf = sc::decompose(s.pauli, s.u);
    sc::connection_fields(scf, s.pauli.a_mu, p);
    benchmark::DoNotOptimize(scf.j_mu[0]);
  }
  state.SetItemsProcessed(state.iterations() * g.size());
}
BENCHMARK(BM_DecomposeLattice)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_VerifyIdentityAnalytic(benchmark::State& state) {
  const auto fam = sc::random_smooth_family(3);
  sc::SimulationParams p;
  for (auto _ : state) benchmark::DoNotOptimize(sc::verify_identity(*fam, p).rel_diff);
}
BENCHMARK(BM_VerifyIdentityAnalytic)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
