// Microbenchmarks for the hot paths of a propagation step: configuration
// enumeration, reduced-density construction, and the full right-hand side.

#include <benchmark/benchmark.h>

#include <random>

#include "rasb/dvr.hpp"
#include "rasb/eom.hpp"
#include "rasb/fock.hpp"
#include "rasb/observables.hpp"
#include "rasb/propagator.hpp"
#include "rasb/secondq.hpp"

namespace {

using namespace rasb;

fock::RasSpec make_spec(int n, int m1, int m2, int n_max) {
  fock::RasSpec spec;
  spec.n_particles = n;
  spec.m1 = m1;
  spec.m2 = m2;
  spec.scheme = fock::Scheme::kGeneral;
  spec.n_max = n_max;
  return spec;
}

eom::WavefunctionState random_state(const eom::Model& model,
                                    const fock::FockSpace& space) {
  eom::WavefunctionState state =
      propagator::make_initial_state(model, space, 0.1, 12345);
  return state;
}

void BM_FockSpaceEnumeration(benchmark::State& bench) {
  const auto spec = make_spec(100, 1, 4, 8);
  for (auto _ : bench) {
    fock::FockSpace space(spec);
    std::int64_t checksum = 0;
    for (const auto& occ : space.enumerate()) checksum += occ[0];
    benchmark::DoNotOptimize(checksum);
  }
}
BENCHMARK(BM_FockSpaceEnumeration);

void BM_ReducedDensities(benchmark::State& bench) {
  const int n = static_cast<int>(bench.range(0));
  const auto spec = make_spec(n, 1, 4, 4);
  fock::FockSpace space(spec);
  secondq::ExcitationTable table(space);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  Vector c(space.dim());
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    c[i] = Complex(normal(rng), normal(rng));
  }
  c /= c.norm();
  for (auto _ : bench) {
    const Matrix images = table.images(c);
    const Matrix rho1 = secondq::build_rho1(c, table, images);
    const Tensor4 rho2 = secondq::build_rho2(c, table, images);
    benchmark::DoNotOptimize(rho1(0, 0) + rho2(0, 0, 0, 0));
  }
}
BENCHMARK(BM_ReducedDensities)->Arg(10)->Arg(50)->Arg(100);

void BM_StateDerivative(benchmark::State& bench) {
  const int n = static_cast<int>(bench.range(0));
  eom::Model model;
  model.grid = dvr::build_grid(-8.0, 8.0, 101);
  model.omega_x = 1.0;
  model.interaction = {dvr::InteractionKind::kContact, 0.1};
  const auto spec = make_spec(n, 1, 4, 4);
  fock::FockSpace space(spec);
  secondq::ExcitationTable table(space);
  const auto state = random_state(model, space);
  eom::DerivativeOptions options;
  for (auto _ : bench) {
    const auto d = eom::state_derivative(state, model, table, options);
    benchmark::DoNotOptimize(d.c_dot[0]);
  }
}
BENCHMARK(BM_StateDerivative)->Arg(10)->Arg(100);

void BM_RelaxGrossPitaevskii(benchmark::State& bench) {
  eom::Model model;
  model.grid = dvr::build_grid(-8.0, 8.0, 101);
  model.omega_x = 1.0;
  model.interaction = {dvr::InteractionKind::kContact, 0.01};
  fock::RasSpec spec;
  spec.n_particles = 100;
  spec.m1 = 1;
  propagator::IntegratorSpec integrator;
  propagator::RelaxOptions options;
  options.tol_energy = 1e-8;
  for (auto _ : bench) {
    const auto result = propagator::relax(model, spec, integrator, options);
    benchmark::DoNotOptimize(result.trace.back().energy);
  }
}
BENCHMARK(BM_RelaxGrossPitaevskii)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
