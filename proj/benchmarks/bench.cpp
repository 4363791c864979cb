#include <benchmark/benchmark.h>

#include "mimoq/capacity.hpp"
#include "mimoq/efie.hpp"
#include "mimoq/geometry.hpp"
#include "mimoq/modes.hpp"
#include "mimoq/reduction.hpp"

using namespace mimoq;

namespace {

constexpr double kK = 2.0 * M_PI;

void BM_AssembleDipole(benchmark::State& state) {
  StripDipoleSpec spec;
  spec.cells_along_length = static_cast<int>(state.range(0));
  const Mesh mesh = build_dipole(spec);
  for (auto _ : state) {
    OperatorSet op = assemble_operators(mesh, kK);
    benchmark::DoNotOptimize(op.R.data());
  }
  state.SetComplexityN(mesh.basis_count());
}
BENCHMARK(BM_AssembleDipole)->Arg(16)->Arg(32)->Arg(64)->Complexity();

void BM_AssemblePlate(benchmark::State& state) {
  PlateSpec spec;
  spec.cells_x = static_cast<int>(state.range(0));
  spec.cells_y = spec.cells_x / 2;
  const Mesh mesh = build_plate(spec);
  for (auto _ : state) {
    OperatorSet op = assemble_operators(mesh, spec.k);
    benchmark::DoNotOptimize(op.R.data());
  }
  state.SetComplexityN(mesh.basis_count());
}
BENCHMARK(BM_AssemblePlate)->Arg(8)->Arg(12)->Arg(16)->Unit(benchmark::kMillisecond)->Complexity();

void BM_EnergyModes(benchmark::State& state) {
  PlateSpec spec;
  const OperatorSet op = assemble_operators(build_plate(spec), spec.k);
  for (auto _ : state) {
    ModeSpectrum ms = energy_modes_current(op);
    benchmark::DoNotOptimize(ms.eigenvalues.data());
  }
}
BENCHMARK(BM_EnergyModes)->Unit(benchmark::kMillisecond);

void BM_DualCapacity(benchmark::State& state) {
  ChannelSpectrum cs;
  cs.w = Eigen::VectorXd::LinSpaced(state.range(0), 1.0, 400.0);
  cs.Q = 50.0;
  cs.gamma = 20.0;
  for (auto _ : state) {
    CapacitySolution sol = dual_capacity(cs);
    benchmark::DoNotOptimize(sol.C);
  }
}
BENCHMARK(BM_DualCapacity)->Arg(4)->Arg(16)->Arg(64);

void BM_Waterfill(benchmark::State& state) {
  Eigen::VectorXd sigma2(state.range(0));
  for (int i = 0; i < sigma2.size(); ++i)
    sigma2(i) = 1.0 / (1.0 + i);
  for (auto _ : state) {
    WaterfillResult wf = waterfill(sigma2, 20.0);
    benchmark::DoNotOptimize(wf.C);
  }
}
BENCHMARK(BM_Waterfill)->Arg(8)->Arg(64)->Arg(512);

void BM_ErgodicRealization(benchmark::State& state) {
  ArraySpec as;
  as.count = 2;
  as.spacing = 0.3 * as.element.length;
  const ArrayMesh am = build_array(as);
  const OperatorSet op = assemble_operators(am.mesh, kK);
  const PortSystem ps = port_reduce(op, am.ports);
  const ModeSpectrum ms = energy_modes_port(ps);
  const Eigen::MatrixXcd U = radiation_patterns(ps.s, ms.eigenvectors);
  std::uint64_t idx = 0;
  for (auto _ : state) {
    const Eigen::MatrixXcd h =
        draw_rayleigh_channel(static_cast<int>(U.rows()), 1, idx++);
    const double c = capacity_given_channel(h * U, ms.eigenvalues, 31.0, 20.0);
    benchmark::DoNotOptimize(c);
  }
}
BENCHMARK(BM_ErgodicRealization)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
