// Serial reference versus OpenMP kernels.

#include <benchmark/benchmark.h>

#include "jcl/kernels.hpp"
#include "jcl/lindblad.hpp"
#include "jcl/sweep.hpp"

namespace {

jcl::LatticeParams chain(int sites) {
    jcl::LatticeParams lp;
    lp.sites = sites;
    lp.J = 0.3;
    lp.jc = jcl::JCParams::from_detuning(1.0, 1.0);
    lp.n_max = 2;
    return lp;
}

void BM_spmv_serial(benchmark::State& st) {
    const auto h = jcl::lattice_hamiltonian(chain(int(st.range(0))));
    Eigen::VectorXcd x = Eigen::VectorXcd::Ones(Eigen::Index(h.dim())), y(x.size());
    for (auto _ : st) {
        jcl::kernels::serial::spmv(h, {x.data(), h.dim()}, {y.data(), h.dim()});
        benchmark::DoNotOptimize(y.data());
    }
}

void BM_spmv_parallel(benchmark::State& st) {
    const auto h = jcl::lattice_hamiltonian(chain(int(st.range(0))));
    Eigen::VectorXcd x = Eigen::VectorXcd::Ones(Eigen::Index(h.dim())), y(x.size());
    for (auto _ : st) {
        jcl::kernels::parallel::spmv(h, {x.data(), h.dim()}, {y.data(), h.dim()});
        benchmark::DoNotOptimize(y.data());
    }
}

void rhs(benchmark::State& st, jcl::KernelPolicy policy) {
    const auto sys = jcl::make_open_system(chain(int(st.range(0))), {0.1, 0.01}, jcl::SubspaceMode::reachable);
    const jcl::LindbladGenerator gen(sys.hamiltonian, sys.jumps, policy);
    const auto rho = jcl::initial_polariton_product(sys.params, sys.basis);
    Eigen::MatrixXcd out;
    for (auto _ : st) {
        gen.apply(rho.matrix(), out);
        benchmark::DoNotOptimize(out.data());
    }
    st.counters["dim"] = double(sys.basis.size());
}

void BM_lindblad_rhs_serial(benchmark::State& st) { rhs(st, jcl::KernelPolicy::serial); }
void BM_lindblad_rhs_parallel(benchmark::State& st) { rhs(st, jcl::KernelPolicy::parallel); }

jcl::GridSpec small_grid() {
    jcl::GridSpec spec;
    spec.j_values = jcl::log_axis(0.01, 1.0, 8);
    spec.delta_values = jcl::log_axis(0.01, 50.0, 8);
    return spec;
}

void BM_grid_serial(benchmark::State& st) {
    const auto spec = small_grid();
    for (auto _ : st) benchmark::DoNotOptimize(jcl::run_grid_serial(spec).values.data());
}

void BM_grid_parallel(benchmark::State& st) {
    const auto spec = small_grid();
    for (auto _ : st) benchmark::DoNotOptimize(jcl::run_grid(spec, int(st.range(0))).values.data());
}

}  // namespace

BENCHMARK(BM_spmv_serial)->Arg(3)->Arg(4)->Arg(5);
BENCHMARK(BM_spmv_parallel)->Arg(3)->Arg(4)->Arg(5);
BENCHMARK(BM_lindblad_rhs_serial)->Arg(2)->Arg(3)->Arg(4);
BENCHMARK(BM_lindblad_rhs_parallel)->Arg(2)->Arg(3)->Arg(4);
BENCHMARK(BM_grid_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_grid_parallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
