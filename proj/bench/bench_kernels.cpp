// OpenMP kernels against the serial reference kernels.
//
// Each pair shares the state and test bases so the ratio of the two timings
// is the speedup. Set OMP_NUM_THREADS to vary the parallel side.
#include <benchmark/benchmark.h>

#include <map>
#include <memory>
#include <random>

#include "dlrfem/nonlinearity.hpp"
#include "dlrfem/reference_kernels.hpp"
#include "dlrfem/weighted_linalg.hpp"

using namespace dlrfem;

namespace {

struct Fixture {
  TensorGrid2D grid;
  LowRankState w;
  Eigen::MatrixXd Ubar, Vbar, W;
  PropagatorPair props;

  Fixture(int nodes, int rank)
      : grid{build_grid(1, nodes - 1, -0.5, 0.5), build_grid(1, nodes - 1, -0.5, 0.5)},
        props{std::make_shared<const Propagator>(make_propagator(grid.gx, 1e-4)),
              std::make_shared<const Propagator>(make_propagator(grid.gy, 1e-4))} {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const auto random = [&](Eigen::Index r, Eigen::Index c) {
      return Eigen::MatrixXd(Eigen::MatrixXd::NullaryExpr(r, c, [&] { return u(gen); }));
    };
    w.U = orthonormal_basis(random(grid.rows(), rank), grid.gx.mass_diag());
    w.V = orthonormal_basis(random(grid.cols(), rank), grid.gy.mass_diag());
    w.S = 0.3 * random(rank, rank);
    Ubar = orthonormal_basis(random(grid.rows(), 4 * rank + 1), grid.gx.mass_diag());
    Vbar = orthonormal_basis(random(grid.cols(), 4 * rank + 1), grid.gy.mass_diag());
    W = w.densify();
  }
};

const Fixture& fixture(int nodes, int rank) {
  static std::map<std::pair<int, int>, Fixture> cache;
  auto it = cache.find({nodes, rank});
  if (it == cache.end()) it = cache.emplace(std::pair{nodes, rank}, Fixture(nodes, rank)).first;
  return it->second;
}

constexpr NonlinearityKind kKind = NonlinearityKind::ConservativeBBLM;

void BM_n_times_v(benchmark::State& st) {
  const Fixture& f = fixture(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)));
  for (auto _ : st) benchmark::DoNotOptimize(n_times_v(f.w, f.Vbar, kKind, f.grid, KernelMode::Factored));
}
void BM_n_times_v_reference(benchmark::State& st) {
  const Fixture& f = fixture(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)));
  for (auto _ : st) benchmark::DoNotOptimize(reference::n_times_v(f.w, f.Vbar, kKind, f.grid));
}
void BM_projected_n(benchmark::State& st) {
  const Fixture& f = fixture(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)));
  for (auto _ : st) benchmark::DoNotOptimize(projected_n(f.Ubar, f.w, f.Vbar, kKind, f.grid, KernelMode::Factored));
}
void BM_projected_n_reference(benchmark::State& st) {
  const Fixture& f = fixture(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)));
  for (auto _ : st) benchmark::DoNotOptimize(reference::projected_n(f.Ubar, f.w, f.Vbar, kKind, f.grid));
}
void BM_n_dense(benchmark::State& st) {
  const Fixture& f = fixture(static_cast<int>(st.range(0)), 4);
  for (auto _ : st) benchmark::DoNotOptimize(n_dense(f.W, kKind, f.grid));
}
void BM_n_dense_reference(benchmark::State& st) {
  const Fixture& f = fixture(static_cast<int>(st.range(0)), 4);
  for (auto _ : st) benchmark::DoNotOptimize(reference::n_dense(f.W, kKind, f.grid));
}
void BM_linear_step(benchmark::State& st) {
  const Fixture& f = fixture(static_cast<int>(st.range(0)), 4);
  for (auto _ : st) benchmark::DoNotOptimize(apply_linear_step(f.W, f.props));
}
void BM_linear_step_reference(benchmark::State& st) {
  const Fixture& f = fixture(static_cast<int>(st.range(0)), 4);
  for (auto _ : st) benchmark::DoNotOptimize(reference::linear_step(f.W, f.props.x->matrix(), f.props.y->matrix()));
}

void low_rank_args(benchmark::internal::Benchmark* b) {
  for (int n : {129, 257, 513}) b->Args({n, 4})->Args({n, 8});
}
void dense_args(benchmark::internal::Benchmark* b) {
  for (int n : {129, 257}) b->Arg(n);
}

}  // namespace

BENCHMARK(BM_n_times_v)->Apply(low_rank_args)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_n_times_v_reference)->Apply(low_rank_args)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_projected_n)->Apply(low_rank_args)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_projected_n_reference)->Apply(low_rank_args)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_n_dense)->Apply(dense_args)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_n_dense_reference)->Apply(dense_args)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_linear_step)->Apply(dense_args)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_linear_step_reference)->Apply(dense_args)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
