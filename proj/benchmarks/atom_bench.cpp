#include <benchmark/benchmark.h>

#include "reichlab/partition.hpp"

namespace {

using namespace reichlab;

partition::SurfaceModel disk_model(long size) {
    partition::ModelOptions options;
    options.window = lattice::centered_window(size);
    return partition::SurfaceModel(options);
}

// One point, every cell of the window: the unit of work of partition-build.
void BM_EvaluateAtoms(benchmark::State& state) {
    const auto model = disk_model(state.range(0));
    std::vector<lattice::Cell> cells;
    const auto& w = model.window();
    for (long l = w.l_min; l <= w.l_max; ++l)
        for (long k = w.k_min; k <= w.k_max; ++k)
            if (model.cell_nonempty(k, l)) cells.push_back({k, l});
    const Complex z(0.125, 0.375);
    for (auto _ : state) benchmark::DoNotOptimize(partition::evaluate_atoms(model, cells, z, 1e-8));
    state.counters["cells"] = static_cast<double>(cells.size());
}
BENCHMARK(BM_EvaluateAtoms)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_WindowProjection(benchmark::State& state) {
    const auto model = disk_model(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(partition::window_projection(model, Complex(0.125, 0.375), 1e-8));
}
BENCHMARK(BM_WindowProjection)->Arg(8)->Unit(benchmark::kMicrosecond);

}  // namespace
