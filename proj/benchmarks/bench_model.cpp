#include <benchmark/benchmark.h>

#include "facaderisk/net.hpp"
#include "facaderisk/rng.hpp"

using namespace facaderisk;

namespace {

Batch random_batch(const ModelConfig& cfg, int n) {
    Batch b;
    b.n = n;
    b.size = cfg.input_size;
    b.pixels.resize(static_cast<std::size_t>(n) * 3 * cfg.input_size * cfg.input_size);
    Rng rng(4);
    for (auto& v : b.pixels) v = static_cast<float>(rng.next_unit());
    return b;
}

void BM_ForwardBatch(benchmark::State& state) {
    ModelConfig cfg;
    MultiTaskModel model(cfg);
    model.init_parameters(1);
    const Batch batch = random_batch(cfg, static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(model.forward(batch));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ForwardBatch)->Arg(1)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

}  // namespace
