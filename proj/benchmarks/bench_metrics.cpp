#include <benchmark/benchmark.h>

#include "facaderisk/metrics.hpp"
#include "facaderisk/rng.hpp"
#include "facaderisk/split.hpp"

using namespace facaderisk;

namespace {

void BM_ClassificationMetrics(benchmark::State& state) {
    Rng rng(2);
    const std::vector<std::string> classes = {"H", "T", "M"};
    std::vector<std::string> preds, truths;
    for (int i = 0; i < state.range(0); ++i) {
        preds.push_back(classes[static_cast<std::size_t>(rng.uniform_int(0, 2))]);
        truths.push_back(classes[static_cast<std::size_t>(rng.uniform_int(0, 2))]);
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(classification_metrics(preds, truths, classes));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ClassificationMetrics)->Arg(1000)->Arg(100000);

void BM_SplitAssign(benchmark::State& state) {
    std::vector<std::string> ids;
    for (int i = 0; i < 1000; ++i) ids.push_back("property_" + std::to_string(i));
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(assign_split(42, ids[i % ids.size()], 0.8));
        ++i;
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SplitAssign);

}  // namespace
