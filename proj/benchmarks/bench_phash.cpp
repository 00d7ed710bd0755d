#include <benchmark/benchmark.h>

#include "facaderisk/dedup.hpp"
#include "facaderisk/phash.hpp"
#include "facaderisk/rng.hpp"
#include "facaderisk/synth.hpp"

using namespace facaderisk;

namespace {

Image bench_facade(std::uint64_t seed) {
    Rng rng(seed);
    FacadeCues cues;
    cues.year = rng.uniform_int(1915, 2025);
    cues.structure = static_cast<BuildingStructure>(rng.uniform_int(0, 2));
    cues.ptype = static_cast<PropertyType>(rng.uniform_int(0, 1));
    return render_facade(cues, 128, rng.next_u64(), 1915, 2025);
}

void BM_Phash128(benchmark::State& state) {
    const Image img = bench_facade(1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(phash64(img));
    }
}
BENCHMARK(BM_Phash128);

void BM_RenderFacade(benchmark::State& state) {
    std::uint64_t seed = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(bench_facade(seed++));
    }
}
BENCHMARK(BM_RenderFacade);

void BM_ClusterDuplicates(benchmark::State& state) {
    Rng rng(9);
    std::vector<PerceptualHash> hashes;
    for (int i = 0; i < state.range(0); ++i) {
        hashes.push_back({"img" + std::to_string(i), rng.next_u64()});
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(cluster_duplicates(hashes, 10));
    }
}
BENCHMARK(BM_ClusterDuplicates)->Arg(128)->Arg(512);

}  // namespace
