// Optimised kernels against their serial references.

#include "ldis/grid.hpp"
#include "ldis/overlay.hpp"
#include "ldis/reference/corpus.hpp"
#include "ldis/reference/oracles.hpp"
#include "ldis/relations.hpp"

#include <benchmark/benchmark.h>
#include <cmath>
#include <numbers>
#include <random>

using namespace ldis;

namespace {

const std::vector<SiteRecord>& relation_sites(std::size_t n) {
    static std::map<std::size_t, std::vector<SiteRecord>> cache;
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, corpus::relation_corpus(n, 9)).first;
    return it->second;
}

void BM_RelationsIndexed(benchmark::State& state) {
    const auto& sites = relation_sites(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        const SiteIndex index = build_site_index(sites);
        benchmark::DoNotOptimize(classify_relations(index, sites, 0.95));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_RelationsIndexed)->RangeMultiplier(4)->Range(256, 4096)->Unit(benchmark::kMillisecond)->Complexity();

void BM_RelationsAllPairs(benchmark::State& state) {
    const auto& sites = relation_sites(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(reference::all_pairs_relations(sites, 0.95));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_RelationsAllPairs)->RangeMultiplier(4)->Range(256, 4096)->Unit(benchmark::kMillisecond)->Complexity();

struct ZonalFixture {
    GridLayer layer;
    Polygon zone;
};

const ZonalFixture& zonal_fixture() {
    static const ZonalFixture f = [] {
        std::mt19937_64 rng(1);
        std::uniform_int_distribution<int> cls(0, 4);
        ZonalFixture z{make_grid(10, 20, 1.0 / 512, 1.0 / 512, 512, 512, 0.0, LayerSemantics::class_coded), {}};
        for (auto& v : z.layer.values) v = cls(rng);
        std::uniform_real_distribution<double> r(0.15, 0.45);
        for (int k = 0; k < 40; ++k) {
            const double a = 2 * std::numbers::pi * k / 40, rad = r(rng);
            z.zone.outer.push_back({10.5 + rad * std::cos(a), 19.5 + rad * std::sin(a)});
        }
        z.zone.outer.push_back(z.zone.outer.front());
        return z;
    }();
    return f;
}

void BM_ZonalScanline(benchmark::State& state) {
    const auto& f = zonal_fixture();
    for (auto _ : state) benchmark::DoNotOptimize(zonal_class_count(f.layer, f.zone, {1, 3}));
}
BENCHMARK(BM_ZonalScanline)->Unit(benchmark::kMicrosecond);

void BM_ZonalBruteForce(benchmark::State& state) {
    const auto& f = zonal_fixture();
    for (auto _ : state) benchmark::DoNotOptimize(reference::zonal_class_count(f.layer, f.zone, {1, 3}));
}
BENCHMARK(BM_ZonalBruteForce)->Unit(benchmark::kMicrosecond);

const GridLayer& dem_fixture() {
    static const GridLayer dem = [] {
        GridLayer g = make_grid(0, 1, 1.0 / 1200, 1.0 / 1200, 1024, 1024);
        for (int r = 0; r < g.height; ++r) {
            for (int c = 0; c < g.width; ++c) g.at(r, c) = 800 + 150 * std::sin(c * 0.02) * std::cos(r * 0.015);
        }
        return g;
    }();
    return dem;
}

void BM_SlopeParallel(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(slope_degrees(dem_fixture()));
}
BENCHMARK(BM_SlopeParallel)->Unit(benchmark::kMillisecond);

void BM_SlopeSerial(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(reference::slope_degrees(dem_fixture()));
}
BENCHMARK(BM_SlopeSerial)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
