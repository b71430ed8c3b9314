// Redistribution throughput against group count, mass scale and thread count.
// Group count is driven by slicing an inert feature so the per-group rule
// work stays fixed while the population width grows.

#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "pram/engine.hpp"
#include "pram/rule_parser.hpp"

namespace {

const std::vector<pram::Rule>& churn_rules() {
    static const std::vector<pram::Rule> rules = pram::parse_rules(
        "rule churn {"
        " when stage == s => { 0.6 : set stage = s ; 0.4 : set stage = e }"
        " when stage == e => { 0.3 : set stage = s ; 0.7 : set stage = e } }");
    return rules;
}

pram::Population sliced_population(int slices, double mass_scale) {
    pram::Population p;
    for (int i = 0; i < slices; ++i) {
        pram::Signature sig;
        sig.set_feature("stage", pram::AttrValue::token("s"));
        sig.set_feature("u", pram::AttrValue::token("u" + std::to_string(i)));
        p.upsert(pram::Group(std::move(sig), (10.0 + (i % 7)) * mass_scale));
    }
    // two passes reach the fixed point of two stages per slice
    p = pram::redistribute(p, churn_rules());
    p = pram::redistribute(p, churn_rules());
    return p;
}

void BM_redistribute_groups(benchmark::State& state) {
    pram::Population pop = sliced_population(int(state.range(0)), 1.0);
    for (auto _ : state) {
        pram::Population next = pram::redistribute(pop, churn_rules());
        benchmark::DoNotOptimize(next);
    }
    state.SetComplexityN(long(pop.size()));
    state.SetItemsProcessed(state.iterations() * long(pop.size()));
}
BENCHMARK(BM_redistribute_groups)
    ->RangeMultiplier(2)
    ->Range(128, 8192)
    ->Unit(benchmark::kMicrosecond)
    ->Complexity(benchmark::oN);

void BM_redistribute_mass_scale(benchmark::State& state) {
    pram::Population pop = sliced_population(1024, double(state.range(0)));
    for (auto _ : state) {
        pram::Population next = pram::redistribute(pop, churn_rules());
        benchmark::DoNotOptimize(next);
    }
    state.SetItemsProcessed(state.iterations() * long(pop.size()));
}
BENCHMARK(BM_redistribute_mass_scale)->Arg(1)->Arg(2)->Arg(16)->Unit(benchmark::kMicrosecond);

void BM_redistribute_threads(benchmark::State& state) {
    pram::Population pop = sliced_population(4096, 1.0);
    pram::EngineOptions options;
    options.threads = int(state.range(0));
    for (auto _ : state) {
        pram::Population next = pram::redistribute(pop, churn_rules(), options);
        benchmark::DoNotOptimize(next);
    }
    state.SetItemsProcessed(state.iterations() * long(pop.size()));
}
BENCHMARK(BM_redistribute_threads)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
