#include "jto/corpus.hpp"
#include "jto/corpus_proofs.hpp"
#include "jto/search.hpp"

#include <benchmark/benchmark.h>

using namespace jto;

namespace {

CaseModel load(const std::string& stem) {
    CaseModel cm;
    cm.name = stem;
    cm.model = read_model(corpus_asset(stem + ".jtom"));
    cm.universe = read_formula_file(corpus_asset(stem + ".jto"), &cm.model.base().agents);
    return cm;
}

void BM_ParsePretty(benchmark::State& state) {
    Formula f = assumption("court'");
    std::string text = pretty(f, &corpus_agents());
    for (auto _ : state) {
        AgentTable a = corpus_agents();
        benchmark::DoNotOptimize(parse_formula(text, &a));
    }
}
BENCHMARK(BM_ParsePretty);

void BM_CheckProof(benchmark::State& state) {
    std::vector<NamedBundle> all = corpus_scripts();
    const ProofBundle& b = all[std::size_t(state.range(0))].bundle;
    state.SetLabel(all[std::size_t(state.range(0))].name);
    for (auto _ : state) benchmark::DoNotOptimize(check_bundle(b, {}).accepted);
}
BENCHMARK(BM_CheckProof)->DenseRange(0, 6)->Unit(benchmark::kMillisecond);

void BM_Validate(benchmark::State& state, const std::string& stem) {
    CaseModel cm = load(stem);
    Universe u = make_universe(cm.universe.list(), cm.universe.terms);
    for (auto _ : state) benchmark::DoNotOptimize(validate(cm.model, u).ok());
}
BENCHMARK_CAPTURE(BM_Validate, i1, std::string("i1"))->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Validate, i3_fitting, std::string("i3-fitting"))->Unit(benchmark::kMillisecond);

void BM_ModelCheck(benchmark::State& state) {
    CaseModel cm = load("i1");
    Formula g = conj_all({assumption("contract"), assumption("court"), time_literal(10)});
    for (auto _ : state) benchmark::DoNotOptimize(mc(cm.model, 0, 10, g));
}
BENCHMARK(BM_ModelCheck)->Unit(benchmark::kMicrosecond);

void BM_Transform(benchmark::State& state) {
    CaseModel cm = load("i3-fitting");
    Universe u = make_universe(cm.universe.list(), cm.universe.terms);
    for (auto _ : state) benchmark::DoNotOptimize(fitting_to_neighborhood(cm.model.fitting, u.formulas).states.size());
}
BENCHMARK(BM_Transform)->Unit(benchmark::kMillisecond);

void BM_BoundedSat(benchmark::State& state) {
    std::vector<Formula> fs{assumption("contract0"), assumption("court0"), time_literal(10)};
    SearchBounds b{std::uint32_t(state.range(0)), 2};
    for (auto _ : state) benchmark::DoNotOptimize(bounded_sat(fs, std::nullopt, b, &corpus_agents()).sat);
}
BENCHMARK(BM_BoundedSat)->Arg(11)->Arg(12)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
