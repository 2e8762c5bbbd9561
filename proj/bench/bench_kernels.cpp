// Serial reference vs OpenMP kernels: index build and facet counting.
//
//   bench_kernels [blocks] [repeats]

#include <chrono>
#include <cstdlib>
#include <iostream>

#include <omp.h>

#include "factsearch/index.hpp"
#include "factsearch/query.hpp"
#include "factsearch/synth.hpp"

using namespace factsearch;
using Clock = std::chrono::steady_clock;

namespace {

template <typename F>
double time_ms(F&& f, int repeats) {
    double best = 1e300;
    for (int i = 0; i < repeats; ++i) {
        auto t0 = Clock::now();
        f();
        best = std::min(best, std::chrono::duration<double, std::milli>(Clock::now() - t0).count());
    }
    return best;
}

}  // namespace

int main(int argc, char** argv) {
    SynthOptions opt;
    opt.blocks = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 50000;
    const int repeats = argc > 2 ? std::atoi(argv[2]) : 3;
    auto corpus = generate_corpus(opt);
    std::cout << "threads " << omp_get_max_threads() << ", blocks " << corpus.size() << "\n";

    for (auto mode : {Execution::Serial, Execution::Parallel}) {
        double ms = time_ms([&] { build_index(corpus, AnalyzerConfig(), mode); }, repeats);
        std::cout << "build   " << (mode == Execution::Serial ? "serial  " : "parallel") << ' ' << ms << " ms\n";
    }

    Index index = build_index(corpus);
    const DocSet& entities = index.universe(DocClass::Entity);
    const DocSet& blocks = index.universe(DocClass::Block);
    for (FieldName f : {FieldName::Kind, FieldName::NameFacet, FieldName::Command}) {
        const DocSet& over = doc_class(*facet_companion(f)) == DocClass::Block ? blocks : entities;
        for (auto mode : {Execution::Serial, Execution::Parallel}) {
            double ms = time_ms([&] { index.facet_counts(f, over, 100, mode); }, repeats * 5);
            std::cout << "facet   " << to_string(f) << ' ' << (mode == Execution::Serial ? "serial  " : "parallel")
                      << ' ' << ms << " ms\n";
        }
    }

    Searcher searcher(index);
    FieldQuery q{{{FieldName::SourceCode, Filter::term("prime nat")}}};
    double ms = time_ms([&] { searcher.run(q, {FieldName::Kind, FieldName::Command}, 0, 20); }, repeats * 5);
    std::cout << "query   Term(prime nat)+facets " << ms << " ms\n";
    return 0;
}
