// Serial reference kernels against their OpenMP counterparts.
#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "hpmean/dpp.hpp"
#include "hpmean/geometry.hpp"

using namespace hpmean;

namespace {

Execution mode(const benchmark::State& state) { return state.range(0) ? Execution::Parallel : Execution::Serial; }

const DiscreteDomain& ball_domain() {
    static const DiscreteDomain dom = discretize(DomainSpec::koranyi_ball({0, 0, 0}, 1.0), 0.5, 0.0625);
    return dom;
}

const DiscreteDomain& annulus_domain() {
    static const DiscreteDomain dom = [] {
        DiscretizationOptions opt;
        opt.lattice = LatticeKind::Axisymmetric;
        opt.vertical_spacing = 0.14 * std::pow(0.1, 1.5);
        opt.reference_resolution = 20;
        return discretize(DomainSpec::axis_excluded_annulus({0, 0, 0}, 0.5, 1.0, 0.3), 0.1, 0.1 / 8, opt);
    }();
    return dom;
}

std::vector<double> start_values(const DiscreteDomain& dom) {
    std::vector<double> u(dom.nodes.size());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = std::sin(3.0 * dom.nodes[i].x1) + dom.nodes[i].x3;
    return u;
}

void run_sweep(benchmark::State& state, const DiscreteDomain& dom) {
    const auto cur = start_values(dom);
    std::vector<double> next(cur.size());
    const Exponent p(3.0);
    for (auto _ : state) {
        const SweepStats st = sweep(dom, cur, next, p, 1e-12, true, mode(state));
        benchmark::DoNotOptimize(st.max_change);
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * dom.interior_count));
}

void BM_SweepFull3D(benchmark::State& state) { run_sweep(state, ball_domain()); }
void BM_SweepAxisymmetric(benchmark::State& state) { run_sweep(state, annulus_domain()); }

void BM_BallQuadrature(benchmark::State& state) {
    QuadratureOptions opt;
    opt.resolution = 160;
    opt.execution = mode(state);
    for (auto _ : state) {
        const auto q = ball_quadrature({0, 0, 0}, 1.0, Metric::HeisenbergKoranyi, opt);
        benchmark::DoNotOptimize(q.nodes.data());
    }
}

void BM_MonteCarloQuadrature(benchmark::State& state) {
    QuadratureOptions opt;
    opt.scheme = QuadratureScheme::MonteCarlo;
    opt.resolution = 200000;
    opt.seed = 1;
    opt.execution = mode(state);
    for (auto _ : state) {
        const auto q = ball_quadrature({0, 0, 0}, 1.0, Metric::HeisenbergKoranyi, opt);
        benchmark::DoNotOptimize(q.nodes.data());
    }
}

void BM_Discretize(benchmark::State& state) {
    DiscretizationOptions opt;
    opt.execution = mode(state);
    for (auto _ : state) {
        const auto dom = discretize(DomainSpec::koranyi_ball({0, 0, 0}, 1.0), 0.5, 0.0625, opt);
        benchmark::DoNotOptimize(dom.indices.data());
    }
}

}  // namespace

BENCHMARK(BM_SweepFull3D)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepAxisymmetric)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BallQuadrature)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MonteCarloQuadrature)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Discretize)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
