#include <benchmark/benchmark.h>

#include "folab/checks.hpp"
#include "folab/operators.hpp"

namespace {

using namespace folab;

const Scenario& s5() {
    static const Scenario s = builtin_scenario("S5");
    return s;
}
const Scenario& s4() {
    static const Scenario s = builtin_scenario("S4");
    return s;
}

const Point kP{{0.7, 1.3, 2.1}};

void BM_MetricJet2(benchmark::State& state) {
    const Chart& chart = s5().chart;
    for (auto _ : state) {
        auto jets = chart.metric_jets(kP);
        benchmark::DoNotOptimize(jets);
    }
}
BENCHMARK(BM_MetricJet2);

void BM_ConnectionAt(benchmark::State& state) {
    const Chart& chart = s5().chart;
    for (auto _ : state) {
        Connection c = chart.connection_at(kP);
        benchmark::DoNotOptimize(c);
    }
}
BENCHMARK(BM_ConnectionAt);

void BM_RiemannAt(benchmark::State& state) {
    const Chart& chart = s5().chart;
    for (auto _ : state) {
        RiemannTensor r = chart.riemann_at(kP);
        benchmark::DoNotOptimize(r);
    }
}
BENCHMARK(BM_RiemannAt);

void BM_AdaptedFrameValues(benchmark::State& state) {
    const Scenario& s = s4();
    const auto spanning = bind_spanning(s.chart, s.foliation);
    const Point p{{0.6, 0.4, 1.9}};
    for (auto _ : state) {
        auto f = adapted_frame<double>(s.chart, spanning, p);
        benchmark::DoNotOptimize(f);
    }
}
BENCHMARK(BM_AdaptedFrameValues);

void BM_AdaptedFrameJet2(benchmark::State& state) {
    const Scenario& s = s4();
    const auto spanning = bind_spanning(s.chart, s.foliation);
    const Point p{{0.6, 0.4, 1.9}};
    for (auto _ : state) {
        auto f = adapted_frame<Jet2>(s.chart, spanning, p);
        benchmark::DoNotOptimize(f);
    }
}
BENCHMARK(BM_AdaptedFrameJet2);

void BM_IndexFormPoint(benchmark::State& state) {
    const Scenario& s = s5();
    const VectorField V = s.find_field("V1")->bind(s.chart);
    for (auto _ : state) {
        double v = f_vw(s.chart, s.foliation, V, V, kP);
        benchmark::DoNotOptimize(v);
    }
}
BENCHMARK(BM_IndexFormPoint);

void BM_JacobiPoint(benchmark::State& state) {
    const Scenario& s = s5();
    const VectorField V = s.find_field("V1")->bind(s.chart);
    for (auto _ : state) {
        TangentVector j = jacobi(s.chart, s.foliation, V, kP);
        benchmark::DoNotOptimize(j);
    }
}
BENCHMARK(BM_JacobiPoint);

void BM_SecondIdentityResidualPoint(benchmark::State& state) {
    // one full residual of the <J(V),W> identity at a point
    const Scenario& s = s5();
    const VectorField V = s.find_field("V1")->bind(s.chart);
    const VectorField W = VectorField::from_spec(
        s.chart, seeded_trig_field(11, s.chart.coord_names()));
    for (auto _ : state) {
        const TangentVector JV = jacobi(s.chart, s.foliation, V, kP);
        const double rhs = alpha_inner(s.chart, s.foliation, V, W, kP) +
                           div_leaf_alpha_transpose(s.chart, s.foliation, V, W, kP);
        benchmark::DoNotOptimize(JV);
        benchmark::DoNotOptimize(rhs);
    }
}
BENCHMARK(BM_SecondIdentityResidualPoint);

void BM_LeafVolume(benchmark::State& state) {
    const Scenario& s = s5();
    const int grid = static_cast<int>(state.range(0));
    for (auto _ : state) {
        double v = leaf_volume(s.chart, s.leaves[0], grid);
        benchmark::DoNotOptimize(v);
    }
    state.SetComplexityN(grid);
}
BENCHMARK(BM_LeafVolume)->Arg(16)->Arg(32)->Arg(64)->Complexity(benchmark::oNSquared);

void BM_GeodesicFlow(benchmark::State& state) {
    const Scenario& s = s5();
    const std::vector<double> v0 = {0.4, 0.2, 0.5};
    for (auto _ : state) {
        GeodesicState g = geodesic_flow(s.chart, kP, v0, 1.0, 1e-2);
        benchmark::DoNotOptimize(g);
    }
}
BENCHMARK(BM_GeodesicFlow);

} // namespace

BENCHMARK_MAIN();
