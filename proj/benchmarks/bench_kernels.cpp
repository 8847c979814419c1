#include <benchmark/benchmark.h>

#include <cmath>

#include "mvns/fields.hpp"
#include "mvns/noise.hpp"
#include "mvns/operators.hpp"
#include "mvns/sde.hpp"

namespace {

mvns::VectorField sample_field(const mvns::Grid& g) {
    return mvns::discrete_curl(g, [](double x, double y) {
        const double b = 16.0 * x * (1.0 - x) * y * (1.0 - y);
        return b * b * b * (1.0 + x - y);
    });
}

void BM_LerayProject(benchmark::State& st) {
    const mvns::Grid g = mvns::Grid::make(int(st.range(0)));
    mvns::VectorField v = mvns::VectorField::from_function(g, [](int c, double x, double y) {
        return c == 0 ? std::sin(3.0 * x + y) : std::cos(x - 2.0 * y);
    });
    for (auto _ : st) benchmark::DoNotOptimize(mvns::leray_project(v, 1e-10));
}
BENCHMARK(BM_LerayProject)->Arg(16)->Arg(32)->Arg(64);

void BM_BundleBuild(benchmark::State& st) {
    const mvns::Grid g = mvns::Grid::make(int(st.range(0)));
    const auto m = mvns::DomainMotion::shear(0.1, 1.0, 1.0);
    for (auto _ : st) benchmark::DoNotOptimize(mvns::OperatorBundle::build(m, 0.3, 0.1, g));
}
BENCHMARK(BM_BundleBuild)->Arg(16)->Arg(32);

void BM_ApplyLhSharp(benchmark::State& st) {
    const mvns::Grid g = mvns::Grid::make(int(st.range(0)));
    const auto b = mvns::OperatorBundle::build(mvns::DomainMotion::wavy(0.05, 2.0, 1.0), 0.4, 0.0, g);
    const auto v = sample_field(g);
    for (auto _ : st) benchmark::DoNotOptimize(mvns::apply_Lh_sharp(v, b));
}
BENCHMARK(BM_ApplyLhSharp)->Arg(16)->Arg(32)->Arg(64);

void BM_Step(benchmark::State& st) {
    const mvns::Grid g = mvns::Grid::make(int(st.range(0)));
    const auto motion = mvns::DomainMotion::shear(0.1, 1.0, 1.0);
    const auto b = mvns::OperatorBundle::build(motion, 0.0, 0.0, g);
    const auto noise = mvns::NoiseModel::make(g, 8, mvns::Coupling::Additive, 0.1);
    mvns::SolverState s;
    s.v = sample_field(g);
    for (auto _ : st) benchmark::DoNotOptimize(mvns::step(s, 1e-3, b, noise));
}
BENCHMARK(BM_Step)->Arg(16)->Arg(32);

}  // namespace

BENCHMARK_MAIN();
