#include <benchmark/benchmark.h>

#include <random>

#include "mfs/census.hpp"
#include "mfs/dual.hpp"
#include "mfs/empirical.hpp"
#include "mfs/kernels.hpp"
#include "mfs/spectrum.hpp"

namespace {

using namespace mfs;

Exec exec_of(const benchmark::State& s) { return s.range(0) == 0 ? Exec::Serial : Exec::Parallel; }

WeightedIFS golden() {
    auto f = NumberField::create({-1, -1, 1});
    return make_homogeneous(AlgebraicNumber::generator(f), {AlgebraicNumber::zero(f), AlgebraicNumber::one(f)},
                            uniform_weights(2));
}

WeightedIFS digit() {
    return make_rational_1d({Rational(1, 2), Rational(1, 2), Rational(1, 2)}, {0, Rational(1, 2), 1}, uniform_weights(3));
}

void BM_MinPairDistance(benchmark::State& s) {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g;
    std::vector<std::complex<double>> pts(4000);
    for (auto& z : pts) z = {g(rng), g(rng)};
    for (auto _ : s) benchmark::DoNotOptimize(min_pair_distance(pts, 1, exec_of(s)));
}

void BM_TGrid(benchmark::State& s) {
    const auto rw = RatioWeights::from(std::vector<double>{0.5, 0.3, 0.2, 0.1}, std::vector<double>{0.4, 0.3, 0.2, 0.1});
    const auto q = default_q_grid();
    std::vector<double> T(q.size()), Tp(q.size());
    for (auto _ : s) {
        T_grid(rw, q, T, Tp, exec_of(s));
        benchmark::DoNotOptimize(T.data());
    }
}

void BM_Section(benchmark::State& s) {
    const auto ifs = make_rational_1d({Rational(1, 2), Rational(1, 3), Rational(1, 5)}, {0, Rational(1, 2), Rational(4, 5)},
                                      uniform_weights(3));
    for (auto _ : s) benchmark::DoNotOptimize(build_section(ifs, 18, 100'000'000, exec_of(s)).size());
}

void BM_CensusLevel(benchmark::State& s) {
    const auto ifs = golden();
    const auto x = make_expansion_data(ifs);
    CensusLevel lv = first_level(x);
    for (int n = 1; n < 20; ++n) lv = expand_level(lv, x, 50'000'000, Exec::Serial);
    for (auto _ : s) benchmark::DoNotOptimize(expand_level(lv, x, 50'000'000, exec_of(s)).size());
}

void BM_Discretize(benchmark::State& s) {
    const auto ifs = digit();
    EmpiricalOptions opt;
    opt.exec = exec_of(s);
    for (auto _ : s) benchmark::DoNotOptimize(discretize(ifs, 13, opt).words);
}

void BM_Kappa(benchmark::State& s) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-50, 50);
    std::vector<std::complex<double>> pts(20000);
    for (auto& z : pts) z = {u(rng), u(rng)};
    for (auto _ : s) benchmark::DoNotOptimize(kappa_points(pts, 1, 2.0, exec_of(s)).upper);
}

}  // namespace

// Argument 0 runs the serial reference, 1 the OpenMP kernel.
BENCHMARK(BM_MinPairDistance)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TGrid)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Section)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CensusLevel)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Discretize)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Kappa)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
