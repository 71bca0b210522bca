#include <benchmark/benchmark.h>

#include <cmath>

#include "hestonlt/asymptotics.hpp"
#include "hestonlt/calibration.hpp"
#include "hestonlt/fourier.hpp"

using namespace hestonlt;

namespace {

const HestonParams kParams = validate_params(1.7609, 0.0494, 0.4086, -0.5195, 0.0464);
constexpr double kSpot = 3729.79;

void BM_SigmaInf(benchmark::State& state) {
    double x = -0.1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(sigma_inf_sq(kParams, x));
        x = x > 0.1 ? -0.1 : x + 1e-4;
    }
}
BENCHMARK(BM_SigmaInf);

void BM_ImpliedVarAsymptotic(benchmark::State& state) {
    double x = -0.1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(implied_var_asymptotic(kParams, x, 9.0));
        x = x > 0.1 ? -0.1 : x + 1e-4;
    }
}
BENCHMARK(BM_ImpliedVarAsymptotic);

void BM_FourierPrice(benchmark::State& state) {
    const double t = static_cast<double>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(fourier_price(kParams, StrikeSpec{StrikeConvention::total, 0.1}, t));
    }
}
BENCHMARK(BM_FourierPrice)->Arg(1)->Arg(9)->Arg(30);

void BM_FourierSmile(benchmark::State& state) {
    for (auto _ : state) {
        for (double k = 1460.0; k <= 7300.0; k += 100.0) {
            benchmark::DoNotOptimize(
                exact_implied_vol(kParams, StrikeSpec{StrikeConvention::total, std::log(k / kSpot)}, 9.0));
        }
    }
}
BENCHMARK(BM_FourierSmile)->Unit(benchmark::kMillisecond);

void BM_AsymptoticObjective(benchmark::State& state) {
    QuoteSet quotes;
    for (double t : {5.0, 9.0}) {
        for (double k = 1460.0; k <= 7300.0; k += 400.0) {
            Quote q;
            q.maturity = t;
            q.strike = k;
            q.spot = kSpot;
            q.value = 0.2;
            quotes.quotes.push_back(q);
        }
    }
    for (auto _ : state) benchmark::DoNotOptimize(smile_objective(kParams, quotes, ModelKind::asymptotic));
}
BENCHMARK(BM_AsymptoticObjective);

}  // namespace

BENCHMARK_MAIN();
