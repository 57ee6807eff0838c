#include <benchmark/benchmark.h>

#include <fstream>
#include <string>

#include "khinchin/cf.hpp"
#include "khinchin/stats.hpp"

namespace {

using namespace khinchin;

std::string pi_digits(std::size_t digits) {
  std::ifstream in(std::string(KHINCHIN_BENCH_FIXTURES) + "/pi_10000.txt");
  std::string s;
  std::getline(in, s);
  // "3." plus digits - 1 decimals
  return s.substr(0, digits + 1);
}

void BM_ExpandCertified(benchmark::State& state) {
  const BigReal x = parse_decimal(pi_digits(static_cast<std::size_t>(state.range(0))));
  std::size_t n = 0;
  for (auto _ : state) {
    const CFExpansion cf = expand_certified(x);
    n = cf.certified_len();
    benchmark::DoNotOptimize(n);
  }
  state.counters["quotients"] = static_cast<double>(n);
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}
BENCHMARK(BM_ExpandCertified)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_ExpandDecimalExact(benchmark::State& state) {
  const BigReal x = parse_decimal(pi_digits(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(expand_decimal_exact(x).certified_len());
}
BENCHMARK(BM_ExpandDecimalExact)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_KhinchinConstant(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(khinchin_constant(static_cast<std::size_t>(state.range(0))));
}
BENCHMARK(BM_KhinchinConstant)->Arg(1000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_LevySeries(benchmark::State& state) {
  const CFExpansion cf = expand_certified(parse_decimal(pi_digits(10000)));
  for (auto _ : state) benchmark::DoNotOptimize(levy_series(cf, static_cast<std::size_t>(state.range(0))));
}
BENCHMARK(BM_LevySeries)->Arg(1)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_KhinchinSeries(benchmark::State& state) {
  const CFExpansion cf = expand_certified(parse_decimal(pi_digits(10000)));
  for (auto _ : state) benchmark::DoNotOptimize(khinchin_series(cf));
}
BENCHMARK(BM_KhinchinSeries)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
