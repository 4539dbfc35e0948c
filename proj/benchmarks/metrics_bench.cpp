#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "ats/metrics.hpp"
#include "ats/textproc.hpp"

namespace {

const char* kWords[] = {"the", "plugin", "allows", "remote", "attackers", "to", "inject", "scripts", "via",
                        "crafted", "request", "in", "version", "before", "4.3.1", "server"};

std::string document(std::size_t words, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, std::size(kWords) - 1);
  std::string out;
  for (std::size_t i = 0; i < words; ++i) {
    out += kWords[pick(rng)];
    out += (i % 12 == 11) ? ". " : " ";
  }
  return out + "end.";
}

void BM_Tokenize(benchmark::State& state) {
  const auto doc = document(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(ats::text::tokenize(doc));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * doc.size()));
}
BENCHMARK(BM_Tokenize)->Arg(64)->Arg(512)->Arg(4096);

void BM_Sari(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto in = ats::text::tokenize(document(n, 1)).words();
  const auto out = ats::text::tokenize(document(n, 2)).words();
  const auto ref = ats::text::tokenize(document(n, 3)).words();
  for (auto _ : state) benchmark::DoNotOptimize(ats::metrics::sari_components(in, out, ref, 4));
}
BENCHMARK(BM_Sari)->Arg(16)->Arg(128)->Arg(1024);

void BM_Dsari(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto in = document(n, 1), out = document(n / 2, 2), ref = document(n / 2, 3);
  for (auto _ : state) benchmark::DoNotOptimize(ats::metrics::dsari(in, out, ref));
}
BENCHMARK(BM_Dsari)->Arg(64)->Arg(512);

}  // namespace
