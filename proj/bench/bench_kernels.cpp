// Serial reference kernels against their OpenMP counterparts on the same
// inputs. Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "deckforge/audio.hpp"
#include "deckforge/kernels.hpp"

using namespace deckforge;
using kernels::Complex;
using kernels::MatrixView;

namespace {

std::vector<double> random_vec(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<double> v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

template <bool Parallel>
void BM_AssignNearest(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const std::size_t d = 384, k = 16;
  const auto pts = random_vec(n * d, 1), cents = random_vec(k * d, 2);
  std::vector<std::size_t> labels(n);
  std::vector<double> dist(n);
  for (auto _ : state) {
    if constexpr (Parallel) {
      kernels::omp::assign_nearest({pts, n, d}, {cents, k, d}, labels, dist);
    } else {
      kernels::serial::assign_nearest({pts, n, d}, {cents, k, d}, labels, dist);
    }
    benchmark::DoNotOptimize(labels.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}

template <bool Parallel>
void BM_SimilarityGraph(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const std::size_t d = 384;
  const auto rows = random_vec(n * d, 3);
  for (auto _ : state) {
    auto g = Parallel ? kernels::omp::similarity_graph({rows, n, d})
                      : kernels::serial::similarity_graph({rows, n, d});
    benchmark::DoNotOptimize(g.data());
  }
}

template <bool Parallel>
void BM_StftFrames(benchmark::State& state) {
  const kernels::FrameLayout layout{1024, 256};
  const auto frames = static_cast<std::size_t>(state.range(0));
  const auto padded = random_vec(layout.n_fft + layout.hop * (frames - 1), 4);
  const auto window = audio::hann_window(layout.n_fft);
  std::vector<Complex> out(frames * (layout.n_fft / 2 + 1));
  for (auto _ : state) {
    if constexpr (Parallel) {
      kernels::omp::stft_frames(padded, window, layout, frames, out);
    } else {
      kernels::serial::stft_frames(padded, window, layout, frames, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Parallel>
void BM_IstftOverlapAdd(benchmark::State& state) {
  const kernels::FrameLayout layout{1024, 256};
  const auto frames = static_cast<std::size_t>(state.range(0));
  const std::size_t len = layout.n_fft + layout.hop * (frames - 1);
  const auto padded = random_vec(len, 5);
  const auto window = audio::hann_window(layout.n_fft);
  std::vector<Complex> spectra(frames * (layout.n_fft / 2 + 1));
  kernels::serial::stft_frames(padded, window, layout, frames, spectra);
  std::vector<double> out(len);
  for (auto _ : state) {
    if constexpr (Parallel) {
      kernels::omp::istft_overlap_add(spectra, window, layout, frames, out);
    } else {
      kernels::serial::istft_overlap_add(spectra, window, layout, frames, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
}

}  // namespace

BENCHMARK(BM_AssignNearest<false>)->Name("assign_nearest/serial")->Arg(1000)->Arg(10000)->UseRealTime();
BENCHMARK(BM_AssignNearest<true>)->Name("assign_nearest/omp")->Arg(1000)->Arg(10000)->UseRealTime();
BENCHMARK(BM_SimilarityGraph<false>)->Name("similarity_graph/serial")->Arg(100)->Arg(400)->UseRealTime();
BENCHMARK(BM_SimilarityGraph<true>)->Name("similarity_graph/omp")->Arg(100)->Arg(400)->UseRealTime();
BENCHMARK(BM_StftFrames<false>)->Name("stft_frames/serial")->Arg(63)->Arg(500)->UseRealTime();
BENCHMARK(BM_StftFrames<true>)->Name("stft_frames/omp")->Arg(63)->Arg(500)->UseRealTime();
BENCHMARK(BM_IstftOverlapAdd<false>)->Name("istft_overlap_add/serial")->Arg(63)->Arg(500)->UseRealTime();
BENCHMARK(BM_IstftOverlapAdd<true>)->Name("istft_overlap_add/omp")->Arg(63)->Arg(500)->UseRealTime();

BENCHMARK_MAIN();
