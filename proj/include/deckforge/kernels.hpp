#pragma once

// Data-parallel inner loops. Every kernel has a serial reference in
// `kernels::serial` and an OpenMP version in `kernels::omp` that produces
// bit-identical results (each output element is reduced in the same order).
// The library calls the OpenMP versions; tests compare the pair and the
// benchmark target times them against each other.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace deckforge::kernels {

using Complex = std::complex<double>;

/// Row-major view of an n x d matrix.
struct MatrixView {
  std::span<const double> data;
  std::size_t rows = 0;
  std::size_t cols = 0;

  std::span<const double> row(std::size_t i) const { return data.subspan(i * cols, cols); }
};

struct FrameLayout {
  std::size_t n_fft = 1024;
  std::size_t hop = 256;
};

namespace serial {

/// For each point, the index of the nearest centroid (ties to the lowest
/// index) and the squared distance to it.
void assign_nearest(MatrixView points, MatrixView centroids, std::span<std::size_t> labels,
                    std::span<double> distances);

/// Dense n x n cosine-similarity matrix clipped at zero with a zero diagonal.
std::vector<double> similarity_graph(MatrixView rows);

/// Windowed forward real DFT of every frame of an already padded signal.
/// Output is frames x (n_fft/2 + 1).
void stft_frames(std::span<const double> padded, std::span<const double> window,
                 FrameLayout layout, std::size_t frames, std::span<Complex> out);

/// Inverse real DFT of every frame, windowed and overlap-added into `out`
/// (length n_fft + hop*(frames-1)), then divided by the summed squared window
/// wherever that sum exceeds a tiny floor.
void istft_overlap_add(std::span<const Complex> spectra, std::span<const double> window,
                       FrameLayout layout, std::size_t frames, std::span<double> out);

/// out (frames x n_out) = in (frames x n_in) * weights^T (n_out x n_in).
void project_rows(MatrixView in, MatrixView weights, std::span<double> out);

}  // namespace serial

namespace omp {

void assign_nearest(MatrixView points, MatrixView centroids, std::span<std::size_t> labels,
                    std::span<double> distances);
std::vector<double> similarity_graph(MatrixView rows);
void stft_frames(std::span<const double> padded, std::span<const double> window,
                 FrameLayout layout, std::size_t frames, std::span<Complex> out);
void istft_overlap_add(std::span<const Complex> spectra, std::span<const double> window,
                       FrameLayout layout, std::size_t frames, std::span<double> out);
void project_rows(MatrixView in, MatrixView weights, std::span<double> out);

}  // namespace omp

/// Real-input FFT of a fixed power-of-two size, backed by FFTW. Instances are
/// cheap to copy (plans are shared); execution is thread-safe.
class RealFft {
 public:
  explicit RealFft(std::size_t n);

  std::size_t size() const noexcept { return n_; }
  /// in: n reals; out: n/2+1 bins.
  void forward(std::span<const double> in, std::span<Complex> out) const;
  /// in: n/2+1 bins; out: n reals, scaled by 1/n so inverse(forward(x)) == x.
  void inverse(std::span<const Complex> in, std::span<double> out) const;

  struct Plans;  // opaque, cached per size for the life of the process

 private:
  std::size_t n_;
  const Plans* plans_;
};

}  // namespace deckforge::kernels
