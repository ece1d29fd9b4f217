#include "deckforge/kernels.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>

namespace deckforge::kernels {

// ------------------------------------------------------------------ FFT

struct RealFft::Plans {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
};

namespace {

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

// Plans live for the whole process; FFTW planning is not thread-safe, execution is.
const RealFft::Plans* plans_for(std::size_t n) {
  static std::map<std::size_t, std::unique_ptr<RealFft::Plans>> cache;
  std::lock_guard lock(plan_mutex());
  auto& slot = cache[n];
  if (!slot) {
    slot = std::make_unique<RealFft::Plans>();
    const int ni = static_cast<int>(n);
    double* real = fftw_alloc_real(n);
    fftw_complex* spec = fftw_alloc_complex(n / 2 + 1);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    slot->forward = fftw_plan_dft_r2c_1d(ni, real, spec, flags);
    slot->inverse = fftw_plan_dft_c2r_1d(ni, spec, real, flags | FFTW_DESTROY_INPUT);
    fftw_free(real);
    fftw_free(spec);
  }
  return slot.get();
}

constexpr double kWindowFloor = 1e-10;

double dot(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double sq_dist(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

void nearest_one(MatrixView centroids, std::span<const double> p, std::size_t& label,
                 double& distance) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.rows; ++c) {
    const double d = sq_dist(p, centroids.row(c));
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  label = best;
  distance = best_d;
}

std::vector<double> row_norms(MatrixView rows) {
  std::vector<double> norms(rows.rows);
  for (std::size_t i = 0; i < rows.rows; ++i) norms[i] = std::sqrt(dot(rows.row(i), rows.row(i)));
  return norms;
}

double clipped_cosine(MatrixView rows, const std::vector<double>& norms, std::size_t i,
                      std::size_t j) {
  if (norms[i] == 0.0 || norms[j] == 0.0) return 0.0;
  const double c = dot(rows.row(i), rows.row(j)) / (norms[i] * norms[j]);
  return std::clamp(c, 0.0, 1.0);
}

void stft_one(std::span<const double> padded, std::span<const double> window, FrameLayout layout,
              std::size_t f, const RealFft& fft, std::vector<double>& buf,
              std::span<Complex> out) {
  const std::size_t bins = layout.n_fft / 2 + 1;
  const double* src = padded.data() + f * layout.hop;
  for (std::size_t i = 0; i < layout.n_fft; ++i) buf[i] = src[i] * window[i];
  fft.forward(buf, out.subspan(f * bins, bins));
}

// Sum of squared window values over the frames covering each sample, added
// in ascending frame order.
std::vector<double> window_envelope(std::span<const double> window, FrameLayout layout,
                                    std::size_t frames, std::size_t length) {
  std::vector<double> env(length, 0.0);
  for (std::size_t t = 0; t < length; ++t) {
    const std::size_t first = t >= layout.n_fft ? (t - layout.n_fft) / layout.hop + 1 : 0;
    const std::size_t last = std::min(frames, t / layout.hop + 1);
    double wsum = 0.0;
    for (std::size_t f = first; f < last; ++f) {
      const double w = window[t - f * layout.hop];
      wsum += w * w;
    }
    env[t] = wsum;
  }
  return env;
}

void normalize(std::span<double> out, const std::vector<double>& env) {
  for (std::size_t t = 0; t < out.size(); ++t) {
    if (env[t] > kWindowFloor) out[t] /= env[t];
  }
}

}  // namespace

RealFft::RealFft(std::size_t n) : n_(n), plans_(plans_for(n)) {}

void RealFft::forward(std::span<const double> in, std::span<Complex> out) const {
  fftw_execute_dft_r2c(plans_->forward, const_cast<double*>(in.data()),
                       reinterpret_cast<fftw_complex*>(out.data()));
}

void RealFft::inverse(std::span<const Complex> in, std::span<double> out) const {
  // c2r overwrites its input
  thread_local std::vector<Complex> scratch;
  scratch.assign(in.begin(), in.end());
  fftw_execute_dft_c2r(plans_->inverse, reinterpret_cast<fftw_complex*>(scratch.data()),
                       out.data());
  const double scale = 1.0 / static_cast<double>(n_);
  for (auto& v : out) v *= scale;
}

// ------------------------------------------------------------------ serial

namespace serial {

void assign_nearest(MatrixView points, MatrixView centroids, std::span<std::size_t> labels,
                    std::span<double> distances) {
  for (std::size_t i = 0; i < points.rows; ++i) {
    nearest_one(centroids, points.row(i), labels[i], distances[i]);
  }
}

std::vector<double> similarity_graph(MatrixView rows) {
  const std::size_t n = rows.rows;
  std::vector<double> w(n * n, 0.0);
  const auto norms = row_norms(rows);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double c = clipped_cosine(rows, norms, i, j);
      w[i * n + j] = c;
      w[j * n + i] = c;
    }
  }
  return w;
}

void stft_frames(std::span<const double> padded, std::span<const double> window,
                 FrameLayout layout, std::size_t frames, std::span<Complex> out) {
  RealFft fft(layout.n_fft);
  std::vector<double> buf(layout.n_fft);
  for (std::size_t f = 0; f < frames; ++f) stft_one(padded, window, layout, f, fft, buf, out);
}

void istft_overlap_add(std::span<const Complex> spectra, std::span<const double> window,
                       FrameLayout layout, std::size_t frames, std::span<double> out) {
  const std::size_t bins = layout.n_fft / 2 + 1;
  RealFft fft(layout.n_fft);
  std::vector<double> frame(layout.n_fft);
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t f = 0; f < frames; ++f) {
    fft.inverse(spectra.subspan(f * bins, bins), frame);
    for (std::size_t i = 0; i < layout.n_fft; ++i) out[f * layout.hop + i] += frame[i] * window[i];
  }
  normalize(out, window_envelope(window, layout, frames, out.size()));
}

void project_rows(MatrixView in, MatrixView weights, std::span<double> out) {
  for (std::size_t f = 0; f < in.rows; ++f) {
    for (std::size_t m = 0; m < weights.rows; ++m) {
      out[f * weights.rows + m] = dot(in.row(f), weights.row(m));
    }
  }
}

}  // namespace serial

// ------------------------------------------------------------------ OpenMP

namespace omp {

void assign_nearest(MatrixView points, MatrixView centroids, std::span<std::size_t> labels,
                    std::span<double> distances) {
  const auto n = static_cast<std::ptrdiff_t>(points.rows);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto u = static_cast<std::size_t>(i);
    nearest_one(centroids, points.row(u), labels[u], distances[u]);
  }
}

std::vector<double> similarity_graph(MatrixView rows) {
  const std::size_t n = rows.rows;
  std::vector<double> w(n * n, 0.0);
  const auto norms = row_norms(rows);
  const auto sn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t si = 0; si < sn; ++si) {
    const auto i = static_cast<std::size_t>(si);
    for (std::size_t j = i + 1; j < n; ++j) {
      const double c = clipped_cosine(rows, norms, i, j);
      w[i * n + j] = c;
      w[j * n + i] = c;
    }
  }
  return w;
}

void stft_frames(std::span<const double> padded, std::span<const double> window,
                 FrameLayout layout, std::size_t frames, std::span<Complex> out) {
  const RealFft fft(layout.n_fft);
  const auto sf = static_cast<std::ptrdiff_t>(frames);
#pragma omp parallel
  {
    std::vector<double> buf(layout.n_fft);
#pragma omp for schedule(static)
    for (std::ptrdiff_t f = 0; f < sf; ++f) {
      stft_one(padded, window, layout, static_cast<std::size_t>(f), fft, buf, out);
    }
  }
}

void istft_overlap_add(std::span<const Complex> spectra, std::span<const double> window,
                       FrameLayout layout, std::size_t frames, std::span<double> out) {
  const std::size_t bins = layout.n_fft / 2 + 1;
  const std::size_t n_fft = layout.n_fft;
  const RealFft fft(n_fft);
  std::vector<double> time(frames * n_fft);
  const auto sf = static_cast<std::ptrdiff_t>(frames);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t f = 0; f < sf; ++f) {
    const auto u = static_cast<std::size_t>(f);
    std::span<double> frame(time.data() + u * n_fft, n_fft);
    fft.inverse(spectra.subspan(u * bins, bins), frame);
    for (std::size_t i = 0; i < n_fft; ++i) frame[i] *= window[i];
  }
  // Each output sample sums its covering frames in ascending order, matching
  // the serial accumulation exactly.
  const auto st = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t si = 0; si < st; ++si) {
    const auto t = static_cast<std::size_t>(si);
    const std::size_t first = t >= n_fft ? (t - n_fft) / layout.hop + 1 : 0;
    const std::size_t last = std::min(frames, t / layout.hop + 1);
    double acc = 0.0;
    for (std::size_t f = first; f < last; ++f) acc += time[f * n_fft + (t - f * layout.hop)];
    out[t] = acc;
  }
  normalize(out, window_envelope(window, layout, frames, out.size()));
}

void project_rows(MatrixView in, MatrixView weights, std::span<double> out) {
  const auto sf = static_cast<std::ptrdiff_t>(in.rows);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t f = 0; f < sf; ++f) {
    const auto u = static_cast<std::size_t>(f);
    for (std::size_t m = 0; m < weights.rows; ++m) {
      out[u * weights.rows + m] = dot(in.row(u), weights.row(m));
    }
  }
}

}  // namespace omp

}  // namespace deckforge::kernels
