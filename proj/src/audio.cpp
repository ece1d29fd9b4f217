#include "deckforge/audio.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "deckforge/error.hpp"
#include "deckforge/kernels.hpp"
#include "deckforge/textcore.hpp"
#include "deckforge/utf8.hpp"

namespace deckforge::audio {

namespace {

constexpr std::size_t kStubFramesPerChar = 5;
constexpr double kStubSigma = 2.0;
constexpr double kStubAmplitude = 1.0;
constexpr double kVocodePeak = 0.9;

kernels::FrameLayout layout_of(const StftConfig& cfg) { return {cfg.n_fft, cfg.hop}; }

double frobenius(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

std::vector<double> reflect_pad(std::span<const double> x, std::size_t pad) {
  const std::size_t n = x.size();
  std::vector<double> out(n + 2 * pad);
  for (std::size_t j = 0; j < pad; ++j) out[j] = x[pad - j];
  std::copy(x.begin(), x.end(), out.begin() + static_cast<std::ptrdiff_t>(pad));
  for (std::size_t i = 0; i < pad; ++i) out[pad + n + i] = x[n - 2 - i];
  return out;
}

void normalize_peak(Waveform& w, double target) {
  double peak = 0.0;
  for (double s : w.samples) peak = std::max(peak, std::abs(s));
  if (peak <= 0.0) return;
  const double g = target / peak;
  for (auto& s : w.samples) s *= g;
}

}  // namespace

void StftConfig::validate() const {
  if (n_fft < 4 || (n_fft & (n_fft - 1)) != 0) {
    throw Error(ErrorCode::InvalidConfig, "n_fft must be a power of two >= 4");
  }
  if (hop == 0 || hop > n_fft) throw Error(ErrorCode::InvalidConfig, "hop must lie in [1, n_fft]");
  if (sample_rate == 0) throw Error(ErrorCode::InvalidConfig, "sample_rate must be positive");
}

std::vector<double> hann_window(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
  }
  return w;
}

Spectrogram stft(const Waveform& w, const StftConfig& cfg) {
  cfg.validate();
  if (w.samples.size() < cfg.n_fft) {
    throw Error(ErrorCode::TooShort, std::to_string(w.samples.size()) + " samples, n_fft " +
                                         std::to_string(cfg.n_fft));
  }
  const auto padded = reflect_pad(w.samples, cfg.n_fft / 2);
  Spectrogram s;
  s.n_fft = cfg.n_fft;
  s.hop = cfg.hop;
  s.frames = 1 + w.samples.size() / cfg.hop;
  s.data.resize(s.frames * cfg.bins());
  const auto window = hann_window(cfg.n_fft);
  kernels::omp::stft_frames(padded, window, layout_of(cfg), s.frames, s.data);
  return s;
}

Waveform istft(const Spectrogram& s, const StftConfig& cfg, std::optional<std::size_t> length) {
  cfg.validate();
  if (s.n_fft != cfg.n_fft || s.hop != cfg.hop) {
    throw Error(ErrorCode::DimensionMismatch, "spectrogram framing differs from the config");
  }
  Waveform w;
  w.sample_rate = cfg.sample_rate;
  if (s.frames == 0) {
    w.samples.assign(length.value_or(0), 0.0);
    return w;
  }
  const std::size_t n = length.value_or(cfg.hop * (s.frames - 1));
  std::vector<double> full(cfg.n_fft + cfg.hop * (s.frames - 1));
  const auto window = hann_window(cfg.n_fft);
  kernels::omp::istft_overlap_add(s.data, window, layout_of(cfg), s.frames, full);
  const std::size_t pad = cfg.n_fft / 2;
  w.samples.assign(n, 0.0);
  for (std::size_t i = 0; i < n && pad + i < full.size(); ++i) w.samples[i] = full[pad + i];
  return w;
}

Magnitudes magnitude(const Spectrogram& s) {
  Magnitudes m{s.frames, s.bins(), std::vector<double>(s.data.size())};
  for (std::size_t i = 0; i < s.data.size(); ++i) m.data[i] = std::sqrt(std::norm(s.data[i]));
  return m;
}

double hz_to_mel(double hz) noexcept { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double mel_to_hz(double mel) noexcept { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

std::vector<double> mel_filterbank(std::size_t n_mels, std::size_t n_fft, double sample_rate,
                                   double fmin, double fmax) {
  if (!(fmin >= 0.0 && fmin < fmax)) {
    throw Error(ErrorCode::BadRange, "need 0 <= fmin < fmax, got fmin=" + std::to_string(fmin) +
                                         " fmax=" + std::to_string(fmax));
  }
  if (fmax > sample_rate / 2.0) {
    throw Error(ErrorCode::BadRange, "fmax=" + std::to_string(fmax) + " is above Nyquist");
  }
  if (n_mels < 2) throw Error(ErrorCode::InvalidConfig, "n_mels must be >= 2");
  const std::size_t bins = n_fft / 2 + 1;
  const double mel_lo = hz_to_mel(fmin);
  const double mel_hi = hz_to_mel(fmax);
  std::vector<double> edges(n_mels + 2);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    edges[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) /
                                      static_cast<double>(n_mels + 1));
  }
  std::vector<double> fb(n_mels * bins, 0.0);
  for (std::size_t m = 0; m < n_mels; ++m) {
    const double lo = edges[m];
    const double centre = edges[m + 1];
    const double hi = edges[m + 2];
    for (std::size_t k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * sample_rate / static_cast<double>(n_fft);
      const double up = (f - lo) / (centre - lo);
      const double down = (hi - f) / (hi - centre);
      fb[m * bins + k] = std::max(0.0, std::min(up, down));
    }
  }
  return fb;
}

MelSpectrogram mel_project(const Magnitudes& linear, const StftConfig& cfg, const MelConfig& mel) {
  if (linear.cols != cfg.bins()) {
    throw Error(ErrorCode::DimensionMismatch, std::to_string(linear.cols) + " bins, expected " +
                                                  std::to_string(cfg.bins()));
  }
  const auto fb = mel_filterbank(mel.n_mels, cfg.n_fft, cfg.sample_rate, mel.fmin,
                                 mel.fmax.value_or(cfg.sample_rate / 2.0));
  MelSpectrogram out{linear.frames, mel.n_mels, std::vector<double>(linear.frames * mel.n_mels)};
  kernels::omp::project_rows({linear.data, linear.frames, linear.cols}, {fb, mel.n_mels, cfg.bins()},
                             out.data);
  return out;
}

Magnitudes mel_invert(const MelSpectrogram& m, const StftConfig& cfg, const MelConfig& mel) {
  if (m.n_mels != mel.n_mels) {
    throw Error(ErrorCode::DimensionMismatch, std::to_string(m.n_mels) + " mel bins, expected " +
                                                  std::to_string(mel.n_mels));
  }
  const std::size_t bins = cfg.bins();
  const auto fb = mel_filterbank(mel.n_mels, cfg.n_fft, cfg.sample_rate, mel.fmin,
                                 mel.fmax.value_or(cfg.sample_rate / 2.0));
  // Each mel value is first divided by its filter's area, giving the mean
  // magnitude under the filter; each bin is then the fb-weighted average of
  // those means. A flat spectrum comes back exactly wherever filters reach.
  std::vector<double> area(mel.n_mels, 0.0);
  for (std::size_t j = 0; j < mel.n_mels; ++j) {
    for (std::size_t k = 0; k < bins; ++k) area[j] += fb[j * bins + k];
  }
  // bins x n_mels
  std::vector<double> inverse(bins * mel.n_mels, 0.0);
  for (std::size_t k = 0; k < bins; ++k) {
    double colsum = 0.0;
    for (std::size_t j = 0; j < mel.n_mels; ++j) colsum += fb[j * bins + k];
    if (colsum <= 0.0) continue;
    for (std::size_t j = 0; j < mel.n_mels; ++j) {
      if (area[j] > 0.0) inverse[k * mel.n_mels + j] = fb[j * bins + k] / (colsum * area[j]);
    }
  }
  Magnitudes out{m.frames, bins, std::vector<double>(m.frames * bins)};
  kernels::omp::project_rows({m.data, m.frames, m.n_mels}, {inverse, bins, mel.n_mels}, out.data);
  for (auto& v : out.data) v = std::max(v, 0.0);
  return out;
}

double spectral_convergence(const Magnitudes& target, const Waveform& w, const StftConfig& cfg) {
  const double denom = frobenius(target.data);
  if (denom == 0.0) return 0.0;
  const auto est = magnitude(stft(w, cfg));
  if (est.frames != target.frames || est.cols != target.cols) {
    throw Error(ErrorCode::DimensionMismatch, "reconstruction framing differs from the target");
  }
  double num = 0.0;
  for (std::size_t i = 0; i < est.data.size(); ++i) {
    const double d = est.data[i] - target.data[i];
    num += d * d;
  }
  return std::sqrt(num) / denom;
}

GriffinLimResult griffin_lim(const Magnitudes& input, const StftConfig& cfg,
                             const GriffinLimOptions& options) {
  cfg.validate();
  if (input.cols != cfg.bins()) {
    throw Error(ErrorCode::DimensionMismatch, std::to_string(input.cols) + " bins, expected " +
                                                  std::to_string(cfg.bins()));
  }
  for (double v : input.data) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::NonNegativeViolation, "magnitude " + std::to_string(v));
    }
  }

  GriffinLimResult result;
  result.waveform.sample_rate = cfg.sample_rate;
  if (input.frames == 0) return result;

  // Reconstructions shorter than one FFT cannot be re-analysed; pad with silent frames.
  Magnitudes mag = input;
  const std::size_t min_frames = cfg.n_fft / cfg.hop + 1 + (cfg.n_fft % cfg.hop ? 1 : 0);
  if (mag.frames < min_frames) {
    mag.data.resize(min_frames * mag.cols, 0.0);
    mag.frames = min_frames;
  }
  const std::size_t length = cfg.hop * (mag.frames - 1);

  if (frobenius(mag.data) == 0.0) {
    result.waveform.samples.assign(length, 0.0);
    return result;
  }

  Spectrogram spec;
  spec.n_fft = cfg.n_fft;
  spec.hop = cfg.hop;
  spec.frames = mag.frames;
  spec.data.resize(mag.data.size());
  std::mt19937_64 rng(options.seed);
  for (std::size_t i = 0; i < mag.data.size(); ++i) {
    const double phase = 2.0 * std::numbers::pi * textcore::unit_interval(rng());
    spec.data[i] = std::polar(mag.data[i], phase);
  }

  const double denom = frobenius(mag.data);
  for (std::size_t it = 0; it < options.iterations; ++it) {
    const auto w = istft(spec, cfg, length);
    const auto rebuilt = stft(w, cfg);
    double num = 0.0;
    for (std::size_t i = 0; i < spec.data.size(); ++i) {
      const double a = std::sqrt(std::norm(rebuilt.data[i]));
      const double d = a - mag.data[i];
      num += d * d;
      spec.data[i] = a > 0.0 ? rebuilt.data[i] * (mag.data[i] / a) : Complex(mag.data[i], 0.0);
    }
    result.history.push_back(std::sqrt(num) / denom);
  }
  result.waveform = istft(spec, cfg, length);
  result.spectral_convergence = spectral_convergence(mag, result.waveform, cfg);
  return result;
}

void limit(Waveform& w, double ceiling) {
  double peak = 0.0;
  for (double s : w.samples) peak = std::max(peak, std::abs(s));
  if (peak <= ceiling) return;
  const double g = ceiling / peak;
  for (auto& s : w.samples) s *= g;
}

MelSpectrogram stub_synthesize(std::string_view text, const MelConfig& mel) {
  std::vector<char32_t> code_points;
  for (std::size_t pos = 0; pos < text.size();) code_points.push_back(utf8::decode_next(text, pos));

  MelSpectrogram out{code_points.size() * kStubFramesPerChar, mel.n_mels, {}};
  out.data.assign(out.frames * out.n_mels, 0.0);
  for (std::size_t c = 0; c < code_points.size(); ++c) {
    const double centre = static_cast<double>(code_points[c] % mel.n_mels);
    for (std::size_t f = 0; f < kStubFramesPerChar; ++f) {
      const std::size_t row = c * kStubFramesPerChar + f;
      for (std::size_t m = 0; m < mel.n_mels; ++m) {
        const double d = static_cast<double>(m) - centre;
        out.data[row * mel.n_mels + m] = kStubAmplitude * std::exp(-d * d / (2.0 * kStubSigma * kStubSigma));
      }
    }
  }
  return out;
}

Waveform vocode(const MelSpectrogram& m, const StftConfig& cfg, const MelConfig& mel,
                const GriffinLimOptions& options) {
  auto result = griffin_lim(mel_invert(m, cfg, mel), cfg, options);
  normalize_peak(result.waveform, kVocodePeak);
  limit(result.waveform, 1.0);
  return std::move(result.waveform);
}

}  // namespace deckforge::audio
