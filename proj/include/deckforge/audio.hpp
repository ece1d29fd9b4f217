#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace deckforge::audio {

using Complex = std::complex<double>;

struct Waveform {
  std::uint32_t sample_rate = 16000;
  std::vector<double> samples;
};

struct StftConfig {
  std::size_t n_fft = 1024;  // power of two
  std::size_t hop = 256;     // <= n_fft
  std::uint32_t sample_rate = 16000;

  /// Throws Error(InvalidConfig).
  void validate() const;
  std::size_t bins() const noexcept { return n_fft / 2 + 1; }
};

/// frames x bins, row-major.
struct Spectrogram {
  std::size_t n_fft = 1024;
  std::size_t hop = 256;
  std::size_t frames = 0;
  std::vector<Complex> data;

  std::size_t bins() const noexcept { return n_fft / 2 + 1; }
  std::span<const Complex> frame(std::size_t f) const { return {data.data() + f * bins(), bins()}; }
};

/// frames x cols real matrix (magnitudes), row-major.
struct Magnitudes {
  std::size_t frames = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  double at(std::size_t f, std::size_t c) const { return data[f * cols + c]; }
};

struct MelConfig {
  std::size_t n_mels = 80;
  double fmin = 0.0;
  std::optional<double> fmax;  // defaults to sample_rate / 2
};

struct MelSpectrogram {
  std::size_t frames = 0;
  std::size_t n_mels = 80;
  std::vector<double> data;  // frames x n_mels, non-negative

  double at(std::size_t f, std::size_t m) const { return data[f * n_mels + m]; }
};

/// Periodic Hann window of length n.
std::vector<double> hann_window(std::size_t n);

/// Centered STFT: the signal is reflect-padded by n_fft/2 on both sides and
/// cut into 1 + len/hop frames. Throws Error(TooShort) when len < n_fft.
Spectrogram stft(const Waveform& w, const StftConfig& cfg);

/// Windowed overlap-add with squared-window normalisation, trimmed back to
/// the unpadded signal. `length` defaults to hop * (frames - 1).
Waveform istft(const Spectrogram& s, const StftConfig& cfg,
               std::optional<std::size_t> length = std::nullopt);

Magnitudes magnitude(const Spectrogram& s);

double hz_to_mel(double hz) noexcept;  // HTK: 2595 log10(1 + f/700)
double mel_to_hz(double mel) noexcept;

/// n_mels x (n_fft/2+1) triangular filters, row-major, centres equally spaced
/// on the HTK mel scale between fmin and fmax. Throws Error(BadRange) unless
/// 0 <= fmin < fmax <= sample_rate / 2.
std::vector<double> mel_filterbank(std::size_t n_mels, std::size_t n_fft, double sample_rate,
                                   double fmin, double fmax);

/// Projects linear magnitudes through the filterbank. Throws Error(DimensionMismatch).
MelSpectrogram mel_project(const Magnitudes& linear, const StftConfig& cfg, const MelConfig& mel);

/// Normalised transpose: every mel value is divided by its filter's area,
/// then each bin takes the filterbank-weighted average of those values.
/// Bins no filter covers stay zero.
Magnitudes mel_invert(const MelSpectrogram& m, const StftConfig& cfg, const MelConfig& mel);

struct GriffinLimOptions {
  std::size_t iterations = 60;
  std::uint64_t seed = 42;
};

struct GriffinLimResult {
  Waveform waveform;
  /// ||(|STFT(w)| - mag)||_F / ||mag||_F for the returned waveform (0 for zero input).
  double spectral_convergence = 0.0;
  /// Spectral convergence after every iteration.
  std::vector<double> history;
};

/// Random-phase start, then istft -> stft -> keep phase, restore magnitude.
/// Throws Error(NonNegativeViolation) for negative or non-finite magnitudes.
GriffinLimResult griffin_lim(const Magnitudes& mag, const StftConfig& cfg,
                             const GriffinLimOptions& options = {});

double spectral_convergence(const Magnitudes& target, const Waveform& w, const StftConfig& cfg);

/// Scales the waveform down so that |sample| <= ceiling; quieter input is untouched.
void limit(Waveform& w, double ceiling = 1.0);

/// Offline stand-in for the synthesis service: every code point becomes five
/// frames of a Gaussian bump centred on mel bin (code point mod n_mels).
MelSpectrogram stub_synthesize(std::string_view text, const MelConfig& mel);

/// mel -> linear magnitudes -> Griffin-Lim -> limiter.
Waveform vocode(const MelSpectrogram& m, const StftConfig& cfg, const MelConfig& mel,
                const GriffinLimOptions& options = {});

}  // namespace deckforge::audio
