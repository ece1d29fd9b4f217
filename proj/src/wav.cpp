#include "deckforge/wav.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "deckforge/error.hpp"

namespace deckforge::wav {

namespace {

void put16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>(v >> 8));
}

void put32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

}  // namespace

std::int16_t to_pcm16(double sample) noexcept {
  if (std::isnan(sample)) return 0;
  const double scaled = std::round(std::clamp(sample, -1.0, 1.0) * 32767.0);
  return static_cast<std::int16_t>(scaled);
}

std::string encode(const audio::Waveform& w) {
  constexpr std::uint16_t channels = 1;
  constexpr std::uint16_t bits = 16;
  const auto data_bytes = static_cast<std::uint32_t>(w.samples.size() * sizeof(std::int16_t));
  std::string out;
  out.reserve(kHeaderBytes + data_bytes);
  out += "RIFF";
  put32(out, 36 + data_bytes);
  out += "WAVE";
  out += "fmt ";
  put32(out, 16);
  put16(out, 1);  // PCM
  put16(out, channels);
  put32(out, w.sample_rate);
  put32(out, w.sample_rate * channels * bits / 8);
  put16(out, channels * bits / 8);
  put16(out, bits);
  out += "data";
  put32(out, data_bytes);
  for (double s : w.samples) put16(out, static_cast<std::uint16_t>(to_pcm16(s)));
  return out;
}

void write_wav(const audio::Waveform& w, const std::filesystem::path& path) {
  const auto bytes = encode(w);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error(ErrorCode::IoError, "short write to " + path.string());
}

}  // namespace deckforge::wav
