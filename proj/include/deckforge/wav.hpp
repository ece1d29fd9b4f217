#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "deckforge/audio.hpp"

namespace deckforge::wav {

inline constexpr std::size_t kHeaderBytes = 44;

/// sample * 32767, rounded to nearest and clamped to [-32767, 32767].
std::int16_t to_pcm16(double sample) noexcept;

/// RIFF/WAVE, PCM 16-bit signed little-endian, mono.
std::string encode(const audio::Waveform& w);

/// Throws Error(IoError).
void write_wav(const audio::Waveform& w, const std::filesystem::path& path);

}  // namespace deckforge::wav
