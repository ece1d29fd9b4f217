#pragma once

#include <chrono>
#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "deckforge/audio.hpp"
#include "deckforge/error.hpp"

namespace deckforge::synth {

/// Handle to a speaker embedding held by the synthesis service.
struct VoiceProfile {
  std::string voice_id;
  std::string display_name;
};

struct ClientOptions {
  std::chrono::milliseconds timeout{30000};
  std::size_t retries = 2;
  std::chrono::milliseconds initial_backoff{250};
  std::size_t max_in_flight = 4;
};

/// Non-2xx reply after retries.
class HttpStatusError : public Error {
 public:
  HttpStatusError(int status, const std::string& detail);
  int status() const noexcept { return status_; }

 private:
  int status_;
};

/// JSON client for the voice-cloning synthesis service:
///
///   POST /embed       {"audio_b64": "..."}            -> {"voice_id": "..."}
///   POST /synthesize  {"text": "...", "voice_id": ""}  -> {"rows": R, "dim": D, "data": [...]}
///   GET  /voices                                       -> [{"voice_id": "...", "display_name": "..."}]
///
/// /synthesize may also answer with the embedding sidecar text format.
/// Transport failures and 5xx replies are retried with exponential backoff;
/// 4xx replies are not. Calls are safe from multiple threads; at most
/// max_in_flight requests run at once.
class SynthClient {
 public:
  /// endpoint: "http://host[:port][/prefix]" or https. Throws Error(InvalidConfig).
  explicit SynthClient(std::string endpoint, ClientOptions options = {});
  ~SynthClient();
  SynthClient(const SynthClient&) = delete;
  SynthClient& operator=(const SynthClient&) = delete;

  VoiceProfile enroll(std::string_view reference_audio);
  audio::MelSpectrogram synthesize(std::string_view text, const VoiceProfile& voice);
  std::vector<VoiceProfile> voices();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

std::string base64_encode(std::string_view bytes);

/// Parses a /synthesize body (JSON or sidecar text). Throws MalformedResponse
/// or NonFiniteValue.
audio::MelSpectrogram parse_mel_response(std::string_view body);

}  // namespace deckforge::synth
