#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "deckforge/synth_client.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <httplib.h>
#include <json.hpp>
#include <semaphore>
#include <thread>

#include "deckforge/textcore.hpp"

namespace deckforge::synth {

namespace {

using nlohmann::json;

struct Endpoint {
  std::string scheme_host_port;
  std::string prefix;
};

Endpoint split_endpoint(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::InvalidConfig, "endpoint '" + url + "' lacks a scheme");
  }
  const auto scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw Error(ErrorCode::InvalidConfig, "unsupported endpoint scheme '" + scheme + "'");
  }
  const auto path_start = url.find('/', scheme_end + 3);
  Endpoint e;
  e.scheme_host_port = url.substr(0, path_start);
  if (path_start != std::string::npos) {
    e.prefix = url.substr(path_start);
    while (!e.prefix.empty() && e.prefix.back() == '/') e.prefix.pop_back();
  }
  if (e.scheme_host_port.size() <= scheme_end + 3) {
    throw Error(ErrorCode::InvalidConfig, "endpoint '" + url + "' lacks a host");
  }
  return e;
}

[[noreturn]] void malformed(const std::string& what) {
  throw Error(ErrorCode::MalformedResponse, what);
}

json parse_json(const std::string& body, std::string_view what) {
  try {
    return json::parse(body);
  } catch (const json::exception& e) {
    malformed(std::string(what) + ": " + e.what());
  }
}

VoiceProfile voice_from_json(const json& j) {
  if (!j.is_object() || !j.contains("voice_id") || !j["voice_id"].is_string() ||
      j["voice_id"].get<std::string>().empty()) {
    malformed("reply lacks a non-empty string 'voice_id'");
  }
  VoiceProfile v;
  v.voice_id = j["voice_id"].get<std::string>();
  if (j.contains("display_name") && j["display_name"].is_string()) {
    v.display_name = j["display_name"].get<std::string>();
  } else {
    v.display_name = v.voice_id;
  }
  return v;
}

}  // namespace

HttpStatusError::HttpStatusError(int status, const std::string& detail)
    : Error(ErrorCode::HttpStatus, std::to_string(status) + (detail.empty() ? "" : " " + detail)),
      status_(status) {}

struct SynthClient::Impl {
  Endpoint endpoint;
  ClientOptions options;
  std::counting_semaphore<> in_flight;

  Impl(Endpoint e, ClientOptions o)
      : endpoint(std::move(e)),
        options(o),
        in_flight(static_cast<std::ptrdiff_t>(std::max<std::size_t>(o.max_in_flight, 1))) {}

  std::string request(const std::string& method, const std::string& path, const std::string& body) {
    in_flight.acquire();
    struct Release {
      std::counting_semaphore<>& s;
      ~Release() { s.release(); }
    } release{in_flight};

    auto backoff = options.initial_backoff;
    for (std::size_t attempt = 0;; ++attempt) {
      const bool last = attempt >= options.retries;
      httplib::Client client(endpoint.scheme_host_port);
      const auto secs = std::chrono::duration_cast<std::chrono::seconds>(options.timeout);
      const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(options.timeout - secs);
      client.set_connection_timeout(secs.count(), usecs.count());
      client.set_read_timeout(secs.count(), usecs.count());
      client.set_write_timeout(secs.count(), usecs.count());

      const auto full_path = endpoint.prefix + path;
      auto res = method == "GET" ? client.Get(full_path)
                                 : client.Post(full_path, body, "application/json");
      if (res) {
        if (res->status >= 200 && res->status < 300) return res->body;
        if (res->status < 500 || last) throw HttpStatusError(res->status, method + " " + full_path);
      } else {
        const auto err = res.error();
        if (last) {
          const bool timed_out = err == httplib::Error::ConnectionTimeout ||
                                 err == httplib::Error::Read || err == httplib::Error::Write;
          throw Error(timed_out ? ErrorCode::Timeout : ErrorCode::ServiceUnreachable,
                      method + " " + endpoint.scheme_host_port + full_path + ": " +
                          httplib::to_string(err));
        }
      }
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
  }
};

SynthClient::SynthClient(std::string endpoint, ClientOptions options)
    : impl_(std::make_unique<Impl>(split_endpoint(endpoint), options)) {}

SynthClient::~SynthClient() = default;

VoiceProfile SynthClient::enroll(std::string_view reference_audio) {
  const json req = {{"audio_b64", base64_encode(reference_audio)}};
  const auto body = impl_->request("POST", "/embed", req.dump());
  return voice_from_json(parse_json(body, "/embed reply"));
}

audio::MelSpectrogram SynthClient::synthesize(std::string_view text, const VoiceProfile& voice) {
  if (text.empty()) throw Error(ErrorCode::EmptyText, "nothing to synthesize");
  const json req = {{"text", std::string(text)}, {"voice_id", voice.voice_id}};
  return parse_mel_response(impl_->request("POST", "/synthesize", req.dump()));
}

std::vector<VoiceProfile> SynthClient::voices() {
  const auto j = parse_json(impl_->request("GET", "/voices", {}), "/voices reply");
  const json& list = j.is_object() && j.contains("voices") ? j["voices"] : j;
  if (!list.is_array()) malformed("/voices reply is not a list");
  std::vector<VoiceProfile> out;
  for (const auto& item : list) out.push_back(voice_from_json(item));
  return out;
}

std::string base64_encode(std::string_view bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                reinterpret_cast<const unsigned char*>(bytes.data()),
                                static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

audio::MelSpectrogram parse_mel_response(std::string_view body) {
  const auto first = body.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) malformed("empty /synthesize reply");

  if (body[first] != '{') {
    try {
      auto m = textcore::parse_sidecar(body);
      return {m.rows, m.dim, std::move(m.data)};
    } catch (const Error& e) {
      if (e.code() == ErrorCode::NonFiniteValue) throw;
      malformed(std::string("sidecar reply: ") + e.what());
    }
  }

  const auto j = parse_json(std::string(body), "/synthesize reply");
  if (!j.is_object() || !j.contains("rows") || !j.contains("dim") || !j.contains("data") ||
      !j["rows"].is_number_unsigned() || !j["dim"].is_number_unsigned() || !j["data"].is_array()) {
    malformed("reply must carry unsigned 'rows', 'dim' and a 'data' array");
  }
  audio::MelSpectrogram m;
  m.frames = j["rows"].get<std::size_t>();
  m.n_mels = j["dim"].get<std::size_t>();
  const auto& data = j["data"];
  if (m.n_mels == 0 || data.size() != m.frames * m.n_mels) {
    malformed("data holds " + std::to_string(data.size()) + " values for " +
              std::to_string(m.frames) + "x" + std::to_string(m.n_mels));
  }
  m.data.reserve(data.size());
  for (const auto& v : data) {
    if (!v.is_number()) malformed("data holds a non-numeric entry");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw Error(ErrorCode::NonFiniteValue, "mel value " + v.dump());
    if (x < 0.0) malformed("mel magnitudes must be non-negative");
    m.data.push_back(x);
  }
  return m;
}

}  // namespace deckforge::synth
