#include <doctest.h>

#include <atomic>
#include <future>
#include <json.hpp>
#include <thread>

#include "deckforge/error.hpp"
#include "deckforge/synth_client.hpp"
#include "fixture_server.hpp"

using namespace deckforge;
using namespace std::chrono_literals;
using nlohmann::json;
using testsupport::FixtureServer;
using testsupport::free_port;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::IoError;
}

json mel_json(std::size_t rows, std::size_t dim) {
  json data = json::array();
  for (std::size_t i = 0; i < rows * dim; ++i) data.push_back(static_cast<double>(i % 7) * 0.25);
  return {{"rows", rows}, {"dim", dim}, {"data", data}};
}

synth::ClientOptions fast() {
  synth::ClientOptions o;
  o.timeout = 2000ms;
  o.initial_backoff = 5ms;
  return o;
}

}  // namespace

TEST_CASE("enroll, synthesize and list voices") {
  FixtureServer fx;
  std::string seen_audio, seen_text, seen_voice;
  fx.server.Post("/api/embed", [&](const httplib::Request& req, httplib::Response& res) {
    seen_audio = json::parse(req.body).at("audio_b64").get<std::string>();
    res.set_content(R"({"voice_id":"v1"})", "application/json");
  });
  fx.server.Post("/api/synthesize", [&](const httplib::Request& req, httplib::Response& res) {
    const auto body = json::parse(req.body);
    seen_text = body.at("text").get<std::string>();
    seen_voice = body.at("voice_id").get<std::string>();
    res.set_content(mel_json(10, 80).dump(), "application/json");
  });
  fx.server.Get("/api/voices", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"([{"voice_id":"v1","display_name":"First"},{"voice_id":"v2"}])",
                    "application/json");
  });

  synth::SynthClient client(fx.endpoint("/api"), fast());
  const auto voice = client.enroll(std::string("RIFF\0\x01", 6));
  CHECK(voice.voice_id == "v1");
  CHECK(seen_audio == "UklGRgAB");

  const auto mel = client.synthesize("Hello.", voice);
  CHECK(seen_text == "Hello.");
  CHECK(seen_voice == "v1");
  CHECK(mel.frames == 10);
  CHECK(mel.n_mels == 80);
  CHECK(mel.at(0, 3) == 0.75);

  const auto voices = client.voices();
  REQUIRE(voices.size() == 2);
  CHECK(voices[0].display_name == "First");
  CHECK(voices[1].voice_id == "v2");
}

TEST_CASE("empty text fails before any request") {
  FixtureServer fx;
  std::atomic<int> hits{0};
  fx.server.Post("/synthesize", [&](const httplib::Request&, httplib::Response& res) {
    ++hits;
    res.set_content(mel_json(1, 80).dump(), "application/json");
  });
  synth::SynthClient client(fx.endpoint(), fast());
  CHECK(code_of([&] { client.synthesize("", {"v1", ""}); }) == ErrorCode::EmptyText);
  CHECK(hits == 0);
}

TEST_CASE("5xx is retried, then reported with its status") {
  FixtureServer fx;
  std::atomic<int> hits{0};
  fx.server.Post("/embed", [&](const httplib::Request&, httplib::Response& res) {
    ++hits;
    res.status = 500;
    res.set_content("boom", "text/plain");
  });
  synth::SynthClient client(fx.endpoint(), fast());
  try {
    client.enroll("x");
    FAIL("expected HttpStatusError");
  } catch (const synth::HttpStatusError& e) {
    CHECK(e.status() == 500);
    CHECK(e.code() == ErrorCode::HttpStatus);
  }
  CHECK(hits == 3);  // one attempt plus two retries
}

TEST_CASE("a transient 503 recovers on retry") {
  FixtureServer fx;
  std::atomic<int> hits{0};
  fx.server.Post("/embed", [&](const httplib::Request&, httplib::Response& res) {
    if (hits++ == 0) {
      res.status = 503;
      return;
    }
    res.set_content(R"({"voice_id":"late"})", "application/json");
  });
  synth::SynthClient client(fx.endpoint(), fast());
  CHECK(client.enroll("x").voice_id == "late");
  CHECK(hits == 2);
}

TEST_CASE("4xx is not retried") {
  FixtureServer fx;
  std::atomic<int> hits{0};
  fx.server.Post("/embed", [&](const httplib::Request&, httplib::Response& res) {
    ++hits;
    res.status = 422;
  });
  synth::SynthClient client(fx.endpoint(), fast());
  CHECK(code_of([&] { client.enroll("x"); }) == ErrorCode::HttpStatus);
  CHECK(hits == 1);
}

TEST_CASE("malformed responses") {
  FixtureServer fx;
  std::string body;
  fx.server.Post("/embed", [&](const httplib::Request&, httplib::Response& res) {
    res.set_content(body, "application/json");
  });
  fx.server.Post("/synthesize", [&](const httplib::Request&, httplib::Response& res) {
    res.set_content(body, "application/json");
  });
  synth::SynthClient client(fx.endpoint(), fast());
  const synth::VoiceProfile v{"v1", ""};

  body = R"({"name":"no id"})";
  CHECK(code_of([&] { client.enroll("x"); }) == ErrorCode::MalformedResponse);
  body = R"({"voice_id":""})";
  CHECK(code_of([&] { client.enroll("x"); }) == ErrorCode::MalformedResponse);

  body = mel_json(10, 80).dump();
  body.resize(body.size() / 2);  // truncated
  CHECK(code_of([&] { client.synthesize("a", v); }) == ErrorCode::MalformedResponse);
  body = R"({"rows":2,"dim":2,"data":[1,2,3]})";
  CHECK(code_of([&] { client.synthesize("a", v); }) == ErrorCode::MalformedResponse);
  body = R"({"rows":1,"dim":2,"data":[1,-2]})";
  CHECK(code_of([&] { client.synthesize("a", v); }) == ErrorCode::MalformedResponse);
}

TEST_CASE("mel response parsing") {
  const auto sidecar = synth::parse_mel_response("2 3\n0 1 2\n3 4 5\n");
  CHECK(sidecar.frames == 2);
  CHECK(sidecar.n_mels == 3);
  CHECK(sidecar.at(1, 2) == 5.0);
  CHECK(code_of([] { synth::parse_mel_response("2 3\n0 1 2\n"); }) == ErrorCode::MalformedResponse);
  CHECK(code_of([] { synth::parse_mel_response("1 2\n0 nan\n"); }) == ErrorCode::NonFiniteValue);
  CHECK(code_of([] { synth::parse_mel_response(R"({"rows":1,"dim":1,"data":["x"]})"); }) ==
        ErrorCode::MalformedResponse);
  CHECK(synth::base64_encode("") == "");
  CHECK(synth::base64_encode("f") == "Zg==");
  CHECK(synth::base64_encode("fo") == "Zm8=");
  CHECK(synth::base64_encode("foobar") == "Zm9vYmFy");
}

TEST_CASE("unreachable service and timeouts") {
  const int closed_port = free_port();
  synth::SynthClient dead("http://127.0.0.1:" + std::to_string(closed_port), fast());
  CHECK(code_of([&] { dead.voices(); }) == ErrorCode::ServiceUnreachable);

  FixtureServer fx;
  fx.server.Get("/voices", [](const httplib::Request&, httplib::Response& res) {
    std::this_thread::sleep_for(600ms);
    res.set_content("[]", "application/json");
  });
  auto opts = fast();
  opts.timeout = 150ms;
  opts.retries = 0;
  synth::SynthClient slow(fx.endpoint(), opts);
  CHECK(code_of([&] { slow.voices(); }) == ErrorCode::Timeout);
}

TEST_CASE("endpoint validation") {
  CHECK(code_of([] { synth::SynthClient("127.0.0.1:80"); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] { synth::SynthClient("ftp://host"); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] { synth::SynthClient("http://"); }) == ErrorCode::InvalidConfig);
  CHECK_NOTHROW(synth::SynthClient("https://example.org/tts"));
}

TEST_CASE("concurrent requests stay within max_in_flight") {
  FixtureServer fx;
  std::atomic<int> active{0}, peak{0};
  fx.server.new_task_queue = [] { return new httplib::ThreadPool(8); };
  fx.server.Post("/synthesize", [&](const httplib::Request&, httplib::Response& res) {
    const int now = ++active;
    int prev = peak.load();
    while (now > prev && !peak.compare_exchange_weak(prev, now)) {
    }
    std::this_thread::sleep_for(40ms);
    --active;
    res.set_content(mel_json(2, 80).dump(), "application/json");
  });
  auto opts = fast();
  opts.max_in_flight = 2;
  synth::SynthClient client(fx.endpoint(), opts);
  std::vector<std::future<audio::MelSpectrogram>> jobs;
  for (int i = 0; i < 8; ++i) {
    jobs.push_back(std::async(std::launch::async, [&] { return client.synthesize("x", {"v", ""}); }));
  }
  for (auto& j : jobs) CHECK(j.get().frames == 2);
  CHECK(peak.load() <= 2);
  CHECK(peak.load() >= 1);
}
