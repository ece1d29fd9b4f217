#include "deckforge/pipeline.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <exception>
#include <fstream>
#include <future>
#include <mutex>
#include <set>
#include <sstream>

#include "deckforge/audio.hpp"
#include "deckforge/deck.hpp"
#include "deckforge/pptx.hpp"
#include "deckforge/synth_client.hpp"
#include "deckforge/utf8.hpp"
#include "deckforge/wav.hpp"

namespace deckforge::pipeline {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FileMissing, path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, std::string_view bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error(ErrorCode::IoError, "short write to " + path.string());
}

[[noreturn]] void bad_setting(std::string_view key, std::string_view value, std::string_view why) {
  throw Error(ErrorCode::InvalidConfig,
              std::string(key) + "=" + std::string(value) + ": " + std::string(why));
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end) bad_setting(key, value, "not a number");
  return out;
}

docmodel::SourceFormat infer_format(const fs::path& input) {
  const auto ext = input.extension().string();
  if (ext == ".md" || ext == ".markdown") return docmodel::SourceFormat::Markdown;
  if (ext == ".tex") return docmodel::SourceFormat::LatexMin;
  return docmodel::SourceFormat::Plain;
}

/// Runs `f` as pipeline stage `name`, recording its wall time and annotating
/// escaping errors with the stage.
template <typename F>
auto stage(const char* name, std::vector<StageTiming>& timings, F&& f) {
  const auto start = std::chrono::steady_clock::now();
  auto record = [&] {
    const std::chrono::duration<double> took = std::chrono::steady_clock::now() - start;
    timings.push_back({name, took.count()});
  };
  try {
    if constexpr (std::is_void_v<decltype(f())>) {
      f();
      record();
    } else {
      auto out = f();
      record();
      return out;
    }
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(name, e);
  } catch (const std::exception& e) {
    throw StageError(name, Error(ErrorCode::IoError, e.what()));
  }
}

/// Single funnel for artifact writes so the manifest matches the disk.
class ManifestWriter {
 public:
  explicit ManifestWriter(fs::path dir) : dir_(std::move(dir)) {}

  void write(const std::string& relative, std::string_view bytes) {
    write_file(dir_ / relative, bytes);
    const std::lock_guard lock(mu_);
    entries_[relative] = sha256_hex(bytes);
  }

  std::vector<std::string> paths() const {
    const std::lock_guard lock(mu_);
    std::vector<std::string> out;
    for (const auto& [path, _] : entries_) out.push_back(path);
    return out;
  }

  fs::path finish() const {
    const std::lock_guard lock(mu_);
    std::string text;
    for (const auto& [path, hash] : entries_) text += hash + "  " + path + "\n";
    const auto out = dir_ / std::string(kManifestName);
    write_file(out, text);
    return out;
  }

 private:
  fs::path dir_;
  mutable std::mutex mu_;
  std::map<std::string, std::string> entries_;  // sorted by path
};

docmodel::Document load_document(const fs::path& path, docmodel::SourceFormat format,
                                 bool wrap_without_headings) {
  const auto text = read_file(path);
  docmodel::ParseOptions opts;
  opts.wrap_without_headings = wrap_without_headings;
  return docmodel::parse_document(text, format, opts);
}

std::vector<textcore::Tokens> embedding_tokens(const docmodel::Document& doc) {
  std::vector<textcore::Tokens> out;
  for (const auto& section : doc.sections) {
    for (const auto& s : section.sentences) {
      out.push_back(textcore::tokenize(s.text, {.drop_stopwords = true}));
    }
  }
  return out;
}

summarize::TrainingDocument training_document(const docmodel::Document& doc,
                                              std::string_view reference,
                                              const textcore::TfIdfModel& tfidf) {
  summarize::TrainingDocument td;
  for (const auto& section : doc.sections) {
    for (const auto& s : section.sentences) td.sentences.push_back(textcore::tokenize(s.text));
  }
  td.embeddings = textcore::embed_sentences(embedding_tokens(doc), tfidf);
  td.reference = textcore::tokenize(reference);
  return td;
}

textcore::TfIdfModel corpus_tfidf(const std::vector<docmodel::Document>& docs) {
  std::vector<textcore::Tokens> all;
  for (const auto& doc : docs) {
    auto tokens = embedding_tokens(doc);
    all.insert(all.end(), std::make_move_iterator(tokens.begin()),
               std::make_move_iterator(tokens.end()));
  }
  return textcore::fit_tfidf(all);
}

struct LoadedCorpus {
  std::vector<CorpusEntry> entries;
  std::vector<docmodel::Document> documents;
  std::vector<std::string> references;
};

LoadedCorpus load_corpus(const fs::path& dir) {
  LoadedCorpus c;
  c.entries = discover_corpus(dir);
  for (const auto& e : c.entries) {
    try {
      c.documents.push_back(load_document(e.document, e.format, true));
      c.references.push_back(read_file(e.reference));
      utf8::validate(c.references.back(), e.reference.string());
    } catch (const Error& err) {
      throw Error(err.code(), e.name + ": " + err.detail());
    }
  }
  return c;
}

std::string format_real(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

std::string_view to_string(AudioMode mode) noexcept {
  switch (mode) {
    case AudioMode::Off: return "off";
    case AudioMode::Stub: return "stub";
    case AudioMode::Service: return "service";
  }
  return "off";
}

AudioMode parse_audio_mode(std::string_view name) {
  if (name == "off") return AudioMode::Off;
  if (name == "stub") return AudioMode::Stub;
  if (name == "service") return AudioMode::Service;
  throw Error(ErrorCode::InvalidConfig, "unknown audio mode '" + std::string(name) + "'");
}

EmitFlags parse_emit(std::string_view list) {
  EmitFlags flags{false, false, false};
  std::size_t pos = 0;
  while (pos <= list.size()) {
    auto comma = list.find(',', pos);
    if (comma == std::string_view::npos) comma = list.size();
    const auto item = utf8::trim(list.substr(pos, comma - pos));
    if (item == "md" || item == "markdown") {
      flags.markdown = true;
    } else if (item == "json") {
      flags.json = true;
    } else if (item == "pptx") {
      flags.pptx = true;
    } else if (!item.empty()) {
      throw Error(ErrorCode::InvalidConfig, "unknown emit target '" + std::string(item) + "'");
    }
    pos = comma + 1;
  }
  return flags;
}

void PipelineConfig::validate() const {
  if (!emit.markdown && !emit.json && !emit.pptx) {
    throw Error(ErrorCode::InvalidConfig, "at least one of md, json, pptx must be emitted");
  }
  if (audio == AudioMode::Service && (endpoint.empty() || voice_ref.empty())) {
    throw Error(ErrorCode::InvalidConfig, "audio=service requires an endpoint and a voice reference");
  }
  if (summary.strategy == summarize::Strategy::Regression && model.empty()) {
    throw Error(ErrorCode::InvalidConfig, "strategy=regression requires a model file (see train)");
  }
  if (griffin_lim_iterations == 0) {
    throw Error(ErrorCode::InvalidConfig, "gl-iterations must be positive");
  }
  summary.validate();
}

std::map<std::string, std::string> read_config_file(const fs::path& path) {
  const auto text = read_file(path);
  utf8::validate(text, path.string());
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = utf8::trim(line);
    if (t.empty() || t.front() == '#' || t.front() == ';') continue;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::InvalidConfig,
                  path.string() + ":" + std::to_string(line_no) + ": expected key=value");
    }
    const auto key = utf8::trim(t.substr(0, eq));
    if (key.empty()) {
      throw Error(ErrorCode::InvalidConfig,
                  path.string() + ":" + std::to_string(line_no) + ": empty key");
    }
    out[std::string(key)] = std::string(utf8::trim(t.substr(eq + 1)));
  }
  return out;
}

void apply_setting(PipelineConfig& cfg, std::string_view key, std::string_view value) {
  if (key == "input") {
    cfg.input = fs::path(std::string(value));
  } else if (key == "format") {
    cfg.format = docmodel::parse_source_format(value);
  } else if (key == "strategy") {
    cfg.summary.strategy = summarize::parse_strategy(value);
  } else if (key == "ratio") {
    cfg.summary.ratio = parse_number<double>(key, value);
  } else if (key == "out") {
    cfg.out_dir = fs::path(std::string(value));
  } else if (key == "emit") {
    cfg.emit = parse_emit(value);
  } else if (key == "audio") {
    cfg.audio = parse_audio_mode(value);
  } else if (key == "endpoint") {
    cfg.endpoint = std::string(value);
  } else if (key == "voice-ref") {
    cfg.voice_ref = fs::path(std::string(value));
  } else if (key == "base-url") {
    cfg.base_url = std::string(value);
  } else if (key == "seed") {
    cfg.summary.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "model") {
    cfg.model = fs::path(std::string(value));
  } else if (key == "embeddings") {
    cfg.embeddings = fs::path(std::string(value));
  } else if (key == "min-bullets") {
    cfg.summary.min_bullets = parse_number<std::size_t>(key, value);
  } else if (key == "max-bullets") {
    cfg.summary.max_bullets = parse_number<std::size_t>(key, value);
  } else if (key == "gl-iterations") {
    cfg.griffin_lim_iterations = parse_number<std::size_t>(key, value);
  } else {
    throw Error(ErrorCode::InvalidConfig, "unknown setting '" + std::string(key) + "'");
  }
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::IoError, "sha256 failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

void verify_manifest(const fs::path& dir) {
  std::string text;
  try {
    text = read_file(dir / std::string(kManifestName));
  } catch (const Error&) {
    throw Error(ErrorCode::ManifestMismatch, "no manifest in " + dir.string());
  }
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto sep = line.find("  ");
    if (sep != 64) throw Error(ErrorCode::ManifestMismatch, "malformed manifest line '" + line + "'");
    const auto expected = line.substr(0, sep);
    const auto relative = line.substr(sep + 2);
    std::string bytes;
    try {
      bytes = read_file(dir / relative);
    } catch (const Error&) {
      throw Error(ErrorCode::ManifestMismatch, relative + " is missing");
    }
    if (sha256_hex(bytes) != expected) {
      throw Error(ErrorCode::ManifestMismatch, relative + " does not match its recorded hash");
    }
  }
}

RunReport run(const PipelineConfig& cfg) {
  RunReport report;
  stage("config", report.timings, [&] { cfg.validate(); });

  const auto doc = stage("docmodel", report.timings, [&] {
    return load_document(cfg.input, cfg.format.value_or(infer_format(cfg.input)), false);
  });
  report.sections = doc.sections.size();
  for (const auto& s : doc.sections) report.sentences += s.sentences.size();

  std::optional<RegressionBundle> bundle;
  const auto embeddings = stage("textcore", report.timings, [&] {
    if (cfg.summary.strategy == summarize::Strategy::Regression) {
      bundle = parse_bundle(read_file(cfg.model));
    }
    if (!cfg.embeddings.empty()) {
      return rouge::attach_external(doc, textcore::load_external_embeddings(cfg.embeddings));
    }
    return bundle ? rouge::embed_document(doc, bundle->tfidf) : rouge::embed_document(doc);
  });

  const auto summaries = stage("summarize", report.timings, [&] {
    rouge::StrategySpec spec;
    spec.name = std::string(summarize::to_string(cfg.summary.strategy));
    spec.strategy = cfg.summary.strategy;
    if (bundle) spec.model = &bundle->regressor;
    return rouge::summarize_document(doc, embeddings, spec, cfg.summary);
  });

  ManifestWriter writer(cfg.out_dir);
  const auto slide_deck = stage("deckgen", report.timings, [&] {
    deck::BuildOptions opts;
    opts.base_url = cfg.base_url;
    opts.max_bullets = cfg.summary.max_bullets;
    auto d = deck::build_deck(doc, summaries, opts);
    d.source_doc_ref = cfg.input.filename().string();
    fs::create_directories(cfg.out_dir);
    if (cfg.emit.markdown) writer.write("deck.md", deck::emit_markdown(d));
    if (cfg.emit.json) writer.write("deck.json", deck::emit_deck_json(d));
    if (cfg.emit.pptx) writer.write("deck.pptx", pptx::package(d));
    return d;
  });
  report.slides = slide_deck.slides.size();

  if (cfg.audio != AudioMode::Off) {
    stage("audio", report.timings, [&] {
      const audio::StftConfig stft_cfg;
      const audio::GriffinLimOptions gl{cfg.griffin_lim_iterations, cfg.summary.seed};
      const auto n = slide_deck.slides.size();
      std::vector<std::optional<audio::MelSpectrogram>> mels(n);
      std::vector<std::optional<AudioFailure>> failures(n);
      auto fail = [&](std::size_t i, const Error& e) {
        failures[i] = AudioFailure{slide_deck.slides[i].index, e.code(), e.what()};
      };

      if (cfg.audio == AudioMode::Stub) {
        for (std::size_t i = 0; i < n; ++i) {
          try {
            mels[i] = audio::stub_synthesize(slide_deck.slides[i].narration, audio::MelConfig{});
          } catch (const Error& e) {
            fail(i, e);
          }
        }
      } else {
        synth::SynthClient client(cfg.endpoint);
        std::optional<synth::VoiceProfile> voice;
        try {
          voice = client.enroll(read_file(cfg.voice_ref));
        } catch (const Error& e) {
          for (std::size_t i = 0; i < n; ++i) fail(i, e);
        }
        if (voice) {
          // Requests overlap; the client bounds how many are in flight.
          std::vector<std::future<audio::MelSpectrogram>> pending;
          for (const auto& slide : slide_deck.slides) {
            pending.push_back(std::async(std::launch::async, [&client, &voice, &slide] {
              return client.synthesize(slide.narration, *voice);
            }));
          }
          for (std::size_t i = 0; i < n; ++i) {
            try {
              mels[i] = pending[i].get();
            } catch (const Error& e) {
              fail(i, e);
            }
          }
        }
      }

      const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic)
      for (std::ptrdiff_t si = 0; si < count; ++si) {
        const auto i = static_cast<std::size_t>(si);
        if (!mels[i]) continue;
        try {
          audio::MelConfig mel_cfg;
          mel_cfg.n_mels = mels[i]->n_mels;
          const auto wave = audio::vocode(*mels[i], stft_cfg, mel_cfg, gl);
          writer.write("slide_" + std::to_string(slide_deck.slides[i].index) + ".wav",
                       wav::encode(wave));
        } catch (const Error& e) {
          fail(i, e);
        } catch (const std::exception& e) {
          fail(i, Error(ErrorCode::IoError, e.what()));
        }
      }
      for (auto& f : failures) {
        if (f) report.audio_failures.push_back(std::move(*f));
      }
      report.audio_files = n - report.audio_failures.size();
    });
  }

  report.manifest = stage("manifest", report.timings, [&] { return writer.finish(); });
  report.written = writer.paths();
  return report;
}

// ------------------------------------------------------------ evaluation

std::vector<CorpusEntry> discover_corpus(const fs::path& dir) {
  if (!fs::is_directory(dir)) {
    throw Error(ErrorCode::UnpairedDocument, dir.string() + " is not a directory");
  }
  std::map<std::string, CorpusEntry> docs;
  std::set<std::string> refs;
  std::map<std::string, fs::path> embs;
  for (const auto& item : fs::directory_iterator(dir)) {
    if (!item.is_regular_file()) continue;
    const auto name = item.path().filename().string();
    auto ends_with = [&](std::string_view suffix) {
      return name.size() > suffix.size() && name.ends_with(suffix);
    };
    if (ends_with(".ref.txt")) {
      refs.insert(name.substr(0, name.size() - 8));
    } else if (ends_with(".emb")) {
      embs[name.substr(0, name.size() - 4)] = item.path();
    } else if (ends_with(".md") || ends_with(".txt") || ends_with(".tex")) {
      CorpusEntry e;
      e.name = item.path().stem().string();
      e.document = item.path();
      e.format = infer_format(item.path());
      if (docs.contains(e.name)) {
        throw Error(ErrorCode::UnpairedDocument, "two documents named " + e.name);
      }
      docs.emplace(e.name, std::move(e));
    }
  }
  if (docs.empty() && refs.empty()) {
    throw Error(ErrorCode::UnpairedDocument, "no documents in " + dir.string());
  }
  for (const auto& r : refs) {
    if (!docs.contains(r)) throw Error(ErrorCode::UnpairedDocument, r + ".ref.txt has no document");
  }
  std::vector<CorpusEntry> out;
  for (auto& [name, e] : docs) {
    if (!refs.contains(name)) {
      throw Error(ErrorCode::UnpairedDocument, e.document.filename().string() + " has no " + name +
                                                   ".ref.txt");
    }
    e.reference = dir / (name + ".ref.txt");
    if (auto it = embs.find(name); it != embs.end()) e.embeddings = it->second;
    out.push_back(std::move(e));
  }
  return out;
}

EvalReport eval(const EvalOptions& options) {
  options.summary.validate();
  if (options.strategies.empty()) throw Error(ErrorCode::InvalidConfig, "no strategies to evaluate");
  std::vector<rouge::StrategySpec> specs;
  bool wants_regression = false;
  for (const auto& name : options.strategies) {
    specs.push_back(rouge::parse_strategy_spec(name));
    wants_regression |= !specs.back().random &&
                        specs.back().strategy == summarize::Strategy::Regression;
  }

  const auto corpus = load_corpus(options.corpus);
  const auto n_docs = corpus.documents.size();
  if (wants_regression && n_docs < 2) {
    throw Error(ErrorCode::InvalidConfig, "leave-one-out regression needs at least two documents");
  }

  std::optional<textcore::TfIdfModel> tfidf;
  std::vector<summarize::TrainingDocument> training;
  if (wants_regression) {
    tfidf = corpus_tfidf(corpus.documents);
    for (std::size_t i = 0; i < n_docs; ++i) {
      training.push_back(training_document(corpus.documents[i], corpus.references[i], *tfidf));
    }
  }

  EvalReport report;
  for (std::size_t i = 0; i < n_docs; ++i) {
    const auto& entry = corpus.entries[i];
    const auto& doc = corpus.documents[i];
    try {
      const auto shared = entry.embeddings
                              ? rouge::attach_external(
                                    doc, textcore::load_external_embeddings(*entry.embeddings))
                              : rouge::embed_document(doc);
      std::optional<summarize::RegressorModel> model;
      std::optional<rouge::DocumentEmbeddings> in_model_space;
      auto doc_specs = specs;
      if (wants_regression) {
        std::vector<summarize::TrainingDocument> others;
        for (std::size_t j = 0; j < n_docs; ++j) {
          if (j != i) others.push_back(training[j]);
        }
        model = summarize::train_overlap_regressor(others);
        in_model_space = rouge::embed_document(doc, *tfidf);
        for (auto& spec : doc_specs) {
          if (spec.random || spec.strategy != summarize::Strategy::Regression) continue;
          spec.model = &*model;
          spec.embeddings = &*in_model_space;
        }
      }
      report.documents.push_back(
          {entry.name,
           rouge::compare_strategies(doc, shared, corpus.references[i], doc_specs, options.summary)});
    } catch (const Error& e) {
      throw Error(e.code(), entry.name + ": " + e.detail());
    }
  }

  for (std::size_t s = 0; s < specs.size(); ++s) {
    std::vector<rouge::RougeReport> per_doc;
    for (const auto& d : report.documents) per_doc.push_back(d.reports[s].second);
    report.means.emplace_back(specs[s].name, rouge::mean(per_doc));
  }

  if (!options.out_dir.empty()) {
    fs::create_directories(options.out_dir);
    const auto table = options.out_dir / "eval_table.txt";
    const auto csv = options.out_dir / "eval.csv";
    const auto per_doc = options.out_dir / "eval_per_document.csv";
    write_file(table, rouge::render_tables(report.means));
    write_file(csv, rouge::render_csv(report.means));
    std::string rows = "document,metric,strategy,f,p,r\n";
    for (const auto& d : report.documents) {
      std::istringstream lines(rouge::render_csv(d.reports, false));
      std::string line;
      while (std::getline(lines, line)) rows += d.name + "," + line + "\n";
    }
    write_file(per_doc, rows);
    report.written = {table, csv, per_doc};
  }
  return report;
}

// ------------------------------------------------------------ regression model

RegressionBundle train(const fs::path& corpus_dir) {
  const auto corpus = load_corpus(corpus_dir);
  RegressionBundle bundle;
  bundle.tfidf = corpus_tfidf(corpus.documents);
  std::vector<summarize::TrainingDocument> training;
  for (std::size_t i = 0; i < corpus.documents.size(); ++i) {
    training.push_back(training_document(corpus.documents[i], corpus.references[i], bundle.tfidf));
  }
  bundle.regressor = summarize::train_overlap_regressor(training);
  return bundle;
}

// Layout:
//   deckforge-regression 1
//   tfidf <vocabulary size> <document count>
//   <token> <idf>            one line per column, in column order
//   <regressor>              format_regressor()
std::string format_bundle(const RegressionBundle& bundle) {
  std::vector<const std::string*> by_column(bundle.tfidf.vocabulary.size());
  for (const auto& [token, col] : bundle.tfidf.vocabulary) by_column.at(col) = &token;
  std::string out = "deckforge-regression 1\n";
  out += "tfidf " + std::to_string(by_column.size()) + " " +
         std::to_string(bundle.tfidf.doc_count) + "\n";
  for (std::size_t c = 0; c < by_column.size(); ++c) {
    out += *by_column[c] + " " + format_real(bundle.tfidf.idf.at(c)) + "\n";
  }
  out += summarize::format_regressor(bundle.regressor);
  return out;
}

RegressionBundle parse_bundle(std::string_view text) {
  auto malformed = [](const std::string& why) {
    return Error(ErrorCode::MalformedHeader, "regression model: " + why);
  };
  std::size_t pos = 0;
  auto next_line = [&]() -> std::string_view {
    if (pos >= text.size()) throw malformed("truncated");
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const auto line = text.substr(pos, nl - pos);
    pos = nl + 1;
    return line;
  };

  if (next_line() != "deckforge-regression 1") throw malformed("bad magic line");
  std::istringstream header{std::string(next_line())};
  std::string tag;
  std::size_t vocab = 0, docs = 0;
  if (!(header >> tag >> vocab >> docs) || tag != "tfidf") throw malformed("bad tfidf line");

  RegressionBundle bundle;
  bundle.tfidf.doc_count = docs;
  bundle.tfidf.idf.reserve(vocab);
  for (std::size_t c = 0; c < vocab; ++c) {
    const auto line = next_line();
    const auto sp = line.rfind(' ');
    if (sp == std::string_view::npos || sp == 0) throw malformed("bad vocabulary line");
    double idf = 0.0;
    const auto value = line.substr(sp + 1);
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), idf);
    if (ec != std::errc{} || ptr != value.data() + value.size()) throw malformed("bad idf value");
    if (!bundle.tfidf.vocabulary.emplace(std::string(line.substr(0, sp)), c).second) {
      throw malformed("duplicate vocabulary token");
    }
    bundle.tfidf.idf.push_back(idf);
  }
  bundle.regressor = summarize::parse_regressor(text.substr(std::min(pos, text.size())));
  if (bundle.regressor.weights.size() != std::max<std::size_t>(vocab, 1)) {
    throw Error(ErrorCode::DimensionMismatch,
                "regressor has " + std::to_string(bundle.regressor.weights.size()) +
                    " weights for a vocabulary of " + std::to_string(vocab));
  }
  return bundle;
}

int exit_code_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::EmptyInput:
    case ErrorCode::NoSectionsFound:
    case ErrorCode::InvalidUtf8:
    case ErrorCode::FileMissing:
    case ErrorCode::MalformedHeader:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::NonFiniteValue:
    case ErrorCode::InvalidConfig:
    case ErrorCode::MalformedDeck:
    case ErrorCode::UnpairedDocument:
      return kExitInput;
    case ErrorCode::ServiceUnreachable:
      return kExitUnreachable;
    default:
      return kExitStage;
  }
}

}  // namespace deckforge::pipeline
