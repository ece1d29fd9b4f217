#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "deckforge/docmodel.hpp"
#include "deckforge/error.hpp"
#include "deckforge/rouge.hpp"
#include "deckforge/summarize.hpp"
#include "deckforge/textcore.hpp"

namespace deckforge::pipeline {

enum class AudioMode { Off, Stub, Service };

std::string_view to_string(AudioMode mode) noexcept;
/// Throws Error(InvalidConfig).
AudioMode parse_audio_mode(std::string_view name);

struct EmitFlags {
  bool markdown = true;
  bool json = false;
  bool pptx = false;
};

/// "md,json,pptx" in any order; "markdown" is accepted for "md".
EmitFlags parse_emit(std::string_view list);

struct PipelineConfig {
  std::filesystem::path input;
  /// Inferred from the input extension when unset: .md, .tex, anything else plain.
  std::optional<docmodel::SourceFormat> format;
  std::filesystem::path out_dir = "out";
  summarize::SummaryConfig summary;
  std::string base_url;
  AudioMode audio = AudioMode::Off;
  std::string endpoint;                // service mode only
  std::filesystem::path voice_ref;     // service mode only
  EmitFlags emit;
  std::filesystem::path model;         // regression strategy: file written by train()
  std::filesystem::path embeddings;    // optional external sentence embeddings
  std::size_t griffin_lim_iterations = 60;

  /// Throws Error(InvalidConfig): no emit flag, service mode without an
  /// endpoint or voice reference, regression without a model, or an invalid SummaryConfig.
  void validate() const;
};

/// Reads a UTF-8 "key = value" file. Blank lines and lines starting with '#'
/// or ';' are skipped. Throws FileMissing, InvalidUtf8 or InvalidConfig.
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);

/// Applies one setting named like its command-line flag without dashes
/// ("input", "format", "strategy", "ratio", "out", "emit", "audio",
/// "endpoint", "voice-ref", "base-url", "seed", "model", "embeddings",
/// "min-bullets", "max-bullets", "gl-iterations"). Throws Error(InvalidConfig).
void apply_setting(PipelineConfig& cfg, std::string_view key, std::string_view value);

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct AudioFailure {
  std::size_t slide = 0;
  ErrorCode code = ErrorCode::IoError;
  std::string message;
};

struct RunReport {
  std::size_t sections = 0;
  std::size_t sentences = 0;
  std::size_t slides = 0;
  std::size_t audio_files = 0;
  /// Relative to the output directory, sorted; the manifest is not listed.
  std::vector<std::string> written;
  std::filesystem::path manifest;
  std::vector<StageTiming> timings;
  std::vector<AudioFailure> audio_failures;
};

inline constexpr std::string_view kManifestName = "MANIFEST.sha256";

/// parse -> summarize -> deck -> narrate -> audio. Stage errors surface as
/// StageError("<stage>: <Code>: <detail>"). Audio failures for individual
/// slides are collected in the report; the deck artifacts and manifest are
/// still written.
RunReport run(const PipelineConfig& cfg);

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view bytes);

/// Recomputes every hash listed in <dir>/MANIFEST.sha256. Throws
/// Error(ManifestMismatch) naming the first missing or altered artifact.
void verify_manifest(const std::filesystem::path& dir);

// ------------------------------------------------------------ evaluation

struct CorpusEntry {
  std::string name;
  std::filesystem::path document;
  docmodel::SourceFormat format = docmodel::SourceFormat::Plain;
  std::filesystem::path reference;
  std::optional<std::filesystem::path> embeddings;  // "X.emb" when present
};

/// Pairs "X.md"/"X.txt"/"X.tex" with "X.ref.txt" (and optional "X.emb"),
/// sorted by name. Throws Error(UnpairedDocument) for an empty corpus or a
/// document or reference without its partner.
std::vector<CorpusEntry> discover_corpus(const std::filesystem::path& dir);

struct EvalOptions {
  std::filesystem::path corpus;
  std::vector<std::string> strategies = {"centroid", "textrank", "random"};
  summarize::SummaryConfig summary;
  /// Report files are written here when non-empty.
  std::filesystem::path out_dir;
};

struct DocumentScores {
  std::string name;
  std::vector<std::pair<std::string, rouge::RougeReport>> reports;
};

struct EvalReport {
  std::vector<DocumentScores> documents;
  std::vector<std::pair<std::string, rouge::RougeReport>> means;
  std::vector<std::filesystem::path> written;
};

/// Scores every strategy on every corpus document against its reference.
/// Regression is trained leave-one-out in a corpus-wide TF-IDF space.
/// Writes eval_table.txt, eval.csv and eval_per_document.csv.
EvalReport eval(const EvalOptions& options);

// ------------------------------------------------------------ regression model

/// TF-IDF vocabulary and the overlap regressor trained in its space.
struct RegressionBundle {
  textcore::TfIdfModel tfidf;
  summarize::RegressorModel regressor;
};

/// Trains on every corpus document and its reference summary.
RegressionBundle train(const std::filesystem::path& corpus);

std::string format_bundle(const RegressionBundle& bundle);
/// Throws Error(MalformedHeader) or Error(DimensionMismatch).
RegressionBundle parse_bundle(std::string_view text);

// ------------------------------------------------------------ exit codes

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitStage = 3;
inline constexpr int kExitUnreachable = 4;

int exit_code_for(ErrorCode code) noexcept;

}  // namespace deckforge::pipeline
