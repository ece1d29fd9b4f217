#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace deckforge::textcore {

using Tokens = std::vector<std::string>;

struct TokenizeOptions {
  bool drop_stopwords = false;
};

/// Lowercases ASCII, splits on anything that is not an ASCII letter, digit or
/// a non-ASCII byte, and drops empty tokens (and stopwords when requested).
Tokens tokenize(std::string_view text, const TokenizeOptions& options = {});

bool is_stopword(std::string_view token) noexcept;

enum class EmbeddingBackend { TfIdf, External };

/// Row-major rows x dim matrix of finite reals.
struct EmbeddingMatrix {
  std::size_t rows = 0;
  std::size_t dim = 1;
  std::vector<double> data;
  EmbeddingBackend backend = EmbeddingBackend::TfIdf;

  EmbeddingMatrix() = default;
  EmbeddingMatrix(std::size_t r, std::size_t d, EmbeddingBackend b = EmbeddingBackend::TfIdf)
      : rows(r), dim(d), data(r * d, 0.0), backend(b) {}

  std::span<double> row(std::size_t i) { return {data.data() + i * dim, dim}; }
  std::span<const double> row(std::size_t i) const { return {data.data() + i * dim, dim}; }

  /// Copies the listed rows, in order, into a new matrix.
  EmbeddingMatrix select_rows(std::span<const std::size_t> indices) const;
};

struct TfIdfModel {
  std::map<std::string, std::size_t> vocabulary;  // token -> column, columns in sorted token order
  std::vector<double> idf;
  std::size_t doc_count = 0;
};

/// idf(t) = ln((1 + N) / (1 + df(t))) + 1 over N token lists.
/// Throws Error(EmptyCorpus) on an empty list of documents.
TfIdfModel fit_tfidf(std::span<const Tokens> docs);

/// Each row is raw term frequency times idf, L2-normalised. Rows without any
/// in-vocabulary token stay zero. An empty vocabulary yields dim 1.
EmbeddingMatrix embed_sentences(std::span<const Tokens> sentences, const TfIdfModel& model);

// Sidecar text format: "<rows> <dim>\n" then one line of `dim` space-separated
// decimals per row.
//
// Throws Error with MalformedHeader (bad header or row count), DimensionMismatch
// (a row of the wrong width) or NonFiniteValue.
EmbeddingMatrix parse_sidecar(std::string_view text);
EmbeddingMatrix load_external_embeddings(const std::filesystem::path& path);
std::string format_sidecar(const EmbeddingMatrix& m);

/// Returns 0 when either vector has zero norm. Throws Error(DimensionMismatch).
double cosine_similarity(std::span<const double> a, std::span<const double> b);

double squared_distance(std::span<const double> a, std::span<const double> b) noexcept;

struct KMeansOptions {
  std::uint64_t seed = 42;
  std::size_t max_iter = 300;
  /// Independent k-means++ restarts; the run with the lowest inertia wins
  /// (earliest run on ties).
  std::size_t restarts = 4;
};

struct ClusterAssignment {
  std::size_t k = 0;
  std::vector<std::size_t> labels;
  EmbeddingMatrix centroids;
  double inertia = 0.0;
  std::size_t iterations = 0;
  /// Inertia after each Lloyd iteration of the winning run.
  std::vector<double> inertia_history;
};

/// k-means++ seeding followed by Lloyd iterations until the assignment stops
/// changing or max_iter is reached. Ties in nearest-centroid search go to the
/// lowest centroid index. A cluster left empty takes the point farthest from
/// its own centroid.
///
/// Throws Error(EmptyPoints) for zero rows and Error(KTooLarge) for k > rows
/// or k == 0.
ClusterAssignment kmeans(const EmbeddingMatrix& points, std::size_t k,
                         const KMeansOptions& options = {});

/// Deterministic uniform double in [0, 1) from a 64-bit generator word;
/// independent of the standard library's distribution implementations.
double unit_interval(std::uint64_t bits) noexcept;

}  // namespace deckforge::textcore
