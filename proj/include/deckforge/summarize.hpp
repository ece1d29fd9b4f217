#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "deckforge/docmodel.hpp"
#include "deckforge/textcore.hpp"

namespace deckforge::summarize {

enum class Strategy { Centroid, TextRank, Regression };

std::string_view to_string(Strategy s) noexcept;
/// Throws Error(InvalidConfig) for unknown names.
Strategy parse_strategy(std::string_view name);

struct SummaryConfig {
  Strategy strategy = Strategy::Centroid;
  double ratio = 0.2;
  std::size_t min_bullets = 3;
  std::size_t max_bullets = 7;
  std::uint64_t seed = 42;
  double damping = 0.85;
  double power_tol = 1e-8;
  std::size_t power_max_iter = 200;
  std::size_t kmeans_max_iter = 300;

  /// Throws Error(InvalidConfig) when a field is outside its documented range.
  void validate() const;
};

/// clamp(ceil(ratio * n), min_bullets, max_bullets), then at most n.
std::size_t summary_size(const SummaryConfig& cfg, std::size_t n_sentences);

struct Selected {
  std::size_t sentence_index = 0;
  double score = 0.0;

  bool operator==(const Selected&) const = default;
};

struct Summary {
  std::size_t section_index = 0;
  std::vector<Selected> selected;  // ascending sentence_index
  std::size_t k = 0;

  bool operator==(const Summary&) const = default;
};

/// Cluster the rows into K groups and keep, per cluster, the sentence closest
/// (Euclidean) to the centroid. Score is the negated distance.
Summary summarize_centroid(std::size_t n_sentences, const textcore::EmbeddingMatrix& embeddings,
                           const SummaryConfig& cfg);

struct PageRankResult {
  std::vector<double> ranks;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Power iteration r <- (1-d)/n + d * P^T r where P is W with each row
/// normalised to sum 1 (all-zero rows become uniform). Stops when the L1
/// change drops below tol. Throws NonSquare / NegativeWeight.
PageRankResult pagerank(std::span<const double> weights, std::size_t n, double damping, double tol,
                        std::size_t max_iter);

/// Ranks sentences with PageRank over the clipped cosine-similarity graph and
/// keeps the top K (ties to the lower index).
Summary summarize_textrank(std::size_t n_sentences, const textcore::EmbeddingMatrix& embeddings,
                           const SummaryConfig& cfg);

/// Linear scorer: score(x) = w.x + bias.
struct RegressorModel {
  std::vector<double> weights;
  double bias = 0.0;

  double predict(std::span<const double> x) const;
};

struct TrainingDocument {
  std::vector<textcore::Tokens> sentences;
  textcore::EmbeddingMatrix embeddings;
  textcore::Tokens reference;
};

/// |multiset(sentence) ∩ multiset(reference)| / |sentence|, 0 for an empty sentence.
double overlap_target(const textcore::Tokens& sentence, const textcore::Tokens& reference);

/// Ridge regression (lambda = 1) of overlap targets on embedding rows.
/// Weights solve the normal equations without an intercept; the bias is the
/// mean residual afterwards. Throws EmptyCorpus / DimensionMismatch.
RegressorModel train_overlap_regressor(std::span<const TrainingDocument> corpus,
                                       double lambda = 1.0);

/// Keeps the K sentences with the highest predicted score (ties to the lower index).
Summary summarize_regression(std::size_t n_sentences, const textcore::EmbeddingMatrix& embeddings,
                             const RegressorModel& model, const SummaryConfig& cfg);

/// Model file: weights as a 1 x dim sidecar matrix followed by one line
/// holding the bias.
std::string format_regressor(const RegressorModel& model);
RegressorModel parse_regressor(std::string_view text);

/// Seeded uniform choice of K sentences; the evaluation harness's floor.
Summary summarize_random(std::size_t n_sentences, const SummaryConfig& cfg);

/// Top-K by score with ties to the lower index, returned in position order.
std::vector<Selected> top_k(std::span<const double> scores, std::size_t k);

}  // namespace deckforge::summarize
