#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "deckforge/docmodel.hpp"
#include "deckforge/summarize.hpp"
#include "deckforge/textcore.hpp"

namespace deckforge::rouge {

struct RougeScore {
  double f = 0.0;
  double p = 0.0;
  double r = 0.0;

  bool operator==(const RougeScore&) const = default;
};

struct RougeReport {
  RougeScore rouge1;
  RougeScore rouge2;
  RougeScore rougeL;

  bool operator==(const RougeReport&) const = default;
};

/// (1 + b^2) p r / (r + b^2 p); zero when p + r == 0.
double f_measure(double p, double r, double beta = 1.0) noexcept;

/// Clipped n-gram overlap. Either side without n-grams scores all zeros.
RougeScore rouge_n(const textcore::Tokens& candidate, const textcore::Tokens& reference,
                   std::size_t n, double beta = 1.0);

/// Length of the longest common subsequence (O(|a||b|) time, O(|b|) memory).
std::size_t lcs_length(const textcore::Tokens& a, const textcore::Tokens& b);

RougeScore rouge_l(const textcore::Tokens& candidate, const textcore::Tokens& reference,
                   double beta = 1.0);

/// ROUGE-1, ROUGE-2 and ROUGE-L over token sequences.
RougeReport score(const textcore::Tokens& candidate, const textcore::Tokens& reference,
                  double beta = 1.0);

/// Tokenizes with stopwords kept, then scores.
RougeReport score_text(std::string_view candidate, std::string_view reference, double beta = 1.0);

/// Element-wise mean of reports; zero report for an empty list.
RougeReport mean(const std::vector<RougeReport>& reports);

// ------------------------------------------------------------ reporting

/// One strategy's 3x3 block in the published layout:
///
///              f          p          r
///   rouge -1   0.442307   0.45098    0.43396
///   ...
///
/// Values print with six significant digits, trailing zeros dropped.
std::string render_table(std::string_view label, const RougeReport& report);

/// Blocks for every entry, separated by one blank line.
std::string render_tables(const std::vector<std::pair<std::string, RougeReport>>& rows);

/// "metric,strategy,f,p,r" lines, metric in {rouge-1, rouge-2, rouge-l}.
std::string render_csv(const std::vector<std::pair<std::string, RougeReport>>& rows,
                       bool with_header = true);

/// Values as published for the five reported comparisons, in order:
/// abstractive, textrank, svm-regression, bert-centroid, and bert deck vs
/// human deck. Used as harness fixtures only.
std::vector<std::pair<std::string, RougeReport>> published_tables();

// ------------------------------------------------------------ harness

/// Sentence embeddings for a whole document, sections concatenated in order.
struct DocumentEmbeddings {
  textcore::EmbeddingMatrix matrix;
  std::vector<std::size_t> section_offsets;  // first row of each section
};

struct StrategySpec {
  std::string name;  // "centroid", "textrank", "regression", "random"
  summarize::Strategy strategy = summarize::Strategy::Centroid;
  bool random = false;
  const summarize::RegressorModel* model = nullptr;  // required for regression
  /// Replaces the shared document embeddings for this strategy, e.g. rows in
  /// the regressor's training feature space.
  const DocumentEmbeddings* embeddings = nullptr;
};

/// Throws Error(InvalidConfig) for unknown names.
StrategySpec parse_strategy_spec(std::string_view name);

/// TF-IDF fitted over every sentence of the document.
DocumentEmbeddings embed_document(const docmodel::Document& doc);

/// Embeddings under an existing model (regression needs a shared feature space).
DocumentEmbeddings embed_document(const docmodel::Document& doc, const textcore::TfIdfModel& model);

/// External embeddings for a document; rows must equal the sentence count.
DocumentEmbeddings attach_external(const docmodel::Document& doc, textcore::EmbeddingMatrix matrix);

/// Per-section summaries for one strategy; sections without sentences yield nullopt.
std::vector<std::optional<summarize::Summary>> summarize_document(
    const docmodel::Document& doc, const DocumentEmbeddings& embeddings, const StrategySpec& spec,
    const summarize::SummaryConfig& cfg);

/// The selected sentences of every section, in document order, joined by spaces.
std::string summary_text(const docmodel::Document& doc,
                         const std::vector<std::optional<summarize::Summary>>& summaries);

/// Runs each strategy over the document and scores its concatenated selection
/// against the reference summary.
std::vector<std::pair<std::string, RougeReport>> compare_strategies(
    const docmodel::Document& doc, const DocumentEmbeddings& embeddings,
    std::string_view reference_summary, const std::vector<StrategySpec>& strategies,
    const summarize::SummaryConfig& cfg, double beta = 1.0);

}  // namespace deckforge::rouge
