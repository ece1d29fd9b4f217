#include "deckforge/summarize.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>

#include "deckforge/error.hpp"
#include "deckforge/kernels.hpp"

namespace deckforge::summarize {

namespace {

void require_rows(std::size_t n_sentences, const textcore::EmbeddingMatrix& embeddings) {
  if (embeddings.rows != n_sentences) {
    throw Error(ErrorCode::DimensionMismatch,
                std::to_string(embeddings.rows) + " embedding rows for " +
                    std::to_string(n_sentences) + " sentences");
  }
}

Summary make_summary(std::vector<Selected> selected, std::size_t k) {
  std::sort(selected.begin(), selected.end(),
            [](const Selected& a, const Selected& b) { return a.sentence_index < b.sentence_index; });
  Summary s;
  s.selected = std::move(selected);
  s.k = k;
  return s;
}

}  // namespace

std::string_view to_string(Strategy s) noexcept {
  switch (s) {
    case Strategy::Centroid: return "centroid";
    case Strategy::TextRank: return "textrank";
    case Strategy::Regression: return "regression";
  }
  return "centroid";
}

Strategy parse_strategy(std::string_view name) {
  if (name == "centroid") return Strategy::Centroid;
  if (name == "textrank") return Strategy::TextRank;
  if (name == "regression") return Strategy::Regression;
  throw Error(ErrorCode::InvalidConfig, "unknown strategy '" + std::string(name) + "'");
}

void SummaryConfig::validate() const {
  auto bad = [](const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); };
  if (!(ratio > 0.0 && ratio <= 1.0)) bad("ratio must lie in (0, 1]");
  if (min_bullets < 1) bad("min_bullets must be >= 1");
  if (max_bullets < min_bullets) bad("max_bullets must be >= min_bullets");
  if (!(damping > 0.0 && damping < 1.0)) bad("damping must lie in (0, 1)");
  if (!(power_tol > 0.0)) bad("power_tol must be > 0");
  if (power_max_iter < 1) bad("power_max_iter must be >= 1");
}

std::size_t summary_size(const SummaryConfig& cfg, std::size_t n_sentences) {
  // the epsilon keeps products like 0.2 * 15 from rounding up past an integer
  const double raw = std::ceil(cfg.ratio * static_cast<double>(n_sentences) - 1e-9);
  auto k = static_cast<std::size_t>(std::max(raw, 0.0));
  k = std::clamp(k, cfg.min_bullets, cfg.max_bullets);
  return std::min(k, n_sentences);
}

std::vector<Selected> top_k(std::span<const double> scores, std::size_t k) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  order.resize(std::min(k, order.size()));
  std::sort(order.begin(), order.end());
  std::vector<Selected> out;
  out.reserve(order.size());
  for (auto i : order) out.push_back({i, scores[i]});
  return out;
}

// ---------------------------------------------------------------- centroid

Summary summarize_centroid(std::size_t n_sentences, const textcore::EmbeddingMatrix& embeddings,
                           const SummaryConfig& cfg) {
  require_rows(n_sentences, embeddings);
  const std::size_t k = summary_size(cfg, n_sentences);
  if (k == 0) return make_summary({}, 0);

  textcore::KMeansOptions opts;
  opts.seed = cfg.seed;
  opts.max_iter = cfg.kmeans_max_iter;
  const auto clusters = textcore::kmeans(embeddings, k, opts);

  std::vector<Selected> picks(k, Selected{n_sentences, -std::numeric_limits<double>::infinity()});
  std::vector<double> best(k, std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < n_sentences; ++i) {
    const std::size_t c = clusters.labels[i];
    const double d = std::sqrt(textcore::squared_distance(embeddings.row(i), clusters.centroids.row(c)));
    if (d < best[c]) {
      best[c] = d;
      picks[c] = {i, -d};
    }
  }
  return make_summary(std::move(picks), k);
}

// ---------------------------------------------------------------- textrank

PageRankResult pagerank(std::span<const double> weights, std::size_t n, double damping, double tol,
                        std::size_t max_iter) {
  if (weights.size() != n * n) {
    throw Error(ErrorCode::NonSquare, std::to_string(weights.size()) + " weights for " +
                                          std::to_string(n) + " nodes");
  }
  PageRankResult result;
  if (n == 0) {
    result.converged = true;
    return result;
  }
  for (double w : weights) {
    if (w < 0.0 || std::isnan(w)) throw Error(ErrorCode::NegativeWeight, "edge weight " + std::to_string(w));
  }

  const double uniform = 1.0 / static_cast<double>(n);
  std::vector<double> transition(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    double row_sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) row_sum += weights[i * n + j];
    for (std::size_t j = 0; j < n; ++j) {
      transition[i * n + j] = row_sum > 0.0 ? weights[i * n + j] / row_sum : uniform;
    }
  }

  std::vector<double> r(n, uniform);
  std::vector<double> next(n);
  const double teleport = (1.0 - damping) * uniform;
  for (std::size_t it = 0; it < max_iter; ++it) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double ri = r[i];
      const double* row = transition.data() + i * n;
      for (std::size_t j = 0; j < n; ++j) next[j] += row[j] * ri;
    }
    double change = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      next[j] = teleport + damping * next[j];
      change += std::abs(next[j] - r[j]);
    }
    r.swap(next);
    result.iterations = it + 1;
    if (change < tol) {
      result.converged = true;
      break;
    }
  }
  const double total = std::accumulate(r.begin(), r.end(), 0.0);
  for (auto& v : r) v /= total;
  result.ranks = std::move(r);
  return result;
}

Summary summarize_textrank(std::size_t n_sentences, const textcore::EmbeddingMatrix& embeddings,
                           const SummaryConfig& cfg) {
  require_rows(n_sentences, embeddings);
  const std::size_t k = summary_size(cfg, n_sentences);
  if (k == 0) return make_summary({}, 0);
  const auto graph = kernels::omp::similarity_graph({embeddings.data, embeddings.rows, embeddings.dim});
  const auto pr = pagerank(graph, n_sentences, cfg.damping, cfg.power_tol, cfg.power_max_iter);
  return make_summary(top_k(pr.ranks, k), k);
}

// ---------------------------------------------------------------- regression

double RegressorModel::predict(std::span<const double> x) const {
  if (x.size() != weights.size()) {
    throw Error(ErrorCode::DimensionMismatch, "model dim " + std::to_string(weights.size()) +
                                                  ", input dim " + std::to_string(x.size()));
  }
  double s = bias;
  for (std::size_t i = 0; i < x.size(); ++i) s += weights[i] * x[i];
  return s;
}

double overlap_target(const textcore::Tokens& sentence, const textcore::Tokens& reference) {
  if (sentence.empty()) return 0.0;
  std::map<std::string_view, std::size_t> ref_counts;
  for (const auto& t : reference) ++ref_counts[t];
  std::size_t matched = 0;
  for (const auto& t : sentence) {
    auto it = ref_counts.find(t);
    if (it != ref_counts.end() && it->second > 0) {
      --it->second;
      ++matched;
    }
  }
  return static_cast<double>(matched) / static_cast<double>(sentence.size());
}

RegressorModel train_overlap_regressor(std::span<const TrainingDocument> corpus, double lambda) {
  if (corpus.empty()) throw Error(ErrorCode::EmptyCorpus, "no training documents");
  const std::size_t dim = corpus.front().embeddings.dim;
  std::size_t rows = 0;
  for (const auto& doc : corpus) {
    if (doc.embeddings.dim != dim) {
      throw Error(ErrorCode::DimensionMismatch, "training documents disagree on embedding dim (" +
                                                    std::to_string(dim) + " vs " +
                                                    std::to_string(doc.embeddings.dim) + ")");
    }
    require_rows(doc.sentences.size(), doc.embeddings);
    rows += doc.sentences.size();
  }
  if (rows == 0) throw Error(ErrorCode::EmptyCorpus, "training documents hold no sentences");

  Eigen::MatrixXd x(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(dim));
  Eigen::VectorXd y(static_cast<Eigen::Index>(rows));
  Eigen::Index r = 0;
  for (const auto& doc : corpus) {
    for (std::size_t i = 0; i < doc.sentences.size(); ++i, ++r) {
      auto row = doc.embeddings.row(i);
      for (std::size_t d = 0; d < dim; ++d) x(r, static_cast<Eigen::Index>(d)) = row[d];
      y(r) = overlap_target(doc.sentences[i], doc.reference);
    }
  }

  // (X^T X + lambda I) w = X^T y, solved in whichever of the primal or dual
  // forms is smaller: w = X^T (X X^T + lambda I)^-1 y is the same solution.
  Eigen::VectorXd w;
  if (dim <= rows) {
    Eigen::MatrixXd gram = x.transpose() * x;
    gram.diagonal().array() += lambda;
    w = gram.ldlt().solve(x.transpose() * y);
  } else {
    Eigen::MatrixXd kernel = x * x.transpose();
    kernel.diagonal().array() += lambda;
    w = x.transpose() * kernel.ldlt().solve(y);
  }

  RegressorModel model;
  model.weights.assign(w.data(), w.data() + w.size());
  model.bias = (y - x * w).mean();
  return model;
}

Summary summarize_regression(std::size_t n_sentences, const textcore::EmbeddingMatrix& embeddings,
                             const RegressorModel& model, const SummaryConfig& cfg) {
  require_rows(n_sentences, embeddings);
  if (model.weights.size() != embeddings.dim) {
    throw Error(ErrorCode::DimensionMismatch, "model dim " + std::to_string(model.weights.size()) +
                                                  ", embedding dim " + std::to_string(embeddings.dim));
  }
  const std::size_t k = summary_size(cfg, n_sentences);
  std::vector<double> scores(n_sentences);
  for (std::size_t i = 0; i < n_sentences; ++i) scores[i] = model.predict(embeddings.row(i));
  return make_summary(top_k(scores, k), k);
}

std::string format_regressor(const RegressorModel& model) {
  textcore::EmbeddingMatrix m(1, model.weights.size(), textcore::EmbeddingBackend::External);
  m.data = model.weights;
  char tmp[64];
  auto [ptr, ec] = std::to_chars(tmp, tmp + sizeof tmp, model.bias);
  return textcore::format_sidecar(m) + std::string(tmp, ptr) + "\n";
}

RegressorModel parse_regressor(std::string_view text) {
  // the bias is the last non-empty line; everything before is a sidecar matrix
  auto end = text.find_last_not_of("\r\n");
  if (end == std::string_view::npos) throw Error(ErrorCode::MalformedHeader, "empty model file");
  auto body = text.substr(0, end + 1);
  auto nl = body.rfind('\n');
  if (nl == std::string_view::npos) throw Error(ErrorCode::MalformedHeader, "model file lacks a bias line");
  auto matrix = textcore::parse_sidecar(body.substr(0, nl + 1));
  if (matrix.rows != 1) {
    throw Error(ErrorCode::MalformedHeader, "model weights must be a single row");
  }
  std::string bias_text(body.substr(nl + 1));
  char* stop = nullptr;
  const double bias = std::strtod(bias_text.c_str(), &stop);
  if (stop == bias_text.c_str()) throw Error(ErrorCode::MalformedHeader, "bias line is not a number");
  if (!std::isfinite(bias)) throw Error(ErrorCode::NonFiniteValue, "bias " + bias_text);
  RegressorModel model;
  model.weights = std::move(matrix.data);
  model.bias = bias;
  return model;
}

Summary summarize_random(std::size_t n_sentences, const SummaryConfig& cfg) {
  const std::size_t k = summary_size(cfg, n_sentences);
  std::vector<std::size_t> order(n_sentences);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(cfg.seed);
  for (std::size_t i = n_sentences; i > 1; --i) {
    const auto j = static_cast<std::size_t>(textcore::unit_interval(rng()) * static_cast<double>(i));
    std::swap(order[i - 1], order[std::min(j, i - 1)]);
  }
  std::vector<Selected> picks;
  for (std::size_t i = 0; i < k; ++i) picks.push_back({order[i], 0.0});
  return make_summary(std::move(picks), k);
}

}  // namespace deckforge::summarize
