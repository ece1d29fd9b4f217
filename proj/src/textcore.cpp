#include "deckforge/textcore.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <unordered_set>

#include "deckforge/error.hpp"
#include "deckforge/kernels.hpp"

namespace deckforge::textcore {

namespace {

bool is_token_byte(unsigned char c) noexcept {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c >= 0x80u;
}

const std::unordered_set<std::string_view>& stopwords() {
  static const std::unordered_set<std::string_view> words = {
      "a",       "about",  "above",   "after",   "again",  "against", "all",     "also",
      "am",      "an",     "and",     "any",     "are",    "as",      "at",      "be",
      "because", "been",   "before",  "being",   "below",  "between", "both",    "but",
      "by",      "can",    "could",   "did",     "do",     "does",    "doing",   "down",
      "during",  "each",   "few",     "for",     "from",   "further", "had",     "has",
      "have",    "having", "he",      "her",     "here",   "hers",    "herself", "him",
      "himself", "his",    "how",     "i",       "if",     "in",      "into",    "is",
      "it",      "its",    "itself",  "just",    "may",    "me",      "more",    "most",
      "must",    "my",     "myself",  "no",      "nor",    "not",     "now",     "of",
      "off",     "on",     "once",    "only",    "or",     "other",   "our",     "ours",
      "ourselves", "out",  "over",    "own",     "same",   "she",     "should",  "so",
      "some",    "such",   "than",    "that",    "the",    "their",   "theirs",  "them",
      "themselves", "then", "there",  "these",   "they",   "this",    "those",   "through",
      "to",      "too",    "under",   "until",   "up",     "very",    "was",     "we",
      "were",    "what",   "when",    "where",   "which",  "while",   "who",     "whom",
      "why",     "will",   "with",    "would",   "you",    "your",    "yours",   "yourself",
      "yourselves"};
  return words;
}

[[noreturn]] void malformed(const std::string& what) { throw Error(ErrorCode::MalformedHeader, what); }

bool parse_size(std::string_view s, std::size_t& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) fields.push_back(line.substr(i, j - i));
    i = j;
  }
  return fields;
}

double parse_real(std::string_view field, std::size_t row) {
  // strtod accepts "nan"/"inf" so they can be reported as NonFiniteValue.
  std::string tmp(field);
  char* end = nullptr;
  const double v = std::strtod(tmp.c_str(), &end);
  if (end != tmp.c_str() + tmp.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "row " + std::to_string(row) + ": '" + tmp + "' is not a number");
  }
  if (!std::isfinite(v)) {
    throw Error(ErrorCode::NonFiniteValue, "row " + std::to_string(row) + " holds " + tmp);
  }
  return v;
}

kernels::MatrixView view(const EmbeddingMatrix& m) { return {m.data, m.rows, m.dim}; }

struct Run {
  std::vector<std::size_t> labels;
  EmbeddingMatrix centroids;
  double inertia = 0.0;
  std::size_t iterations = 0;
  std::vector<double> history;
};

EmbeddingMatrix seed_plus_plus(const EmbeddingMatrix& points, std::size_t k, std::mt19937_64& rng) {
  const std::size_t n = points.rows;
  EmbeddingMatrix centroids(k, points.dim, points.backend);
  std::vector<bool> chosen(n, false);
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());

  auto take = [&](std::size_t idx, std::size_t slot) {
    chosen[idx] = true;
    std::copy_n(points.row(idx).begin(), points.dim, centroids.row(slot).begin());
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], squared_distance(points.row(i), points.row(idx)));
    }
  };

  take(std::min(n - 1, static_cast<std::size_t>(unit_interval(rng()) * static_cast<double>(n))), 0);
  for (std::size_t c = 1; c < k; ++c) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += chosen[i] ? 0.0 : d2[i];
    std::size_t pick = n;
    if (total > 0.0) {
      const double target = unit_interval(rng()) * total;
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (chosen[i] || d2[i] <= 0.0) continue;
        acc += d2[i];
        pick = i;
        if (acc > target) break;
      }
    }
    if (pick == n) {
      // every remaining point coincides with a centre
      pick = static_cast<std::size_t>(std::find(chosen.begin(), chosen.end(), false) - chosen.begin());
    }
    take(pick, c);
  }
  return centroids;
}

void recompute_centroids(const EmbeddingMatrix& points, const std::vector<std::size_t>& labels,
                         EmbeddingMatrix& centroids) {
  std::vector<std::size_t> counts(centroids.rows, 0);
  std::fill(centroids.data.begin(), centroids.data.end(), 0.0);
  for (std::size_t i = 0; i < points.rows; ++i) {
    auto dst = centroids.row(labels[i]);
    auto src = points.row(i);
    for (std::size_t d = 0; d < points.dim; ++d) dst[d] += src[d];
    ++counts[labels[i]];
  }
  for (std::size_t c = 0; c < centroids.rows; ++c) {
    if (counts[c] == 0) continue;
    const double inv = 1.0 / static_cast<double>(counts[c]);
    for (auto& v : centroids.row(c)) v *= inv;
  }
}

Run lloyd(const EmbeddingMatrix& points, EmbeddingMatrix centroids, std::size_t max_iter) {
  const std::size_t n = points.rows;
  const std::size_t k = centroids.rows;
  Run run;
  run.labels.assign(n, 0);
  std::vector<std::size_t> previous;
  std::vector<double> dist(n, 0.0);
  std::vector<std::size_t> counts(k);

  for (std::size_t it = 0; it < std::max<std::size_t>(max_iter, 1); ++it) {
    kernels::omp::assign_nearest(view(points), view(centroids), run.labels, dist);

    std::fill(counts.begin(), counts.end(), 0);
    for (auto l : run.labels) ++counts[l];
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] != 0) continue;
      std::size_t victim = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (counts[run.labels[i]] < 2) continue;
        if (victim == n || dist[i] > dist[victim]) victim = i;
      }
      --counts[run.labels[victim]];
      run.labels[victim] = c;
      dist[victim] = 0.0;
      counts[c] = 1;
      std::copy_n(points.row(victim).begin(), points.dim, centroids.row(c).begin());
    }

    const bool changed = run.labels != previous;
    recompute_centroids(points, run.labels, centroids);
    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      inertia += squared_distance(points.row(i), centroids.row(run.labels[i]));
    }
    run.history.push_back(inertia);
    run.inertia = inertia;
    run.iterations = it + 1;
    if (!changed) break;
    previous = run.labels;
  }
  run.centroids = std::move(centroids);
  return run;
}

}  // namespace

bool is_stopword(std::string_view token) noexcept { return stopwords().contains(token); }

Tokens tokenize(std::string_view text, const TokenizeOptions& options) {
  Tokens out;
  std::string current;
  auto flush = [&] {
    if (current.empty()) return;
    if (!(options.drop_stopwords && is_stopword(current))) out.push_back(current);
    current.clear();
  };
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (is_token_byte(c)) {
      current.push_back((c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : ch);
    } else {
      flush();
    }
  }
  flush();
  return out;
}

EmbeddingMatrix EmbeddingMatrix::select_rows(std::span<const std::size_t> indices) const {
  EmbeddingMatrix out(indices.size(), dim, backend);
  for (std::size_t r = 0; r < indices.size(); ++r) {
    std::copy_n(row(indices[r]).begin(), dim, out.row(r).begin());
  }
  return out;
}

TfIdfModel fit_tfidf(std::span<const Tokens> docs) {
  if (docs.empty()) throw Error(ErrorCode::EmptyCorpus, "cannot fit tf-idf on zero documents");
  std::map<std::string, std::size_t> df;
  for (const auto& doc : docs) {
    std::set<std::string_view> seen(doc.begin(), doc.end());
    for (auto t : seen) ++df[std::string(t)];
  }
  TfIdfModel model;
  model.doc_count = docs.size();
  model.idf.reserve(df.size());
  const double n = static_cast<double>(docs.size());
  for (const auto& [token, count] : df) {
    model.vocabulary.emplace(token, model.idf.size());
    model.idf.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(count))) + 1.0);
  }
  return model;
}

EmbeddingMatrix embed_sentences(std::span<const Tokens> sentences, const TfIdfModel& model) {
  const std::size_t dim = std::max<std::size_t>(model.vocabulary.size(), 1);
  EmbeddingMatrix m(sentences.size(), dim, EmbeddingBackend::TfIdf);
  for (std::size_t r = 0; r < sentences.size(); ++r) {
    auto row = m.row(r);
    for (const auto& token : sentences[r]) {
      auto it = model.vocabulary.find(token);
      if (it != model.vocabulary.end()) row[it->second] += model.idf[it->second];
    }
    double norm2 = 0.0;
    for (double v : row) norm2 += v * v;
    if (norm2 > 0.0) {
      const double inv = 1.0 / std::sqrt(norm2);
      for (auto& v : row) v *= inv;
    }
  }
  return m;
}

EmbeddingMatrix parse_sidecar(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = text.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = nl + 1;
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) malformed("missing '<rows> <dim>' header");

  auto header = split_fields(lines[0]);
  std::size_t rows = 0;
  std::size_t dim = 0;
  if (header.size() != 2 || !parse_size(header[0], rows) || !parse_size(header[1], dim) || dim == 0) {
    malformed("header must be '<rows> <dim>' with dim >= 1, got '" + std::string(lines[0]) + "'");
  }
  if (lines.size() - 1 != rows) {
    malformed("header declares " + std::to_string(rows) + " rows but " +
              std::to_string(lines.size() - 1) + " follow");
  }
  EmbeddingMatrix m(rows, dim, EmbeddingBackend::External);
  for (std::size_t r = 0; r < rows; ++r) {
    auto fields = split_fields(lines[r + 1]);
    if (fields.size() != dim) {
      throw Error(ErrorCode::DimensionMismatch, "row " + std::to_string(r) + " has " +
                                                    std::to_string(fields.size()) +
                                                    " values, expected " + std::to_string(dim));
    }
    for (std::size_t d = 0; d < dim; ++d) m.data[r * dim + d] = parse_real(fields[d], r);
  }
  return m;
}

EmbeddingMatrix load_external_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FileMissing, path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_sidecar(buf.str());
}

std::string format_sidecar(const EmbeddingMatrix& m) {
  std::string out = std::to_string(m.rows) + " " + std::to_string(m.dim) + "\n";
  char tmp[64];
  for (std::size_t r = 0; r < m.rows; ++r) {
    for (std::size_t d = 0; d < m.dim; ++d) {
      auto [ptr, ec] = std::to_chars(tmp, tmp + sizeof tmp, m.data[r * m.dim + d]);
      if (d) out.push_back(' ');
      out.append(tmp, ptr);
    }
    out.push_back('\n');
  }
  return out;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

double unit_interval(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

ClusterAssignment kmeans(const EmbeddingMatrix& points, std::size_t k, const KMeansOptions& options) {
  if (points.rows == 0) throw Error(ErrorCode::EmptyPoints, "kmeans on zero points");
  if (k == 0 || k > points.rows) {
    throw Error(ErrorCode::KTooLarge, "k=" + std::to_string(k) + " with " +
                                          std::to_string(points.rows) + " points");
  }
  std::mt19937_64 rng(options.seed);
  std::optional<Run> best;
  for (std::size_t r = 0; r < std::max<std::size_t>(options.restarts, 1); ++r) {
    auto run = lloyd(points, seed_plus_plus(points, k, rng), options.max_iter);
    if (!best || run.inertia < best->inertia) best = std::move(run);
  }
  ClusterAssignment out;
  out.k = k;
  out.labels = std::move(best->labels);
  out.centroids = std::move(best->centroids);
  out.inertia = best->inertia;
  out.iterations = best->iterations;
  out.inertia_history = std::move(best->history);
  return out;
}

}  // namespace deckforge::textcore
