#include "deckforge/rouge.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdio>
#include <map>

#include "deckforge/error.hpp"
#include "deckforge/utf8.hpp"

namespace deckforge::rouge {

namespace {

using Gram = std::vector<std::string_view>;

std::map<Gram, std::size_t> ngram_counts(const textcore::Tokens& tokens, std::size_t n) {
  std::map<Gram, std::size_t> counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    Gram g(tokens.begin() + static_cast<std::ptrdiff_t>(i),
           tokens.begin() + static_cast<std::ptrdiff_t>(i + n));
    ++counts[g];
  }
  return counts;
}

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

void rstrip_line(std::string& line) {
  while (!line.empty() && line.back() == ' ') line.pop_back();
}

constexpr std::size_t kLabelWidth = 12;
constexpr std::size_t kValueWidth = 11;

std::vector<textcore::Tokens> section_tokens(const docmodel::Document& doc) {
  std::vector<textcore::Tokens> all;
  for (const auto& section : doc.sections) {
    for (const auto& s : section.sentences) {
      all.push_back(textcore::tokenize(s.text, {.drop_stopwords = true}));
    }
  }
  return all;
}

std::vector<std::size_t> offsets_for(const docmodel::Document& doc) {
  std::vector<std::size_t> offsets;
  std::size_t row = 0;
  for (const auto& section : doc.sections) {
    offsets.push_back(row);
    row += section.sentences.size();
  }
  return offsets;
}

}  // namespace

double f_measure(double p, double r, double beta) noexcept {
  if (p + r <= 0.0) return 0.0;
  const double b2 = beta * beta;
  return (1.0 + b2) * p * r / (r + b2 * p);
}

RougeScore rouge_n(const textcore::Tokens& candidate, const textcore::Tokens& reference,
                   std::size_t n, double beta) {
  if (n == 0) throw Error(ErrorCode::InvalidConfig, "rouge n must be >= 1");
  const auto cand = ngram_counts(candidate, n);
  const auto ref = ngram_counts(reference, n);
  if (cand.empty() || ref.empty()) return {};
  std::size_t matches = 0;
  for (const auto& [gram, count] : cand) {
    auto it = ref.find(gram);
    if (it != ref.end()) matches += std::min(count, it->second);
  }
  const double cand_total = static_cast<double>(candidate.size() - n + 1);
  const double ref_total = static_cast<double>(reference.size() - n + 1);
  RougeScore s;
  s.p = static_cast<double>(matches) / cand_total;
  s.r = static_cast<double>(matches) / ref_total;
  s.f = f_measure(s.p, s.r, beta);
  return s;
}

std::size_t lcs_length(const textcore::Tokens& a, const textcore::Tokens& b) {
  // One DP row over the shorter side; `diag` carries the up-left cell.
  const auto& outer = a.size() >= b.size() ? a : b;
  const auto& inner = a.size() >= b.size() ? b : a;
  if (inner.empty()) return 0;
  constexpr std::size_t kInline = 64;
  std::array<std::uint32_t, kInline + 1> small{};
  std::vector<std::uint32_t> large;
  std::uint32_t* row = small.data();
  if (inner.size() > kInline) {
    large.assign(inner.size() + 1, 0);
    row = large.data();
  }
  // size and first byte settle most comparisons without a memcmp call
  auto same = [](const std::string& x, const std::string& y) {
    return x.size() == y.size() && (x.empty() || (x[0] == y[0] && x == y));
  };
  for (const auto& x : outer) {
    std::uint32_t diag = 0;
    for (std::size_t j = 1; j <= inner.size(); ++j) {
      const std::uint32_t up = row[j];
      row[j] = same(x, inner[j - 1]) ? diag + 1 : std::max(up, row[j - 1]);
      diag = up;
    }
  }
  return row[inner.size()];
}

RougeScore rouge_l(const textcore::Tokens& candidate, const textcore::Tokens& reference,
                   double beta) {
  if (candidate.empty() || reference.empty()) return {};
  const double l = static_cast<double>(lcs_length(candidate, reference));
  RougeScore s;
  s.p = l / static_cast<double>(candidate.size());
  s.r = l / static_cast<double>(reference.size());
  s.f = f_measure(s.p, s.r, beta);
  return s;
}

RougeReport score(const textcore::Tokens& candidate, const textcore::Tokens& reference,
                  double beta) {
  return {rouge_n(candidate, reference, 1, beta), rouge_n(candidate, reference, 2, beta),
          rouge_l(candidate, reference, beta)};
}

RougeReport score_text(std::string_view candidate, std::string_view reference, double beta) {
  return score(textcore::tokenize(candidate), textcore::tokenize(reference), beta);
}

RougeReport mean(const std::vector<RougeReport>& reports) {
  RougeReport m;
  if (reports.empty()) return m;
  auto add = [](RougeScore& acc, const RougeScore& s) {
    acc.f += s.f;
    acc.p += s.p;
    acc.r += s.r;
  };
  for (const auto& r : reports) {
    add(m.rouge1, r.rouge1);
    add(m.rouge2, r.rouge2);
    add(m.rougeL, r.rougeL);
  }
  const double inv = 1.0 / static_cast<double>(reports.size());
  for (RougeScore* s : {&m.rouge1, &m.rouge2, &m.rougeL}) {
    s->f *= inv;
    s->p *= inv;
    s->r *= inv;
  }
  return m;
}

std::string render_table(std::string_view label, const RougeReport& report) {
  std::string out(label);
  out += "\n";
  std::string header = pad("", kLabelWidth) + pad("f", kValueWidth) + pad("p", kValueWidth) + "r";
  out += header + "\n";
  const std::pair<const char*, const RougeScore*> rows[] = {
      {"rouge -1", &report.rouge1}, {"rouge -2", &report.rouge2}, {"rouge -l", &report.rougeL}};
  for (const auto& [name, s] : rows) {
    std::string line = pad(name, kLabelWidth) + pad(format_value(s->f), kValueWidth) +
                       pad(format_value(s->p), kValueWidth) + format_value(s->r);
    rstrip_line(line);
    out += line + "\n";
  }
  return out;
}

std::string render_tables(const std::vector<std::pair<std::string, RougeReport>>& rows) {
  std::string out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i) out += "\n";
    out += render_table(rows[i].first, rows[i].second);
  }
  return out;
}

std::string render_csv(const std::vector<std::pair<std::string, RougeReport>>& rows,
                       bool with_header) {
  std::string out = with_header ? "metric,strategy,f,p,r\n" : "";
  char buf[128];
  for (const auto& [name, report] : rows) {
    const std::pair<const char*, const RougeScore*> metrics[] = {
        {"rouge-1", &report.rouge1}, {"rouge-2", &report.rouge2}, {"rouge-l", &report.rougeL}};
    for (const auto& [metric, s] : metrics) {
      std::snprintf(buf, sizeof buf, "%s,%s,%.9g,%.9g,%.9g\n", metric, name.c_str(), s->f, s->p,
                    s->r);
      out += buf;
    }
  }
  return out;
}

std::vector<std::pair<std::string, RougeReport>> published_tables() {
  return {
      {"abstractive",
       {{0.17532, 0.14545, 0.12188}, {0.03075, 0.06458, 0.02072}, {0.11545, 0.29515, 0.10673}}},
      {"textrank",
       {{0.19631, 0.14545, 0.30188}, {0.07453, 0.05504, 0.11538}, {0.15384, 0.11594, 0.22857}}},
      {"svm-regression",
       {{0.20930, 0.23076, 0.19148}, {0.05882, 0.06976, 0.05084}, {0.16004, 0.17948, 0.14893}}},
      {"bert-centroid",
       {{0.442307, 0.45098, 0.43396}, {0.15686, 0.16, 0.15384}, {0.45714, 0.45714, 0.45714}}},
      {"bert-deck-vs-human-deck",
       {{0.49519, 0.44557, 0.55725}, {0.17657, 0.15885, 0.19872}, {0.35419, 0.32051, 0.39577}}},
  };
}

// ------------------------------------------------------------ harness

StrategySpec parse_strategy_spec(std::string_view name) {
  StrategySpec spec;
  spec.name = std::string(name);
  if (name == "random") {
    spec.random = true;
    return spec;
  }
  spec.strategy = summarize::parse_strategy(name);
  return spec;
}

DocumentEmbeddings embed_document(const docmodel::Document& doc) {
  const auto tokens = section_tokens(doc);
  if (tokens.empty()) return {textcore::EmbeddingMatrix(0, 1), offsets_for(doc)};
  return {textcore::embed_sentences(tokens, textcore::fit_tfidf(tokens)), offsets_for(doc)};
}

DocumentEmbeddings embed_document(const docmodel::Document& doc, const textcore::TfIdfModel& model) {
  return {textcore::embed_sentences(section_tokens(doc), model), offsets_for(doc)};
}

DocumentEmbeddings attach_external(const docmodel::Document& doc, textcore::EmbeddingMatrix matrix) {
  std::size_t total = 0;
  for (const auto& s : doc.sections) total += s.sentences.size();
  if (matrix.rows != total) {
    throw Error(ErrorCode::DimensionMismatch, "embedding file has " + std::to_string(matrix.rows) +
                                                  " rows, document has " + std::to_string(total) +
                                                  " sentences");
  }
  return {std::move(matrix), offsets_for(doc)};
}

std::vector<std::optional<summarize::Summary>> summarize_document(
    const docmodel::Document& doc, const DocumentEmbeddings& embeddings, const StrategySpec& spec,
    const summarize::SummaryConfig& cfg) {
  const DocumentEmbeddings& emb = spec.embeddings ? *spec.embeddings : embeddings;
  if (emb.section_offsets.size() != doc.sections.size()) {
    throw Error(ErrorCode::DimensionMismatch, "embeddings cover a different section count");
  }
  std::vector<std::optional<summarize::Summary>> out(doc.sections.size());
  // Sections are independent; each strategy is pure.
  const auto n_sections = static_cast<std::ptrdiff_t>(doc.sections.size());
  std::vector<std::exception_ptr> errors(doc.sections.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t si = 0; si < n_sections; ++si) {
    const auto i = static_cast<std::size_t>(si);
    try {
      const std::size_t n = doc.sections[i].sentences.size();
      if (n == 0) continue;
      std::vector<std::size_t> rows(n);
      for (std::size_t r = 0; r < n; ++r) rows[r] = emb.section_offsets[i] + r;
      const auto local = emb.matrix.select_rows(rows);
      summarize::Summary s;
      if (spec.random) {
        auto seeded = cfg;
        seeded.seed = cfg.seed + i;
        s = summarize::summarize_random(n, seeded);
      } else {
        switch (spec.strategy) {
          case summarize::Strategy::Centroid: s = summarize::summarize_centroid(n, local, cfg); break;
          case summarize::Strategy::TextRank: s = summarize::summarize_textrank(n, local, cfg); break;
          case summarize::Strategy::Regression:
            if (!spec.model) throw Error(ErrorCode::InvalidConfig, "regression strategy needs a trained model");
            s = summarize::summarize_regression(n, local, *spec.model, cfg);
            break;
        }
      }
      s.section_index = i;
      out[i] = std::move(s);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

std::string summary_text(const docmodel::Document& doc,
                         const std::vector<std::optional<summarize::Summary>>& summaries) {
  std::string out;
  for (const auto& s : summaries) {
    if (!s) continue;
    for (const auto& sel : s->selected) {
      if (!out.empty()) out.push_back(' ');
      out += utf8::collapse_whitespace(doc.sections[s->section_index].sentences[sel.sentence_index].text);
    }
  }
  return out;
}

std::vector<std::pair<std::string, RougeReport>> compare_strategies(
    const docmodel::Document& doc, const DocumentEmbeddings& embeddings,
    std::string_view reference_summary, const std::vector<StrategySpec>& strategies,
    const summarize::SummaryConfig& cfg, double beta) {
  const auto reference = textcore::tokenize(reference_summary);
  if (reference.empty()) throw Error(ErrorCode::EmptyInput, "reference summary is empty");
  std::vector<std::pair<std::string, RougeReport>> out;
  for (const auto& spec : strategies) {
    const auto summaries = summarize_document(doc, embeddings, spec, cfg);
    const auto candidate = textcore::tokenize(summary_text(doc, summaries));
    out.emplace_back(spec.name, score(candidate, reference, beta));
  }
  return out;
}

}  // namespace deckforge::rouge
