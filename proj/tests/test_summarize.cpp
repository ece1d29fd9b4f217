#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "deckforge/error.hpp"
#include "deckforge/summarize.hpp"
#include "support.hpp"

using namespace deckforge;
using summarize::SummaryConfig;
using textcore::EmbeddingMatrix;

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

EmbeddingMatrix matrix(std::size_t rows, std::size_t dim, std::vector<double> data) {
  EmbeddingMatrix m(rows, dim);
  m.data = std::move(data);
  return m;
}

EmbeddingMatrix one_hot(std::size_t n) {
  EmbeddingMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.data[i * n + i] = 1.0;
  return m;
}

std::vector<std::size_t> indices(const summarize::Summary& s) {
  std::vector<std::size_t> out;
  for (const auto& x : s.selected) out.push_back(x.sentence_index);
  return out;
}

void check_shape(const summarize::Summary& s, std::size_t n, std::size_t k) {
  REQUIRE(s.selected.size() == k);
  CHECK(s.k == k);
  for (std::size_t i = 0; i < s.selected.size(); ++i) {
    CHECK(s.selected[i].sentence_index < n);
    if (i > 0) CHECK(s.selected[i - 1].sentence_index < s.selected[i].sentence_index);
  }
}

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

}  // namespace

TEST_CASE("summary_size clamps ceil(ratio * n)") {
  SummaryConfig cfg;  // ratio 0.2, bullets 3..7
  CHECK(summarize::summary_size(cfg, 1) == 1);
  CHECK(summarize::summary_size(cfg, 2) == 2);
  CHECK(summarize::summary_size(cfg, 10) == 3);
  CHECK(summarize::summary_size(cfg, 21) == 5);
  CHECK(summarize::summary_size(cfg, 100) == 7);
  cfg.ratio = 0.5;
  cfg.min_bullets = 1;
  CHECK(summarize::summary_size(cfg, 5) == 3);
}

TEST_CASE("SummaryConfig validation") {
  SummaryConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.ratio = 0.0;
  CHECK(code_of([&] { cfg.validate(); }) == ErrorCode::InvalidConfig);
  cfg = {};
  cfg.min_bullets = 8;
  CHECK(code_of([&] { cfg.validate(); }) == ErrorCode::InvalidConfig);
  cfg = {};
  cfg.damping = 1.0;
  CHECK(code_of([&] { cfg.validate(); }) == ErrorCode::InvalidConfig);
  CHECK(summarize::parse_strategy("textrank") == summarize::Strategy::TextRank);
  CHECK(code_of([] { summarize::parse_strategy("lexrank"); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("centroid: trivial cases") {
  SummaryConfig cfg;
  const auto single = summarize::summarize_centroid(1, matrix(1, 2, {3, 4}), cfg);
  CHECK(indices(single) == std::vector<std::size_t>{0});

  cfg.min_bullets = 4;
  const auto all = summarize::summarize_centroid(4, one_hot(4), cfg);
  CHECK(indices(all) == std::vector<std::size_t>{0, 1, 2, 3});
  for (const auto& s : all.selected) CHECK(s.score == doctest::Approx(0.0));
}

TEST_CASE("centroid: planted clusters tie-break to the lowest index") {
  SummaryConfig cfg;
  cfg.min_bullets = 1;
  cfg.max_bullets = 2;
  cfg.ratio = 0.5;
  const auto pts = matrix(4, 2, {0, 0, 0, 1, 10, 0, 10, 1});
  const auto oracle = testsupport::brute_force_two_means({{0, 0}, {0, 1}, {10, 0}, {10, 1}});
  REQUIRE(oracle == std::vector<int>{0, 0, 1, 1});
  const auto s = summarize::summarize_centroid(4, pts, cfg);
  CHECK(indices(s) == std::vector<std::size_t>{0, 2});
  CHECK(s.selected[0].score == doctest::Approx(-0.5));
}

TEST_CASE("centroid: row mismatch and empty input") {
  SummaryConfig cfg;
  CHECK(code_of([&] { summarize::summarize_centroid(3, one_hot(2), cfg); }) ==
        ErrorCode::DimensionMismatch);
  CHECK(summarize::summarize_centroid(0, EmbeddingMatrix(0, 2), cfg).selected.empty());
}

TEST_CASE("pagerank: closed-form two-node chain") {
  // Edge 0->1 only; row 1 dangles and becomes uniform. Solving
  // r0 = 0.075 + 0.425 r1 with r0 + r1 = 1 gives r0 = 0.5 / 1.425.
  const std::vector<double> w = {0, 1, 0, 0};
  const auto pr = summarize::pagerank(w, 2, 0.85, 1e-12, 200);
  CHECK(pr.converged);
  CHECK(pr.ranks[0] == doctest::Approx(0.5 / 1.425).epsilon(1e-9));
  CHECK(pr.ranks[0] == doctest::Approx(0.350877).epsilon(1e-6));
  CHECK(pr.ranks[1] == doctest::Approx(0.649123).epsilon(1e-6));
  CHECK(pr.ranks[1] > pr.ranks[0]);
  CHECK(sum(pr.ranks) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("pagerank: symmetric and empty graphs are uniform") {
  const std::vector<double> complete = {0, 1, 1, 1, 0, 1, 1, 1, 0};
  for (double r : summarize::pagerank(complete, 3, 0.85, 1e-10, 200).ranks) {
    CHECK(r == doctest::Approx(1.0 / 3).epsilon(1e-12));
  }
  const std::vector<double> zero(16, 0.0);
  for (double r : summarize::pagerank(zero, 4, 0.85, 1e-10, 200).ranks) {
    CHECK(r == doctest::Approx(0.25).epsilon(1e-12));
  }
}

TEST_CASE("pagerank: errors") {
  const std::vector<double> three = {1, 2, 3};
  CHECK(code_of([&] { summarize::pagerank(three, 2, 0.85, 1e-8, 200); }) == ErrorCode::NonSquare);
  const std::vector<double> neg = {0, -1, 1, 0};
  CHECK(code_of([&] { summarize::pagerank(neg, 2, 0.85, 1e-8, 200); }) ==
        ErrorCode::NegativeWeight);
}

TEST_CASE("property: pagerank on random 10x10 matrices matches the dense oracle") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> w(100);
    for (auto& v : w) v = u(rng) < 0.3 ? 0.0 : u(rng);
    if (trial % 10 == 0) std::fill(w.begin() + 30, w.begin() + 40, 0.0);  // a dangling row
    const auto pr = summarize::pagerank(w, 10, 0.85, 1e-10, 200);
    CHECK(pr.converged);
    CHECK(pr.iterations <= 200);
    CHECK(sum(pr.ranks) == doctest::Approx(1.0).epsilon(1e-9));
    const auto oracle = testsupport::dense_pagerank(w, 10, 0.85);
    for (std::size_t i = 0; i < 10; ++i) {
      CHECK(pr.ranks[i] >= 0.0);
      CHECK(pr.ranks[i] == doctest::Approx(oracle[i]).epsilon(1e-8));
    }
  }
}

TEST_CASE("textrank: examples") {
  SummaryConfig cfg;
  const auto one = summarize::summarize_textrank(1, matrix(1, 2, {1, 0}), cfg);
  REQUIRE(one.selected.size() == 1);
  CHECK(one.selected[0].score == doctest::Approx(1.0));

  cfg.min_bullets = 2;
  cfg.max_bullets = 2;
  const auto same = summarize::summarize_textrank(3, matrix(3, 2, {1, 1, 1, 1, 1, 1}), cfg);
  CHECK(indices(same) == std::vector<std::size_t>{0, 1});
  for (const auto& s : same.selected) CHECK(s.score == doctest::Approx(1.0 / 3));

  // s0 ~ s1, s2 orthogonal to both: s2 must rank last.
  const auto pts = matrix(3, 3, {1, 0.1, 0, 1, 0.2, 0, 0, 0, 1});
  const auto s = summarize::summarize_textrank(3, pts, cfg);
  CHECK(indices(s) == std::vector<std::size_t>{0, 1});
  std::vector<double> w(9, 0.0);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      if (i != j) w[i * 3 + j] = std::max(0.0, textcore::cosine_similarity(pts.row(i), pts.row(j)));
    }
  }
  const auto oracle = testsupport::dense_pagerank(w, 3, 0.85);
  CHECK(oracle[2] < oracle[0]);
  CHECK(oracle[2] < oracle[1]);
  CHECK(s.selected[0].score == doctest::Approx(oracle[0]).epsilon(1e-7));
}

TEST_CASE("overlap target") {
  CHECK(summarize::overlap_target({"a", "b"}, {"b", "a", "c"}) == 1.0);
  CHECK(summarize::overlap_target({"a", "b"}, {"c"}) == 0.0);
  CHECK(summarize::overlap_target({}, {"c"}) == 0.0);
  CHECK(summarize::overlap_target({"a", "a", "b", "c"}, {"a", "c"}) == 0.5);  // clipped
}

TEST_CASE("regression: single pair normal equation") {
  summarize::TrainingDocument doc;
  doc.sentences = {{"a", "b"}};
  doc.embeddings = matrix(1, 1, {1.0});
  doc.reference = {"a"};
  const std::vector<summarize::TrainingDocument> corpus = {doc};
  const auto model = summarize::train_overlap_regressor(corpus);
  REQUIRE(model.weights.size() == 1);
  CHECK(model.weights[0] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(model.bias == doctest::Approx(0.25).epsilon(1e-12));

  CHECK(code_of([] { summarize::train_overlap_regressor({}); }) == ErrorCode::EmptyCorpus);
  auto other = doc;
  other.embeddings = matrix(1, 2, {1.0, 0.0});
  const std::vector<summarize::TrainingDocument> mixed = {doc, other};
  CHECK(code_of([&] { summarize::train_overlap_regressor(mixed); }) ==
        ErrorCode::DimensionMismatch);
}

TEST_CASE("regression: ridge weights match a direct solve") {
  // Two features, three sentences; solve (X^T X + I) w = X^T y by Cramer's rule.
  summarize::TrainingDocument doc;
  doc.sentences = {{"a"}, {"b", "c"}, {"a", "c"}};
  doc.reference = {"a", "c"};
  doc.embeddings = matrix(3, 2, {1, 0, 0, 2, 1, 1});
  const std::vector<double> y = {1.0, 0.5, 1.0};
  const double a11 = 1 + 0 + 1 + 1, a12 = 0 + 0 + 1, a22 = 0 + 4 + 1 + 1;
  const double b1 = y[0] + y[2], b2 = 2 * y[1] + y[2];
  const double det = a11 * a22 - a12 * a12;
  const double w1 = (b1 * a22 - a12 * b2) / det, w2 = (a11 * b2 - a12 * b1) / det;
  const double bias = (y[0] - w1 + y[1] - 2 * w2 + y[2] - w1 - w2) / 3.0;

  const std::vector<summarize::TrainingDocument> corpus = {doc};
  const auto model = summarize::train_overlap_regressor(corpus);
  CHECK(model.weights[0] == doctest::Approx(w1).epsilon(1e-12));
  CHECK(model.weights[1] == doctest::Approx(w2).epsilon(1e-12));
  CHECK(model.bias == doctest::Approx(bias).epsilon(1e-12));
}

TEST_CASE("regression: selection") {
  SummaryConfig cfg;
  cfg.min_bullets = 1;
  cfg.max_bullets = 1;
  summarize::RegressorModel model{{0.1, 0.9, 0.2}, 0.0};
  CHECK(indices(summarize::summarize_regression(3, one_hot(3), model, cfg)) ==
        std::vector<std::size_t>{1});

  summarize::RegressorModel flat{{0.0, 0.0, 0.0}, 1.0};
  cfg.max_bullets = 2;
  cfg.min_bullets = 2;
  CHECK(indices(summarize::summarize_regression(3, one_hot(3), flat, cfg)) ==
        std::vector<std::size_t>{0, 1});
  cfg.max_bullets = 3;
  cfg.min_bullets = 3;
  CHECK(indices(summarize::summarize_regression(3, one_hot(3), flat, cfg)) ==
        std::vector<std::size_t>{0, 1, 2});

  summarize::RegressorModel wrong{{1.0}, 0.0};
  CHECK(code_of([&] { summarize::summarize_regression(3, one_hot(3), wrong, cfg); }) ==
        ErrorCode::DimensionMismatch);
}

TEST_CASE("regressor file round trip") {
  summarize::RegressorModel m{{0.1, -2.5e-7, 3.0}, 0.125};
  const auto back = summarize::parse_regressor(summarize::format_regressor(m));
  CHECK(back.weights == m.weights);
  CHECK(back.bias == m.bias);
  CHECK(code_of([] { summarize::parse_regressor("1 2\n1 2\n"); }) == ErrorCode::MalformedHeader);
}

TEST_CASE("top_k ties go to the lower index") {
  const std::vector<double> scores = {0.5, 0.9, 0.5, 0.9, 0.1};
  const auto top = summarize::top_k(scores, 3);
  REQUIRE(top.size() == 3);
  CHECK(top[0].sentence_index == 0);
  CHECK(top[1].sentence_index == 1);
  CHECK(top[2].sentence_index == 3);
}

TEST_CASE("random baseline is seeded") {
  SummaryConfig cfg;
  const auto a = summarize::summarize_random(20, cfg);
  check_shape(a, 20, 4);
  CHECK(a == summarize::summarize_random(20, cfg));
  bool differs = false;
  for (std::uint64_t seed = 1; seed < 10 && !differs; ++seed) {
    cfg.seed = seed;
    differs = !(summarize::summarize_random(20, cfg) == a);
  }
  CHECK(differs);
}

TEST_CASE("property: every strategy returns K distinct ascending indices, deterministically") {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 1 + rng() % 25;
    const std::size_t dim = 1 + rng() % 6;
    EmbeddingMatrix e(n, dim);
    for (auto& v : e.data) v = g(rng);
    SummaryConfig cfg;
    cfg.seed = rng();
    cfg.ratio = 0.05 + 0.9 * static_cast<double>(rng() % 100) / 100.0;
    cfg.min_bullets = 1 + rng() % 3;
    cfg.max_bullets = cfg.min_bullets + rng() % 5;
    const std::size_t k = summarize::summary_size(cfg, n);
    summarize::RegressorModel model;
    for (std::size_t d = 0; d < dim; ++d) model.weights.push_back(g(rng));

    const auto c = summarize::summarize_centroid(n, e, cfg);
    const auto t = summarize::summarize_textrank(n, e, cfg);
    const auto r = summarize::summarize_regression(n, e, model, cfg);
    const auto x = summarize::summarize_random(n, cfg);
    check_shape(c, n, k);
    check_shape(t, n, k);
    check_shape(r, n, k);
    check_shape(x, n, k);
    CHECK(c == summarize::summarize_centroid(n, e, cfg));
    CHECK(t == summarize::summarize_textrank(n, e, cfg));
    CHECK(r == summarize::summarize_regression(n, e, model, cfg));
  }
}

TEST_CASE("property: centroid with K = n returns everything") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + rng() % 7;
    EmbeddingMatrix e(n, 3);
    for (auto& v : e.data) v = g(rng);
    SummaryConfig cfg;
    cfg.min_bullets = 7;
    cfg.max_bullets = 7;
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), 0);
    CHECK(indices(summarize::summarize_centroid(n, e, cfg)) == all);
  }
}

TEST_CASE("property: permuting sentences permutes the regression selection") {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + rng() % 15;
    const std::size_t dim = 1 + rng() % 4;
    EmbeddingMatrix e(n, dim);
    for (auto& v : e.data) v = g(rng);
    summarize::RegressorModel model;
    for (std::size_t d = 0; d < dim; ++d) model.weights.push_back(g(rng));
    SummaryConfig cfg;
    cfg.min_bullets = 1;

    std::vector<std::size_t> perm(n);  // new position p holds old sentence perm[p]
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    EmbeddingMatrix shuffled(n, dim);
    for (std::size_t p = 0; p < n; ++p) {
      std::copy_n(e.row(perm[p]).begin(), dim, shuffled.data.begin() + p * dim);
    }

    const auto base = indices(summarize::summarize_regression(n, e, model, cfg));
    std::set<std::size_t> mapped;
    for (auto p : indices(summarize::summarize_regression(n, shuffled, model, cfg))) {
      mapped.insert(perm[p]);
    }
    CHECK(mapped == std::set<std::size_t>(base.begin(), base.end()));
  }
}
