#include <doctest.h>

#include <random>

#include "deckforge/docmodel.hpp"
#include "deckforge/error.hpp"
#include "deckforge/utf8.hpp"
#include "support.hpp"

using namespace deckforge;
using docmodel::SourceFormat;

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

std::vector<std::string> texts(const std::vector<docmodel::Sentence>& s) {
  std::vector<std::string> out;
  for (const auto& x : s) out.push_back(x.text);
  return out;
}

void check_spans(std::string_view input, const docmodel::Document& doc) {
  for (const auto& sec : doc.sections) {
    REQUIRE(sec.span.byte_start <= sec.span.byte_end);
    REQUIRE(sec.span.byte_end <= input.size());
    std::size_t prev_end = sec.span.byte_start;
    for (const auto& s : sec.sentences) {
      CHECK(s.span.byte_start < s.span.byte_end);
      CHECK(s.span.byte_start >= prev_end);
      CHECK(s.span.byte_end <= sec.span.byte_end);
      CHECK(utf8::trim(input.substr(s.span.byte_start, s.span.size())) == s.text);
      CHECK_FALSE(s.text.empty());
      prev_end = s.span.byte_end;
    }
  }
}

}  // namespace

TEST_CASE("segmenter splits plain sentences") {
  CHECK(texts(docmodel::segment_sentences("A is B. C is D.")) ==
        std::vector<std::string>{"A is B.", "C is D."});
  CHECK(docmodel::segment_sentences("").empty());
  CHECK(docmodel::segment_sentences("   \n ").empty());
}

TEST_CASE("segmenter respects abbreviations") {
  CHECK(docmodel::segment_sentences("See Fig. 2 for details.").size() == 1);
  CHECK(docmodel::segment_sentences("Smith et al. Showed this first.").size() == 1);
  CHECK(docmodel::segment_sentences("Ask Dr. Jones. She knows.").size() == 2);
  CHECK(docmodel::segment_sentences("Cats vs. Dogs is old. It persists.").size() == 2);
  CHECK(docmodel::segment_sentences("J. R. Smith wrote it. Then he left.").size() == 2);
}

TEST_CASE("segmenter extra abbreviations") {
  docmodel::SegmenterOptions opts;
  CHECK(docmodel::segment_sentences("See Lem. Four holds.", opts).size() == 2);
  opts.extra_abbreviations = {"Lem."};
  CHECK(docmodel::segment_sentences("See Lem. Four holds.", opts).size() == 1);
}

TEST_CASE("segmenter boundary rules") {
  CHECK(docmodel::segment_sentences("Is it? Yes! It is.").size() == 3);
  CHECK(docmodel::segment_sentences("Values rose. 42 plots failed.").size() == 2);
  CHECK(docmodel::segment_sentences("He said \"stop.\" Then left.").size() == 2);
  CHECK(docmodel::segment_sentences("the value 3.5 is small. the end").size() == 2);
  CHECK(docmodel::segment_sentences("x. y.").size() == 2);
  CHECK(docmodel::segment_sentences("Rates fell, e.g. in May. Then rose.").size() == 2);
  CHECK(docmodel::segment_sentences("Written by J. R. Smith in May.").size() == 1);
  CHECK(docmodel::segment_sentences("We met A. B. Jones. He left.").size() == 2);
  CHECK(docmodel::segment_sentences("No terminal punctuation").size() == 1);
}

TEST_CASE("segmenter spans index the input") {
  const std::string text = "  First one.  Second one!\nThird?  ";
  const auto s = docmodel::segment_sentences(text);
  REQUIRE(s.size() == 3);
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(s[i].index == i);
    CHECK(utf8::trim(std::string_view(text).substr(s[i].span.byte_start, s[i].span.size())) ==
          s[i].text);
  }
}

TEST_CASE("markdown example: two sections") {
  const auto doc = docmodel::parse_document("# A\nx. y.\n# B\nz.", SourceFormat::Markdown);
  REQUIRE(doc.sections.size() == 2);
  CHECK(doc.sections[0].heading == "A");
  CHECK(doc.sections[0].sentences.size() == 2);
  CHECK(doc.sections[1].sentences.size() == 1);
  CHECK(doc.source_format == SourceFormat::Markdown);
}

TEST_CASE("latex example: one section") {
  const std::string in = "\\section{Intro}\nOne sentence.";
  const auto doc = docmodel::parse_document(in, SourceFormat::LatexMin);
  REQUIRE(doc.sections.size() == 1);
  CHECK(doc.sections[0].heading == "Intro");
  REQUIRE(doc.sections[0].sentences.size() == 1);
  CHECK(doc.sections[0].sentences[0].text == "One sentence.");
  check_spans(in, doc);
}

TEST_CASE("latex title, authors, levels and skipped environments") {
  const std::string in =
      "\\documentclass{article}\n\\title{On \\emph{Tests}}\n\\author{A. One \\and B. Two}\n"
      "\\begin{document}\n\\maketitle\n\\section{Intro}\nFirst. Second.\n"
      "\\begin{figure}\nHidden caption. Not a sentence.\n\\end{figure}\n"
      "\\subsection*{Detail}\nDeep text here.\n\\subsubsection{Deeper}\nDeepest.\n"
      "\\end{document}\nTrailing junk.";
  const auto doc = docmodel::parse_document(in, SourceFormat::LatexMin);
  CHECK(doc.title == "On Tests");
  CHECK(doc.authors == std::vector<std::string>{"A. One", "B. Two"});
  REQUIRE(doc.sections.size() == 3);
  CHECK(doc.sections[0].sentences.size() == 2);
  CHECK(doc.sections[1].heading == "Detail");
  CHECK(doc.sections[1].level == 2);
  CHECK(doc.sections[2].level == 3);
  CHECK(doc.sections[2].sentences.size() == 1);
  check_spans(in, doc);
}

TEST_CASE("markdown levels are normalised") {
  const std::string in = "# One\na.\n### Jump\nb.\n#### Four\nc.\n## Two\nd.";
  const auto doc = docmodel::parse_document(in, SourceFormat::Markdown);
  REQUIRE(doc.sections.size() == 4);
  CHECK(doc.sections[0].level == 1);
  CHECK(doc.sections[1].level == 2);  // child of level 1 is level 2
  CHECK(doc.sections[2].level == 3);  // deeper levels flatten to 3
  CHECK(doc.sections[3].level == 2);
}

TEST_CASE("markdown preamble and code fences") {
  const std::string in = "% My Title\n% Ann Author; Bob Writer\n\n# Body\nText one.\n```\n# not a heading\n```\nText two.";
  const auto doc = docmodel::parse_document(in, SourceFormat::Markdown);
  CHECK(doc.title == "My Title");
  CHECK(doc.authors == std::vector<std::string>{"Ann Author", "Bob Writer"});
  REQUIRE(doc.sections.size() == 1);
  CHECK(doc.sections[0].sentences.size() == 2);
  check_spans(in, doc);
}

TEST_CASE("plain headings: all caps and numbered") {
  const std::string in =
      "A Study Title\n\nINTRODUCTION\n\nWe begin. Then continue.\n\n2.1 Data Sources\n\nData came from somewhere.\n";
  const auto doc = docmodel::parse_document(in, SourceFormat::Plain);
  REQUIRE(doc.sections.size() == 2);
  CHECK(doc.sections[0].heading == "INTRODUCTION");
  CHECK(doc.sections[0].sentences.size() == 2);
  CHECK(doc.sections[1].heading == "Data Sources");  // section number dropped
  CHECK(doc.sections[1].level == 2);
  CHECK(doc.title == "A Study Title");
  check_spans(in, doc);
}

TEST_CASE("parse errors") {
  CHECK(code_of([] { docmodel::parse_document("", SourceFormat::Markdown); }) ==
        ErrorCode::EmptyInput);
  CHECK(code_of([] { docmodel::parse_document("just text. more text.", SourceFormat::Markdown); }) ==
        ErrorCode::NoSectionsFound);
  CHECK(code_of([] { docmodel::parse_document("# A\nbad \xff byte.", SourceFormat::Markdown); }) ==
        ErrorCode::InvalidUtf8);
  try {
    docmodel::parse_document("# A\nbad \xff byte.", SourceFormat::Markdown);
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("offset 8") != std::string::npos);
  }
}

TEST_CASE("wrap without headings") {
  docmodel::ParseOptions opts;
  opts.wrap_without_headings = true;
  const auto doc = docmodel::parse_document("just text. More text.", SourceFormat::Plain, opts);
  REQUIRE(doc.sections.size() == 1);
  CHECK(doc.sections[0].sentences.size() == 2);
}

TEST_CASE("section anchors") {
  auto doc = docmodel::parse_document("# Introduction\na.\n# X\nb.\n# A & B\nc.", SourceFormat::Markdown);
  CHECK(docmodel::section_anchor(doc, 0) == "sec-0-introduction");
  CHECK(docmodel::section_anchor(doc, 2) == "sec-2-a-b");
  CHECK(code_of([&] { docmodel::section_anchor(doc, 3); }) == ErrorCode::IndexOutOfRange);
  CHECK(docmodel::slugify("  Hello, World!  ") == "hello-world");
  CHECK(docmodel::slugify("***") == "");
}

TEST_CASE("parse_source_format") {
  CHECK(docmodel::parse_source_format("plain") == SourceFormat::Plain);
  CHECK(docmodel::parse_source_format("markdown") == SourceFormat::Markdown);
  CHECK(docmodel::parse_source_format("latex-min") == SourceFormat::LatexMin);
  CHECK(code_of([] { docmodel::parse_source_format("pdf"); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("property: spans round-trip and increase on generated documents") {
  std::mt19937_64 rng(7);
  const std::vector<std::string> words = {"alpha", "beta", "Gamma", "delta", "Fig.", "et al.",
                                          "3.14", "x", "Omega", "e.g.", "vs."};
  for (int trial = 0; trial < 200; ++trial) {
    std::string in;
    const int sections = 1 + static_cast<int>(rng() % 4);
    for (int s = 0; s < sections; ++s) {
      in += std::string(1 + rng() % 3, '#') + " Head " + std::to_string(s) + "\n";
      const int sentences = static_cast<int>(rng() % 5);
      for (int k = 0; k < sentences; ++k) {
        in += "Word";
        const int len = 1 + static_cast<int>(rng() % 6);
        for (int w = 0; w < len; ++w) in += " " + words[rng() % words.size()];
        in += (rng() % 3 == 0) ? "?" : ".";
        in += (rng() % 4 == 0) ? "\n" : "  ";
      }
      in += "\n\n";
    }
    const auto doc = docmodel::parse_document(in, SourceFormat::Markdown);
    CHECK(doc.sections.size() == static_cast<std::size_t>(sections));
    check_spans(in, doc);
    CHECK(doc == docmodel::parse_document(in, SourceFormat::Markdown));
    for (std::size_t i = 0; i < doc.sections.size(); ++i) CHECK(doc.sections[i].index == i);
  }
}

TEST_CASE("fixture paper parses") {
  const auto in = testsupport::slurp(testsupport::source_dir() / "tests/fixtures/paper.md");
  const auto doc = docmodel::parse_document(in, SourceFormat::Markdown);
  CHECK(doc.title == "Scheduling Irrigation from Sparse Soil Moisture Readings");
  CHECK(doc.sections.size() == 8);
  check_spans(in, doc);
}
