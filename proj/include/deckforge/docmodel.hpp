#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace deckforge::docmodel {

enum class SourceFormat { Plain, Markdown, LatexMin };

std::string_view to_string(SourceFormat format) noexcept;
/// Accepts "plain", "markdown", "latex-min". Throws Error(InvalidConfig) otherwise.
SourceFormat parse_source_format(std::string_view name);

/// Half-open byte range [byte_start, byte_end) into the parsed input.
struct SourceSpan {
  std::size_t byte_start = 0;
  std::size_t byte_end = 0;

  std::size_t size() const noexcept { return byte_end - byte_start; }
  bool operator==(const SourceSpan&) const = default;
};

struct Sentence {
  std::size_t index = 0;  // position within the section
  std::string text;       // the spanned bytes with leading/trailing whitespace removed
  SourceSpan span;

  bool operator==(const Sentence&) const = default;
};

struct Section {
  std::size_t index = 0;
  std::string heading;
  int level = 1;  // 1..3
  std::vector<std::string> paragraphs;
  std::vector<Sentence> sentences;
  SourceSpan span;  // heading line through the byte before the next heading

  bool operator==(const Section&) const = default;
};

struct Document {
  std::string title;
  std::vector<std::string> authors;
  std::vector<Section> sections;
  SourceFormat source_format = SourceFormat::Plain;

  bool operator==(const Document&) const = default;
};

struct SegmenterOptions {
  /// Added to the built-in abbreviation table. Entries include the trailing
  /// period, e.g. "Eq.".
  std::vector<std::string> extra_abbreviations;
};

struct ParseOptions {
  /// When no heading is recognised, wrap the whole text as one section
  /// instead of failing with NoSectionsFound.
  bool wrap_without_headings = false;
  SegmenterOptions segmenter;
};

/// The built-in abbreviation table used by segment_sentences.
const std::vector<std::string>& default_abbreviations();

/// Splits text into sentences. Spans index into `text`.
std::vector<Sentence> segment_sentences(std::string_view text,
                                        const SegmenterOptions& options = {});

/// Parses a paper into its section tree. Sentence and section spans index
/// into `input`.
///
/// Markdown headings `#`..`###` and latex-min `\section`, `\subsection`,
/// `\subsubsection` map to levels 1..3 (deeper levels are flattened to 3).
/// Plain text treats a single-line, blank-line-delimited block written in
/// ALL CAPS, or starting with a section number such as "2.1", as a heading.
///
/// Throws Error with EmptyInput, InvalidUtf8 or NoSectionsFound.
Document parse_document(std::string_view input, SourceFormat format,
                        const ParseOptions& options = {});

/// "sec-<index>-<slug>" where slug lowercases the heading and collapses every
/// run of non-alphanumeric characters to a single '-'.
std::string section_anchor(const Document& doc, std::size_t index);

std::string slugify(std::string_view heading);

}  // namespace deckforge::docmodel
