#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "deckforge/docmodel.hpp"
#include "deckforge/summarize.hpp"

namespace deckforge::deck {

struct Bullet {
  std::string text;
  int indent = 0;  // 0..2

  bool operator==(const Bullet&) const = default;
};

struct Slide {
  std::size_t index = 0;  // 1-based; the title slide is 0
  std::string title;
  std::vector<Bullet> bullets;
  std::string hyperlink;
  std::string narration;

  bool operator==(const Slide&) const = default;
};

struct TitleSlide {
  std::string title;
  std::vector<std::string> authors;

  bool operator==(const TitleSlide&) const = default;
};

struct SlideDeck {
  TitleSlide title_slide;
  std::vector<Slide> slides;
  std::string source_doc_ref;

  bool operator==(const SlideDeck&) const = default;
};

struct BuildOptions {
  std::string base_url;
  std::size_t max_bullets = 7;
};

/// Removes citation markers such as "[3]", "[1, 4]", "[2-5]" and "\cite{x}",
/// then collapses whitespace.
std::string strip_citations(std::string_view text);

/// "<title>. <b1>; <b2>; ..." with citations stripped; the bare title when
/// there are no bullets.
std::string narration_for(std::string_view title, const std::vector<Bullet>& bullets);

/// One slide per summary, in section order. `summaries` must hold one entry
/// per section; nullopt marks a skipped section (one without sentences).
///
/// Throws Error(SummarySectionMismatch) when the list does not line up with
/// the document's sections.
SlideDeck build_deck(const docmodel::Document& doc,
                     const std::vector<std::optional<summarize::Summary>>& summaries,
                     const BuildOptions& options);

/// CommonMark subset: "# title", author line, then per slide "## title",
/// "-" bullets indented two spaces per level, and a "[Source](url)" line.
std::string emit_markdown(const SlideDeck& deck);

/// Escapes characters that would turn text into Markdown structure.
std::string escape_markdown(std::string_view text, bool line_start);

/// Value of the top-level "schema" key; layout in docs/deck-schema.md.
inline constexpr std::string_view kDeckSchema = "deckforge.deck/1";

/// Canonical JSON: sorted keys, two-space indent, LF, trailing newline.
std::string emit_deck_json(const SlideDeck& deck);

/// Throws Error(MalformedDeck) on invalid input or another schema version.
SlideDeck parse_deck_json(std::string_view json);

}  // namespace deckforge::deck
