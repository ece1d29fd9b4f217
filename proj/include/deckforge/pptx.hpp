#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "deckforge/deck.hpp"

namespace deckforge::pptx {

inline constexpr std::size_t kMaxSlides = 999;

/// Part names of a package holding `total_slides` slides (title slide
/// included), in archive order.
std::vector<std::string> part_names(std::size_t total_slides);

/// Minimal PresentationML package: a title slide followed by one slide per
/// deck slide, each with title and bullet text boxes and an external
/// hyperlink back to the source section. Master, layout and theme are fixed
/// templates. Throws Error(DeckTooLarge) above kMaxSlides slides.
std::string package(const deck::SlideDeck& deck);

/// Writes package(deck) to `out`. Throws Error(IoError) if the file cannot be written.
void emit_pptx(const deck::SlideDeck& deck, const std::filesystem::path& out);

std::string xml_escape(std::string_view text);

}  // namespace deckforge::pptx
