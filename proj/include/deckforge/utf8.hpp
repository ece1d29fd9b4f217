#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace deckforge::utf8 {

/// Offset of the first byte that does not start or continue a well-formed
/// UTF-8 sequence, or nullopt when the whole buffer is valid.
std::optional<std::size_t> first_invalid_byte(std::string_view bytes) noexcept;

/// Throws Error(InvalidUtf8) naming the offending byte offset.
void validate(std::string_view bytes, std::string_view what);

/// Decodes one code point starting at `pos` (input assumed valid) and
/// advances `pos` past it.
char32_t decode_next(std::string_view bytes, std::size_t& pos) noexcept;

/// Collapses every run of ASCII whitespace to one space and trims the ends.
std::string collapse_whitespace(std::string_view text);

std::string_view trim(std::string_view text) noexcept;

}  // namespace deckforge::utf8
