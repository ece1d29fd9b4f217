#include "deckforge/utf8.hpp"

#include "deckforge/error.hpp"

namespace deckforge::utf8 {

namespace {

bool is_space(unsigned char c) noexcept {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_continuation(unsigned char c) noexcept { return (c & 0xC0u) == 0x80u; }

}  // namespace

std::optional<std::size_t> first_invalid_byte(std::string_view bytes) noexcept {
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::size_t n = bytes.size();
  std::size_t i = 0;
  while (i < n) {
    const unsigned char c = p[i];
    if (c < 0x80u) {
      ++i;
      continue;
    }
    std::size_t len = 0;
    unsigned char lo = 0x80u;
    unsigned char hi = 0xBFu;
    if (c >= 0xC2u && c <= 0xDFu) {
      len = 2;
    } else if (c >= 0xE0u && c <= 0xEFu) {
      len = 3;
      if (c == 0xE0u) lo = 0xA0u;       // overlong
      if (c == 0xEDu) hi = 0x9Fu;       // surrogates
    } else if (c >= 0xF0u && c <= 0xF4u) {
      len = 4;
      if (c == 0xF0u) lo = 0x90u;
      if (c == 0xF4u) hi = 0x8Fu;
    } else {
      return i;
    }
    if (i + len > n) return i;
    if (p[i + 1] < lo || p[i + 1] > hi) return i;
    for (std::size_t k = 2; k < len; ++k) {
      if (!is_continuation(p[i + k])) return i;
    }
    i += len;
  }
  return std::nullopt;
}

void validate(std::string_view bytes, std::string_view what) {
  if (auto bad = first_invalid_byte(bytes)) {
    throw Error(ErrorCode::InvalidUtf8,
                std::string(what) + " is not valid UTF-8 at byte offset " + std::to_string(*bad));
  }
}

char32_t decode_next(std::string_view bytes, std::size_t& pos) noexcept {
  const auto c = static_cast<unsigned char>(bytes[pos]);
  std::size_t len = 1;
  char32_t cp = c;
  if (c >= 0xF0u) {
    len = 4;
    cp = c & 0x07u;
  } else if (c >= 0xE0u) {
    len = 3;
    cp = c & 0x0Fu;
  } else if (c >= 0xC0u) {
    len = 2;
    cp = c & 0x1Fu;
  }
  for (std::size_t k = 1; k < len && pos + k < bytes.size(); ++k) {
    cp = (cp << 6) | (static_cast<unsigned char>(bytes[pos + k]) & 0x3Fu);
  }
  pos += len;
  return cp;
}

std::string collapse_whitespace(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char ch : text) {
    if (is_space(static_cast<unsigned char>(ch))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(ch);
  }
  return out;
}

std::string_view trim(std::string_view text) noexcept {
  std::size_t b = 0;
  std::size_t e = text.size();
  while (b < e && is_space(static_cast<unsigned char>(text[b]))) ++b;
  while (e > b && is_space(static_cast<unsigned char>(text[e - 1]))) --e;
  return text.substr(b, e - b);
}

}  // namespace deckforge::utf8
