#include "deckforge/deck.hpp"

#include <algorithm>
#include <json.hpp>

#include "deckforge/error.hpp"
#include "deckforge/utf8.hpp"

namespace deckforge::deck {

namespace {

using nlohmann::json;

bool is_digit(char c) noexcept { return c >= '0' && c <= '9'; }

// "[3]", "[1, 2]", "[2-5]", "[12,14–16]": digits, commas, spaces and dashes
// inside square brackets.
std::size_t citation_bracket_end(std::string_view s, std::size_t open) {
  bool has_digit = false;
  for (std::size_t i = open + 1; i < s.size(); ++i) {
    const char c = s[i];
    if (c == ']') return has_digit ? i + 1 : 0;
    if (is_digit(c)) {
      has_digit = true;
    } else if (c != ',' && c != ' ' && c != '-' && c != ';') {
      return 0;
    }
  }
  return 0;
}

std::size_t latex_cite_end(std::string_view s, std::size_t pos) {
  for (std::string_view cmd : {"\\cite{", "\\citep{", "\\citet{"}) {
    if (s.substr(pos, cmd.size()) == cmd) {
      auto close = s.find('}', pos + cmd.size());
      return close == std::string_view::npos ? 0 : close + 1;
    }
  }
  return 0;
}

json slide_to_json(const Slide& s) {
  json bullets = json::array();
  for (const auto& b : s.bullets) bullets.push_back({{"indent", b.indent}, {"text", b.text}});
  return {{"bullets", bullets},
          {"hyperlink", s.hyperlink},
          {"index", s.index},
          {"narration", s.narration},
          {"title", s.title}};
}

}  // namespace

std::string strip_citations(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size();) {
    if (text[i] == '[') {
      if (auto end = citation_bracket_end(text, i)) {
        i = end;
        continue;
      }
    }
    if (text[i] == '\\') {
      if (auto end = latex_cite_end(text, i)) {
        i = end;
        continue;
      }
    }
    out.push_back(text[i++]);
  }
  // "word [3]." leaves "word ." behind
  auto collapsed = utf8::collapse_whitespace(out);
  std::string tidy;
  for (std::size_t i = 0; i < collapsed.size(); ++i) {
    const char c = collapsed[i];
    if (c == ' ' && i + 1 < collapsed.size() &&
        (collapsed[i + 1] == '.' || collapsed[i + 1] == ',' || collapsed[i + 1] == ';' ||
         collapsed[i + 1] == ':')) {
      continue;
    }
    tidy.push_back(c);
  }
  return tidy;
}

std::string narration_for(std::string_view title, const std::vector<Bullet>& bullets) {
  std::string out = strip_citations(title);
  if (bullets.empty()) return out;
  out += ". ";
  for (std::size_t i = 0; i < bullets.size(); ++i) {
    if (i) out += "; ";
    out += strip_citations(bullets[i].text);
  }
  return out;
}

SlideDeck build_deck(const docmodel::Document& doc,
                     const std::vector<std::optional<summarize::Summary>>& summaries,
                     const BuildOptions& options) {
  if (summaries.size() != doc.sections.size()) {
    throw Error(ErrorCode::SummarySectionMismatch,
                std::to_string(summaries.size()) + " summaries for " +
                    std::to_string(doc.sections.size()) + " sections");
  }
  SlideDeck deck;
  deck.title_slide = {doc.title, doc.authors};
  deck.source_doc_ref = options.base_url;

  for (std::size_t i = 0; i < doc.sections.size(); ++i) {
    const auto& section = doc.sections[i];
    const auto& summary = summaries[i];
    if (!summary) {
      if (!section.sentences.empty()) {
        throw Error(ErrorCode::SummarySectionMismatch,
                    "section " + std::to_string(i) + " has sentences but no summary");
      }
      continue;
    }
    if (summary->section_index != i) {
      throw Error(ErrorCode::SummarySectionMismatch,
                  "summary at position " + std::to_string(i) + " is for section " +
                      std::to_string(summary->section_index));
    }
    if (summary->selected.empty()) continue;

    Slide slide;
    slide.index = deck.slides.size() + 1;
    slide.title = section.heading;
    const int indent = std::clamp(section.level - 1, 0, 2);
    for (const auto& sel : summary->selected) {
      if (sel.sentence_index >= section.sentences.size()) {
        throw Error(ErrorCode::SummarySectionMismatch,
                    "sentence " + std::to_string(sel.sentence_index) + " not in section " +
                        std::to_string(i));
      }
      if (slide.bullets.size() == options.max_bullets) break;
      slide.bullets.push_back(
          {utf8::collapse_whitespace(section.sentences[sel.sentence_index].text), indent});
    }
    slide.hyperlink = options.base_url + "#" + docmodel::section_anchor(doc, i);
    slide.narration = narration_for(slide.title, slide.bullets);
    deck.slides.push_back(std::move(slide));
  }
  return deck;
}

std::string escape_markdown(std::string_view text, bool line_start) {
  std::string out;
  out.reserve(text.size() + 8);
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '\\' || c == '#' || c == '`' || c == '*' || c == '_' || c == '[' || c == ']' ||
        c == '<' || c == '>') {
      out.push_back('\\');
    } else if (line_start && i == 0 && (c == '-' || c == '+' || c == '=' || c == '|')) {
      out.push_back('\\');
    }
    out.push_back(c);
  }
  // "1. text" at line start would open an ordered list
  if (line_start) {
    std::size_t d = 0;
    while (d < out.size() && is_digit(out[d])) ++d;
    if (d > 0 && d < out.size() && (out[d] == '.' || out[d] == ')')) out.insert(d, "\\");
  }
  return out;
}

std::string emit_markdown(const SlideDeck& deck) {
  std::string out = "# " + escape_markdown(deck.title_slide.title, false) + "\n";
  if (!deck.title_slide.authors.empty()) {
    std::string authors;
    for (std::size_t i = 0; i < deck.title_slide.authors.size(); ++i) {
      if (i) authors += ", ";
      authors += deck.title_slide.authors[i];
    }
    out += "\n" + escape_markdown(authors, true) + "\n";
  }
  for (const auto& slide : deck.slides) {
    out += "\n## " + escape_markdown(slide.title, false) + "\n\n";
    for (const auto& b : slide.bullets) {
      out.append(static_cast<std::size_t>(b.indent) * 2, ' ');
      out += "- " + escape_markdown(b.text, true) + "\n";
    }
    if (!slide.bullets.empty()) out += "\n";
    out += "[Source](<" + slide.hyperlink + ">)\n";
  }
  return out;
}

std::string emit_deck_json(const SlideDeck& deck) {
  json slides = json::array();
  for (const auto& s : deck.slides) slides.push_back(slide_to_json(s));
  json doc = {
      {"schema", kDeckSchema},
      {"slides", slides},
      {"source_doc_ref", deck.source_doc_ref},
      {"title_slide", {{"authors", deck.title_slide.authors}, {"title", deck.title_slide.title}}},
  };
  return doc.dump(2, ' ', false, json::error_handler_t::strict) + "\n";
}

SlideDeck parse_deck_json(std::string_view text) {
  try {
    const auto doc = json::parse(text);
    if (const auto schema = doc.at("schema").get<std::string>(); schema != kDeckSchema) {
      throw Error(ErrorCode::MalformedDeck, "unsupported schema '" + schema + "'");
    }
    SlideDeck deck;
    deck.source_doc_ref = doc.at("source_doc_ref").get<std::string>();
    deck.title_slide.title = doc.at("title_slide").at("title").get<std::string>();
    deck.title_slide.authors = doc.at("title_slide").at("authors").get<std::vector<std::string>>();
    for (const auto& s : doc.at("slides")) {
      Slide slide;
      slide.index = s.at("index").get<std::size_t>();
      slide.title = s.at("title").get<std::string>();
      slide.hyperlink = s.at("hyperlink").get<std::string>();
      slide.narration = s.at("narration").get<std::string>();
      for (const auto& b : s.at("bullets")) {
        slide.bullets.push_back({b.at("text").get<std::string>(), b.at("indent").get<int>()});
      }
      deck.slides.push_back(std::move(slide));
    }
    return deck;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedDeck, e.what());
  }
}

}  // namespace deckforge::deck
