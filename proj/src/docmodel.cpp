#include "deckforge/docmodel.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <unordered_set>

#include "deckforge/error.hpp"
#include "deckforge/utf8.hpp"

namespace deckforge::docmodel {

namespace {

constexpr int kMaxLevel = 3;

bool is_space(char c) noexcept {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}
bool is_upper(char c) noexcept { return c >= 'A' && c <= 'Z'; }
bool is_lower(char c) noexcept { return c >= 'a' && c <= 'z'; }
bool is_digit(char c) noexcept { return c >= '0' && c <= '9'; }
bool is_alnum_ascii(char c) noexcept { return is_upper(c) || is_lower(c) || is_digit(c); }
// ASCII letter or digit, or the lead byte of a non-ASCII code point.
bool starts_word(char c) noexcept { return is_alnum_ascii(c) || static_cast<unsigned char>(c) >= 0x80; }

bool is_closer(char c) noexcept { return c == '"' || c == '\'' || c == ')' || c == ']'; }
bool is_opener(char c) noexcept { return c == '"' || c == '\'' || c == '(' || c == '['; }

struct Line {
  std::size_t start = 0;  // first byte
  std::size_t end = 0;    // one past the last byte, newline excluded
};

std::vector<Line> split_lines(std::string_view input) {
  std::vector<Line> lines;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= input.size(); ++i) {
    if (i == input.size() || input[i] == '\n') {
      std::size_t end = i;
      if (end > start && input[end - 1] == '\r') --end;
      if (i < input.size() || start < input.size()) lines.push_back({start, end});
      start = i + 1;
    }
  }
  return lines;
}

std::string_view line_text(std::string_view input, const Line& line) {
  return input.substr(line.start, line.end - line.start);
}

bool is_blank(std::string_view s) { return utf8::trim(s).empty(); }

// One classified line. Text lines may begin mid-line (e.g. after "\item").
enum class LineKind { Text, Break, Heading };

struct Classified {
  LineKind kind = LineKind::Break;
  std::size_t line_start = 0;
  std::size_t text_start = 0;  // for Text
  std::size_t text_end = 0;
  int level = 1;  // for Heading
  std::string heading;
};

struct Meta {
  std::string title;
  std::vector<std::string> authors;
};

std::vector<std::string> split_authors(std::string_view list) {
  std::vector<std::string> out;
  std::string current;
  auto flush = [&] {
    auto t = utf8::collapse_whitespace(current);
    if (!t.empty()) out.push_back(t);
    current.clear();
  };
  for (std::size_t i = 0; i < list.size(); ++i) {
    const char c = list[i];
    if (c == ',' || c == ';') {
      flush();
    } else if (list.substr(i, 5) == " and ") {
      flush();
      i += 4;
    } else {
      current.push_back(c);
    }
  }
  flush();
  return out;
}

// "Title: x" / "Author: a, b" preamble lines shared by plain and markdown input.
bool parse_meta_line(std::string_view line, Meta& meta) {
  auto t = utf8::trim(line);
  auto starts_with_ci = [&](std::string_view prefix) {
    if (t.size() < prefix.size()) return false;
    for (std::size_t i = 0; i < prefix.size(); ++i) {
      if (std::tolower(static_cast<unsigned char>(t[i])) != prefix[i]) return false;
    }
    return true;
  };
  if (starts_with_ci("title:")) {
    meta.title = utf8::collapse_whitespace(t.substr(6));
    return true;
  }
  for (std::string_view key : {"authors:", "author:", "by "}) {
    if (starts_with_ci(key)) {
      meta.authors = split_authors(t.substr(key.size()));
      return true;
    }
  }
  return false;
}

// ---------------------------------------------------------------- markdown

std::optional<Classified> markdown_heading(std::string_view input, const Line& line) {
  auto text = line_text(input, line);
  std::size_t hashes = 0;
  while (hashes < text.size() && text[hashes] == '#') ++hashes;
  if (hashes == 0 || hashes > 6) return std::nullopt;
  if (hashes < text.size() && text[hashes] != ' ' && text[hashes] != '\t') return std::nullopt;
  auto rest = utf8::trim(text.substr(hashes));
  // closing sequence "## Title ##"
  std::size_t e = rest.size();
  while (e > 0 && rest[e - 1] == '#') --e;
  if (e < rest.size() && (e == 0 || rest[e - 1] == ' ')) rest = utf8::trim(rest.substr(0, e));
  Classified c;
  c.kind = LineKind::Heading;
  c.level = std::min<int>(static_cast<int>(hashes), kMaxLevel);
  c.heading = utf8::collapse_whitespace(rest);
  return c;
}

std::vector<Classified> classify_markdown(std::string_view input, const std::vector<Line>& lines,
                                          Meta& meta) {
  std::vector<Classified> out;
  out.reserve(lines.size());
  bool in_fence = false;
  bool seen_heading = false;
  std::size_t preamble_lines = 0;
  for (const auto& line : lines) {
    auto text = line_text(input, line);
    auto trimmed = utf8::trim(text);
    Classified c;
    c.line_start = line.start;
    if (trimmed.starts_with("```") || trimmed.starts_with("~~~")) {
      in_fence = !in_fence;
      out.push_back(c);
      continue;
    }
    if (in_fence || trimmed.empty()) {
      out.push_back(c);
      continue;
    }
    if (auto h = markdown_heading(input, line)) {
      seen_heading = true;
      h->line_start = line.start;
      out.push_back(*h);
      continue;
    }
    if (!seen_heading) {
      // pandoc title block: "% Title" then "% Author; Author"
      if (trimmed.starts_with('%')) {
        auto value = utf8::trim(trimmed.substr(1));
        if (preamble_lines == 0) {
          meta.title = utf8::collapse_whitespace(value);
        } else if (preamble_lines == 1) {
          meta.authors = split_authors(value);
        }
        ++preamble_lines;
        out.push_back(c);
        continue;
      }
      if (parse_meta_line(trimmed, meta)) {
        ++preamble_lines;
        out.push_back(c);
        continue;
      }
    }
    c.kind = LineKind::Text;
    c.text_start = line.start;
    c.text_end = line.end;
    out.push_back(c);
  }
  return out;
}

// ---------------------------------------------------------------- latex-min

// Content of the balanced brace group starting at `open` (which must be '{').
// Returns the inner view and sets `close` to the index of the matching '}'.
std::optional<std::string_view> brace_group(std::string_view s, std::size_t open,
                                            std::size_t& close) {
  if (open >= s.size() || s[open] != '{') return std::nullopt;
  int depth = 0;
  for (std::size_t i = open; i < s.size(); ++i) {
    if (s[i] == '\\') {
      ++i;
      continue;
    }
    if (s[i] == '{') ++depth;
    if (s[i] == '}' && --depth == 0) {
      close = i;
      return s.substr(open + 1, i - open - 1);
    }
  }
  return std::nullopt;
}

// Drops control words and braces: "\textbf{A} B" -> "A B".
std::string strip_latex(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (c == '\\') {
      std::size_t j = i + 1;
      while (j < s.size() && std::isalpha(static_cast<unsigned char>(s[j]))) ++j;
      if (j == i + 1 && j < s.size()) {
        // escaped symbol such as "\&" or "\\"
        if (s[j] == '\\') {
          out.push_back(' ');
        } else {
          out.push_back(s[j]);
        }
        j = j + 1;
      } else {
        out.push_back(' ');
      }
      i = j - 1;
      continue;
    }
    if (c == '{' || c == '}') continue;
    out.push_back(c);
  }
  return utf8::collapse_whitespace(out);
}

const std::unordered_set<std::string_view>& latex_skipped_environments() {
  static const std::unordered_set<std::string_view> envs = {
      "figure",   "figure*", "table",    "table*",       "tabular",  "equation",
      "equation*", "align",  "align*",   "thebibliography", "verbatim", "lstlisting",
      "IEEEkeywords"};
  return envs;
}

std::vector<Classified> classify_latex(std::string_view input, const std::vector<Line>& lines,
                                       Meta& meta) {
  static constexpr std::array<std::pair<std::string_view, int>, 4> kHeadings = {{
      {"\\section", 1},
      {"\\subsection", 2},
      {"\\subsubsection", 3},
      {"\\paragraph", 3},
  }};
  std::vector<Classified> out;
  out.reserve(lines.size());
  int skip_depth = 0;
  bool done = false;
  for (const auto& line : lines) {
    Classified c;
    c.line_start = line.start;
    auto text = line_text(input, line);
    auto trimmed = utf8::trim(text);
    const std::size_t lead = static_cast<std::size_t>(trimmed.data() - text.data());
    if (done || trimmed.empty() || trimmed.starts_with('%')) {
      out.push_back(c);
      continue;
    }
    if (trimmed.starts_with("\\begin{") || trimmed.starts_with("\\end{")) {
      const bool begin = trimmed.starts_with("\\begin{");
      std::size_t close = 0;
      auto env = brace_group(trimmed, begin ? 6 : 4, close);
      if (env && latex_skipped_environments().contains(*env)) skip_depth += begin ? 1 : -1;
      if (env && !begin && *env == "document") done = true;
      skip_depth = std::max(skip_depth, 0);
      out.push_back(c);
      continue;
    }
    if (skip_depth > 0) {
      out.push_back(c);
      continue;
    }
    bool handled = false;
    for (const auto& [cmd, level] : kHeadings) {
      if (!trimmed.starts_with(cmd)) continue;
      std::size_t pos = cmd.size();
      if (pos < trimmed.size() && trimmed[pos] == '*') ++pos;
      if (pos >= trimmed.size() || trimmed[pos] != '{') continue;
      std::size_t close = 0;
      auto inner = brace_group(trimmed, pos, close);
      if (!inner) continue;
      c.kind = LineKind::Heading;
      c.level = level;
      c.heading = strip_latex(*inner);
      out.push_back(c);
      auto rest = trimmed.substr(close + 1);
      if (!is_blank(rest)) {
        // text sharing the heading line becomes the first paragraph line
        Classified t;
        t.kind = LineKind::Text;
        t.line_start = line.start;
        t.text_start = line.start + lead + close + 1;
        t.text_end = line.end;
        out.push_back(t);
      }
      handled = true;
      break;
    }
    if (handled) continue;
    if (trimmed.starts_with("\\title{") || trimmed.starts_with("\\author{")) {
      const bool is_title = trimmed.starts_with("\\title{");
      std::size_t close = 0;
      // multi-line arguments: scan from here to the end of input
      auto from_here = input.substr(line.start + lead);
      if (auto inner = brace_group(from_here, is_title ? 6 : 7, close)) {
        if (is_title) {
          meta.title = strip_latex(*inner);
        } else {
          std::string joined(*inner);
          std::string flattened;
          for (std::size_t i = 0; i < joined.size(); ++i) {
            if (joined.compare(i, 4, "\\and") == 0) {
              flattened += ",";
              i += 3;
            } else {
              flattened.push_back(joined[i]);
            }
          }
          meta.authors = split_authors(strip_latex(flattened));
        }
      }
      out.push_back(c);
      continue;
    }
    if (trimmed.starts_with("\\item")) {
      std::size_t pos = 5;
      if (pos < trimmed.size() && trimmed[pos] == '[') {
        auto rb = trimmed.find(']', pos);
        pos = rb == std::string_view::npos ? trimmed.size() : rb + 1;
      }
      auto rest = trimmed.substr(pos);
      if (!is_blank(rest)) {
        c.kind = LineKind::Text;
        c.text_start = line.start + lead + pos;
        c.text_end = line.end;
      }
      out.push_back(c);
      continue;
    }
    if (trimmed.starts_with('\\') && trimmed.size() > 1 &&
        std::isalpha(static_cast<unsigned char>(trimmed[1]))) {
      // any other command line (\maketitle, \label, \centerline, ...) breaks paragraphs
      out.push_back(c);
      continue;
    }
    c.kind = LineKind::Text;
    c.text_start = line.start;
    c.text_end = line.end;
    out.push_back(c);
  }
  // Continuation lines of a multi-line \title or \author argument stay Text
  // before the first heading; the assembler only uses them as a title fallback.
  return out;
}

// ---------------------------------------------------------------- plain

std::optional<Classified> plain_heading(std::string_view trimmed) {
  if (trimmed.size() > 80) return std::nullopt;
  const char last = trimmed.back();
  if (last == '.' || last == '?' || last == '!' || last == ',' || last == ';') return std::nullopt;

  // numbered: "2", "2.", "2.1", "2.1." followed by the title
  std::size_t i = 0;
  int components = 0;
  while (i < trimmed.size() && is_digit(trimmed[i])) {
    std::size_t j = i;
    while (j < trimmed.size() && is_digit(trimmed[j])) ++j;
    ++components;
    i = j;
    if (i < trimmed.size() && trimmed[i] == '.' && i + 1 < trimmed.size() &&
        is_digit(trimmed[i + 1])) {
      ++i;
      continue;
    }
    break;
  }
  if (components > 0) {
    if (i < trimmed.size() && trimmed[i] == '.') ++i;
    if (i < trimmed.size() && (trimmed[i] == ' ' || trimmed[i] == '\t')) {
      auto title = utf8::trim(trimmed.substr(i));
      if (!title.empty() && (is_upper(title[0]) || is_lower(title[0]))) {
        Classified c;
        c.kind = LineKind::Heading;
        c.level = std::min(components, kMaxLevel);
        c.heading = utf8::collapse_whitespace(title);
        return c;
      }
    }
    return std::nullopt;
  }

  bool has_upper = false;
  std::size_t words = 1;
  for (char ch : trimmed) {
    if (is_lower(ch)) return std::nullopt;
    if (is_upper(ch)) has_upper = true;
    if (ch == ' ') ++words;
  }
  if (!has_upper || words > 12) return std::nullopt;
  Classified c;
  c.kind = LineKind::Heading;
  c.level = 1;
  c.heading = utf8::collapse_whitespace(trimmed);
  return c;
}

std::vector<Classified> classify_plain(std::string_view input, const std::vector<Line>& lines,
                                       Meta& meta) {
  std::vector<Classified> out(lines.size());
  bool seen_heading = false;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    out[i].line_start = lines[i].start;
    auto trimmed = utf8::trim(line_text(input, lines[i]));
    if (trimmed.empty()) continue;
    const bool blank_before = i == 0 || is_blank(line_text(input, lines[i - 1]));
    const bool blank_after = i + 1 == lines.size() || is_blank(line_text(input, lines[i + 1]));
    if (blank_before && blank_after) {
      if (auto h = plain_heading(trimmed)) {
        out[i] = *h;
        out[i].line_start = lines[i].start;
        seen_heading = true;
        continue;
      }
    }
    if (!seen_heading && parse_meta_line(trimmed, meta)) continue;
    out[i].kind = LineKind::Text;
    out[i].text_start = lines[i].start;
    out[i].text_end = lines[i].end;
  }
  return out;
}

// ---------------------------------------------------------------- assembly

struct Paragraph {
  std::size_t start = 0;
  std::size_t end = 0;
};

void finish_section(std::string_view input, Section& section,
                    const std::vector<Paragraph>& paragraphs, const SegmenterOptions& seg) {
  for (const auto& para : paragraphs) {
    auto raw = input.substr(para.start, para.end - para.start);
    auto collapsed = utf8::collapse_whitespace(raw);
    if (collapsed.empty()) continue;
    section.paragraphs.push_back(std::move(collapsed));
    for (auto s : segment_sentences(raw, seg)) {
      s.index = section.sentences.size();
      s.span.byte_start += para.start;
      s.span.byte_end += para.start;
      section.sentences.push_back(std::move(s));
    }
  }
}

}  // namespace

std::string_view to_string(SourceFormat format) noexcept {
  switch (format) {
    case SourceFormat::Plain: return "plain";
    case SourceFormat::Markdown: return "markdown";
    case SourceFormat::LatexMin: return "latex-min";
  }
  return "plain";
}

SourceFormat parse_source_format(std::string_view name) {
  if (name == "plain") return SourceFormat::Plain;
  if (name == "markdown" || name == "md") return SourceFormat::Markdown;
  if (name == "latex-min" || name == "latex") return SourceFormat::LatexMin;
  throw Error(ErrorCode::InvalidConfig, "unknown input format '" + std::string(name) + "'");
}

const std::vector<std::string>& default_abbreviations() {
  static const std::vector<std::string> table = {
      "Fig.",  "Figs.", "fig.",  "figs.", "Eq.",   "Eqs.",   "eq.",    "Tab.",  "Sec.",
      "Sect.", "Ch.",   "No.",   "Nos.",  "Vol.",  "vol.",   "pp.",    "p.",    "al.",
      "e.g.",  "i.e.",  "cf.",   "vs.",   "Dr.",   "Mr.",    "Mrs.",   "Ms.",   "Prof.",
      "Jr.",   "Sr.",   "St.",   "approx.", "resp.", "ca.",  "Ref.",   "Refs.", "Inc.",
      "Ltd.",  "Co.",   "Corp.", "Dept.", "Univ.", "viz.",   "Jan.",   "Feb.",  "Mar.",
      "Apr.",  "Aug.",  "Sept.", "Oct.",  "Nov.",  "Dec.",   "Eqn.",   "Thm.",  "Def.",
  };
  return table;
}

// "X." at `w` is a name initial when it opens the text, follows a capitalised
// word or another initial, or is followed by another initial ("J. R. Smith").
bool looks_like_initial(std::string_view text, std::size_t w, std::size_t after) {
  std::size_t p = w;
  while (p > 0 && is_space(text[p - 1])) --p;
  if (p == 0) return true;
  std::size_t q = p;
  while (q > 0 && !is_space(text[q - 1])) --q;
  if (is_upper(text[q])) return true;
  std::size_t k = after;
  while (k < text.size() && is_space(text[k])) ++k;
  return k + 1 < text.size() && is_upper(text[k]) && text[k + 1] == '.';
}

std::vector<Sentence> segment_sentences(std::string_view text, const SegmenterOptions& options) {
  std::unordered_set<std::string_view> abbreviations;
  for (const auto& a : default_abbreviations()) abbreviations.insert(a);
  for (const auto& a : options.extra_abbreviations) abbreviations.insert(a);

  std::vector<Sentence> out;
  auto emit = [&](std::size_t begin, std::size_t end) {
    while (begin < end && is_space(text[begin])) ++begin;
    while (end > begin && is_space(text[end - 1])) --end;
    if (begin == end) return;
    Sentence s;
    s.index = out.size();
    s.text = std::string(text.substr(begin, end - begin));
    s.span = {begin, end};
    out.push_back(std::move(s));
  };

  std::size_t start = 0;
  const std::size_t n = text.size();
  for (std::size_t i = 0; i < n; ++i) {
    const char c = text[i];
    if (c != '.' && c != '!' && c != '?') continue;

    std::size_t j = i + 1;
    while (j < n && (text[j] == '.' || text[j] == '!' || text[j] == '?')) ++j;
    while (j < n && is_closer(text[j])) ++j;

    bool boundary = false;
    if (j == n) {
      boundary = true;
    } else if (is_space(text[j])) {
      std::size_t k = j;
      while (k < n && is_space(text[k])) ++k;
      if (k == n || starts_word(text[k])) {
        boundary = true;
      } else if (is_opener(text[k]) && k + 1 < n && starts_word(text[k + 1])) {
        boundary = true;
      }
    }
    if (boundary && c == '.' && j == i + 1) {
      std::size_t w = i;
      while (w > start && !is_space(text[w - 1])) --w;
      while (w < i && is_opener(text[w])) ++w;
      auto word = text.substr(w, i + 1 - w);
      if (abbreviations.contains(word)) boundary = false;
      if (word.size() == 2 && is_upper(word[0]) && looks_like_initial(text, w, j)) boundary = false;
    }
    if (!boundary) {
      i = j - 1;
      continue;
    }
    emit(start, j);
    start = j;
    i = j - 1;
  }
  emit(start, n);
  return out;
}

Document parse_document(std::string_view input, SourceFormat format, const ParseOptions& options) {
  if (utf8::trim(input).empty()) throw Error(ErrorCode::EmptyInput, "input contains no text");
  utf8::validate(input, "input");

  const auto lines = split_lines(input);
  Meta meta;
  std::vector<Classified> classified;
  switch (format) {
    case SourceFormat::Markdown: classified = classify_markdown(input, lines, meta); break;
    case SourceFormat::LatexMin: classified = classify_latex(input, lines, meta); break;
    case SourceFormat::Plain: classified = classify_plain(input, lines, meta); break;
  }

  Document doc;
  doc.source_format = format;
  doc.authors = meta.authors;

  std::optional<Section> current;
  std::vector<Paragraph> paragraphs;
  std::optional<Paragraph> open_para;
  std::vector<Paragraph> preamble;
  int previous_level = 0;

  auto close_para = [&] {
    if (!open_para) return;
    (current ? paragraphs : preamble).push_back(*open_para);
    open_para.reset();
  };
  auto close_section = [&](std::size_t end_byte) {
    close_para();
    if (!current) return;
    current->span.byte_end = end_byte;
    finish_section(input, *current, paragraphs, options.segmenter);
    paragraphs.clear();
    current->index = doc.sections.size();
    doc.sections.push_back(std::move(*current));
    current.reset();
  };

  for (const auto& c : classified) {
    switch (c.kind) {
      case LineKind::Break:
        close_para();
        break;
      case LineKind::Heading: {
        close_section(c.line_start);
        Section s;
        s.heading = c.heading;
        s.level = std::clamp(std::min(c.level, previous_level + 1), 1, kMaxLevel);
        previous_level = s.level;
        s.span.byte_start = c.line_start;
        current = std::move(s);
        break;
      }
      case LineKind::Text:
        if (open_para) {
          open_para->end = c.text_end;
        } else {
          open_para = Paragraph{c.text_start, c.text_end};
        }
        break;
    }
  }
  close_section(input.size());

  auto first_preamble_line = [&]() -> std::string {
    for (const auto& p : preamble) {
      auto raw = input.substr(p.start, p.end - p.start);
      auto nl = raw.find('\n');
      auto t = utf8::collapse_whitespace(raw.substr(0, nl));
      if (!t.empty()) return t;
    }
    return {};
  };

  if (doc.sections.empty()) {
    if (!options.wrap_without_headings) {
      throw Error(ErrorCode::NoSectionsFound, "input has no recognizable headings");
    }
    Section s;
    s.heading = !meta.title.empty() ? meta.title : "Document";
    s.level = 1;
    s.span = {0, input.size()};
    finish_section(input, s, preamble, options.segmenter);
    doc.sections.push_back(std::move(s));
    doc.title = doc.sections.front().heading;
    return doc;
  }

  doc.title = meta.title;
  if (doc.title.empty()) doc.title = first_preamble_line();
  if (doc.title.empty()) doc.title = doc.sections.front().heading;
  return doc;
}

std::string slugify(std::string_view heading) {
  std::string slug;
  bool pending_dash = false;
  for (char ch : heading) {
    const auto uc = static_cast<unsigned char>(ch);
    if (is_alnum_ascii(ch)) {
      if (pending_dash && !slug.empty()) slug.push_back('-');
      pending_dash = false;
      slug.push_back(static_cast<char>(std::tolower(uc)));
    } else {
      pending_dash = true;
    }
  }
  return slug;
}

std::string section_anchor(const Document& doc, std::size_t index) {
  if (index >= doc.sections.size()) {
    throw Error(ErrorCode::IndexOutOfRange, "section index " + std::to_string(index) +
                                                " out of range (" +
                                                std::to_string(doc.sections.size()) + " sections)");
  }
  std::string anchor = "sec-" + std::to_string(index);
  auto slug = slugify(doc.sections[index].heading);
  if (!slug.empty()) anchor += "-" + slug;
  return anchor;
}

}  // namespace deckforge::docmodel
