#include "deckforge/pptx.hpp"

#include <fstream>

#include "deckforge/error.hpp"
#include "deckforge/zip.hpp"

namespace deckforge::pptx {

namespace {

constexpr std::string_view kXmlDecl = R"(<?xml version="1.0" encoding="UTF-8" standalone="yes"?>)"
                                      "\n";
constexpr std::string_view kNsA = "http://schemas.openxmlformats.org/drawingml/2006/main";
constexpr std::string_view kNsR = "http://schemas.openxmlformats.org/officeDocument/2006/relationships";
constexpr std::string_view kNsP = "http://schemas.openxmlformats.org/presentationml/2006/main";
constexpr std::string_view kRelBase = "http://schemas.openxmlformats.org/officeDocument/2006/relationships/";

constexpr std::string_view kTheme = R"(<a:theme xmlns:a="http://schemas.openxmlformats.org/drawingml/2006/main" name="Deckforge"><a:themeElements><a:clrScheme name="Deckforge"><a:dk1><a:sysClr val="windowText" lastClr="000000"/></a:dk1><a:lt1><a:sysClr val="window" lastClr="FFFFFF"/></a:lt1><a:dk2><a:srgbClr val="1F2A44"/></a:dk2><a:lt2><a:srgbClr val="E7E6E6"/></a:lt2><a:accent1><a:srgbClr val="4472C4"/></a:accent1><a:accent2><a:srgbClr val="ED7D31"/></a:accent2><a:accent3><a:srgbClr val="A5A5A5"/></a:accent3><a:accent4><a:srgbClr val="FFC000"/></a:accent4><a:accent5><a:srgbClr val="5B9BD5"/></a:accent5><a:accent6><a:srgbClr val="70AD47"/></a:accent6><a:hlink><a:srgbClr val="0563C1"/></a:hlink><a:folHlink><a:srgbClr val="954F72"/></a:folHlink></a:clrScheme><a:fontScheme name="Deckforge"><a:majorFont><a:latin typeface="Calibri Light"/><a:ea typeface=""/><a:cs typeface=""/></a:majorFont><a:minorFont><a:latin typeface="Calibri"/><a:ea typeface=""/><a:cs typeface=""/></a:minorFont></a:fontScheme><a:fmtScheme name="Deckforge"><a:fillStyleLst><a:solidFill><a:schemeClr val="phClr"/></a:solidFill><a:solidFill><a:schemeClr val="phClr"/></a:solidFill><a:solidFill><a:schemeClr val="phClr"/></a:solidFill></a:fillStyleLst><a:lnStyleLst><a:ln w="6350"><a:solidFill><a:schemeClr val="phClr"/></a:solidFill></a:ln><a:ln w="12700"><a:solidFill><a:schemeClr val="phClr"/></a:solidFill></a:ln><a:ln w="19050"><a:solidFill><a:schemeClr val="phClr"/></a:solidFill></a:ln></a:lnStyleLst><a:effectStyleLst><a:effectStyle><a:effectLst/></a:effectStyle><a:effectStyle><a:effectLst/></a:effectStyle><a:effectStyle><a:effectLst/></a:effectStyle></a:effectStyleLst><a:bgFillStyleLst><a:solidFill><a:schemeClr val="phClr"/></a:solidFill><a:solidFill><a:schemeClr val="phClr"/></a:solidFill><a:solidFill><a:schemeClr val="phClr"/></a:solidFill></a:bgFillStyleLst></a:fmtScheme></a:themeElements><a:objectDefaults/><a:extraClrSchemeLst/></a:theme>)";

constexpr std::string_view kEmptyTree = R"(<p:spTree><p:nvGrpSpPr><p:cNvPr id="1" name=""/><p:cNvGrpSpPr/><p:nvPr/></p:nvGrpSpPr><p:grpSpPr><a:xfrm><a:off x="0" y="0"/><a:ext cx="0" cy="0"/><a:chOff x="0" y="0"/><a:chExt cx="0" cy="0"/></a:xfrm></p:grpSpPr>)";

constexpr std::string_view kMaster = R"(<p:sldMaster xmlns:a="http://schemas.openxmlformats.org/drawingml/2006/main" xmlns:r="http://schemas.openxmlformats.org/officeDocument/2006/relationships" xmlns:p="http://schemas.openxmlformats.org/presentationml/2006/main"><p:cSld><p:bg><p:bgRef idx="1001"><a:schemeClr val="bg1"/></p:bgRef></p:bg><p:spTree><p:nvGrpSpPr><p:cNvPr id="1" name=""/><p:cNvGrpSpPr/><p:nvPr/></p:nvGrpSpPr><p:grpSpPr><a:xfrm><a:off x="0" y="0"/><a:ext cx="0" cy="0"/><a:chOff x="0" y="0"/><a:chExt cx="0" cy="0"/></a:xfrm></p:grpSpPr></p:spTree></p:cSld><p:clrMap bg1="lt1" tx1="dk1" bg2="lt2" tx2="dk2" accent1="accent1" accent2="accent2" accent3="accent3" accent4="accent4" accent5="accent5" accent6="accent6" hlink="hlink" folHlink="folHlink"/><p:sldLayoutIdLst><p:sldLayoutId id="2147483649" r:id="rId1"/></p:sldLayoutIdLst></p:sldMaster>)";

constexpr std::string_view kLayout = R"(<p:sldLayout xmlns:a="http://schemas.openxmlformats.org/drawingml/2006/main" xmlns:r="http://schemas.openxmlformats.org/officeDocument/2006/relationships" xmlns:p="http://schemas.openxmlformats.org/presentationml/2006/main" type="blank" preserve="1"><p:cSld name="Blank"><p:spTree><p:nvGrpSpPr><p:cNvPr id="1" name=""/><p:cNvGrpSpPr/><p:nvPr/></p:nvGrpSpPr><p:grpSpPr><a:xfrm><a:off x="0" y="0"/><a:ext cx="0" cy="0"/><a:chOff x="0" y="0"/><a:chExt cx="0" cy="0"/></a:xfrm></p:grpSpPr></p:spTree></p:cSld><p:clrMapOvr><a:masterClrMapping/></p:clrMapOvr></p:sldLayout>)";

// 16:9 slide in EMU
constexpr long kSlideWidth = 12192000;
constexpr long kSlideHeight = 6858000;
constexpr long kMargin = 457200;

struct Rel {
  std::string id;
  std::string type;  // suffix after kRelBase
  std::string target;
  bool external = false;
};

std::string rels_xml(const std::vector<Rel>& rels) {
  std::string out(kXmlDecl);
  out += R"(<Relationships xmlns="http://schemas.openxmlformats.org/package/2006/relationships">)";
  for (const auto& r : rels) {
    out += R"(<Relationship Id=")" + r.id + R"(" Type=")" + std::string(kRelBase) + r.type +
           R"(" Target=")" + xml_escape(r.target) + "\"";
    if (r.external) out += R"( TargetMode="External")";
    out += "/>";
  }
  out += "</Relationships>";
  return out;
}

std::string slide_open() {
  return std::string(kXmlDecl) + "<p:sld xmlns:a=\"" + std::string(kNsA) + "\" xmlns:r=\"" +
         std::string(kNsR) + "\" xmlns:p=\"" + std::string(kNsP) + "\"><p:cSld>" +
         std::string(kEmptyTree);
}

std::string slide_close() {
  return "</p:spTree></p:cSld><p:clrMapOvr><a:masterClrMapping/></p:clrMapOvr></p:sld>";
}

std::string text_box(int id, std::string_view name, long x, long y, long cx, long cy,
                     const std::string& paragraphs) {
  return "<p:sp><p:nvSpPr><p:cNvPr id=\"" + std::to_string(id) + "\" name=\"" + std::string(name) +
         "\"/><p:cNvSpPr txBox=\"1\"/><p:nvPr/></p:nvSpPr><p:spPr><a:xfrm><a:off x=\"" +
         std::to_string(x) + "\" y=\"" + std::to_string(y) + "\"/><a:ext cx=\"" +
         std::to_string(cx) + "\" cy=\"" + std::to_string(cy) +
         "\"/></a:xfrm><a:prstGeom prst=\"rect\"><a:avLst/></a:prstGeom><a:noFill/></p:spPr>"
         "<p:txBody><a:bodyPr wrap=\"square\" rtlCol=\"0\"><a:normAutofit/></a:bodyPr><a:lstStyle/>" +
         paragraphs + "</p:txBody></p:sp>";
}

std::string run(std::string_view text, int size, bool bold, std::string_view link_rid = {}) {
  std::string out = "<a:r><a:rPr lang=\"en-US\" sz=\"" + std::to_string(size) + "\"";
  if (bold) out += " b=\"1\"";
  out += " dirty=\"0\"";
  if (link_rid.empty()) {
    out += "/>";
  } else {
    out += "><a:hlinkClick r:id=\"" + std::string(link_rid) + "\"/></a:rPr>";
  }
  out += "<a:t>" + xml_escape(text) + "</a:t></a:r>";
  return out;
}

std::string paragraph(const std::string& runs) { return "<a:p>" + runs + "</a:p>"; }

std::string empty_paragraph() { return "<a:p><a:endParaRPr lang=\"en-US\" dirty=\"0\"/></a:p>"; }

std::string bullet_paragraph(const deck::Bullet& b) {
  const long indent = 342900;
  const long margin = indent * (b.indent + 1);
  return "<a:p><a:pPr marL=\"" + std::to_string(margin) + "\" lvl=\"" + std::to_string(b.indent) +
         "\" indent=\"-" + std::to_string(indent) +
         "\"><a:buFont typeface=\"Arial\"/><a:buChar char=\"&#8226;\"/></a:pPr>" +
         run(b.text, 2000 - 200 * b.indent, false) + "</a:p>";
}

std::string title_slide_xml(const deck::TitleSlide& title) {
  std::string authors;
  for (std::size_t i = 0; i < title.authors.size(); ++i) {
    if (i) authors += ", ";
    authors += title.authors[i];
  }
  std::string out = slide_open();
  out += text_box(2, "Title", kMargin, 2130425, kSlideWidth - 2 * kMargin, 1470025,
                  paragraph(run(title.title, 4000, true)));
  out += text_box(3, "Authors", kMargin, 3886200, kSlideWidth - 2 * kMargin, 1752600,
                  authors.empty() ? empty_paragraph() : paragraph(run(authors, 2400, false)));
  out += slide_close();
  return out;
}

std::string content_slide_xml(const deck::Slide& slide, std::string_view link_rid) {
  std::string body;
  for (const auto& b : slide.bullets) body += bullet_paragraph(b);
  if (body.empty()) body = empty_paragraph();
  std::string out = slide_open();
  out += text_box(2, "Title", kMargin, 274638, kSlideWidth - 2 * kMargin, 1143000,
                  paragraph(run(slide.title, 3600, true)));
  out += text_box(3, "Bullets", kMargin, 1600200, kSlideWidth - 2 * kMargin, 4525963, body);
  out += text_box(4, "Source link", kMargin, 6217920, kSlideWidth - 2 * kMargin, 457200,
                  paragraph(run("Source section", 1400, false, link_rid)));
  out += slide_close();
  return out;
}

std::string content_types(std::size_t total_slides) {
  std::string out(kXmlDecl);
  out += R"(<Types xmlns="http://schemas.openxmlformats.org/package/2006/content-types">)"
         R"(<Default Extension="rels" ContentType="application/vnd.openxmlformats-package.relationships+xml"/>)"
         R"(<Default Extension="xml" ContentType="application/xml"/>)"
         R"(<Override PartName="/ppt/presentation.xml" ContentType="application/vnd.openxmlformats-officedocument.presentationml.presentation.main+xml"/>)"
         R"(<Override PartName="/ppt/slideMasters/slideMaster1.xml" ContentType="application/vnd.openxmlformats-officedocument.presentationml.slideMaster+xml"/>)"
         R"(<Override PartName="/ppt/slideLayouts/slideLayout1.xml" ContentType="application/vnd.openxmlformats-officedocument.presentationml.slideLayout+xml"/>)"
         R"(<Override PartName="/ppt/theme/theme1.xml" ContentType="application/vnd.openxmlformats-officedocument.theme+xml"/>)";
  for (std::size_t i = 1; i <= total_slides; ++i) {
    out += R"(<Override PartName="/ppt/slides/slide)" + std::to_string(i) +
           R"(.xml" ContentType="application/vnd.openxmlformats-officedocument.presentationml.slide+xml"/>)";
  }
  out += "</Types>";
  return out;
}

std::string presentation_xml(std::size_t total_slides) {
  std::string out(kXmlDecl);
  out += "<p:presentation xmlns:a=\"" + std::string(kNsA) + "\" xmlns:r=\"" + std::string(kNsR) +
         "\" xmlns:p=\"" + std::string(kNsP) + "\" saveSubsetFonts=\"1\">";
  out += R"(<p:sldMasterIdLst><p:sldMasterId id="2147483648" r:id="rId1"/></p:sldMasterIdLst>)";
  out += "<p:sldIdLst>";
  for (std::size_t i = 0; i < total_slides; ++i) {
    out += "<p:sldId id=\"" + std::to_string(256 + i) + "\" r:id=\"rId" + std::to_string(i + 3) +
           "\"/>";
  }
  out += "</p:sldIdLst>";
  out += "<p:sldSz cx=\"" + std::to_string(kSlideWidth) + "\" cy=\"" + std::to_string(kSlideHeight) +
         "\"/><p:notesSz cx=\"6858000\" cy=\"9144000\"/></p:presentation>";
  return out;
}

}  // namespace

std::string xml_escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default:
        // XML 1.0 forbids most C0 controls
        if (c < 0x20 && ch != '\t' && ch != '\n' && ch != '\r') break;
        out.push_back(ch);
    }
  }
  return out;
}

std::vector<std::string> part_names(std::size_t total_slides) {
  std::vector<std::string> names = {
      "[Content_Types].xml",
      "_rels/.rels",
      "ppt/presentation.xml",
      "ppt/_rels/presentation.xml.rels",
      "ppt/slideMasters/slideMaster1.xml",
      "ppt/slideMasters/_rels/slideMaster1.xml.rels",
      "ppt/slideLayouts/slideLayout1.xml",
      "ppt/slideLayouts/_rels/slideLayout1.xml.rels",
      "ppt/theme/theme1.xml",
  };
  for (std::size_t i = 1; i <= total_slides; ++i) {
    names.push_back("ppt/slides/slide" + std::to_string(i) + ".xml");
    names.push_back("ppt/slides/_rels/slide" + std::to_string(i) + ".xml.rels");
  }
  return names;
}

std::string package(const deck::SlideDeck& deck) {
  const std::size_t total = deck.slides.size() + 1;
  if (total > kMaxSlides) {
    throw Error(ErrorCode::DeckTooLarge,
                std::to_string(total) + " slides exceed the limit of " + std::to_string(kMaxSlides));
  }
  zip::StoredZipWriter zip;
  zip.add("[Content_Types].xml", content_types(total));
  zip.add("_rels/.rels", rels_xml({{"rId1", "officeDocument", "ppt/presentation.xml"}}));
  zip.add("ppt/presentation.xml", presentation_xml(total));

  std::vector<Rel> pres_rels = {{"rId1", "slideMaster", "slideMasters/slideMaster1.xml"},
                                {"rId2", "theme", "theme/theme1.xml"}};
  for (std::size_t i = 0; i < total; ++i) {
    pres_rels.push_back({"rId" + std::to_string(i + 3), "slide", "slides/slide" + std::to_string(i + 1) + ".xml"});
  }
  zip.add("ppt/_rels/presentation.xml.rels", rels_xml(pres_rels));
  zip.add("ppt/slideMasters/slideMaster1.xml", std::string(kXmlDecl) + std::string(kMaster));
  zip.add("ppt/slideMasters/_rels/slideMaster1.xml.rels",
          rels_xml({{"rId1", "slideLayout", "../slideLayouts/slideLayout1.xml"},
                    {"rId2", "theme", "../theme/theme1.xml"}}));
  zip.add("ppt/slideLayouts/slideLayout1.xml", std::string(kXmlDecl) + std::string(kLayout));
  zip.add("ppt/slideLayouts/_rels/slideLayout1.xml.rels",
          rels_xml({{"rId1", "slideMaster", "../slideMasters/slideMaster1.xml"}}));
  zip.add("ppt/theme/theme1.xml", std::string(kXmlDecl) + std::string(kTheme));

  const Rel layout_rel{"rId1", "slideLayout", "../slideLayouts/slideLayout1.xml"};
  zip.add("ppt/slides/slide1.xml", title_slide_xml(deck.title_slide));
  zip.add("ppt/slides/_rels/slide1.xml.rels", rels_xml({layout_rel}));
  for (std::size_t i = 0; i < deck.slides.size(); ++i) {
    const auto n = std::to_string(i + 2);
    zip.add("ppt/slides/slide" + n + ".xml", content_slide_xml(deck.slides[i], "rId2"));
    zip.add("ppt/slides/_rels/slide" + n + ".xml.rels",
            rels_xml({layout_rel, {"rId2", "hyperlink", deck.slides[i].hyperlink, true}}));
  }
  return std::move(zip).finish();
}

void emit_pptx(const deck::SlideDeck& deck, const std::filesystem::path& out) {
  const auto bytes = package(deck);
  std::ofstream f(out, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::IoError, "cannot open " + out.string() + " for writing");
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error(ErrorCode::IoError, "short write to " + out.string());
}

}  // namespace deckforge::pptx
