#include "deckforge/zip.hpp"

#include <zlib.h>

#include "deckforge/error.hpp"

namespace deckforge::zip {

namespace {

constexpr std::uint16_t kDosTime = 0;               // 00:00:00
constexpr std::uint16_t kDosDate = (0 << 9) | (1 << 5) | 1;  // 1980-01-01
constexpr std::uint16_t kVersion = 20;
constexpr std::uint16_t kUtf8Flag = 1 << 11;

void put16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

void put32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

}  // namespace

std::uint32_t crc32(std::string_view data) noexcept {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  return static_cast<std::uint32_t>(
      ::crc32(crc, reinterpret_cast<const Bytef*>(data.data()), static_cast<uInt>(data.size())));
}

void StoredZipWriter::add(std::string name, std::string_view data) {
  if (out_.size() + data.size() + name.size() + 30 > 0xFFFFFFFFull) {
    throw Error(ErrorCode::IoError, "archive exceeds 4 GiB (zip64 unsupported)");
  }
  Entry e;
  e.name = std::move(name);
  e.crc = crc32(data);
  e.size = static_cast<std::uint32_t>(data.size());
  e.offset = static_cast<std::uint32_t>(out_.size());

  put32(out_, 0x04034b50);
  put16(out_, kVersion);
  put16(out_, kUtf8Flag);
  put16(out_, 0);  // stored
  put16(out_, kDosTime);
  put16(out_, kDosDate);
  put32(out_, e.crc);
  put32(out_, e.size);
  put32(out_, e.size);
  put16(out_, static_cast<std::uint16_t>(e.name.size()));
  put16(out_, 0);
  out_ += e.name;
  out_.append(data);
  entries_.push_back(std::move(e));
}

std::string StoredZipWriter::finish() && {
  const auto cd_offset = static_cast<std::uint32_t>(out_.size());
  for (const auto& e : entries_) {
    put32(out_, 0x02014b50);
    put16(out_, kVersion);
    put16(out_, kVersion);
    put16(out_, kUtf8Flag);
    put16(out_, 0);
    put16(out_, kDosTime);
    put16(out_, kDosDate);
    put32(out_, e.crc);
    put32(out_, e.size);
    put32(out_, e.size);
    put16(out_, static_cast<std::uint16_t>(e.name.size()));
    put16(out_, 0);  // extra
    put16(out_, 0);  // comment
    put16(out_, 0);  // disk
    put16(out_, 0);  // internal attrs
    put32(out_, 0);  // external attrs
    put32(out_, e.offset);
    out_ += e.name;
  }
  const auto cd_size = static_cast<std::uint32_t>(out_.size() - cd_offset);
  put32(out_, 0x06054b50);
  put16(out_, 0);
  put16(out_, 0);
  put16(out_, static_cast<std::uint16_t>(entries_.size()));
  put16(out_, static_cast<std::uint16_t>(entries_.size()));
  put32(out_, cd_size);
  put32(out_, cd_offset);
  put16(out_, 0);
  return std::move(out_);
}

}  // namespace deckforge::zip
