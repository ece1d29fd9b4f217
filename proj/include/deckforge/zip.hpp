#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace deckforge::zip {

/// Writes an uncompressed (stored) ZIP archive in memory. Entries keep their
/// insertion order and carry the DOS epoch timestamp 1980-01-01 00:00:00, so
/// identical input produces identical bytes.
class StoredZipWriter {
 public:
  void add(std::string name, std::string_view data);
  /// Appends the central directory and returns the whole archive.
  std::string finish() &&;

 private:
  struct Entry {
    std::string name;
    std::uint32_t crc = 0;
    std::uint32_t size = 0;
    std::uint32_t offset = 0;
  };
  std::string out_;
  std::vector<Entry> entries_;
};

std::uint32_t crc32(std::string_view data) noexcept;

}  // namespace deckforge::zip
