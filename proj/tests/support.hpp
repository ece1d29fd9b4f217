#pragma once

// Test-only readers and independent oracles. Nothing here calls into the
// library, so agreement with it is evidence rather than tautology.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace testsupport {

inline std::filesystem::path source_dir() { return DECKFORGE_SOURCE_DIR; }

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void spit(const std::filesystem::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << bytes;
}

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::mt19937_64 rng(std::random_device{}());
    path_ = std::filesystem::temp_directory_path() /
            ("deckforge-" + tag + "-" + std::to_string(rng()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// ------------------------------------------------------------ little-endian

inline std::uint16_t le16(const std::string& b, std::size_t at) {
  return static_cast<std::uint16_t>(static_cast<unsigned char>(b.at(at)) |
                                    (static_cast<unsigned char>(b.at(at + 1)) << 8));
}

inline std::uint32_t le32(const std::string& b, std::size_t at) {
  return static_cast<std::uint32_t>(le16(b, at)) | (static_cast<std::uint32_t>(le16(b, at + 2)) << 16);
}

// ------------------------------------------------------------ ZIP reader

/// Bitwise CRC-32 (IEEE 802.3, reflected), independent of zlib.
inline std::uint32_t crc32_bitwise(const std::string& data) {
  std::uint32_t crc = 0xFFFFFFFFu;
  for (unsigned char c : data) {
    crc ^= c;
    for (int k = 0; k < 8; ++k) crc = (crc >> 1) ^ (0xEDB88320u & (0u - (crc & 1u)));
  }
  return ~crc;
}

struct ZipEntry {
  std::string name;
  std::string data;
  std::uint16_t method = 0;
  std::uint16_t dos_time = 0;
  std::uint16_t dos_date = 0;
};

/// Reads a stored (method 0) archive through its central directory and
/// checks every local header and CRC. Throws std::runtime_error on any defect.
inline std::vector<ZipEntry> read_zip(const std::string& z) {
  auto fail = [](const std::string& why) { throw std::runtime_error("zip: " + why); };
  if (z.size() < 22) fail("too short");
  std::size_t eocd = std::string::npos;
  for (std::size_t i = z.size() - 22 + 1; i-- > 0;) {
    if (le32(z, i) == 0x06054b50u) {
      eocd = i;
      break;
    }
  }
  if (eocd == std::string::npos) fail("no end of central directory");
  const std::uint16_t count = le16(z, eocd + 10);
  const std::uint32_t cd_size = le32(z, eocd + 12);
  const std::uint32_t cd_off = le32(z, eocd + 16);
  if (static_cast<std::size_t>(cd_off) + cd_size != eocd) fail("central directory misplaced");

  std::vector<ZipEntry> out;
  std::size_t p = cd_off;
  for (std::uint16_t i = 0; i < count; ++i) {
    if (le32(z, p) != 0x02014b50u) fail("bad central header");
    ZipEntry e;
    e.method = le16(z, p + 10);
    e.dos_time = le16(z, p + 12);
    e.dos_date = le16(z, p + 14);
    const std::uint32_t crc = le32(z, p + 16);
    const std::uint32_t csize = le32(z, p + 20);
    const std::uint32_t usize = le32(z, p + 24);
    const std::uint16_t nlen = le16(z, p + 28);
    const std::uint16_t xlen = le16(z, p + 30);
    const std::uint16_t clen = le16(z, p + 32);
    const std::uint32_t local = le32(z, p + 42);
    e.name = z.substr(p + 46, nlen);
    p += 46 + nlen + xlen + clen;

    if (e.method != 0) fail(e.name + ": not stored");
    if (csize != usize) fail(e.name + ": size mismatch");
    if (le32(z, local) != 0x04034b50u) fail(e.name + ": bad local header");
    if (le32(z, local + 14) != crc) fail(e.name + ": local crc differs");
    const std::uint16_t lnlen = le16(z, local + 26);
    const std::uint16_t lxlen = le16(z, local + 28);
    if (z.substr(local + 30, lnlen) != e.name) fail(e.name + ": local name differs");
    const std::size_t data_at = local + 30 + lnlen + lxlen;
    if (data_at + usize > cd_off) fail(e.name + ": data overruns");
    e.data = z.substr(data_at, usize);
    if (crc32_bitwise(e.data) != crc) fail(e.name + ": crc mismatch");
    out.push_back(std::move(e));
  }
  return out;
}

// ------------------------------------------------------------ WAV reader

struct WavInfo {
  std::string riff, wave, fmt, data_tag;
  std::uint32_t riff_size = 0, fmt_size = 0, sample_rate = 0, byte_rate = 0, data_size = 0;
  std::uint16_t format = 0, channels = 0, block_align = 0, bits = 0;
  std::vector<std::int16_t> samples;
};

inline WavInfo read_wav(const std::string& b) {
  if (b.size() < 44) throw std::runtime_error("wav: short header");
  WavInfo w;
  w.riff = b.substr(0, 4);
  w.riff_size = le32(b, 4);
  w.wave = b.substr(8, 4);
  w.fmt = b.substr(12, 4);
  w.fmt_size = le32(b, 16);
  w.format = le16(b, 20);
  w.channels = le16(b, 22);
  w.sample_rate = le32(b, 24);
  w.byte_rate = le32(b, 28);
  w.block_align = le16(b, 32);
  w.bits = le16(b, 34);
  w.data_tag = b.substr(36, 4);
  w.data_size = le32(b, 40);
  if (44 + static_cast<std::size_t>(w.data_size) != b.size()) throw std::runtime_error("wav: size");
  for (std::size_t i = 44; i + 1 < b.size(); i += 2) {
    w.samples.push_back(static_cast<std::int16_t>(le16(b, i)));
  }
  return w;
}

// ------------------------------------------------------------ numeric oracles

/// O(n^2) DFT of a real signal, bins 0..n/2.
inline std::vector<std::complex<double>> naive_dft(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> out(n / 2 + 1);
  for (std::size_t k = 0; k <= n / 2; ++k) {
    std::complex<double> acc = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const double ang = -2.0 * std::numbers::pi * static_cast<double>(k * t % n) / static_cast<double>(n);
      acc += x[t] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    out[k] = acc;
  }
  return out;
}

/// Exponential-time LCS by the textbook recursion.
template <typename T>
std::size_t recursive_lcs(const std::vector<T>& a, const std::vector<T>& b, std::size_t i = 0,
                          std::size_t j = 0) {
  if (i == a.size() || j == b.size()) return 0;
  if (a[i] == b[j]) return 1 + recursive_lcs(a, b, i + 1, j + 1);
  return std::max(recursive_lcs(a, b, i + 1, j), recursive_lcs(a, b, i, j + 1));
}

/// Dense PageRank: builds the full Google matrix G = (1-d)/n 11^T + d P^T
/// and iterates r <- G r a fixed large number of times.
inline std::vector<double> dense_pagerank(const std::vector<double>& w, std::size_t n, double d,
                                          std::size_t iterations = 5000) {
  std::vector<double> p(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) row += w[i * n + j];
    for (std::size_t j = 0; j < n; ++j) p[i * n + j] = row > 0.0 ? w[i * n + j] / row : 1.0 / n;
  }
  std::vector<double> g(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) g[i * n + j] = (1.0 - d) / n + d * p[j * n + i];
  }
  std::vector<double> r(n, 1.0 / n), next(n);
  for (std::size_t it = 0; it < iterations; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += g[i * n + j] * r[j];
      next[i] = s;
    }
    r.swap(next);
  }
  return r;
}

/// Best partition of the rows into two non-empty groups by exhaustive search.
/// Returns labels normalised so that row 0 is in group 0.
inline std::vector<int> brute_force_two_means(const std::vector<std::vector<double>>& pts) {
  const std::size_t n = pts.size();
  const std::size_t dim = pts.front().size();
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> best_labels;
  for (std::uint32_t mask = 1; mask + 1 < (1u << n); ++mask) {
    if (mask & 1u) continue;  // row 0 always in group 0
    std::vector<int> labels(n);
    std::vector<std::vector<double>> c(2, std::vector<double>(dim, 0.0));
    std::vector<int> counts(2, 0);
    for (std::size_t i = 0; i < n; ++i) {
      labels[i] = (mask >> i) & 1u;
      ++counts[labels[i]];
      for (std::size_t k = 0; k < dim; ++k) c[labels[i]][k] += pts[i][k];
    }
    for (int g = 0; g < 2; ++g) {
      for (auto& v : c[g]) v /= counts[g];
    }
    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < dim; ++k) {
        const double dlt = pts[i][k] - c[labels[i]][k];
        inertia += dlt * dlt;
      }
    }
    if (inertia < best) {
      best = inertia;
      best_labels = labels;
    }
  }
  return best_labels;
}

}  // namespace testsupport
