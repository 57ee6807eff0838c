#pragma once

// High-precision zeta-zero datasets: file formats, truncation, manifests and
// a hash-verified download cache.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "khinchin/numerics.hpp"

namespace khinchin {

enum class ZeroFileFormat {
  Plain,       ///< one decimal per line; index from line order
  IndexedTsv,  ///< "index<TAB>decimal"
};

ZeroFileFormat parse_zero_file_format(std::string_view name);
const char* to_string(ZeroFileFormat format);

struct ZeroRecord {
  std::uint64_t index_l = 0;
  std::string gamma_digits;
  /// Trusted significant digits; equals the digit count unless truncated.
  std::size_t precision_digits = 0;
  /// Empty for records read verbatim from a file.
  std::string provenance;

  BigReal value() const;
  friend bool operator==(const ZeroRecord&, const ZeroRecord&) = default;
};

/// Parses and validates: gamma positive, indices and gamma strictly
/// increasing. Blank lines are skipped; CRLF is accepted. Malformed lines
/// raise ParseError with the 1-based line number; ordering problems raise
/// ValidationError naming both indices.
std::vector<ZeroRecord> parse_zero_text(std::string_view text, ZeroFileFormat format,
                                        std::uint64_t index_offset = 1);
std::vector<ZeroRecord> parse_zero_file(const std::filesystem::path& path, ZeroFileFormat format,
                                        std::uint64_t index_offset = 1);

/// LF-terminated rendering in the given format.
std::string render_zero_file(std::span<const ZeroRecord> records, ZeroFileFormat format);

/// Keeps the first `digits` significant digits (no rounding). The result
/// trusts digits - 1 of them, since dropping digits moves the value by up to
/// a full unit of the last kept place. Truncating to the current length
/// returns the record unchanged. Throws DomainError outside [2, precision].
ZeroRecord truncate_record(const ZeroRecord& rec, std::size_t digits);

struct ManifestEntry {
  std::string name;
  std::uintmax_t bytes = 0;
  std::string sha256;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct DatasetManifest {
  std::string source_url;
  std::uint64_t zero_count = 0;
  std::size_t digits = 0;
  ZeroFileFormat format = ZeroFileFormat::Plain;
  std::vector<ManifestEntry> files;

  friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

/// Header lines "url=", "count=", "digits=" (optionally "format="), then one
/// "name bytes sha256hex" line per file. '#' starts a comment line.
DatasetManifest parse_manifest(std::string_view text);
DatasetManifest load_manifest(const std::filesystem::path& path);
std::string render_manifest(const DatasetManifest& manifest);

/// Builds manifest entries for existing local files.
ManifestEntry describe_file(const std::filesystem::path& path);

std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

/// Files whose size and hash were checked against the manifest.
struct DatasetHandle {
  std::filesystem::path directory;
  DatasetManifest manifest;
  std::vector<std::filesystem::path> files;
  std::uintmax_t bytes_transferred = 0;

  /// Path of a verified file by manifest name; throws ValidationError.
  const std::filesystem::path& file(std::string_view name) const;
};

/// $KHINCHIN_CACHE_DIR, else $XDG_CACHE_HOME/khinchin, else ~/.cache/khinchin.
std::filesystem::path default_cache_dir();

/// <cache_dir>/<sha256(url)>.
std::filesystem::path dataset_directory(const DatasetManifest& manifest,
                                        const std::filesystem::path& cache_dir);

/// Downloads missing files from <url>/<name> with byte-range resume and
/// verifies every file. A warm cache causes no network traffic. A cached
/// file with a bad hash is moved to quarantine/ and fetched again; a fresh
/// download with a bad hash is quarantined and raises CorruptFileError.
/// Transport failures raise NetworkError and keep the partial download.
DatasetHandle fetch_dataset(const DatasetManifest& manifest, const std::filesystem::path& cache_dir);

/// Verifies files stored next to a manifest (bundled fixtures).
DatasetHandle open_local_dataset(const std::filesystem::path& manifest_path);

/// All zeros of a verified dataset, files taken in manifest order.
std::vector<ZeroRecord> load_zeros(const DatasetHandle& handle);

}  // namespace khinchin
