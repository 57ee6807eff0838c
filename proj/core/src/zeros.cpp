#include "khinchin/zeros.hpp"

#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>

#include "khinchin/errors.hpp"

namespace khinchin {
namespace {

std::string_view trim(std::string_view s) {
  const auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && ws(s.front())) s.remove_prefix(1);
  while (!s.empty() && ws(s.back())) s.remove_suffix(1);
  return s;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    fn(line, line_no);
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
}

std::uint64_t parse_u64(std::string_view s, const std::string& what, std::size_t line_no) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ParseError("line " + std::to_string(line_no) + ": invalid " + what + " '" +
                         std::string(s) + "'",
                     line_no);
  }
  return v;
}

std::size_t significant_digits(std::string_view digits) {
  std::size_t n = 0;
  bool started = false;
  for (char c : digits) {
    if (c < '0' || c > '9') continue;
    started = started || c != '0';
    if (started) ++n;
  }
  return n;
}

}  // namespace

ZeroFileFormat parse_zero_file_format(std::string_view name) {
  if (name == "plain") return ZeroFileFormat::Plain;
  if (name == "indexed_tsv" || name == "tsv") return ZeroFileFormat::IndexedTsv;
  throw ConfigError("unknown zero file format '" + std::string(name) + "'");
}

const char* to_string(ZeroFileFormat format) {
  return format == ZeroFileFormat::Plain ? "plain" : "indexed_tsv";
}

BigReal ZeroRecord::value() const { return parse_decimal(gamma_digits, precision_digits); }

std::vector<ZeroRecord> parse_zero_text(std::string_view text, ZeroFileFormat format,
                                        std::uint64_t index_offset) {
  std::vector<ZeroRecord> out;
  std::optional<BigReal> previous;
  std::uint64_t next_plain_index = index_offset;

  for_each_line(text, [&](std::string_view raw, std::size_t line_no) {
    std::string_view line = trim(raw);
    if (line.empty()) return;

    ZeroRecord rec;
    std::string_view digits = line;
    if (format == ZeroFileFormat::IndexedTsv) {
      const auto tab = line.find('\t');
      if (tab == std::string_view::npos) {
        throw ParseError("line " + std::to_string(line_no) + ": expected index<TAB>decimal",
                         line_no);
      }
      rec.index_l = parse_u64(trim(line.substr(0, tab)), "index", line_no);
      digits = trim(line.substr(tab + 1));
    } else {
      rec.index_l = next_plain_index++;
    }

    BigReal value;
    try {
      value = parse_decimal(digits);
    } catch (const ParseError& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what(), line_no);
    }
    if (value.sign() <= 0) {
      throw ValidationError("line " + std::to_string(line_no) + ": zero " +
                            std::to_string(rec.index_l) + " is not positive");
    }
    if (!out.empty()) {
      const auto& prev = out.back();
      if (rec.index_l <= prev.index_l) {
        throw ValidationError("line " + std::to_string(line_no) + ": index " +
                              std::to_string(rec.index_l) + " does not follow index " +
                              std::to_string(prev.index_l));
      }
      if (compare(value, *previous) <= 0) {
        throw ValidationError("line " + std::to_string(line_no) + ": gamma of zero " +
                              std::to_string(rec.index_l) + " is not above gamma of zero " +
                              std::to_string(prev.index_l));
      }
    }
    rec.gamma_digits = std::string(digits);
    rec.precision_digits = value.precision_digits();
    previous = std::move(value);
    out.push_back(std::move(rec));
  });
  return out;
}

std::vector<ZeroRecord> parse_zero_file(const std::filesystem::path& path, ZeroFileFormat format,
                                        std::uint64_t index_offset) {
  return parse_zero_text(read_file(path), format, index_offset);
}

std::string render_zero_file(std::span<const ZeroRecord> records, ZeroFileFormat format) {
  std::string out;
  for (const auto& r : records) {
    if (format == ZeroFileFormat::IndexedTsv) {
      out += std::to_string(r.index_l);
      out += '\t';
    }
    out += r.gamma_digits;
    out += '\n';
  }
  return out;
}

ZeroRecord truncate_record(const ZeroRecord& rec, std::size_t digits) {
  if (digits < 2 || digits > rec.precision_digits) {
    throw DomainError("truncation to " + std::to_string(digits) + " digits outside [2, " +
                      std::to_string(rec.precision_digits) + "]");
  }
  const std::size_t available = significant_digits(rec.gamma_digits);
  if (digits == available && digits == rec.precision_digits) return rec;

  std::string kept;
  std::size_t sig = 0;
  bool started = false;
  bool after_point = false;
  for (char c : rec.gamma_digits) {
    if (c == '.') {
      if (sig >= digits) break;
      after_point = true;
      kept.push_back(c);
      continue;
    }
    if (sig >= digits) {
      // Dropped integer-part digits become zeros to keep the magnitude.
      if (!after_point && c >= '0' && c <= '9') kept.push_back('0');
      continue;
    }
    if (c >= '0' && c <= '9') {
      started = started || c != '0';
      if (started) ++sig;
    }
    kept.push_back(c);
  }
  if (!kept.empty() && kept.back() == '.') kept.pop_back();

  ZeroRecord out;
  out.index_l = rec.index_l;
  out.gamma_digits = std::move(kept);
  out.precision_digits = digits - 1;
  out.provenance = "truncated (not rounded) from " + std::to_string(available) + " to " +
                   std::to_string(digits) + " significant digits; " +
                   std::to_string(digits - 1) + " trusted";
  return out;
}

DatasetManifest parse_manifest(std::string_view text) {
  DatasetManifest m;
  for_each_line(text, [&](std::string_view raw, std::size_t line_no) {
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') return;
    if (const auto eq = line.find('='); eq != std::string_view::npos && line.find(' ') > eq) {
      const std::string_view key = line.substr(0, eq);
      const std::string_view val = line.substr(eq + 1);
      if (key == "url") {
        m.source_url = std::string(val);
      } else if (key == "count") {
        m.zero_count = parse_u64(val, "count", line_no);
      } else if (key == "digits") {
        m.digits = parse_u64(val, "digits", line_no);
      } else if (key == "format") {
        m.format = parse_zero_file_format(val);
      } else {
        throw ParseError("line " + std::to_string(line_no) + ": unknown header '" +
                             std::string(key) + "'",
                         line_no);
      }
      return;
    }
    std::istringstream fields{std::string(line)};
    std::string name, bytes, hash, extra;
    if (!(fields >> name >> bytes >> hash) || (fields >> extra)) {
      throw ParseError("line " + std::to_string(line_no) + ": expected 'name bytes sha256'", line_no);
    }
    if (name.find('/') != std::string::npos || name.find('\\') != std::string::npos ||
        name == "." || name == "..") {
      throw ParseError("line " + std::to_string(line_no) + ": file name must be a plain name",
                       line_no);
    }
    if (hash.size() != 64 || hash.find_first_not_of("0123456789abcdef") != std::string::npos) {
      throw ParseError("line " + std::to_string(line_no) + ": sha256 must be 64 lowercase hex digits",
                       line_no);
    }
    m.files.push_back({name, parse_u64(bytes, "byte size", line_no), hash});
  });
  if (m.source_url.empty()) throw ParseError("manifest has no url= header", 0);
  return m;
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  return parse_manifest(read_file(path));
}

std::string render_manifest(const DatasetManifest& manifest) {
  std::string out = "url=" + manifest.source_url + "\n";
  out += "count=" + std::to_string(manifest.zero_count) + "\n";
  out += "digits=" + std::to_string(manifest.digits) + "\n";
  if (manifest.format != ZeroFileFormat::Plain) {
    out += std::string("format=") + to_string(manifest.format) + "\n";
  }
  for (const auto& f : manifest.files) {
    out += f.name + " " + std::to_string(f.bytes) + " " + f.sha256 + "\n";
  }
  return out;
}

ManifestEntry describe_file(const std::filesystem::path& path) {
  return {path.filename().string(), std::filesystem::file_size(path), sha256_file(path)};
}

const std::filesystem::path& DatasetHandle::file(std::string_view name) const {
  for (const auto& f : files) {
    if (f.filename() == name) return f;
  }
  throw ValidationError("dataset has no verified file named '" + std::string(name) + "'");
}

std::vector<ZeroRecord> load_zeros(const DatasetHandle& handle) {
  std::string text;
  for (const auto& f : handle.files) {
    text += read_file(f);
    if (!text.empty() && text.back() != '\n') text += '\n';
  }
  // Parsing the concatenation validates ordering across file boundaries too.
  auto all = parse_zero_text(text, handle.manifest.format);
  if (handle.manifest.zero_count != 0 && all.size() != handle.manifest.zero_count) {
    throw ValidationError("manifest declares " + std::to_string(handle.manifest.zero_count) +
                          " zeros but files contain " + std::to_string(all.size()));
  }
  return all;
}

}  // namespace khinchin
