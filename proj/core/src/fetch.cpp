#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <mutex>

#include <curl/curl.h>
#include <openssl/evp.h>
#include <unistd.h>

#include "khinchin/errors.hpp"
#include "khinchin/zeros.hpp"

namespace fs = std::filesystem;

namespace khinchin {
namespace {

struct DigestCtx {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx{EVP_MD_CTX_new(), &EVP_MD_CTX_free};

  DigestCtx() {
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
      throw std::runtime_error("sha256 initialisation failed");
    }
  }
  void update(const void* data, std::size_t n) { EVP_DigestUpdate(ctx.get(), data, n); }
  std::string hex() {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), md, &len);
    static const char* digits = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
      out.push_back(digits[md[i] >> 4]);
      out.push_back(digits[md[i] & 15]);
    }
    return out;
  }
};

bool verified(const fs::path& path, const ManifestEntry& entry) {
  std::error_code ec;
  const auto size = fs::file_size(path, ec);
  return !ec && size == entry.bytes && sha256_file(path) == entry.sha256;
}

void quarantine(const fs::path& path) {
  const fs::path dir = path.parent_path() / "quarantine";
  fs::create_directories(dir);
  fs::path target = dir / path.filename();
  fs::remove(target);
  fs::rename(path, target);
}

void ensure_curl() {
  static std::once_flag once;
  std::call_once(once, [] { curl_global_init(CURL_GLOBAL_DEFAULT); });
}

struct Sink {
  std::FILE* file = nullptr;
  CURL* handle = nullptr;
  std::uintmax_t resume_from = 0;
  std::uintmax_t written = 0;
  bool checked_status = false;
};

std::size_t on_data(char* data, std::size_t size, std::size_t count, void* user) {
  auto* sink = static_cast<Sink*>(user);
  if (!sink->checked_status) {
    sink->checked_status = true;
    long status = 0;
    curl_easy_getinfo(sink->handle, CURLINFO_RESPONSE_CODE, &status);
    // Server ignored the range request: start the file over.
    if (status == 200 && sink->resume_from > 0) {
      if (std::fflush(sink->file) != 0 || ftruncate(fileno(sink->file), 0) != 0) return 0;
      std::fseek(sink->file, 0, SEEK_SET);
    }
  }
  const std::size_t n = size * count;
  if (std::fwrite(data, 1, n, sink->file) != n) return 0;
  sink->written += n;
  return n;
}

std::uintmax_t download(const std::string& url, const fs::path& part) {
  ensure_curl();
  std::error_code ec;
  const std::uintmax_t existing = fs::exists(part) ? fs::file_size(part, ec) : 0;

  std::unique_ptr<std::FILE, decltype(&std::fclose)> file(std::fopen(part.c_str(), "ab"), &std::fclose);
  if (!file) throw NetworkError("cannot open " + part.string() + " for writing");
  std::unique_ptr<CURL, decltype(&curl_easy_cleanup)> curl(curl_easy_init(), &curl_easy_cleanup);
  if (!curl) throw NetworkError("curl initialisation failed");

  Sink sink{file.get(), curl.get(), existing};
  curl_easy_setopt(curl.get(), CURLOPT_URL, url.c_str());
  curl_easy_setopt(curl.get(), CURLOPT_FOLLOWLOCATION, 1L);
  curl_easy_setopt(curl.get(), CURLOPT_FAILONERROR, 1L);
  curl_easy_setopt(curl.get(), CURLOPT_NOSIGNAL, 1L);
  curl_easy_setopt(curl.get(), CURLOPT_CONNECTTIMEOUT, 30L);
  curl_easy_setopt(curl.get(), CURLOPT_RESUME_FROM_LARGE, static_cast<curl_off_t>(existing));
  curl_easy_setopt(curl.get(), CURLOPT_WRITEFUNCTION, &on_data);
  curl_easy_setopt(curl.get(), CURLOPT_WRITEDATA, &sink);
  const CURLcode rc = curl_easy_perform(curl.get());
  std::fflush(file.get());
  if (rc != CURLE_OK) {
    throw NetworkError(url + ": " + curl_easy_strerror(rc) + " (partial download kept at " +
                       part.string() + ")");
  }
  return sink.written;
}

std::string join_url(const std::string& base, const std::string& name) {
  if (!base.empty() && base.back() == '/') return base + name;
  return base + "/" + name;
}

}  // namespace

std::string sha256_hex(std::string_view data) {
  DigestCtx d;
  d.update(data.data(), data.size());
  return d.hex();
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  DigestCtx d;
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    d.update(buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  return d.hex();
}

fs::path default_cache_dir() {
  if (const char* env = std::getenv("KHINCHIN_CACHE_DIR"); env && *env) return env;
  if (const char* xdg = std::getenv("XDG_CACHE_HOME"); xdg && *xdg) return fs::path(xdg) / "khinchin";
  if (const char* home = std::getenv("HOME"); home && *home) return fs::path(home) / ".cache" / "khinchin";
  return fs::temp_directory_path() / "khinchin-cache";
}

fs::path dataset_directory(const DatasetManifest& manifest, const fs::path& cache_dir) {
  return cache_dir / sha256_hex(manifest.source_url);
}

DatasetHandle fetch_dataset(const DatasetManifest& manifest, const fs::path& cache_dir) {
  if (manifest.source_url.find("://") == std::string::npos) {
    throw ConfigError("manifest url '" + manifest.source_url + "' is not fetchable");
  }
  DatasetHandle handle;
  handle.manifest = manifest;
  handle.directory = dataset_directory(manifest, cache_dir);
  fs::create_directories(handle.directory);

  for (const auto& entry : manifest.files) {
    const fs::path final_path = handle.directory / entry.name;
    if (fs::exists(final_path)) {
      if (verified(final_path, entry)) {
        handle.files.push_back(final_path);
        continue;
      }
      quarantine(final_path);
    }
    fs::path part = final_path;
    part += ".part";
    std::error_code ec;
    if (fs::exists(part) && fs::file_size(part, ec) > entry.bytes) fs::remove(part);
    if (!fs::exists(part) || fs::file_size(part, ec) < entry.bytes) {
      handle.bytes_transferred += download(join_url(manifest.source_url, entry.name), part);
    }
    if (!verified(part, entry)) {
      quarantine(part);
      throw CorruptFileError(entry.name + ": downloaded content does not match the manifest hash");
    }
    fs::rename(part, final_path);
    handle.files.push_back(final_path);
  }
  return handle;
}

DatasetHandle open_local_dataset(const fs::path& manifest_path) {
  DatasetHandle handle;
  handle.manifest = load_manifest(manifest_path);
  handle.directory = manifest_path.parent_path();
  for (const auto& entry : handle.manifest.files) {
    const fs::path p = handle.directory / entry.name;
    if (!fs::exists(p)) throw ValidationError("missing dataset file " + p.string());
    if (!verified(p, entry)) throw CorruptFileError(p.string() + " does not match its manifest hash");
    handle.files.push_back(p);
  }
  return handle;
}

}  // namespace khinchin
