#include "khinchin/batch.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <unistd.h>

#include <nlohmann/json.hpp>

#include "khinchin/errors.hpp"

#ifndef KHINCHIN_DEFAULT_DATA_DIR
#define KHINCHIN_DEFAULT_DATA_DIR "data/fixtures"
#endif

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace khinchin {
namespace {

const std::vector<std::string>& builtin_names() {
  static const std::vector<std::string> names = {"pi", "e", "phi", "sqrt2", "ln2"};
  return names;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_atomically(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ZeroFileFormat detect_format(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    return line.find('\t') != std::string::npos ? ZeroFileFormat::IndexedTsv : ZeroFileFormat::Plain;
  }
  return ZeroFileFormat::Plain;
}

ordered_json to_json(const AnalysisRecord& r) {
  ordered_json j;
  j["index"] = r.index;
  j["label"] = r.label;
  j["precision"] = r.precision;
  j["certified_len"] = r.certified_len;
  j["stop_reason"] = r.stop_reason;
  j["final_K"] = r.final_k;
  j["final_L"] = r.final_l;
  j["K_sign_changes"] = r.k_sign_changes;
  j["L_sign_changes"] = r.l_sign_changes;
  j["alpha"] = r.alpha ? ordered_json(*r.alpha) : ordered_json(nullptr);
  j["delta_K"] = r.delta_k;
  j["delta_L"] = r.delta_l;
  j["log10_product"] = r.log10_product;
  j["error"] = r.ok() ? ordered_json(nullptr) : ordered_json(r.error);
  return j;
}

AnalysisRecord from_json(const ordered_json& j) {
  AnalysisRecord r;
  r.index = j.at("index").get<std::uint64_t>();
  r.label = j.at("label").get<std::string>();
  r.precision = j.at("precision").get<std::size_t>();
  r.certified_len = j.at("certified_len").get<std::size_t>();
  r.stop_reason = j.at("stop_reason").get<std::string>();
  r.final_k = j.at("final_K").get<double>();
  r.final_l = j.at("final_L").get<double>();
  r.k_sign_changes = j.at("K_sign_changes").get<std::size_t>();
  r.l_sign_changes = j.at("L_sign_changes").get<std::size_t>();
  if (!j.at("alpha").is_null()) r.alpha = j.at("alpha").get<double>();
  r.delta_k = j.at("delta_K").get<double>();
  r.delta_l = j.at("delta_L").get<double>();
  r.log10_product = j.at("log10_product").get<double>();
  if (!j.at("error").is_null()) r.error = j.at("error").get<std::string>();
  return r;
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

std::map<std::uint64_t, AnalysisRecord> read_checkpoint(const fs::path& log) {
  std::map<std::uint64_t, AnalysisRecord> done;
  std::ifstream in(log);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      AnalysisRecord r = from_json(ordered_json::parse(line));
      done.emplace(r.index, std::move(r));
    } catch (const std::exception&) {
      // torn final line from an interrupted run
    }
  }
  return done;
}

class CheckpointLog {
 public:
  CheckpointLog(const fs::path& path, bool append, std::size_t sync_every)
      : file_(std::fopen(path.c_str(), append ? "ab" : "wb")), sync_every_(sync_every) {
    if (!file_) throw ConfigError("cannot open checkpoint log " + path.string());
    // Terminate a torn last line so the next record starts on its own line.
    if (append && std::fseek(file_, 0, SEEK_END) == 0 && std::ftell(file_) > 0) {
      std::FILE* in = std::fopen(path.c_str(), "rb");
      if (in && std::fseek(in, -1, SEEK_END) == 0 && std::fgetc(in) != '\n') std::fputc('\n', file_);
      if (in) std::fclose(in);
    }
  }
  ~CheckpointLog() {
    sync();
    std::fclose(file_);
  }
  CheckpointLog(const CheckpointLog&) = delete;
  CheckpointLog& operator=(const CheckpointLog&) = delete;

  void append(const AnalysisRecord& r) {
    std::lock_guard lock(mu_);
    const std::string line = to_json(r).dump() + "\n";
    std::fwrite(line.data(), 1, line.size(), file_);
    std::fflush(file_);
    if (++pending_ >= sync_every_) {
      ::fsync(fileno(file_));
      pending_ = 0;
    }
  }

  void sync() {
    std::lock_guard lock(mu_);
    std::fflush(file_);
    ::fsync(fileno(file_));
    pending_ = 0;
  }

 private:
  std::FILE* file_;
  std::size_t sync_every_;
  std::size_t pending_ = 0;
  std::mutex mu_;
};

}  // namespace

OutputFormat parse_output_format(std::string_view name) {
  if (name == "csv") return OutputFormat::Csv;
  if (name == "json") return OutputFormat::Json;
  throw ConfigError("unknown output format '" + std::string(name) + "' (csv or json)");
}

ExpansionRule parse_expansion_rule(std::string_view name) {
  if (name == "certified") return ExpansionRule::Certified;
  if (name == "decimal-exact") return ExpansionRule::DecimalExact;
  throw ConfigError("unknown expansion rule '" + std::string(name) + "' (certified or decimal-exact)");
}

InputSource parse_input_spec(std::string_view spec) {
  constexpr std::string_view kBuiltin = "builtin:", kDataset = "dataset:", kFile = "file:";
  if (spec.starts_with(kBuiltin)) {
    BuiltinSource src;
    std::string_view rest = spec.substr(kBuiltin.size());
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      src.names.emplace_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (src.names.empty()) throw ConfigError("builtin input needs at least one constant name");
    return src;
  }
  if (spec.starts_with(kDataset)) {
    return DatasetSource{fs::path(spec.substr(kDataset.size())), default_cache_dir()};
  }
  if (spec.starts_with(kFile)) return FileSource{fs::path(spec.substr(kFile.size())), std::nullopt};
  if (spec.empty()) throw ConfigError("empty input specification");
  return FileSource{fs::path(spec), std::nullopt};
}

fs::path fixtures_dir() {
  if (const char* env = std::getenv("KHINCHIN_DATA_DIR"); env && *env) return env;
  return KHINCHIN_DEFAULT_DATA_DIR;
}

void RunConfig::validate() const {
  if (stride < 1) throw ConfigError("--stride must be at least 1");
  if (jobs < 1) throw ConfigError("--jobs must be at least 1");
  if (checkpoint_interval < 1) throw ConfigError("--checkpoint must be at least 1");
  if (digits && *digits < 2) throw ConfigError("--digits must be at least 2");
  if (out_dir.empty()) throw ConfigError("--out must name a directory");
  std::visit(
      [](const auto& src) {
        using T = std::decay_t<decltype(src)>;
        if constexpr (std::is_same_v<T, FileSource>) {
          if (!fs::is_regular_file(src.path)) throw ConfigError("input file not found: " + src.path.string());
        } else if constexpr (std::is_same_v<T, DatasetSource>) {
          if (!fs::is_regular_file(src.manifest)) {
            throw ConfigError("manifest not found: " + src.manifest.string());
          }
        } else {
          for (const auto& name : src.names) {
            const auto& known = builtin_names();
            if (std::find(known.begin(), known.end(), name) == known.end()) {
              throw ConfigError("unknown builtin constant '" + name + "' (pi, e, phi, sqrt2, ln2)");
            }
          }
        }
      },
      input);
}

std::vector<NumberInput> load_inputs(const RunConfig& config) {
  std::vector<NumberInput> out;
  auto add_zeros = [&out](std::vector<ZeroRecord> zeros) {
    for (auto& z : zeros) {
      const auto idx = z.index_l;
      out.push_back({idx, "zero_" + std::to_string(idx), std::move(z)});
    }
  };
  if (const auto* file = std::get_if<FileSource>(&config.input)) {
    const std::string text = read_text(file->path);
    add_zeros(parse_zero_text(text, file->format.value_or(detect_format(text)), file->index_offset));
  } else if (const auto* ds = std::get_if<DatasetSource>(&config.input)) {
    const DatasetManifest manifest = load_manifest(ds->manifest);
    const DatasetHandle handle = manifest.source_url.find("://") == std::string::npos
                                     ? open_local_dataset(ds->manifest)
                                     : fetch_dataset(manifest, ds->cache_dir);
    add_zeros(load_zeros(handle));
  } else {
    const auto& names = std::get<BuiltinSource>(config.input).names;
    const DatasetHandle handle = open_local_dataset(fixtures_dir() / "constants.manifest");
    for (std::size_t i = 0; i < names.size(); ++i) {
      auto recs = parse_zero_file(handle.file(names[i] + "_10000.txt"), ZeroFileFormat::Plain);
      if (recs.size() != 1) throw ValidationError("constant file for " + names[i] + " must hold one value");
      recs[0].index_l = i + 1;
      out.push_back({i + 1, names[i], std::move(recs[0])});
    }
  }
  return out;
}

ClosenessCounts count_closeness(std::span<const AnalysisRecord> records) {
  ClosenessCounts c;
  for (const auto& r : records) {
    if (!r.ok()) continue;
    c.k_within_1e3 += r.delta_k < 1e-3;
    c.k_within_1e4 += r.delta_k < 1e-4;
    c.l_within_1e3 += r.delta_l < 1e-3;
    c.l_within_1e4 += r.delta_l < 1e-4;
  }
  return c;
}

NumberAnalysis analyze_number(const NumberInput& input, const RunConfig& config) {
  NumberAnalysis a;
  ZeroRecord rec = config.digits ? truncate_record(input.record, *config.digits) : input.record;
  const BigReal x = rec.value();
  a.expansion = config.expansion == ExpansionRule::Certified ? expand_certified(x) : expand_decimal_exact(x);
  if (a.expansion.certified_len() == 0) {
    throw DomainError(std::string("no partial quotients determined (") + to_string(a.expansion.stop) + ")");
  }
  a.k_series = khinchin_series(a.expansion, config.stride);
  a.l_series = levy_series(a.expansion, config.stride);
  a.k_flips = sign_changes(a.k_series);
  a.l_flips = sign_changes(a.l_series);

  AnalysisRecord& r = a.record;
  r.index = input.index;
  r.label = input.label;
  r.precision = rec.precision_digits;
  r.certified_len = a.expansion.certified_len();
  r.stop_reason = to_string(a.expansion.stop);
  const Real k_final = a.k_series.back().value;
  const Real l_final = a.l_series.back().value;
  r.final_k = quad::to_double(k_final);
  r.final_l = quad::to_double(l_final);
  r.delta_k = quad::to_double(quad::abs(a.k_series.reference_constant - k_final));
  r.delta_l = quad::to_double(quad::abs(a.l_series.reference_constant - l_final));
  r.k_sign_changes = a.k_flips.count();
  r.l_sign_changes = a.l_flips.count();
  r.log10_product = quad::to_double(static_cast<Real>(r.certified_len) * quad::log(k_final) /
                                    quad::log(static_cast<Real>(10)));
  try {
    r.alpha = powerlaw_fit(a.k_series, config.m_min).alpha;
  } catch (const InsufficientDataError&) {
    r.alpha.reset();
  }
  return a;
}

std::string render_series_csv(const StatSeries& k, const StatSeries& l) {
  if (k.values.size() != l.values.size()) throw DomainError("K and L series must share one grid");
  std::string out = "m,K,L,dK,dL\n";
  for (std::size_t i = 0; i < k.values.size(); ++i) {
    const auto& kp = k.values[i];
    const auto& lp = l.values[i];
    out += std::to_string(kp.m);
    out += ',' + quad::format_general(kp.value, 17);
    out += ',' + quad::format_general(lp.value, 17);
    out += ',' + quad::format_general(k.reference_constant - kp.value, 17);
    out += ',' + quad::format_general(l.reference_constant - lp.value, 17);
    out += '\n';
  }
  return out;
}

std::string render_report(std::span<const AnalysisRecord> records, OutputFormat format) {
  if (format == OutputFormat::Json) {
    ordered_json arr = ordered_json::array();
    for (const auto& r : records) arr.push_back(to_json(r));
    return arr.dump(2) + "\n";
  }
  std::string out =
      "index,label,precision,certified_len,stop_reason,final_K,final_L,K_sign_changes,"
      "L_sign_changes,alpha,delta_K,delta_L,log10_product,error\n";
  for (const auto& r : records) {
    out += std::to_string(r.index) + ',' + csv_quote(r.label) + ',' + std::to_string(r.precision) + ',' +
           std::to_string(r.certified_len) + ',' + r.stop_reason + ',' + format_double(r.final_k) + ',' +
           format_double(r.final_l) + ',' + std::to_string(r.k_sign_changes) + ',' +
           std::to_string(r.l_sign_changes) + ',' + (r.alpha ? format_double(*r.alpha) : "") + ',' +
           format_double(r.delta_k) + ',' + format_double(r.delta_l) + ',' +
           format_double(r.log10_product) + ',' + csv_quote(r.error) + '\n';
  }
  return out;
}

std::string render_summary(const AnalysisReport& report, OutputFormat format) {
  const auto& c = report.closeness;
  const std::vector<std::pair<std::string, std::size_t>> rows = {
      {"records", report.records.size()}, {"failures", report.failures},
      {"K_closer_than_1e-3", c.k_within_1e3}, {"K_closer_than_1e-4", c.k_within_1e4},
      {"L_closer_than_1e-3", c.l_within_1e3}, {"L_closer_than_1e-4", c.l_within_1e4},
  };
  if (format == OutputFormat::Json) {
    ordered_json j;
    for (const auto& [k, v] : rows) j[k] = v;
    return j.dump(2) + "\n";
  }
  std::string out = "key,value\n";
  for (const auto& [k, v] : rows) out += k + ',' + std::to_string(v) + '\n';
  return out;
}

int exit_code(const AnalysisReport& report) { return report.failures > 0 ? 2 : 0; }

AnalysisReport cmd_analyze(const RunConfig& config) {
  config.validate();
  const std::vector<NumberInput> inputs = load_inputs(config);

  const fs::path series_dir = config.out_dir / "series";
  fs::create_directories(series_dir);
  const fs::path log_path = config.out_dir / "checkpoint.log";

  std::map<std::uint64_t, AnalysisRecord> done;
  if (config.resume && fs::exists(log_path)) done = read_checkpoint(log_path);

  std::vector<const NumberInput*> pending;
  for (const auto& in : inputs) {
    if (!done.contains(in.index)) pending.push_back(&in);
  }

  // Build the shared references once, before any worker needs them.
  (void)khinchin_reference();
  (void)levy_reference();

  std::vector<AnalysisRecord> fresh;
  {
    CheckpointLog log(log_path, config.resume, config.checkpoint_interval);
    std::mutex results_mu;
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i = next++; i < pending.size(); i = next++) {
        const NumberInput& in = *pending[i];
        AnalysisRecord rec;
        try {
          NumberAnalysis a = analyze_number(in, config);
          write_atomically(series_dir / (in.label + ".csv"), render_series_csv(a.k_series, a.l_series));
          rec = std::move(a.record);
        } catch (const std::exception& e) {
          rec = AnalysisRecord{};
          rec.index = in.index;
          rec.label = in.label;
          rec.precision = in.record.precision_digits;
          rec.stop_reason = "error";
          rec.error = e.what();
        }
        log.append(rec);
        std::lock_guard lock(results_mu);
        fresh.push_back(std::move(rec));
      }
    };
    const std::size_t nthreads = std::min(config.jobs, std::max<std::size_t>(pending.size(), 1));
    std::vector<std::jthread> threads;
    for (std::size_t t = 1; t < nthreads; ++t) threads.emplace_back(worker);
    worker();
  }

  AnalysisReport report;
  report.resumed = 0;
  for (auto& [idx, rec] : done) {
    const bool wanted = std::any_of(inputs.begin(), inputs.end(), [&](const auto& in) { return in.index == idx; });
    if (wanted) {
      report.records.push_back(std::move(rec));
      ++report.resumed;
    }
  }
  for (auto& rec : fresh) report.records.push_back(std::move(rec));
  std::sort(report.records.begin(), report.records.end(),
            [](const auto& a, const auto& b) { return a.index < b.index; });
  report.closeness = count_closeness(report.records);
  report.failures = static_cast<std::size_t>(
      std::count_if(report.records.begin(), report.records.end(), [](const auto& r) { return !r.ok(); }));

  const char* ext = config.format == OutputFormat::Json ? ".json" : ".csv";
  write_atomically(config.out_dir / (std::string("report") + ext), render_report(report.records, config.format));
  write_atomically(config.out_dir / (std::string("summary") + ext), render_summary(report, config.format));
  return report;
}

double flip_coincidence(const SignChangeRecord& k, const SignChangeRecord& l, std::size_t window) {
  if (k.flip_indices.empty()) return 1.0;
  std::size_t matched = 0;
  for (std::size_t m : k.flip_indices) {
    auto it = std::lower_bound(l.flip_indices.begin(), l.flip_indices.end(), m > window ? m - window : 0);
    if (it != l.flip_indices.end() && *it <= m + window) ++matched;
  }
  return static_cast<double>(matched) / static_cast<double>(k.flip_indices.size());
}

SignChangeResult cmd_signchanges(const RunConfig& config, std::uint64_t index) {
  config.validate();
  const std::vector<NumberInput> inputs = load_inputs(config);
  if (inputs.empty()) throw ConfigError("input contains no numbers");
  const auto it = std::find_if(inputs.begin(), inputs.end(), [&](const auto& in) { return in.index == index; });
  if (it == inputs.end()) {
    throw ConfigError("index " + std::to_string(index) + " not found; available indices " +
                      std::to_string(inputs.front().index) + ".." + std::to_string(inputs.back().index));
  }
  const NumberAnalysis a = analyze_number(*it, config);

  SignChangeResult res;
  res.label = it->label;
  res.k = a.k_flips;
  res.l = a.l_flips;
  res.coincidence = flip_coincidence(res.k, res.l);

  const fs::path dir = config.out_dir / "signchanges";
  fs::create_directories(dir);
  res.flips_file = dir / (res.label + "_flips.csv");
  res.cumulative_file = dir / (res.label + "_cumulative.csv");

  std::string flips = "statistic,m\n";
  for (std::size_t m : res.k.flip_indices) flips += "K," + std::to_string(m) + "\n";
  for (std::size_t m : res.l.flip_indices) flips += "L," + std::to_string(m) + "\n";
  write_atomically(res.flips_file, flips);

  std::string cumulative = "m,K_flips,L_flips\n";
  for (std::size_t i = 0; i < res.k.cumulative.size(); ++i) {
    cumulative += std::to_string(res.k.cumulative[i].first) + ',' + std::to_string(res.k.cumulative[i].second) +
                  ',' + std::to_string(res.l.cumulative[i].second) + '\n';
  }
  write_atomically(res.cumulative_file, cumulative);
  return res;
}

std::string cmd_constants() {
  const ConstantEstimate k = khinchin_constant(100000);
  const Real l = levy_constant();
  const Real l_bound = 16 * quad::epsilon() * l;
  return "K0 " + quad::format_general(k.value, 25) + " " + quad::format(k.error_bound, 2) + "\n" +
         "L0 " + quad::format_general(l, 25) + " " + quad::format(l_bound, 2) + "\n";
}

}  // namespace khinchin
