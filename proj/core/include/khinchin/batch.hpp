#pragma once

// Batch driver behind the command-line tool: per-number expansion, K and L
// series, sign changes and fits, written as plot-ready CSV/JSON.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "khinchin/cf.hpp"
#include "khinchin/stats.hpp"
#include "khinchin/zeros.hpp"

namespace khinchin {

enum class OutputFormat { Csv, Json };
enum class ExpansionRule { Certified, DecimalExact };

OutputFormat parse_output_format(std::string_view name);
ExpansionRule parse_expansion_rule(std::string_view name);

struct FileSource {
  std::filesystem::path path;
  /// Detected from the first data line when unset.
  std::optional<ZeroFileFormat> format;
  std::uint64_t index_offset = 1;
};

struct DatasetSource {
  std::filesystem::path manifest;
  std::filesystem::path cache_dir;
};

/// Bundled constants: pi, e, phi, sqrt2, ln2 (10000 digits each).
struct BuiltinSource {
  std::vector<std::string> names;
};

using InputSource = std::variant<FileSource, DatasetSource, BuiltinSource>;

/// "builtin:pi,e", "dataset:<manifest>", "file:<path>" or a bare path.
InputSource parse_input_spec(std::string_view spec);

/// Directory holding the bundled fixtures ($KHINCHIN_DATA_DIR overrides).
std::filesystem::path fixtures_dir();

struct RunConfig {
  InputSource input = BuiltinSource{{"pi"}};
  std::optional<std::size_t> digits;
  std::size_t stride = 1;
  std::size_t m_min = 100;
  std::filesystem::path out_dir = "khinchin-out";
  OutputFormat format = OutputFormat::Csv;
  std::size_t jobs = 1;
  /// fsync the checkpoint log after this many appended records.
  std::size_t checkpoint_interval = 16;
  bool resume = false;
  ExpansionRule expansion = ExpansionRule::Certified;

  /// Throws ConfigError.
  void validate() const;
};

struct NumberInput {
  std::uint64_t index = 0;
  std::string label;
  ZeroRecord record;
};

std::vector<NumberInput> load_inputs(const RunConfig& config);

struct AnalysisRecord {
  std::uint64_t index = 0;
  std::string label;
  std::size_t precision = 0;
  std::size_t certified_len = 0;
  std::string stop_reason;
  double final_k = 0;
  double final_l = 0;
  std::size_t k_sign_changes = 0;
  std::size_t l_sign_changes = 0;
  std::optional<double> alpha;
  double delta_k = 0;  ///< |K0 - final K|
  double delta_l = 0;  ///< |L0 - final L|
  double log10_product = 0;
  std::string error;

  bool ok() const { return error.empty(); }
};

struct ClosenessCounts {
  std::size_t k_within_1e3 = 0;
  std::size_t k_within_1e4 = 0;
  std::size_t l_within_1e3 = 0;
  std::size_t l_within_1e4 = 0;

  friend bool operator==(const ClosenessCounts&, const ClosenessCounts&) = default;
};

ClosenessCounts count_closeness(std::span<const AnalysisRecord> records);

struct AnalysisReport {
  std::vector<AnalysisRecord> records;  ///< ordered by index
  ClosenessCounts closeness;
  std::size_t failures = 0;
  std::size_t resumed = 0;  ///< records taken from the checkpoint log
};

/// Everything computed for one number.
struct NumberAnalysis {
  AnalysisRecord record;
  CFExpansion expansion;
  StatSeries k_series;
  StatSeries l_series;
  SignChangeRecord k_flips;
  SignChangeRecord l_flips;
};

/// Throws on failure; cmd_analyze turns exceptions into per-record errors.
NumberAnalysis analyze_number(const NumberInput& input, const RunConfig& config);

/// Series CSV with header m,K,L,dK,dL (d = constant - value), 17 significant digits.
std::string render_series_csv(const StatSeries& k, const StatSeries& l);

/// Runs the batch: series/<label>.csv per number, report.{csv,json},
/// summary.{csv,json} and an append-only checkpoint.log. Per-number
/// failures are recorded in the report.
AnalysisReport cmd_analyze(const RunConfig& config);

std::string render_report(std::span<const AnalysisRecord> records, OutputFormat format);
std::string render_summary(const AnalysisReport& report, OutputFormat format);

/// 0 when every record succeeded, 2 otherwise.
int exit_code(const AnalysisReport& report);

struct SignChangeResult {
  std::string label;
  SignChangeRecord k;
  SignChangeRecord l;
  /// Share of K flips with an L flip at most `window` indices away.
  double coincidence = 0;
  std::filesystem::path flips_file;
  std::filesystem::path cumulative_file;
};

double flip_coincidence(const SignChangeRecord& k, const SignChangeRecord& l, std::size_t window = 10);

/// Writes signchanges/<label>_flips.csv (statistic,m) and
/// signchanges/<label>_cumulative.csv (m,K_flips,L_flips). Throws ConfigError
/// listing the available range for an unknown index.
SignChangeResult cmd_signchanges(const RunConfig& config, std::uint64_t index);

/// "K0 <value> <bound>\nL0 <value> <bound>\n".
std::string cmd_constants();

}  // namespace khinchin
