// khinchin: continued-fraction statistics of high-precision reals.
//
//   khinchin constants
//   khinchin analyze --input builtin:pi,e --out results
//   khinchin analyze --input dataset:data/fixtures/zeros.manifest --jobs 4
//   khinchin signchanges --input zeros.txt --index 1263 --out results
//   khinchin fetch --manifest data/manifests/zeros40000.manifest
//   khinchin manifest --url https://host/path --count 100 --digits 1000 files...

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "khinchin/batch.hpp"
#include "khinchin/errors.hpp"
#include "khinchin/zeros.hpp"

namespace {

constexpr int kConfigError = 1;

struct RunOptions {
  std::string input = "builtin:pi";
  std::string input_format;
  std::size_t digits = 0;
  std::size_t stride = 1;
  std::size_t m_min = 100;
  std::string out = "khinchin-out";
  std::string format = "csv";
  std::size_t jobs = 1;
  std::size_t checkpoint = 16;
  bool resume = false;
  std::string expansion = "certified";

  void attach(CLI::App* cmd) {
    cmd->add_option("--input", input, "builtin:<names>, dataset:<manifest>, file:<path> or a path")
        ->capture_default_str();
    cmd->add_option("--input-format", input_format, "plain or indexed_tsv (default: detect)");
    cmd->add_option("--digits", digits, "truncate inputs to this many significant digits");
    cmd->add_option("--stride", stride, "series density")->capture_default_str();
    cmd->add_option("--mmin", m_min, "power-law fit window start")->capture_default_str();
    cmd->add_option("--out", out, "output directory")->capture_default_str();
    cmd->add_option("--format", format, "report format: csv or json")->capture_default_str();
    cmd->add_option("--jobs", jobs, "worker threads")->capture_default_str();
    cmd->add_option("--checkpoint", checkpoint, "fsync the checkpoint log every N records")
        ->capture_default_str();
    cmd->add_flag("--resume", resume, "skip numbers already in the checkpoint log");
    cmd->add_option("--expansion", expansion, "certified or decimal-exact")->capture_default_str();
  }

  khinchin::RunConfig config() const {
    khinchin::RunConfig c;
    c.input = khinchin::parse_input_spec(input);
    if (!input_format.empty()) {
      auto* file = std::get_if<khinchin::FileSource>(&c.input);
      if (!file) throw khinchin::ConfigError("--input-format applies to file inputs only");
      file->format = khinchin::parse_zero_file_format(input_format);
    }
    if (digits != 0) c.digits = digits;
    c.stride = stride;
    c.m_min = m_min;
    c.out_dir = out;
    c.format = khinchin::parse_output_format(format);
    c.jobs = jobs;
    c.checkpoint_interval = checkpoint;
    c.resume = resume;
    c.expansion = khinchin::parse_expansion_rule(expansion);
    return c;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Continued-fraction statistics (Khinchin, Levy) of high-precision reals"};
  app.require_subcommand(1);

  app.add_subcommand("constants", "print K0 and L0 with error bounds");

  RunOptions analyze_opts;
  auto* analyze = app.add_subcommand("analyze", "expand inputs and write series and reports");
  analyze_opts.attach(analyze);

  RunOptions sc_opts;
  std::uint64_t index = 0;
  auto* signchanges = app.add_subcommand("signchanges", "flip list and cumulative curve for one number");
  sc_opts.attach(signchanges);
  signchanges->add_option("--index", index, "number index")->required();

  std::string manifest_path;
  std::string cache_dir;
  auto* fetch = app.add_subcommand("fetch", "download and verify a dataset into the cache");
  fetch->add_option("--manifest", manifest_path)->required();
  fetch->add_option("--cache", cache_dir, "cache directory (default $KHINCHIN_CACHE_DIR)");

  std::string url, file_format = "plain";
  std::uint64_t count = 0;
  std::size_t manifest_digits = 0;
  std::vector<std::string> files;
  auto* manifest = app.add_subcommand("manifest", "print a manifest describing local files");
  manifest->add_option("--url", url)->required();
  manifest->add_option("--count", count);
  manifest->add_option("--digits", manifest_digits);
  manifest->add_option("--file-format", file_format);
  manifest->add_option("files", files)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (app.got_subcommand("constants")) {
      std::cout << khinchin::cmd_constants();
      return 0;
    }
    if (app.got_subcommand(analyze)) {
      const auto report = khinchin::cmd_analyze(analyze_opts.config());
      std::cout << khinchin::render_summary(report, khinchin::OutputFormat::Csv);
      for (const auto& r : report.records) {
        if (!r.ok()) std::cerr << r.label << ": " << r.error << "\n";
      }
      return khinchin::exit_code(report);
    }
    if (app.got_subcommand(signchanges)) {
      const auto res = khinchin::cmd_signchanges(sc_opts.config(), index);
      std::cout << res.label << " K_flips " << res.k.count() << " L_flips " << res.l.count()
                << " coincidence " << res.coincidence << "\n"
                << res.flips_file.string() << "\n"
                << res.cumulative_file.string() << "\n";
      return 0;
    }
    if (app.got_subcommand(fetch)) {
      const auto m = khinchin::load_manifest(manifest_path);
      const auto handle =
          khinchin::fetch_dataset(m, cache_dir.empty() ? khinchin::default_cache_dir() : std::filesystem::path(cache_dir));
      std::cout << handle.directory.string() << " files " << handle.files.size() << " bytes_transferred "
                << handle.bytes_transferred << "\n";
      return 0;
    }
    if (app.got_subcommand(manifest)) {
      khinchin::DatasetManifest m;
      m.source_url = url;
      m.zero_count = count;
      m.digits = manifest_digits;
      m.format = khinchin::parse_zero_file_format(file_format);
      for (const auto& f : files) m.files.push_back(khinchin::describe_file(f));
      std::cout << khinchin::render_manifest(m);
      return 0;
    }
  } catch (const khinchin::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const khinchin::ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kConfigError;
  } catch (const khinchin::ValidationError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  }
  return 0;
}
