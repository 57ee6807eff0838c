#include "khinchin/batch.hpp"

#include <cmath>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "khinchin/errors.hpp"
#include "test_support.hpp"

namespace khinchin {
namespace {

namespace fs = std::filesystem;
using testing::TempDir;
using testing::slurp;

RunConfig builtin_config(const fs::path& out, std::vector<std::string> names) {
  RunConfig c;
  c.input = BuiltinSource{std::move(names)};
  c.out_dir = out;
  return c;
}

RunConfig zeros_config(const fs::path& out) {
  RunConfig c;
  c.input = FileSource{testing::fixtures() / "zeros_1000.txt", std::nullopt};
  c.out_dir = out;
  return c;
}

TEST(InputSpec, Prefixes) {
  const auto b = std::get<BuiltinSource>(parse_input_spec("builtin:pi,e"));
  EXPECT_EQ(b.names, (std::vector<std::string>{"pi", "e"}));
  EXPECT_EQ(std::get<DatasetSource>(parse_input_spec("dataset:/m/x.manifest")).manifest, "/m/x.manifest");
  EXPECT_EQ(std::get<FileSource>(parse_input_spec("file:z.txt")).path, "z.txt");
  EXPECT_EQ(std::get<FileSource>(parse_input_spec("z.txt")).path, "z.txt");
  EXPECT_THROW(parse_input_spec(""), ConfigError);
  EXPECT_THROW(parse_output_format("xml"), ConfigError);
  EXPECT_THROW(parse_expansion_rule("rounded"), ConfigError);
}

TEST(Config, Validation) {
  TempDir dir("cfg");
  RunConfig c = builtin_config(dir.path(), {"pi"});
  EXPECT_NO_THROW(c.validate());
  c.stride = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = builtin_config(dir.path(), {"pi"});
  c.jobs = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = builtin_config(dir.path(), {"tau"});
  EXPECT_THROW(c.validate(), ConfigError);
  c = zeros_config(dir.path());
  c.input = FileSource{dir.path() / "missing.txt", std::nullopt};
  EXPECT_THROW(cmd_analyze(c), ConfigError);
}

TEST(Analyze, GoldenRatio) {
  TempDir dir("phi");
  const AnalysisReport r = cmd_analyze(builtin_config(dir.path(), {"phi"}));
  ASSERT_EQ(r.records.size(), 1u);
  const AnalysisRecord& rec = r.records[0];
  EXPECT_TRUE(rec.ok());
  EXPECT_EQ(rec.label, "phi");
  EXPECT_EQ(rec.certified_len, 23922u);
  EXPECT_EQ(rec.final_k, 1.0);
  EXPECT_NEAR(rec.final_l, 1.6180339887, 1e-3);
  EXPECT_EQ(rec.log10_product, 0.0);
  EXPECT_EQ(rec.k_sign_changes, 0u);
  EXPECT_EQ(exit_code(r), 0);
  EXPECT_TRUE(fs::exists(dir.path() / "series" / "phi.csv"));
}

TEST(Analyze, FirstZetaZero) {
  TempDir dir("z1");
  RunConfig c = zeros_config(dir.path());
  const AnalysisReport r = cmd_analyze(c);
  ASSERT_EQ(r.records.size(), 10u);
  EXPECT_EQ(r.records[0].label, "zero_1");
  EXPECT_EQ(r.records[0].certified_len, 957u);
  EXPECT_EQ(r.records[0].stop_reason, "floor_disagreement");
  EXPECT_NEAR(r.records[0].final_k, 2.6854520010653, 0.3);
  EXPECT_EQ(r.failures, 0u);
}

TEST(Analyze, ReportIsConsistentWithSeriesFiles) {
  TempDir dir("rep");
  RunConfig c = zeros_config(dir.path());
  c.stride = 10;
  const AnalysisReport r = cmd_analyze(c);
  const std::string report = slurp(dir.path() / "report.csv");
  EXPECT_EQ(std::count(report.begin(), report.end(), '\n'), 11);
  EXPECT_TRUE(report.starts_with(
      "index,label,precision,certified_len,stop_reason,final_K,final_L,K_sign_changes,L_sign_changes,"
      "alpha,delta_K,delta_L,log10_product,error\n"));
  for (const auto& rec : r.records) {
    const std::string series = slurp(dir.path() / "series" / (rec.label + ".csv"));
    ASSERT_TRUE(series.starts_with("m,K,L,dK,dL\n"));
    const std::size_t last = series.rfind('\n', series.size() - 2);
    const std::string tail = series.substr(last + 1);
    EXPECT_EQ(std::stoul(tail.substr(0, tail.find(','))), rec.certified_len);
    const double k = std::stod(tail.substr(tail.find(',') + 1));
    EXPECT_NEAR(k, rec.final_k, 1e-15 * k);
    EXPECT_NEAR(rec.log10_product, rec.certified_len * std::log10(rec.final_k), 1e-9);
    EXPECT_NEAR(rec.delta_k, std::abs(2.6854520010653064 - rec.final_k), 1e-12);
  }
  const std::string summary = slurp(dir.path() / "summary.csv");
  EXPECT_NE(summary.find("records,10\nfailures,0\n"), std::string::npos);
}

TEST(Analyze, JsonReportKeys) {
  TempDir dir("json");
  RunConfig c = builtin_config(dir.path(), {"e"});
  c.format = OutputFormat::Json;
  c.digits = 300;
  cmd_analyze(c);
  const auto j = nlohmann::ordered_json::parse(slurp(dir.path() / "report.json"));
  ASSERT_TRUE(j.is_array());
  std::vector<std::string> keys;
  for (const auto& [k, v] : j[0].items()) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"index", "label", "precision", "certified_len", "stop_reason",
                                            "final_K", "final_L", "K_sign_changes", "L_sign_changes", "alpha",
                                            "delta_K", "delta_L", "log10_product", "error"}));
  EXPECT_TRUE(j[0]["error"].is_null());
  EXPECT_EQ(j[0]["precision"], 299);
  const auto s = nlohmann::ordered_json::parse(slurp(dir.path() / "summary.json"));
  EXPECT_EQ(s["records"], 1);
}

TEST(Analyze, ParallelRunsAreByteIdentical) {
  TempDir a("j1"), b("j4");
  RunConfig c = zeros_config(a.path());
  c.digits = 400;
  cmd_analyze(c);
  c.out_dir = b.path();
  c.jobs = 4;
  cmd_analyze(c);
  for (const char* f : {"report.csv", "summary.csv", "series/zero_1.csv", "series/zero_10.csv"}) {
    EXPECT_EQ(slurp(a.path() / f), slurp(b.path() / f)) << f;
  }
}

TEST(Analyze, ResumeSkipsCheckpointedNumbers) {
  TempDir full("full"), part("part");
  RunConfig c = zeros_config(full.path());
  c.digits = 300;
  cmd_analyze(c);
  const std::string log = slurp(full.path() / "checkpoint.log");
  std::size_t cut = 0;
  for (int i = 0; i < 3; ++i) cut = log.find('\n', cut) + 1;

  fs::create_directories(part.path());
  // Three complete records plus a torn fourth line.
  testing::spit(part.path() / "checkpoint.log", log.substr(0, cut) + "{\"index\":4,\"lab");
  c.out_dir = part.path();
  c.resume = true;
  const AnalysisReport r = cmd_analyze(c);
  EXPECT_EQ(r.resumed, 3u);
  EXPECT_EQ(r.records.size(), 10u);
  EXPECT_EQ(slurp(full.path() / "report.csv"), slurp(part.path() / "report.csv"));

  const AnalysisReport again = cmd_analyze(c);
  EXPECT_EQ(again.resumed, 10u);
}

TEST(Analyze, PerNumberFailuresAreRecorded) {
  TempDir dir("fail");
  testing::spit(dir.path() / "in.txt", "14.1\n21.022039638771554992628479593896902777334340524903\n");
  RunConfig c;
  c.input = FileSource{dir.path() / "in.txt", std::nullopt};
  c.out_dir = dir.path() / "out";
  const AnalysisReport r = cmd_analyze(c);
  ASSERT_EQ(r.records.size(), 2u);
  EXPECT_FALSE(r.records[0].ok());
  EXPECT_NE(r.records[0].error.find("no partial quotients"), std::string::npos);
  EXPECT_TRUE(r.records[1].ok());
  EXPECT_EQ(r.failures, 1u);
  EXPECT_EQ(exit_code(r), 2);
}

TEST(Analyze, DecimalExactExpansionIsLonger) {
  TempDir a("cert"), b("exact");
  RunConfig c = builtin_config(a.path(), {"pi"});
  c.digits = 1000;
  const auto cert = cmd_analyze(c);
  c.out_dir = b.path();
  c.expansion = ExpansionRule::DecimalExact;
  const auto exact = cmd_analyze(c);
  // --digits truncates, leaving 999 trusted digits.
  EXPECT_EQ(cert.records[0].certified_len, 965u);
  EXPECT_EQ(exact.records[0].certified_len, 1974u);
}

// [0; 1 x10, 100 x10, 1 x60, 2 x5]: K(m) rises through K0 at m = 13 and
// falls back below it at m = 47.
std::string two_crossing_decimal() {
  std::vector<long> a(10, 1);
  a.insert(a.end(), 10, 100);
  a.insert(a.end(), 60, 1);
  a.insert(a.end(), 5, 2);
  mpq_class x = 0;
  for (auto it = a.rbegin(); it != a.rend(); ++it) {
    x = 1 / (*it + x);
  }
  x.canonicalize();
  x += 10;
  return BigReal::from_rational(x, 120, Rounding::Down).render();
}

TEST(SignChanges, SyntheticTwoCrossings) {
  TempDir dir("sc");
  testing::spit(dir.path() / "syn.txt", two_crossing_decimal() + "\n");
  RunConfig c;
  c.input = FileSource{dir.path() / "syn.txt", std::nullopt};
  c.out_dir = dir.path() / "out";
  const SignChangeResult r = cmd_signchanges(c, 1);
  EXPECT_EQ(r.k.flip_indices, (std::vector<std::size_t>{13, 47}));
  const std::string flips = slurp(r.flips_file);
  EXPECT_TRUE(flips.starts_with("statistic,m\nK,13\nK,47\n"));
  const std::string cum = slurp(r.cumulative_file);
  EXPECT_TRUE(cum.starts_with("m,K_flips,L_flips\n1,0,"));
  EXPECT_NE(cum.find("\n47,2,"), std::string::npos);
}

TEST(SignChanges, UnknownIndexListsTheRange) {
  TempDir dir("sci");
  RunConfig c = zeros_config(dir.path());
  try {
    cmd_signchanges(c, 42);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_STREQ(e.what(), "index 42 not found; available indices 1..10");
  }
}

TEST(SignChanges, Coincidence) {
  SignChangeRecord k, l;
  k.flip_indices = {10, 100, 1000};
  l.flip_indices = {15, 300, 1009};
  EXPECT_NEAR(flip_coincidence(k, l), 2.0 / 3.0, 1e-12);
  EXPECT_EQ(flip_coincidence(SignChangeRecord{}, l), 1.0);
}

TEST(Constants, FormatAndDeterminism) {
  const std::string out = cmd_constants();
  EXPECT_TRUE(out.starts_with("K0 2.685452001065306445309715 "));
  EXPECT_NE(out.find("\nL0 3.275822918721811159787682 "), std::string::npos);
  EXPECT_EQ(out, cmd_constants());
}

}  // namespace
}  // namespace khinchin
