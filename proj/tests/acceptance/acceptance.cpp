// Acceptance runner: one PASS/FAIL/SKIP line per criterion. Extra
// measurements go on INFO lines. Exit status is 1 when anything failed.
//
// Criteria 12-14 need the large zero dataset: point KHINCHIN_ZEROS_MANIFEST
// at its manifest (fetched into the cache on first use).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "khinchin/batch.hpp"
#include "khinchin/cf.hpp"
#include "khinchin/errors.hpp"
#include "khinchin/stats.hpp"
#include "test_support.hpp"

namespace {

using namespace khinchin;
namespace fs = std::filesystem;
using testing::constant_digits;
using testing::truncate_digits;

enum class Verdict { Pass, Fail, Skip };

struct Outcome {
  Verdict verdict;
  std::string detail;
};

int failures = 0;

void info(const std::string& text) { std::printf("INFO %s\n", text.c_str()); }

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

void run(int id, const std::string& title, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {Verdict::Fail, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (out.verdict == Verdict::Pass && secs > budget_s) {
    out = {Verdict::Fail, out.detail + fmt("; over the %.0f s budget", budget_s)};
  }
  const char* tag = out.verdict == Verdict::Pass ? "PASS" : out.verdict == Verdict::Fail ? "FAIL" : "SKIP";
  if (out.verdict == Verdict::Fail) ++failures;
  std::printf("AC%-2d %s %s: %s [%.2f s]\n", id, tag, title.c_str(), out.detail.c_str(), secs);
  std::fflush(stdout);
}

Outcome verdict(bool ok, std::string detail) { return {ok ? Verdict::Pass : Verdict::Fail, std::move(detail)}; }

CFExpansion expand_constant(const std::string& name, std::size_t digits) {
  return expand_certified(parse_decimal(truncate_digits(constant_digits(name), digits)));
}

bool determinant_holds(const CFExpansion& cf) {
  ConvergentRecurrence r(cf.a0);
  for (std::size_t n = 0; n < cf.quotients.size(); ++n) {
    r.push(cf.quotients[n]);
    const mpz_class det = r.p() * r.q_prev() - r.p_prev() * r.q();
    if (det != ((r.index() % 2 == 1) ? 1 : -1)) return false;
  }
  return true;
}

const std::vector<std::string> kConstants = {"pi", "e", "phi", "sqrt2", "ln2"};

Outcome ac1() {
  const ConstantEstimate k = khinchin_constant(100000);
  const std::string shown = quad::format(k.value, 10);
  return verdict(shown == "2.685452001e+00",
                 "K0 = " + quad::format_general(k.value, 25) + " +- " + quad::format(k.error_bound, 2));
}

Outcome ac2() {
  const std::string shown = quad::format(levy_constant(), 16);
  return verdict(shown == "3.275822918721811e+00", "L0 = " + quad::format_general(levy_constant(), 25));
}

Outcome ac3() {
  gmp_randclass rng(gmp_randinit_mt);
  rng.seed(20240101);
  mpz_class limit;
  mpz_ui_pow_ui(limit.get_mpz_t(), 10, 50);
  std::size_t checked = 0, bad = 0;
  for (int i = 0; i < 1000; ++i) {
    const mpz_class q = rng.get_z_range(limit - 1) + 1;
    const mpz_class p = rng.get_z_range(limit * 4) - limit * 2;
    const CFExpansion cf = expand_exact_rational(p, q);
    bad += !determinant_holds(cf);
    checked += cf.quotients.size();
  }
  for (const auto& z : testing::bundled_zeros()) {
    const CFExpansion cf = expand_certified(z.value());
    bad += !determinant_holds(cf);
    checked += cf.quotients.size();
  }
  for (const auto& name : kConstants) {
    const CFExpansion cf = expand_constant(name, 10000);
    bad += !determinant_holds(cf);
    checked += cf.quotients.size();
  }
  return verdict(bad == 0, fmt("%zu convergents checked, %zu expansions violating", checked, bad));
}

Outcome ac4() {
  std::string detail;
  bool ok = true;
  for (const auto& name : kConstants) {
    const CFExpansion a = expand_constant(name, 100);
    const CFExpansion b = expand_constant(name, 1000);
    const CFExpansion c = expand_constant(name, 10000);
    auto strict_prefix = [](const CFExpansion& s, const CFExpansion& l) {
      if (s.a0 != l.a0 || s.certified_len() >= l.certified_len()) return false;
      return std::equal(s.quotients.begin(), s.quotients.end(), l.quotients.begin());
    };
    const bool chain = strict_prefix(a, b) && strict_prefix(b, c);
    ok = ok && chain;
    detail += fmt("%s %zu<%zu<%zu%s; ", name.c_str(), a.certified_len(), b.certified_len(), c.certified_len(),
                  chain ? "" : " BROKEN");
  }
  detail.resize(detail.size() - 2);
  return verdict(ok, detail);
}

Outcome ac5() {
  std::vector<std::pair<std::string, BigReal>> inputs;
  inputs.emplace_back("pi", parse_decimal(truncate_digits(constant_digits("pi"), 1000)));
  inputs.emplace_back("ln2", parse_decimal(truncate_digits(constant_digits("ln2"), 1000)));
  for (const auto& z : testing::bundled_zeros()) inputs.emplace_back("zero_" + std::to_string(z.index_l), z.value());
  bool ok = true;
  double lo = 1e9, hi = 0, exact_lo = 1e9, exact_hi = 0;
  for (const auto& [label, x] : inputs) {
    const double d = static_cast<double>(x.precision_digits());
    const double ratio = static_cast<double>(expand_certified(x).certified_len()) / d;
    const double exact = static_cast<double>(expand_decimal_exact(x).certified_len()) / d;
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
    exact_lo = std::min(exact_lo, exact);
    exact_hi = std::max(exact_hi, exact);
    ok = ok && ratio >= 1.88 && ratio <= 1.99;
  }
  info(fmt("AC5 expanding each decimal as an exact rational gives ratios in [%.3f, %.3f]; "
           "those tails depend on the truncation, not on the number",
           exact_lo, exact_hi));
  info("AC5 6 ln2 ln10 / pi^2 = 0.9702 quotients per digit is the rate a certified expansion can reach");
  return verdict(ok, fmt("certified ratios in [%.3f, %.3f] over %zu inputs, band [1.88, 1.99]", lo, hi,
                         inputs.size()));
}

Outcome ac6() {
  const CFExpansion cf = expand_constant("pi", 10000);
  const StatSeries k = khinchin_series(cf);
  const double v = quad::to_double(static_cast<Real>(cf.certified_len()) * quad::log(k.back().value) /
                                   quad::log(10));
  const CFExpansion exact = expand_decimal_exact(parse_decimal(constant_digits("pi")));
  const StatSeries ke = khinchin_series(exact);
  const double ve = quad::to_double(static_cast<Real>(exact.certified_len()) * quad::log(ke.back().value) /
                                    quad::log(10));
  info(fmt("AC6 exact-rational expansion of the 10000-digit decimal: n = %zu, n log10 K(n) = %.1f",
           exact.certified_len(), ve));
  return verdict(v >= 8200 && v <= 8450,
                 fmt("certified n = %zu, n log10 K(n) = %.1f, band [8200, 8450]", cf.certified_len(), v));
}

Outcome ac7() {
  const CFExpansion phi = expand_constant("phi", 10000);
  const StatSeries kp = khinchin_series(phi);
  bool k_one = true;
  for (const auto& p : kp.values) k_one = k_one && p.value == 1;
  const double l_phi = quad::to_double(levy_series(phi).back().value);
  const bool phi_ok = k_one && std::abs(l_phi - 1.6180339887498949) < 1e-3;

  const CFExpansion r2 = expand_certified(parse_decimal(constant_digits("sqrt2")), 5000);
  const double l_r2 = quad::to_double(levy_series(r2).back().value);
  const bool r2_ok = r2.certified_len() == 5000 && std::abs(l_r2 - 2.4142135623730950) < 1e-3;

  const StatSeries ke = khinchin_series(expand_constant("e", 10000));
  std::size_t last_below = 0;
  for (const auto& p : ke.values) {
    if (p.value <= 3) last_below = p.m;
  }
  const double k_e = quad::to_double(ke.back().value);
  const bool e_ok = k_e > 3 && last_below < ke.back().m / 2;
  return verdict(phi_ok && r2_ok && e_ok,
                 fmt("phi: K==1 %s, L=%.6f; sqrt2 L(5000)=%.6f; e: K(%zu)=%.4f, K>3 for m>%zu",
                     k_one ? "yes" : "no", l_phi, l_r2, ke.back().m, k_e, last_below));
}

Outcome ac8() {
  double min_p = 1;
  std::size_t passed = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const CFExpansion cf = expand_certified(parse_decimal(testing::random_unit_decimal(seed, 5000)));
    const auto bins = gauss_kuzmin_histogram(cf);
    const double p = gauss_kuzmin_chi_square(bins).p_value;
    min_p = std::min(min_p, p);
    passed += p > 0.01;
  }
  const auto ones = gauss_kuzmin_histogram(expand_constant("phi", 10000));
  const double p_ones = gauss_kuzmin_chi_square(ones).p_value;
  return verdict(passed == 20 && p_ones <= 0.01,
                 fmt("%zu/20 random reals with p > 0.01 (min p %.4f); all-ones p = %.3g", passed, min_p, p_ones));
}

StatSeries synthetic_powerlaw(double alpha, double noise, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0, noise);
  StatSeries s;
  s.reference_constant = 2.6854520010653064;
  for (std::size_t m = 1; m <= 10000; ++m) {
    const double d = 0.8 * std::pow(static_cast<double>(m), -alpha) * (1 + (noise > 0 ? n(rng) : 0));
    s.values.push_back({m, s.reference_constant - d});
  }
  return s;
}

Outcome ac9() {
  const double clean = powerlaw_fit(synthetic_powerlaw(0.9, 0, 0)).alpha;
  const double noisy = powerlaw_fit(synthetic_powerlaw(0.9, 0.01, 42)).alpha;
  return verdict(std::abs(clean - 0.9) < 1e-6 && std::abs(noisy - 0.9) < 0.02,
                 fmt("noiseless alpha %.9f, 1%% noise alpha %.5f", clean, noisy));
}

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    const std::string rel = fs::relative(e.path(), root).string();
    // The checkpoint log records completion order, which varies with threads.
    if (rel == "checkpoint.log") continue;
    out[rel] = testing::slurp(e.path());
  }
  return out;
}

Outcome ac10() {
  testing::TempDir a("ac10-j1"), b("ac10-j8");
  RunConfig c;
  c.input = FileSource{testing::fixtures() / "zeros_1000.txt", std::nullopt};
  c.out_dir = a.path();
  c.jobs = 1;
  cmd_analyze(c);
  c.out_dir = b.path();
  c.jobs = 8;
  cmd_analyze(c);
  const auto ta = tree(a.path()), tb = tree(b.path());
  return verdict(ta == tb && ta.size() == 12, fmt("%zu files compared", ta.size()));
}

Outcome ac11() {
  const double k0 = quad::to_double(khinchin_reference().value);
  const double l0 = quad::to_double(levy_reference());
  std::size_t inside = 0;
  double worst_k = 0, worst_l = 0;
  const auto zeros = testing::bundled_zeros();
  for (const auto& z : zeros) {
    const CFExpansion cf = expand_certified(z.value());
    const double k = quad::to_double(khinchin_series(cf).back().value);
    const double l = quad::to_double(levy_series(cf).back().value);
    worst_k = std::max(worst_k, std::abs(k - k0));
    worst_l = std::max(worst_l, std::abs(l - l0));
    inside += std::abs(k - k0) < 0.3 && std::abs(l - l0) < 0.36;
  }
  return verdict(inside == zeros.size(), fmt("%zu/%zu inside; max |K-K0| = %.4f, max |L-L0| = %.4f", inside,
                                             zeros.size(), worst_k, worst_l));
}

struct LargeDataset {
  std::vector<NumberInput> zeros;
  std::string why_missing;
};

const LargeDataset& large_dataset() {
  static const LargeDataset ds = [] {
    LargeDataset out;
    const char* manifest = std::getenv("KHINCHIN_ZEROS_MANIFEST");
    if (!manifest || !*manifest) {
      out.why_missing = "KHINCHIN_ZEROS_MANIFEST not set (40000-digit dataset not available offline)";
      return out;
    }
    try {
      RunConfig c;
      c.input = DatasetSource{manifest, default_cache_dir()};
      out.zeros = load_inputs(c);
    } catch (const std::exception& e) {
      out.why_missing = std::string("dataset unavailable: ") + e.what();
    }
    return out;
  }();
  return ds;
}

const NumberInput* find_zero(std::uint64_t index) {
  for (const auto& z : large_dataset().zeros) {
    if (z.index == index) return &z;
  }
  return nullptr;
}

Outcome ac12() {
  if (large_dataset().zeros.empty()) return {Verdict::Skip, large_dataset().why_missing};
  const std::vector<std::pair<std::uint64_t, std::size_t>> targets = {{1263, 267}, {2595, 218}};
  std::string detail;
  bool ok = true;
  for (const auto& [index, expected] : targets) {
    const NumberInput* z = find_zero(index);
    if (!z) return {Verdict::Skip, fmt("zero %llu not in dataset", static_cast<unsigned long long>(index))};
    const CFExpansion cf = expand_certified(z->record.value());
    const std::size_t flips = sign_changes(khinchin_series(cf)).count();
    ok = ok && flips + 5 >= expected && flips <= expected + 5;
    detail += fmt("zero %llu: %zu flips (expected %zu +- 5, n = %zu); ", static_cast<unsigned long long>(index),
                  flips, expected, cf.certified_len());
  }
  return verdict(ok, detail);
}

Outcome ac13() {
  if (large_dataset().zeros.empty()) return {Verdict::Skip, large_dataset().why_missing};
  std::string detail;
  bool ok = true;
  for (std::uint64_t index : {23456u, 29873u, 34567u}) {
    const NumberInput* z = find_zero(index);
    if (!z) return {Verdict::Skip, fmt("zero %llu not in dataset", static_cast<unsigned long long>(index))};
    const double alpha = powerlaw_fit(khinchin_series(expand_certified(z->record.value()))).alpha;
    ok = ok && alpha > 0.85 && alpha < 0.92;
    detail += fmt("zero %llu alpha %.4f; ", static_cast<unsigned long long>(index), alpha);
  }
  return verdict(ok, detail);
}

Outcome ac14() {
  const auto& zeros = large_dataset().zeros;
  if (zeros.empty()) return {Verdict::Skip, large_dataset().why_missing};
  if (zeros.size() < 500) return {Verdict::Skip, fmt("dataset has only %zu zeros", zeros.size())};
  const double k0 = quad::to_double(khinchin_reference().value);
  std::size_t inside = 0;
  const std::size_t step = zeros.size() / 500;
  for (std::size_t i = 0; i < 500; ++i) {
    const double k = quad::to_double(khinchin_series(expand_certified(zeros[i * step].record.value())).back().value);
    inside += std::abs(k - k0) < 0.06;
  }
  return verdict(inside == 500, fmt("%zu/500 inside (K0 - 0.06, K0 + 0.06)", inside));
}

}  // namespace

int main() {
  run(1, "khinchin_constant(1e5) to 9 digits", 10, ac1);
  run(2, "levy_constant to 15 digits", 1, ac2);
  run(3, "determinant identity", 30, ac3);
  run(4, "prefix certification chain", 120, ac4);
  run(5, "Lochs ratio at 1000 digits", 120, ac5);
  run(6, "product magnitude for pi at 10000 digits", 60, ac6);
  run(7, "exceptional constants", 60, ac7);
  run(8, "Gauss-Kuzmin chi-square", 120, ac8);
  run(9, "power-law fit", 1, ac9);
  run(10, "batch determinism jobs 1 vs 8", 300, ac10);
  run(11, "bundled zero envelopes", 300, ac11);
  run(12, "K sign changes of zeros 1263 and 2595", 1e9, ac12);
  run(13, "fitted alpha for zeros 23456, 29873, 34567", 1e9, ac13);
  run(14, "K envelope over 500 zeros", 1e9, ac14);
  std::printf("%s: %d criteria failed\n", failures ? "FAILED" : "OK", failures);
  return failures ? 1 : 0;
}
