#pragma once

// Reproducible experiment commands shared by the CLI and the acceptance suite.
//
// A run reads one JSON config (exact numbers as decimal strings), writes its
// outputs to temporary files and renames them into place together with a
// manifest.json once the command has finished. Exit codes: 0 success,
// 1 mathematical mismatch, 2 configuration or usage error, 3 resource guard.

#include <openssl/evp.h>

#include <charconv>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mobdisj/bsz.hpp"
#include "mobdisj/char_sums.hpp"
#include "mobdisj/sampling.hpp"

namespace mobdisj {

inline constexpr std::string_view kToolVersion = "1.0.0";
inline constexpr int kBszSchemaVersion = 1;

enum ExitCode : int { kExitOk = 0, kExitMismatch = 1, kExitConfig = 2, kExitResource = 3 };

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Config access

class Config {
 public:
  explicit Config(json doc, std::string source = "config") : doc_(std::move(doc)), source_(std::move(source)) {
    if (!doc_.is_object()) fail(ErrorCode::Config, source_ + ": top level must be a JSON object");
  }

  static Config parse(const std::string& text, const std::string& source) {
    json doc;
    try {
      doc = json::parse(text);
    } catch (const json::parse_error& e) {
      fail(ErrorCode::Config, source + ": " + e.what());
    }
    return Config(std::move(doc), source);
  }

  static Config load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::Config, "cannot read config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path.string());
  }

  bool has(const std::string& key) const { return doc_.contains(key) && !doc_.at(key).is_null(); }
  const json& raw() const noexcept { return doc_; }

  u64 u64_at(const std::string& key) const { return parse_u64(at(key), key); }
  u64 u64_or(const std::string& key, u64 fallback) const { return has(key) ? u64_at(key) : fallback; }
  double real_at(const std::string& key) const { return parse_real(at(key), key); }
  double real_or(const std::string& key, double fallback) const { return has(key) ? real_at(key) : fallback; }
  std::string string_or(const std::string& key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (!v.is_string()) fail(ErrorCode::Config, where(key) + ": expected a string");
    return v.get<std::string>();
  }
  std::vector<u64> u64_list_or(const std::string& key, std::vector<u64> fallback) const {
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (!v.is_array()) fail(ErrorCode::Config, where(key) + ": expected an array");
    std::vector<u64> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(parse_u64(v[i], key + "[" + std::to_string(i) + "]"));
    return out;
  }
  std::vector<Config> objects_or_empty(const std::string& key) const {
    std::vector<Config> out;
    if (!has(key)) return out;
    const json& v = at(key);
    if (!v.is_array()) fail(ErrorCode::Config, where(key) + ": expected an array");
    for (std::size_t i = 0; i < v.size(); ++i) out.emplace_back(v[i], source_ + ":" + key + "[" + std::to_string(i) + "]");
    return out;
  }

  std::string where(const std::string& key) const { return source_ + ": field '" + key + "'"; }

 private:
  const json& at(const std::string& key) const {
    if (!has(key)) fail(ErrorCode::Config, where(key) + ": missing");
    return doc_.at(key);
  }
  u64 parse_u64(const json& v, const std::string& key) const {
    if (!v.is_string()) fail(ErrorCode::Config, where(key) + ": expected a decimal string");
    const std::string s = v.get<std::string>();
    u64 out = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
      fail(ErrorCode::Config, where(key) + ": '" + s + "' is not a non-negative integer");
    }
    return out;
  }
  double parse_real(const json& v, const std::string& key) const {
    if (!v.is_string()) fail(ErrorCode::Config, where(key) + ": expected a decimal string");
    const std::string s = v.get<std::string>();
    double out = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
      fail(ErrorCode::Config, where(key) + ": '" + s + "' is not a real number");
    }
    return out;
  }

  json doc_;
  std::string source_;
};

inline PrimeModulus config_prime(const Config& cfg, const std::string& key = "p") {
  const u64 p = cfg.u64_at(key);
  try {
    return PrimeModulus(p);
  } catch (const Error&) {
    fail(ErrorCode::Config, cfg.where(key) + ": " + std::to_string(p) + " is not an odd prime");
  }
}

/// The "matrix" field: four residues, validated and scaled into SL_2.
inline MobiusMatrix config_matrix(const Config& cfg, PrimeModulus p) {
  auto m = cfg.u64_list_or("matrix", {});
  if (m.size() != 4) fail(ErrorCode::Config, cfg.where("matrix") + ": expected [a, b, c, d]");
  return normalize_to_sl2(FpElem(p, m[0]), FpElem(p, m[1]), FpElem(p, m[2]), FpElem(p, m[3]));
}

// ---------------------------------------------------------------------------
// Output staging

inline std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    fail(ErrorCode::Io, "sha256 failed");
  }
  std::ostringstream os;
  for (unsigned i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int{digest[i]};
  return os.str();
}

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Collects outputs in temporary files; commit() renames them into place and
/// writes the manifest. Uncommitted temporaries are removed on destruction.
class OutputStage {
 public:
  OutputStage(std::filesystem::path dir, std::string command, std::string config_text, unsigned threads)
      : dir_(std::move(dir)), command_(std::move(command)), config_text_(std::move(config_text)),
        threads_(threads), started_(utc_timestamp()) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) fail(ErrorCode::Io, "cannot create output directory " + dir_.string());
  }
  OutputStage(const OutputStage&) = delete;
  OutputStage& operator=(const OutputStage&) = delete;
  ~OutputStage() {
    for (const auto& f : files_) {
      std::error_code ec;
      std::filesystem::remove(f.tmp, ec);
    }
  }

  void add(const std::string& name, const std::string& content) {
    Pending f{name, dir_ / ("." + name + ".tmp"), sha256_hex(content), content.size()};
    write_file(f.tmp, content);
    files_.push_back(std::move(f));
  }

  void commit() {
    ojson manifest;
    manifest["tool"] = "mobdisj";
    manifest["version"] = kToolVersion;
    manifest["command"] = command_;
    manifest["config_sha256"] = sha256_hex(config_text_);
    manifest["threads"] = threads_;
    manifest["started_at"] = started_;
    manifest["finished_at"] = utc_timestamp();
    manifest["outputs"] = ojson::array();
    for (const auto& f : files_) {
      manifest["outputs"].push_back({{"file", f.name}, {"sha256", f.sha256}, {"bytes", f.bytes}});
    }
    const std::filesystem::path mtmp = dir_ / ".manifest.json.tmp";
    write_file(mtmp, manifest.dump(2) + "\n");
    for (const auto& f : files_) std::filesystem::rename(f.tmp, dir_ / f.name);
    std::filesystem::rename(mtmp, dir_ / "manifest.json");
    files_.clear();
  }

 private:
  struct Pending {
    std::string name;
    std::filesystem::path tmp;
    std::string sha256;
    std::size_t bytes;
  };

  static void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::Io, "cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) fail(ErrorCode::Io, "short write to " + path.string());
  }

  std::filesystem::path dir_;
  std::string command_;
  std::string config_text_;
  unsigned threads_;
  std::string started_;
  std::vector<Pending> files_;
};

// ---------------------------------------------------------------------------
// Shared helpers

struct RunOptions {
  std::filesystem::path out_dir = ".";
  std::optional<std::filesystem::path> mu_cache;
  /// Overrides the config's "threads" field when set.
  std::optional<unsigned> threads;
  std::ostream* log = &std::cout;
  std::ostream* err = &std::cerr;
};

inline unsigned effective_threads(const Config& cfg, const RunOptions& opt) {
  if (opt.threads) return std::max(1u, *opt.threads);
  return static_cast<unsigned>(std::max<u64>(1, cfg.u64_or("threads", 1)));
}

/// Loads the cached table when it is large enough, otherwise sieves and
/// refreshes the cache.
inline MobiusTable obtain_mobius_table(u64 limit, const std::optional<std::filesystem::path>& cache, unsigned threads) {
  limit = std::max<u64>(limit, 1);
  if (cache && std::filesystem::exists(*cache)) {
    MobiusTable t = load_mobius_table(*cache);
    if (t.limit() >= limit) return t;
  }
  MobiusTable t = mobius_sieve(limit, threads);
  if (cache) {
    std::filesystem::path tmp = *cache;
    tmp += ".tmp";
    save_mobius_table(tmp, t);
    std::filesystem::rename(tmp, *cache);
  }
  return t;
}

/// The scan grid shipped with the tool: 3 primes x 5 orbits x 4 frequencies,
/// full-period correlation sums Q(1, 1; 1, 2, t).
inline std::vector<ScanPoint> default_scan_grid() {
  std::vector<ScanPoint> pts;
  for (u64 p : {101ULL, 1009ULL, 10007ULL}) {
    PrimeModulus pm(p);
    std::mt19937_64 rng(20240601ULL + p);
    SampleRequirements req;
    req.min_period = static_cast<u64>(std::ceil(std::sqrt(static_cast<double>(p)))) + 1;
    for (int s = 0; s < 5; ++s) {
      AdmissibleSample smp = sample_admissible(pm, rng, req);
      for (u64 f : {1ULL, 2ULL, 3ULL, 5ULL}) {
        pts.push_back(ScanPoint{SumKind::Correlation, smp.matrix, smp.seed, f, 1, 1, 1, 2, 0, 0});
      }
    }
  }
  return pts;
}

// ---------------------------------------------------------------------------
// verify-spectral

inline constexpr std::string_view kVerifyCsvHeader =
    "case,p,a,b,c,d,xi0,period,projective_period,theta_sq_order,pole_hit,checked,mismatches,period_divides";

struct VerifySummary {
  u64 cases = 0;
  u64 mismatches = 0;
  u64 divisibility_failures = 0;
  u64 period_equals_order = 0;
};

inline int run_verify_spectral(const Config& cfg, const std::string& config_text, const RunOptions& opt) {
  const PrimeModulus p = config_prime(cfg);
  const u64 samples = cfg.u64_or("samples", 50);
  const u64 window = cfg.u64_or("window", 2000);
  const u64 rng_seed = cfg.u64_or("rng_seed", 1);
  const unsigned threads = effective_threads(cfg, opt);

  std::string csv(kVerifyCsvHeader);
  csv += '\n';
  VerifySummary sum;
  auto record = [&](const std::string& name, const MobiusMatrix& A, const FpElem& seed) {
    Trajectory tr = period(A, seed);
    EquivalenceResult eq = check_three_way(A, seed, std::min(tr.projective_period, window));
    const bool divides = tr.theta_sq_order % tr.projective_period == 0 &&
                         (tr.pole_hit || tr.theta_sq_order % tr.period == 0);
    ++sum.cases;
    sum.mismatches += eq.mismatches;
    if (!divides) ++sum.divisibility_failures;
    if (tr.projective_period == tr.theta_sq_order) ++sum.period_equals_order;
    std::ostringstream row;
    row << name << ',' << p.value() << ',' << A.a() << ',' << A.b() << ',' << A.c() << ',' << A.d() << ',' << seed
        << ',' << tr.period << ',' << tr.projective_period << ',' << tr.theta_sq_order << ','
        << (tr.pole_hit ? std::to_string(*tr.pole_hit) : std::string()) << ',' << eq.checked << ',' << eq.mismatches
        << ',' << (divides ? 1 : 0) << '\n';
    csv += row.str();
  };

  if (cfg.has("matrix")) {
    const MobiusMatrix A = config_matrix(cfg, p);
    const FpElem seed(p, cfg.u64_or("seed", 0));
    record("given", A, seed);
  }
  std::mt19937_64 rng(rng_seed);
  for (u64 i = 0; i < samples; ++i) {
    AdmissibleSample s = sample_admissible(p, rng);
    record("sample_" + std::to_string(i), s.matrix, s.seed);
  }

  OutputStage stage(opt.out_dir, "verify-spectral", config_text, threads);
  stage.add("verify_spectral.csv", csv);
  stage.commit();
  *opt.log << "verify-spectral p=" << p.value() << " cases=" << sum.cases << " mismatches=" << sum.mismatches
           << " divisibility_failures=" << sum.divisibility_failures
           << " period==ord(theta^2): " << sum.period_equals_order << "/" << sum.cases << "\n";
  return sum.mismatches == 0 && sum.divisibility_failures == 0 ? kExitOk : kExitMismatch;
}

// ---------------------------------------------------------------------------
// sum-scan

inline int run_sum_scan(const Config& cfg, const std::string& config_text, const RunOptions& opt) {
  const unsigned threads = effective_threads(cfg, opt);
  std::vector<SumReport> reports;

  const std::vector<u64> schedule = cfg.u64_list_or("n_schedule", {});
  const auto correlations = cfg.objects_or_empty("correlation");
  const auto singles = cfg.objects_or_empty("single");
  const bool needs_orbit = !schedule.empty() || !correlations.empty() || !singles.empty();

  if (needs_orbit) {
    const PrimeModulus p = config_prime(cfg);
    const MobiusMatrix A = config_matrix(cfg, p);
    const FpElem seed(p, cfg.u64_or("seed", 0));
    const std::vector<u64> freqs = cfg.u64_list_or("frequencies", {1});
    if (freqs.empty()) fail(ErrorCode::Config, cfg.where("frequencies") + ": empty");

    if (!schedule.empty()) {
      const u64 nmax = *std::max_element(schedule.begin(), schedule.end());
      if (nmax == 0) fail(ErrorCode::Config, cfg.where("n_schedule") + ": N must be positive");
      const MobiusTable mu = obtain_mobius_table(nmax, opt.mu_cache, threads);
      for (u64 f : freqs) {
        for (u64 N : schedule) reports.push_back(twisted_sum(A, seed, AdditiveCharacter(p, f), N, mu, threads));
      }
    }
    if (!correlations.empty() || !singles.empty()) {
      const OrbitTable orbit(A, seed);
      for (u64 f : freqs) {
        AdditiveCharacter psi(p, f);
        for (const Config& c : correlations) {
          reports.push_back(correlation_sum(orbit, psi, c.u64_at("u"), c.u64_at("v"), c.u64_at("k"), c.u64_at("m"),
                                            c.u64_or("N", orbit.period()), threads));
        }
        for (const Config& c : singles) {
          reports.push_back(single_sum(orbit, psi, c.u64_at("u"), c.u64_at("m"), c.u64_or("N", orbit.period()), threads));
        }
      }
    }
  }
  if (cfg.string_or("scan_grid", "none") == "default") {
    const auto grid = default_scan_grid();
    auto scan = bound_ratio_scan(grid, nullptr, threads);
    RatioSummary s = summarize_ratios(scan);
    *opt.log << "default grid: " << s.count << " reports, ratio min " << s.min << " median " << s.median << " q90 "
             << s.q90 << " max " << s.max << "\n";
    reports.insert(reports.end(), scan.begin(), scan.end());
  }

  OutputStage stage(opt.out_dir, "sum-scan", config_text, threads);
  stage.add("sum_scan.csv", to_csv(reports));
  stage.commit();
  for (const auto& r : reports) {
    if (r.kind == SumKind::Twisted) {
      *opt.log << "S(N) u=" << r.u.value_or(0) << " N=" << r.terms << " |S|/N=" << r.ratio << "\n";
    }
  }
  *opt.log << "sum-scan rows=" << reports.size() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// weil-check

namespace detail {

/// Exactly the requested degree: the leading coefficient is redrawn until nonzero.
template <class T, class Draw>
Polynomial<T> random_polynomial(int degree, Draw&& draw) {
  std::vector<T> c;
  for (int i = 0; i <= degree; ++i) c.push_back(draw());
  while (c.back().is_zero()) c.back() = draw();
  return Polynomial<T>(std::move(c));
}

}  // namespace detail

/// Random h/g over F_p with degrees in [0, max_degree], max degree >= 1 and
/// h/g not constant.
inline RationalFunction<FpElem> random_rational_fp(PrimeModulus p, int max_degree, std::mt19937_64& rng) {
  auto draw = [&] { return FpElem(p, uniform_below(rng, p.value())); };
  for (;;) {
    const int dh = static_cast<int>(uniform_below(rng, static_cast<u64>(max_degree) + 1));
    const int dg = static_cast<int>(uniform_below(rng, static_cast<u64>(max_degree) + 1));
    if (std::max(dh, dg) < 1) continue;
    RationalFunction<FpElem> rf(detail::random_polynomial<FpElem>(dh, draw),
                                detail::random_polynomial<FpElem>(dg, draw));
    if (!rf.is_constant()) return rf;
  }
}

/// Random h/g over F_{p^2} whose trace Tr(h/g) is not constant on the norm-one group.
inline RationalFunction<Fp2Elem> random_rational_norm_one(const QuadExtension& ext, int max_degree,
                                                          std::mt19937_64& rng) {
  auto draw = [&] { return Fp2Elem(ext, uniform_below(rng, ext.p()), uniform_below(rng, ext.p())); };
  const Fp2Elem gen = norm_group_generator(ext);
  for (;;) {
    const int dh = static_cast<int>(uniform_below(rng, static_cast<u64>(max_degree) + 1));
    const int dg = static_cast<int>(uniform_below(rng, static_cast<u64>(max_degree) + 1));
    if (std::max(dh, dg) < 1) continue;
    RationalFunction<Fp2Elem> rf(detail::random_polynomial<Fp2Elem>(dh, draw),
                                 detail::random_polynomial<Fp2Elem>(dg, draw));
    std::optional<u64> first;
    bool constant = true;
    Fp2Elem x = Fp2Elem::one(ext);
    for (u64 n = 0; n <= ext.p() && constant; ++n, x = x * gen) {
      Fp2Elem den = rf.denominator()(x);
      if (den.is_zero()) continue;
      const u64 tr = trace(rf.numerator()(x) / den).value();
      if (!first) first = tr;
      else if (*first != tr) constant = false;
    }
    if (!constant) return rf;
  }
}

struct WeilCheckResult {
  std::vector<SumReport> reports;
  double max_ratio_fp = 0.0;
  double max_ratio_norm_one = 0.0;
};

/// For each prime, `cases` random rational functions, each summed against the
/// trivial character and the character sending the canonical generator to
/// e(1/order).
inline WeilCheckResult weil_check(const std::vector<u64>& primes, u64 cases, const std::vector<u64>& norm_one_primes,
                                  u64 norm_one_cases, int max_degree, u64 rng_seed) {
  WeilCheckResult res;
  for (u64 pv : primes) {
    PrimeModulus p(pv);
    std::mt19937_64 rng(rng_seed * 1000003ULL + pv);
    const auto chi0 = fp_character(p, 0);
    const auto chi1 = fp_character(p, 1);
    for (u64 i = 0; i < cases; ++i) {
      auto rf = random_rational_fp(p, max_degree, rng);
      AdditiveCharacter psi(p, 1 + uniform_below(rng, pv - 1));
      for (const auto* chi : {&chi0, &chi1}) {
        res.reports.push_back(weil_sum_fp(rf, psi, *chi));
        res.max_ratio_fp = std::max(res.max_ratio_fp, res.reports.back().ratio);
      }
    }
  }
  for (u64 pv : norm_one_primes) {
    PrimeModulus p(pv);
    std::mt19937_64 rng(rng_seed * 1000003ULL + pv + 1);
    const QuadExtension ext = QuadExtension::first_irreducible(p);
    const auto chi0 = norm_one_character(ext, 0);
    const auto chi1 = norm_one_character(ext, 1);
    for (u64 i = 0; i < norm_one_cases; ++i) {
      auto rf = random_rational_norm_one(ext, max_degree, rng);
      AdditiveCharacter psi(p, 1 + uniform_below(rng, pv - 1));
      for (const auto* chi : {&chi0, &chi1}) {
        res.reports.push_back(weil_sum_fp2_norm_one(rf, psi, *chi));
        res.max_ratio_norm_one = std::max(res.max_ratio_norm_one, res.reports.back().ratio);
      }
    }
  }
  return res;
}

inline int run_weil_check(const Config& cfg, const std::string& config_text, const RunOptions& opt) {
  const unsigned threads = effective_threads(cfg, opt);
  const std::vector<u64> primes = cfg.u64_list_or("primes", {});
  const std::vector<u64> norm_primes = cfg.u64_list_or("norm_one_primes", {});
  for (u64 p : primes) {
    if (p > 100'000) fail(ErrorCode::RangeGuard, "weil-check over F_p limited to p <= 10^5");
  }
  for (u64 p : norm_primes) {
    if (p > 3000) fail(ErrorCode::RangeGuard, "weil-check over the norm-one group limited to p <= 3000");
  }
  for (u64 p : primes) (void)PrimeModulus(p);
  for (u64 p : norm_primes) (void)PrimeModulus(p);
  const u64 max_degree = cfg.u64_or("max_degree", 3);
  if (max_degree < 1 || max_degree > 64) fail(ErrorCode::Config, cfg.where("max_degree") + ": expected 1..64");
  const double envelope = cfg.real_or("envelope", 10.0);

  WeilCheckResult res = weil_check(primes, cfg.u64_or("cases_per_prime", 100), norm_primes,
                                   cfg.u64_or("norm_one_cases", 100), static_cast<int>(max_degree),
                                   cfg.u64_or("rng_seed", 7));
  OutputStage stage(opt.out_dir, "weil-check", config_text, threads);
  stage.add("weil_check.csv", to_csv(res.reports));
  stage.commit();
  u64 violations = 0;
  for (const auto& r : res.reports) {
    if (!(r.ratio <= envelope)) ++violations;
  }
  *opt.log << "weil-check rows=" << res.reports.size() << " max ratio F_p=" << res.max_ratio_fp
           << " norm-one=" << res.max_ratio_norm_one << " envelope=" << envelope << " violations=" << violations
           << "\n";
  return violations == 0 ? kExitOk : kExitMismatch;
}

// ---------------------------------------------------------------------------
// bsz-report

inline ojson to_json(const ConditionReport& rep) {
  ojson out;
  out["alpha"] = rep.alpha;
  out["N"] = rep.N;
  out["p"] = rep.p;
  out["t"] = rep.t;
  out["epsilon"] = rep.epsilon;
  out["rho"] = rep.rho;
  out["alpha_min"] = rep.alpha_min;
  out["theorem_range_empty"] = rep.theorem_range_empty;
  out["conditions"] = ojson::array();
  for (const auto& c : rep.conditions) {
    out["conditions"].push_back({{"name", c.name},
                                 {"relation", c.relation},
                                 {"log_lhs", c.log_lhs},
                                 {"log_rhs", c.log_rhs},
                                 {"holds", c.holds}});
  }
  return out;
}

inline ojson to_json(const BszDecomposition& d) {
  ojson out;
  out["schema_version"] = kBszSchemaVersion;
  const BszParams& pr = d.params;
  out["params"] = {{"alpha", pr.alpha()},
                   {"N", pr.N()},
                   {"j0", pr.j0()},
                   {"j1", pr.j1()},
                   {"j_first", pr.j_first()},
                   {"j_last", pr.j_last()},
                   {"j_enumerated_last", d.blocks.empty() ? pr.j_first() - 1 : d.blocks.back().j},
                   {"period", d.period}};
  out["rows"] = ojson::array();
  for (std::size_t i = 0; i < d.blocks.size(); ++i) {
    const i64 j = d.blocks[i].j;
    out["rows"].push_back({{"j", j},
                           {"R_j", pr.R(j)},
                           {"M_j", pr.M(j)},
                           {"P_count", d.blocks[i].primes.size()},
                           {"Q_count", d.sets[i].members.size()},
                           {"W_j", d.w[i]}});
  }
  out["aggregates"] = {{"lhs_re", d.lhs.real()},
                       {"lhs_im", d.lhs.imag()},
                       {"lhs_abs", std::abs(d.lhs)},
                       {"sum_w", d.sum_w},
                       {"alpha_n", d.alpha_n},
                       {"quotient", d.quotient},
                       {"sum_p", d.sum_p},
                       {"sum_pq", d.sum_pq},
                       {"collisions", d.collisions}};
  out["pj_cardinality"] = ojson::array();
  for (const auto& row : pj_cardinality_check(pr, d.blocks)) {
    out["pj_cardinality"].push_back(
        {{"j", row.j}, {"count", row.count}, {"r_over_j", row.r_over_j}, {"ratio", row.ratio}});
  }
  return out;
}

inline int run_bsz_report(const Config& cfg, const std::string& config_text, const RunOptions& opt) {
  const unsigned threads = effective_threads(cfg, opt);
  const double alpha = cfg.real_at("alpha");
  const u64 N = cfg.u64_at("n");
  if (N == 0) fail(ErrorCode::Config, cfg.where("n") + ": must be positive");
  if (N > 100'000'000) fail(ErrorCode::RangeGuard, "bsz-report limited to N <= 10^8");
  const std::string nu_kind = cfg.string_or("nu", "mobius");
  const std::string f_kind = cfg.string_or("f", "trajectory");
  if (nu_kind != "mobius" && nu_kind != "one") fail(ErrorCode::Config, cfg.where("nu") + ": expected mobius|one");
  if (f_kind != "trajectory" && f_kind != "one") fail(ErrorCode::Config, cfg.where("f") + ": expected trajectory|one");

  BszParams params = cfg.has("j_first") || cfg.has("j_last")
                         ? BszParams::with_range(alpha, N, static_cast<i64>(cfg.u64_at("j_first")),
                                                 static_cast<i64>(cfg.u64_at("j_last")))
                         : make_params(alpha, N);

  std::optional<MobiusTable> mu;
  if (nu_kind == "mobius") mu = obtain_mobius_table(N, opt.mu_cache, threads);
  ArithmeticFunction nu = [&](u64 n) -> cplx { return mu ? cplx(static_cast<double>((*mu)[n]), 0.0) : cplx(1.0); };

  ojson instance;
  instance["nu"] = nu_kind;
  instance["f"] = f_kind;
  std::optional<OrbitTable> orbit;
  std::optional<AdditiveCharacter> psi;
  std::optional<PrimeModulus> prime;
  if (f_kind == "trajectory") {
    prime = config_prime(cfg);
    const MobiusMatrix A = config_matrix(cfg, *prime);
    const FpElem seed(*prime, cfg.u64_or("seed", 0));
    psi.emplace(*prime, cfg.u64_or("psi", 1));
    if (psi->trivial()) fail(ErrorCode::Config, cfg.where("psi") + ": must be nonzero mod p");
    orbit.emplace(A, seed);
    instance["p"] = prime->value();
    instance["matrix"] = {A.a().value(), A.b().value(), A.c().value(), A.d().value()};
    instance["xi0"] = seed.value();
    instance["psi"] = psi->frequency();
  }
  const u64 t = orbit ? orbit->period() : 1;
  ArithmeticFunction F = [&](u64 n) -> cplx { return orbit ? psi->phase((*orbit)[n]) : cplx(1.0); };

  BszDecomposition dec = decomposition_report(nu, F, params, t, threads);
  ojson out = to_json(dec);
  out["instance"] = instance;
  if (prime && alpha < 1.0) {
    out["theorem_conditions"] = to_json(theorem_conditions(alpha, N, prime->value(), t, cfg.real_or("epsilon", 0.1)));
  } else {
    out["theorem_conditions"] = nullptr;
  }

  OutputStage stage(opt.out_dir, "bsz-report", config_text, threads);
  stage.add("bsz_report.json", out.dump(2) + "\n");
  stage.commit();
  *opt.log << "bsz-report N=" << N << " alpha=" << alpha << " blocks=" << dec.blocks.size()
           << " sum#P#Q=" << dec.sum_pq << " |LHS|=" << std::abs(dec.lhs) << " sumW=" << dec.sum_w
           << " quotient=" << dec.quotient << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// mobius-check

inline constexpr u64 kMobiusCheckMax = 10'000'000;

inline int run_mobius_check(const Config& cfg, const std::string& config_text, const RunOptions& opt,
                            std::optional<u64> limit_override = std::nullopt) {
  const u64 limit = limit_override ? *limit_override : cfg.u64_at("limit");
  if (limit == 0) fail(ErrorCode::Config, "mobius-check: limit must be at least 1");
  if (limit > kMobiusCheckMax) fail(ErrorCode::RangeGuard, "mobius-check: exhaustive oracle limited to 10^7");
  const unsigned threads = effective_threads(cfg, opt);
  const MobiusTable linear = mobius_sieve_linear(limit);
  const MobiusTable segmented = mobius_sieve_segmented(limit, u64{1} << 16, threads);
  u64 mismatches = 0, seg_mismatches = 0;
  for (u64 n = 1; n <= limit; ++n) {
    const int ref = mobius_oracle(n);
    if (linear[n] != ref) ++mismatches;
    if (segmented[n] != ref) ++seg_mismatches;
  }
  ojson out;
  out["limit"] = limit;
  out["linear_mismatches"] = mismatches;
  out["segmented_mismatches"] = seg_mismatches;
  OutputStage stage(opt.out_dir, "mobius-check", config_text, threads);
  stage.add("mobius_check.json", out.dump(2) + "\n");
  stage.commit();
  *opt.log << "mobius-check limit=" << limit << " mismatches=" << mismatches + seg_mismatches << "\n";
  return mismatches + seg_mismatches == 0 ? kExitOk : kExitMismatch;
}

// ---------------------------------------------------------------------------
// Dispatch

inline int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::RangeGuard:
    case ErrorCode::TableTooSmall: return kExitResource;
    case ErrorCode::CollisionFound: return kExitMismatch;
    default: return kExitConfig;
  }
}

/// Runs one subcommand; every failure is mapped onto an exit code.
inline int run_command(const std::string& command, const std::optional<std::filesystem::path>& config_path,
                       const RunOptions& opt, std::optional<u64> limit_override = std::nullopt) {
  try {
    std::string text = "{}";
    if (config_path) {
      std::ifstream in(*config_path);
      if (!in) fail(ErrorCode::Config, "cannot read config " + config_path->string());
      std::stringstream ss;
      ss << in.rdbuf();
      text = ss.str();
    } else if (command != "mobius-check") {
      fail(ErrorCode::Config, command + ": --config is required");
    }
    const Config cfg = Config::parse(text, config_path ? config_path->string() : "<none>");
    if (command == "verify-spectral") return run_verify_spectral(cfg, text, opt);
    if (command == "sum-scan") return run_sum_scan(cfg, text, opt);
    if (command == "weil-check") return run_weil_check(cfg, text, opt);
    if (command == "bsz-report") return run_bsz_report(cfg, text, opt);
    if (command == "mobius-check") return run_mobius_check(cfg, text, opt, limit_override);
    fail(ErrorCode::Config, "unknown command '" + command + "'");
  } catch (const Error& e) {
    *opt.err << command << ": " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    *opt.err << command << ": internal check failed: " << e.what() << "\n";
    return kExitMismatch;
  }
}

}  // namespace mobdisj
