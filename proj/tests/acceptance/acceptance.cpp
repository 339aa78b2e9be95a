// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. Corpora are generated once (seed 42) and shared.

#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "calcforge/adversarial.hpp"
#include "calcforge/analyze.hpp"
#include "calcforge/calculus.hpp"
#include "calcforge/canonical.hpp"
#include "calcforge/cli.hpp"
#include "calcforge/generate.hpp"
#include "calcforge/oracle.hpp"
#include "calcforge/parse.hpp"
#include "calcforge/rewrite.hpp"
#include "calcforge/verify.hpp"

namespace cf = calcforge;
using cf::CheckOutcome;
using cf::CorpusPair;
using cf::Expr;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

struct Result {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[1024];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

const char* kDisguisedOne = "sin(exp(exp(x)))^2 + cos(exp(exp(x)))^2";
const char* kDisguisedZero =
    "sin(exp(x) + (exp(2*x) - 1)/(2*cos(sin(x))^2 - 1))"
    " - cos((exp(x) + 1)*(exp(x) - 1)/cos(2*sin(x)))*sin(exp(x))"
    " - cos(exp((x^3 + 3*x^2 + 3*x + 1)^(1/3) - 1))"
    "*sin((exp(2*x) - 1)/(1 - 2*sin(sin(x))^2))";

struct Corpora {
  std::vector<CorpusPair> bwd, fwd, ibp, ugly, combo, perturb;
};

Corpora build_corpora() {
  cf::GenConfig cfg;
  cfg.seed = 42;
  Corpora c;
  c.bwd = cf::gen_bwd(cfg, 1000).pairs;
  c.fwd = cf::gen_fwd(cfg, 1000).pairs;
  cf::Ledger ledger(cfg.ledger_cap, cfg.seed);
  ledger.add_all(c.bwd);
  ledger.add_all(c.fwd);
  c.ibp = cf::gen_ibp(cfg, ledger, 200).pairs;
  c.ugly = cf::gen_trick_pairs(cfg, 200).pairs;
  c.combo = cf::gen_combo(cfg, c.fwd, c.bwd, 200).pairs;
  c.perturb = cf::gen_perturb(cfg, c.bwd, 200).pairs;
  return c;
}

Result worked_examples() {
  const auto t0 = Clock::now();
  std::vector<std::string> bad;
  const Expr d = cf::differentiate(cf::parse("sin(sin(sin(sin(x))))"));
  const Expr want = cf::parse("cos(sin(sin(sin(x))))*cos(sin(sin(x)))*cos(sin(x))*cos(x)");
  if (cf::canonicalize(d) != cf::canonicalize(want)) bad.push_back("four-cosine derivative");
  const Expr one = cf::parse(kDisguisedOne);
  if (!cf::simplify(one).is_int(1)) bad.push_back("simplify(disguised one)");
  auto F = cf::integrate_heuristic(one);
  if (!F || cf::canonicalize(*F) != cf::var_x()) bad.push_back("integral of disguised one");
  cf::OracleOptions oo;
  oo.tolerance = 1e-6;
  const auto v = cf::numeric_equiv(cf::parse(kDisguisedZero), cf::integer(0), 42, oo);
  if (!v.equivalent() || v.points_tested < 20) bad.push_back("disguised zero at 20 points");
  const double secs = seconds_since(t0);
  if (secs >= 1.0) bad.push_back("runtime");
  std::string detail = fmt("%.3f s, zero-test points %zu", secs, v.points_tested);
  for (const auto& b : bad) detail += "; failed: " + b;
  return {bad.empty(), detail};
}

struct Tally {
  std::size_t n = 0, accept = 0, reject = 0, inconclusive = 0, other = 0;
  void add(CheckOutcome o) {
    ++n;
    if (o == CheckOutcome::Accept) ++accept;
    else if (o == CheckOutcome::Reject) ++reject;
    else if (o == CheckOutcome::Inconclusive) ++inconclusive;
    else ++other;
  }
  std::string str() const {
    return fmt("%zu/%zu accept, %zu reject, %zu inconclusive, %zu other", accept, n, reject,
               inconclusive, other);
  }
};

Tally check_own(const std::vector<CorpusPair>& pairs) {
  Tally t;
  for (const CorpusPair& p : pairs)
    t.add(cf::check_integral_candidate(p.problem, *p.solution).outcome);
  return t;
}

Result corpus_soundness(const Corpora& c, double gen_secs) {
  const auto t0 = Clock::now();
  const Tally bwd = check_own(c.bwd), fwd = check_own(c.fwd), ibp = check_own(c.ibp),
              ugly = check_own(c.ugly), combo = check_own(c.combo);
  const double secs = gen_secs + seconds_since(t0);
  auto strict = [](const Tally& t, std::size_t want) { return t.n == want && t.accept == t.n; };
  const bool ugly_ok = ugly.n == 200 && ugly.reject == 0 && ugly.other == 0 &&
                       ugly.inconclusive * 50 <= ugly.n;
  const bool pass = strict(bwd, 1000) && strict(fwd, 1000) && strict(ibp, 200) &&
                    strict(combo, 200) && ugly_ok && secs < 300;
  return {pass, fmt("%.1f s; BWD %s | FWD %s | IBP %s | UGLY %s | COMBO %s", secs,
                    bwd.str().c_str(), fwd.str().c_str(), ibp.str().c_str(), ugly.str().c_str(),
                    combo.str().c_str())};
}

Result perturbation(const Corpora& c) {
  Tally t;
  for (const CorpusPair& p : c.perturb)
    t.add(cf::check_integral_candidate(p.problem, *p.wrong_candidate).outcome);
  const bool pass = t.n == 200 && t.accept == 0 && t.other == 0 && t.reject * 100 >= 95 * t.n;
  return {pass, t.str()};
}

Result size_asymmetry(const Corpora& c) {
  const double bwd = cf::corpus_stats(c.bwd).all.ratio.median;
  const double fwd = cf::corpus_stats(c.fwd).all.ratio.median;
  return {bwd >= 2 && fwd <= 1, fmt("median problem/solution: BWD %.3f, FWD %.3f", bwd, fwd)};
}

Result growth() {
  const std::vector<int> sizes = {5, 10, 20, 40};
  const auto comp = cf::derivative_growth(cf::composition_heavy_config(42), sizes, 300);
  const auto add = cf::derivative_growth(cf::addition_only_config(42), sizes, 300);
  std::string rows;
  for (const auto& r : comp.rows) rows += fmt(" %d:%g", r.n, r.median_len);
  return {comp.slope >= 1.2 && add.slope >= 0.9 && add.slope <= 1.1,
          fmt("composition slope %.3f (medians%s), addition slope %.3f", comp.slope, rows.c_str(),
              add.slope)};
}

Result ode_construction() {
  cf::GenConfig cfg;
  cfg.seed = 42;
  std::vector<Expr> samples;
  for (std::uint64_t i = 0; samples.size() < 200 && i < 100000; ++i) {
    cf::Rng rng(cf::substream_seed(cfg.seed, i, 0xacc6));
    const Expr f = cf::insert_parameter(cf::sample_expr(cfg, rng), rng);
    if (f.has_var() && cf::count_leaf(f, cf::Op::Param) == 1 && cf::has_injective_path(f))
      samples.push_back(f);
  }
  std::size_t ok = 0, residual_ok = 0;
  std::map<std::string, std::size_t> failures;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const cf::OdeResult r = cf::make_first_order_ode(samples[i], 1000 + i);
    if (!r.ok()) {
      ++failures[std::string(cf::invert_failure_name(r.failure))];
      continue;
    }
    ++ok;
    if (cf::ode_residual_check(r.problem->equation, samples[i], 7000 + i, 5, 10).equivalent())
      ++residual_ok;
  }
  std::string why;
  for (const auto& [k, v] : failures) why += fmt(" %s=%zu", k.c_str(), v);
  const bool pass = samples.size() == 200 && ok * 100 >= 60 * samples.size() && residual_ok == ok;
  return {pass, fmt("%zu/%zu succeeded (%.1f%%), residual zero on %zu/%zu; failures:%s", ok,
                    samples.size(), 100.0 * double(ok) / double(samples.size()), residual_ok, ok,
                    why.c_str())};
}

Result invariances(const Corpora& c) {
  std::size_t cases = 0, ugly_ok = 0, shift_checks = 0, shift_ok = 0, no_identity = 0;
  for (std::size_t i = 0; i < c.bwd.size() && cases < 100; ++i) {
    const CorpusPair& p = c.bwd[i];
    if (cf::check_integral_candidate(p.problem, *p.solution).outcome != CheckOutcome::Accept)
      continue;
    cf::UglifyRecipe recipe;
    recipe.seed = cf::substream_seed(42, i, 0x1a7);
    Expr u;
    try {
      u = cf::uglify(p.problem, recipe);
    } catch (const cf::UglifyError&) {
      ++no_identity;
      continue;
    }
    ++cases;
    ugly_ok += cf::check_integral_candidate(u, *p.solution).outcome == CheckOutcome::Accept;
    for (int k = -5; k <= 5; ++k) {
      ++shift_checks;
      const Expr s = cf::canonical_add(*p.solution, cf::number(k));
      shift_ok += cf::check_integral_candidate(p.problem, s).outcome == CheckOutcome::Accept;
    }
  }
  return {cases == 100 && ugly_ok == cases && shift_ok == shift_checks,
          fmt("uglified accept %zu/%zu (%zu without a site), shifted accept %zu/%zu", ugly_ok,
              cases, no_identity, shift_ok, shift_checks)};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Result determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "calcforge_acceptance_det";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::ostringstream out, err;
  int codes[2];
  const char* jobs[2] = {"1", "8"};
  for (int k = 0; k < 2; ++k)
    codes[k] = cf::cli::run({"gen", "--mode", "bwd", "--count", "1000", "--seed", "42", "--jobs",
                             jobs[k], "--out", (dir / (std::string("j") + jobs[k])).string()},
                            out, err);
  const std::string a = slurp(dir / "j1"), b = slurp(dir / "j8");
  fs::remove_all(dir);
  const auto lines = std::count(a.begin(), a.end(), '\n');
  return {codes[0] == 0 && codes[1] == 0 && lines == 1000 && a == b,
          fmt("exit %d/%d, %ld lines, %zu bytes, identical=%s", codes[0], codes[1], long(lines),
              a.size(), a == b ? "yes" : "no")};
}

// Each mutation makes the text malformed by construction.
std::vector<std::string> fuzz_corpus(const std::vector<CorpusPair>& base) {
  static const char* kJunk[] = {"$", "#", "@", "[", "]", "{", "\x01", "\xff", "\"", ";", "!"};
  static const char* kOps[] = {"+", "*", "/", "^"};
  cf::Rng rng(0xf022);
  std::vector<std::string> out;
  for (std::size_t i = 0; out.size() < 1000; ++i) {
    std::string s = cf::print_infix(base[i % base.size()].problem);
    const std::size_t at = rng.index(s.size() + 1);
    switch (i % 10) {
      case 0: s.insert(at, "("); break;
      case 1: s += std::string(" ") + kOps[rng.index(4)]; break;
      case 2: s.insert(at, " t "); break;
      case 3: s.insert(at, kJunk[rng.index(std::size(kJunk))]); break;
      case 4: s = std::string(kOps[rng.index(3) + 1]) + " " + s; break;
      case 5: {
        auto p = s.find('(');
        s = p == std::string::npos ? s + ")" : s.substr(0, p) + "(" + s.substr(p);
        break;
      }
      case 6: s += " x"; break;
      case 7: s = std::string(300 + rng.index(200), '(') + "x" + std::string(300, ')'); break;
      case 8: s = (rng.bernoulli(0.5) ? "" : "  \t"); break;
      case 9: s.insert(at, std::string(" ") + kOps[rng.index(4)] + " " + kOps[rng.index(3) + 1] + " "); break;
    }
    out.push_back(std::move(s));
  }
  return out;
}

Result robustness(const Corpora& c) {
  const auto corpus = fuzz_corpus(c.bwd);
  std::size_t diagnosed = 0, parsed = 0, crashed = 0, gated = 0;
  for (const std::string& s : corpus) {
    try {
      auto r = cf::well_formed(s);
      if (auto* m = std::get_if<cf::MalformedInput>(&r)) {
        diagnosed += m->offset <= s.size() && !m->reason.empty();
      } else {
        ++parsed;
      }
      gated += cf::check_integral_candidate(c.bwd[0].problem, s).outcome == CheckOutcome::Malformed;
    } catch (...) {
      ++crashed;
    }
  }
  return {diagnosed == corpus.size() && crashed == 0 && gated == corpus.size(),
          fmt("%zu cases: %zu diagnosed, %zu parsed, %zu escaped exceptions, %zu rejected by the "
              "verifier gate",
              corpus.size(), diagnosed, parsed, crashed, gated)};
}

}  // namespace

int main() {
  int failed = 0;
  auto report = [&](int id, const char* name, const std::function<Result()>& fn) {
    const auto t0 = Clock::now();
    Result r;
    try {
      r = fn();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s criterion %d %s [%.1f s]: %s\n", r.pass ? "PASS" : "FAIL", id, name,
                seconds_since(t0), r.detail.c_str());
    std::fflush(stdout);
    failed += !r.pass;
  };

  report(1, "worked examples", worked_examples);
  const auto t0 = Clock::now();
  const Corpora c = build_corpora();
  const double gen_secs = seconds_since(t0);
  std::printf("     corpora built in %.1f s: BWD %zu FWD %zu IBP %zu UGLY %zu COMBO %zu PERTURB %zu\n",
              gen_secs, c.bwd.size(), c.fwd.size(), c.ibp.size(), c.ugly.size(), c.combo.size(),
              c.perturb.size());
  report(2, "corpus soundness", [&] { return corpus_soundness(c, gen_secs); });
  report(3, "perturbation suite", [&] { return perturbation(c); });
  report(4, "size asymmetry", [&] { return size_asymmetry(c); });
  report(5, "derivative growth", growth);
  report(6, "ODE construction", ode_construction);
  report(7, "verification invariances", [&] { return invariances(c); });
  report(8, "determinism", determinism);
  report(9, "malformed-input robustness", [&] { return robustness(c); });
  std::printf("%d of 9 criteria failed\n", failed);
  return failed ? 1 : 0;
}
