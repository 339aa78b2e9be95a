#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "calcforge/calculus.hpp"
#include "calcforge/corpus.hpp"
#include "calcforge/generate.hpp"
#include "calcforge/oracle.hpp"
#include "calcforge/rewrite.hpp"
#include "testing.hpp"

namespace calcforge {
namespace {

using testing::C;
using testing::P;

std::string jsonl(const std::vector<CorpusPair>& pairs) {
  std::ostringstream out;
  write_jsonl(out, pairs);
  return out.str();
}

TEST(Sample, SingleAddOverTwoLeaves) {
  GenConfig cfg;
  cfg.max_internal_nodes = 1;
  cfg.op_weights = {{Op::Add, 1}};
  cfg.leaf_sampler = [](Rng& rng) { return rng.bernoulli(0.5) ? var_x() : integer(1); };
  const std::set<std::string> allowed = {"x + x", "x + 1", "1 + x", "1 + 1"};
  std::set<std::string> seen;
  Rng rng(5);
  for (int i = 0; i < 400; ++i) {
    const Expr e = sample_expr(cfg, rng);
    EXPECT_EQ(internal_nodes(e), 1u);
    seen.insert(print_infix(e));
  }
  // Leaf repeats are redrawn a bounded number of times, so x + x and 1 + 1
  // are rare but legal.
  for (const auto& s : seen) EXPECT_TRUE(allowed.count(s)) << s;
  EXPECT_TRUE(seen.count("x + 1"));
  EXPECT_TRUE(seen.count("1 + x"));
}

TEST(Sample, DeterministicAndBounded) {
  GenConfig cfg;
  Rng a(77), b(77);
  for (int i = 0; i < 200; ++i) {
    const Expr e = sample_expr(cfg, a);
    EXPECT_EQ(e, sample_expr(cfg, b));
    EXPECT_LE(internal_nodes(e), 15u);
    EXPECT_GE(internal_nodes(e), 1u);
    for (const Expr& s : subterms(e)) {
      if (s.op() != Op::Int) continue;
      EXPECT_NE(s.value(), 0);
      EXPECT_LE(std::abs(s.value()), 5);
    }
  }
}

TEST(Sample, ExactSize) {
  GenConfig cfg;
  Rng rng(3);
  for (int n : {1, 4, 9, 30}) EXPECT_EQ(internal_nodes(sample_expr_exact(cfg, n, rng)), size_t(n));
}

// Histogram of internal node counts over 10^4 draws at the default config.
// Set CALCFORGE_UPDATE_GOLDEN=1 to rewrite the frozen file.
TEST(Sample, NodeCountHistogramMatchesGolden) {
  GenConfig cfg;
  Rng rng(20261014);
  std::map<std::size_t, std::size_t> hist;
  for (int i = 0; i < 10000; ++i) ++hist[internal_nodes(sample_expr(cfg, rng))];
  std::ostringstream now;
  for (const auto& [n, k] : hist) now << n << ' ' << k << '\n';

  const std::string path = std::string(CALCFORGE_GOLDEN_DIR) + "/node_histogram.txt";
  if (std::getenv("CALCFORGE_UPDATE_GOLDEN")) {
    std::ofstream(path) << now.str();
    GTEST_SKIP() << "golden file rewritten";
  }
  std::ifstream in(path);
  ASSERT_TRUE(in) << "missing " << path;
  std::stringstream golden;
  golden << in.rdbuf();
  EXPECT_EQ(now.str(), golden.str());
}

TEST(Config, ParseAndValidate) {
  GenConfig cfg = parse_gen_config(
      "# comment\nseed = 9\nmax_internal_nodes = 4\nweight.sin = 2.5\nconst_min = -2\n");
  EXPECT_EQ(cfg.seed, 9u);
  EXPECT_EQ(cfg.max_internal_nodes, 4);
  EXPECT_DOUBLE_EQ(cfg.op_weights.at(Op::Sin), 2.5);
  EXPECT_EQ(cfg.const_min, -2);
  EXPECT_THROW(parse_gen_config("const_max = 9\n"), ConfigError);
  EXPECT_THROW(parse_gen_config("weight.sin = -1\n"), ConfigError);
  EXPECT_THROW(parse_gen_config("bogus = 1\n"), ConfigError);
  GenConfig none;
  for (auto& [op, w] : none.op_weights) w = 0;
  EXPECT_THROW(none.validate(), ConfigError);
}

TEST(Corpus, DedupKey) {
  EXPECT_EQ(dedup_key(P("x + 1")), dedup_key(P("1 + x")));
  EXPECT_NE(dedup_key(P("x")), dedup_key(P("x + 1")));
}

TEST(Corpus, JsonRoundTrip) {
  CorpusPair p{"bwd-000001", Source::BWD, P("cos(x)*x^2"), P("sin(x)"), std::nullopt, false, 17};
  CorpusPair q{"perturb-000001-p", Source::PERTURB, P("cos(2*x)"), std::nullopt, P("sin(x)"),
               false, 3};
  for (const CorpusPair& r : {p, q}) {
    const CorpusPair back = from_json_line(to_json_line(r));
    EXPECT_EQ(back.id, r.id);
    EXPECT_EQ(back.source, r.source);
    EXPECT_EQ(back.problem, r.problem);
    EXPECT_EQ(back.solution.has_value(), r.solution.has_value());
    if (r.solution) EXPECT_EQ(*back.solution, *r.solution);
    EXPECT_EQ(back.wrong_candidate.has_value(), r.wrong_candidate.has_value());
    EXPECT_EQ(back.seed, r.seed);
  }
  std::istringstream bad(to_json_line(p) + "\n\n{\"id\": 3\n");
  try {
    read_jsonl(bad);
    FAIL() << "expected CorpusError";
  } catch (const CorpusError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(Bwd, WorkedExamples) {
  EXPECT_EQ(simplify(differentiate(C("x"))), C("1"));
  EXPECT_EQ(canonicalize(simplify(differentiate(C("sin(sin(sin(sin(x))))")))),
            C("cos(x)*cos(sin(x))*cos(sin(sin(x)))*cos(sin(sin(sin(x))))"));
}

TEST(Bwd, PairsDifferentiateBackAndAreUnique) {
  GenConfig cfg;
  cfg.seed = 42;
  const GenResult r = gen_bwd(cfg, 150);
  ASSERT_EQ(r.pairs.size(), 150u);
  std::set<std::string> keys;
  for (const CorpusPair& p : r.pairs) {
    ASSERT_TRUE(p.solution);
    EXPECT_TRUE(numeric_equiv(differentiate(*p.solution), p.problem, 99).equivalent())
        << print_infix(p.problem);
    EXPECT_TRUE(keys.insert(dedup_key(p)).second);
  }
  EXPECT_EQ(r.stats.emitted, 150u);
  EXPECT_GE(r.stats.attempts, 150u);
}

TEST(Bwd, DeterministicAcrossRunsAndThreads) {
  GenConfig cfg;
  cfg.seed = 11;
  const std::string a = jsonl(gen_bwd(cfg, 120).pairs);
  cfg.jobs = 3;
  const std::string b = jsonl(gen_bwd(cfg, 120).pairs);
  EXPECT_EQ(a, b);
  cfg.seed = 12;
  EXPECT_NE(a, jsonl(gen_bwd(cfg, 120).pairs));
}

TEST(Fwd, TableHitAndGiveUp) {
  auto F = integrate_heuristic(C("cos(x)"));
  ASSERT_TRUE(F);
  EXPECT_EQ(canonicalize(*F), C("sin(x)"));
  EXPECT_FALSE(integrate_heuristic(C("exp(x^2)")));
}

TEST(Fwd, PairsVerifyAndReportYield) {
  GenConfig cfg;
  cfg.seed = 42;
  const GenResult r = gen_fwd(cfg, 60);
  ASSERT_EQ(r.pairs.size(), 60u);
  for (const CorpusPair& p : r.pairs)
    EXPECT_TRUE(numeric_equiv(differentiate(*p.solution), p.problem, 5).equivalent());
  EXPECT_GT(r.stats.discarded.at("no_answer"), 0u);
  EXPECT_GT(r.stats.yield(), 0.0);
  EXPECT_LT(r.stats.yield(), 1.0);
}

TEST(Ibp, WorkedStep) {
  // f = cos x, F = sin x, G = x, H = x sin x + cos x.
  AttemptResult r = ibp_pair(C("sin(x)"), C("x"), C("x*sin(x) + cos(x)"), 1);
  ASSERT_TRUE(r.pair) << r.reason;
  EXPECT_EQ(canonicalize(r.pair->problem), C("sin(x)"));
  EXPECT_EQ(canonicalize(*r.pair->solution), C("-cos(x)"));
  EXPECT_FALSE(ibp_pair(C("sin(x)"), C("x"), C("x*sin(x)"), 1).pair);
}

TEST(Ibp, PipelineGrowsLedger) {
  GenConfig cfg;
  cfg.seed = 7;
  Ledger ledger(4096, 7);
  ledger.add_all(gen_bwd(cfg, 60).pairs);
  ledger.add_all(gen_fwd(cfg, 60).pairs);
  const std::size_t before = ledger.size();
  const GenResult r = gen_ibp(cfg, ledger, 30);
  ASSERT_EQ(r.pairs.size(), 30u);
  EXPECT_GE(ledger.size(), before + 30);
  for (const CorpusPair& p : r.pairs) {
    EXPECT_EQ(p.source, Source::IBP);
    EXPECT_TRUE(numeric_equiv(differentiate(*p.solution), p.problem, 8).equivalent());
  }
  Ledger empty;
  EXPECT_TRUE(gen_ibp(cfg, empty, 5).pairs.empty());
}

TEST(Ledger, ReservoirCapAndLookup) {
  Ledger l(4, 1);
  for (int k = 1; k <= 20; ++k) l.add(C(std::to_string(k) + "*x"), C(std::to_string(k) + "*x^2/2"));
  EXPECT_EQ(l.size(), 4u);
  for (std::size_t i = 0; i < l.size(); ++i) ASSERT_NE(l.find(l.at(i).first), nullptr);
}

TEST(Ode1, PipelineEquationsHoldForTheirFamily) {
  GenConfig cfg;
  cfg.seed = 3;
  const GenResult r = gen_ode(cfg, 15);
  ASSERT_EQ(r.pairs.size(), 15u);
  for (const CorpusPair& p : r.pairs) {
    ASSERT_TRUE(p.solution);
    EXPECT_EQ(count_leaf(*p.solution, Op::Param), 1u);
    EXPECT_TRUE(ode_residual_check(p.problem, *p.solution, 4).equivalent())
        << print_infix(p.problem);
  }
}

}  // namespace
}  // namespace calcforge
