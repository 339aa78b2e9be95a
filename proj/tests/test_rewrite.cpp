#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_dec_float.hpp>
#include <cmath>

#include "calcforge/canonical.hpp"
#include "calcforge/eval.hpp"
#include "calcforge/oracle.hpp"
#include "calcforge/parse.hpp"
#include "calcforge/rewrite.hpp"
#include "testing.hpp"

namespace calcforge {
namespace {

using testing::C;
using testing::P;
using HP = boost::multiprecision::cpp_dec_float_50;

// Direct 50-digit evaluation of the disguised-zero expression, written out
// by hand rather than through the expression evaluator.
HP disguised_zero_hp(const HP& x) {
  using boost::multiprecision::cos;
  using boost::multiprecision::exp;
  using boost::multiprecision::pow;
  using boost::multiprecision::sin;
  const HP ex = exp(x);
  const HP e2x = exp(2 * x);
  const HP a1 = (e2x - 1) / (2 * pow(cos(sin(x)), 2) - 1);
  const HP a2 = (ex + 1) * (ex - 1) / cos(2 * sin(x));
  const HP cube = pow(x * x * x + 3 * x * x + 3 * x + 1, HP(1) / 3);
  const HP a3 = (e2x - 1) / (1 - 2 * pow(sin(sin(x)), 2));
  return sin(ex + a1) - cos(a2) * sin(ex) - cos(exp(cube - 1)) * sin(a3);
}

TEST(HighPrecision, DisguisedZeroVanishesOnItsDomain) {
  for (int i = 0; i <= 60; ++i) {
    const HP x = HP(-0.95) + HP(i) / 20;  // [-0.95, 2.05]
    EXPECT_LT(boost::multiprecision::abs(disguised_zero_hp(x)), HP("1e-35"))
        << x.str();
  }
}

TEST(Oracle, DisguisedZeroIsEquivalentToZero) {
  const EquivalenceVerdict v = numeric_equiv(P(testing::kDisguisedZero), integer(0), 42);
  EXPECT_TRUE(v.equivalent()) << v.reason;
  EXPECT_GE(v.points_tested, 20u);
}

TEST(Oracle, DistinctExpressionsGiveReproducibleWitness) {
  const Expr a = var_x(), b = var_x() + 1;
  const EquivalenceVerdict v = numeric_equiv(a, b, 3);
  ASSERT_TRUE(v.not_equivalent());
  ASSERT_TRUE(v.witness.has_value());
  EXPECT_DOUBLE_EQ(*eval_at(a, v.witness->x), v.witness->lhs);
  EXPECT_DOUBLE_EQ(*eval_at(b, v.witness->x), v.witness->rhs);
  const EquivalenceVerdict again = numeric_equiv(a, b, 3);
  EXPECT_EQ(again.witness->x, v.witness->x);
}

TEST(Oracle, EmptyDomainIsUndetermined) {
  const EquivalenceVerdict v = numeric_equiv(P("sqrt(-1 - x^2)"), integer(0), 1);
  EXPECT_TRUE(v.undetermined());
  EXPECT_EQ(v.points_tested, 0u);
  EXPECT_FALSE(v.reason.empty());
}

TEST(Oracle, ParameterIsSampled) {
  EXPECT_TRUE(numeric_equiv(P("c*x + c"), P("c*(x + 1)"), 5).equivalent());
  EXPECT_TRUE(numeric_equiv(P("c*x"), P("x"), 5).not_equivalent());
}

TEST(Oracle, SelfEquivalence) {
  Rng rng(99);
  int checked = 0;
  for (int i = 0; i < 400; ++i) {
    const Expr e = testing::random_tree(rng, 8);
    const EquivalenceVerdict v = numeric_equiv(e, e, i);
    // Identical expressions can never disagree at a valid point; when the
    // real domain is thin the quorum may not be reached.
    EXPECT_FALSE(v.not_equivalent()) << print_infix(e);
    if (v.equivalent()) ++checked;
  }
  EXPECT_GT(checked, 200);
}

TEST(Oracle, CanonicalEqualityImpliesEquivalence) {
  Rng rng(1234);
  int compared = 0;
  for (int i = 0; i < 1000; ++i) {
    const Expr e = testing::random_tree(rng, 8);
    const EquivalenceVerdict v = numeric_equiv(e, canonicalize(e), i);
    EXPECT_FALSE(v.not_equivalent()) << print_infix(e) << "  vs  " << print_infix(canonicalize(e));
    compared += v.equivalent();
  }
  EXPECT_GT(compared, 500);
}

TEST(Simplify, Examples) {
  EXPECT_EQ(simplify(P(testing::kDisguisedOne)), integer(1));
  EXPECT_EQ(simplify(P("x - x")), integer(0));
  EXPECT_EQ(simplify(P("2*cos(sin(x))^2 - 1")), C("cos(2*sin(x))"));
  EXPECT_EQ(simplify(P("1 - 2*sin(x)^2")), C("cos(2*x)"));
  EXPECT_EQ(simplify(P("x*sin(x)^2 + x*cos(x)^2")), var_x());
  EXPECT_EQ(simplify(P("3 + sin(x^2)^2 + cos(x^2)^2")), integer(4));
  EXPECT_EQ(simplify(P("exp(log(x + 2))")), C("x + 2"));
  EXPECT_EQ(simplify(P("log(exp(sin(x)))")), C("sin(x)"));
  EXPECT_EQ(simplify(P("(exp(x) + 1)*(exp(x) - 1)")), C("exp(2*x) - 1"));
  EXPECT_EQ(simplify(P("(x^3 + 3*x^2 + 3*x + 1)^(1/3) - 1")), var_x());
  EXPECT_EQ(simplify(P("sqrt(exp(x)^2)")), C("exp(x)"));
  EXPECT_EQ(simplify(P("sqrt(x^2)")), C("sqrt(x^2)"));  // sign unknown
  EXPECT_EQ(simplify(P("sin(x)/cos(x)")), C("tan(x)"));
  EXPECT_EQ(simplify(P("sin(x)*cos(x^2) + cos(x)*sin(x^2)")), C("sin(x^2 + x)"));
}

TEST(Simplify, DoubleAngleAgreesNumerically) {
  const Expr out = simplify(P("2*cos(sin(x))^2 - 1"));
  Rng rng(20);
  for (int i = 0; i < 20; ++i) {
    const double x = rng.uniform(-10, 10);
    EXPECT_NEAR(*eval_at(out, x), std::cos(2 * std::sin(x)), 1e-12);
  }
}

TEST(Simplify, DisguisedZeroRewritesToLiteralZero) {
  EXPECT_EQ(simplify(P(testing::kDisguisedZero)), integer(0));
}

TEST(Simplify, NeverGrowsAndPreservesValues) {
  Rng rng(31337);
  int compared = 0;
  for (int i = 0; i < 2000; ++i) {
    const Expr e = testing::random_tree(rng, 10);
    const Expr s = simplify(e);
    ASSERT_LE(s.size(), e.size()) << print_infix(e) << " -> " << print_infix(s);
    for (double x : {-2.7, -0.6, 0.3, 1.4, 3.9}) {
      Point p;
      p.x = x;
      auto a = eval_bounded(e, p);
      if (!a || a->error > 1e-9 * (1 + std::fabs(a->value))) continue;
      auto b = eval_at(s, x);
      ASSERT_TRUE(b) << print_infix(e) << " -> " << print_infix(s) << " at " << x;
      ASSERT_NEAR(*b, a->value, 1e-9 * (1 + std::fabs(a->value)))
          << print_infix(e) << " -> " << print_infix(s) << " at " << x;
      ++compared;
    }
  }
  EXPECT_GT(compared, 1000);
}

TEST(Simplify, UsesRulesFromCustomSet) {
  const RuleSet rs = RuleSet::parse("tan_sq: 1 + tan(?a)^2 => cos(?a)^(-2)\n");
  // Ties are not rewritten; only strictly smaller results are kept.
  EXPECT_EQ(simplify(P("1 + tan(x)^2"), rs), C("tan(x)^2 + 1"));
  const RuleSet shrink = RuleSet::parse("[simplify]\nsin(?a)^2 + cos(?a)^2 => 1\n");
  EXPECT_EQ(simplify(P(testing::kDisguisedOne), shrink), integer(1));
}

TEST(IsZero, Examples) {
  const EquivalenceVerdict one = is_zero(P(testing::kDisguisedOne) - integer(1), 1);
  EXPECT_TRUE(one.equivalent());
  const EquivalenceVerdict sinx = is_zero(P("sin(x)"), 1);
  EXPECT_TRUE(sinx.not_equivalent());
  const EquivalenceVerdict pyth = is_zero(P("sin(x)^2 + cos(x)^2 - 1"), 1);
  EXPECT_TRUE(pyth.equivalent());
  EXPECT_TRUE(pyth.symbolic);
  // Equal but not provably so by the rule set: the probabilistic flavor.
  const EquivalenceVerdict expand = is_zero(P("(x + 1)^2 - x^2 - 2*x - 1"), 1);
  EXPECT_TRUE(expand.equivalent());
  EXPECT_FALSE(expand.symbolic);
}

TEST(Rules, BuiltinSetLoadsAndValidates) {
  const RuleSet& rs = RuleSet::builtin();
  EXPECT_GE(rs.simplify_rules().size(), 10u);
  EXPECT_GE(rs.uglify_rules().size(), 8u);
  for (const RewriteRule& r : rs.simplify_rules()) {
    EXPECT_TRUE(check_rule(r, 7).equivalent()) << r.name;
    EXPECT_TRUE(r.fresh_variables().empty()) << r.name;
  }
  for (const RewriteRule& r : rs.uglify_rules()) EXPECT_TRUE(check_rule(r, 7).equivalent()) << r.name;
}

TEST(Rules, ParseErrorsAndBadIdentities) {
  EXPECT_THROW(RuleSet::parse("sin(?a) => "), RuleError);
  EXPECT_THROW(RuleSet::parse("sin(?a) cos(?a)"), RuleError);
  const RuleSet bogus = RuleSet::parse("wrong: sin(?a) => cos(?a)");
  EXPECT_THROW(validate_rules(bogus), RuleError);
  const RuleSet guarded = RuleSet::parse("g: sqrt(?a^2) => ?a if nonneg(?a)");
  ASSERT_EQ(guarded.simplify_rules().size(), 1u);
  EXPECT_EQ(guarded.simplify_rules()[0].nonneg, std::vector<std::string>{"a"});
  EXPECT_NO_THROW(validate_rules(guarded));
}

TEST(Match, AssociativeCommutative) {
  ParseOptions po;
  po.allow_wild = true;
  auto m = match(parse("cos(2*?a)", po), P("cos(2*sin(x))"));
  ASSERT_FALSE(m.empty());
  EXPECT_EQ(m[0].at("a"), P("sin(x)"));
  m = match(parse("?a + ?b", po), P("exp(x) + 1"));
  EXPECT_EQ(m.size(), 2u);
  m = match(parse("?a^2 - 1", po), P("x^2 - 1"));
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m[0].at("a"), var_x());
  EXPECT_TRUE(match(parse("sin(?a)", po), P("cos(x)")).empty());
}

TEST(Nonneg, Analysis) {
  EXPECT_TRUE(provably_nonneg(P("exp(x)")));
  EXPECT_TRUE(provably_nonneg(P("x^2 + 1")));
  EXPECT_TRUE(provably_nonneg(P("sqrt(x)*3")));
  EXPECT_FALSE(provably_nonneg(P("x")));
  EXPECT_FALSE(provably_nonneg(P("x^2 - 1")));
}

}  // namespace
}  // namespace calcforge
