#include <gtest/gtest.h>

#include <cmath>

#include "calcforge/canonical.hpp"
#include "calcforge/eval.hpp"
#include "calcforge/expr.hpp"
#include "calcforge/parse.hpp"
#include "testing.hpp"

namespace calcforge {
namespace {

using testing::P;

TEST(Parse, PythagoreanSum) {
  Expr e = P("sin(x)^2 + cos(x)^2");
  ASSERT_EQ(e.op(), Op::Add);
  EXPECT_EQ(e.lhs(), pow(sin(var_x()), 2));
  EXPECT_EQ(e.rhs(), pow(cos(var_x()), 2));
}

TEST(Parse, Leaf) { EXPECT_EQ(P("x"), var_x()); }

TEST(Parse, NestedSineChain) {
  Expr e = P("sin(sin(sin(sin(x))))");
  EXPECT_EQ(e.depth(), 5u);
  Expr cur = e;
  for (int i = 0; i < 4; ++i) {
    ASSERT_EQ(cur.op(), Op::Sin);
    cur = cur.child();
  }
  EXPECT_EQ(cur, var_x());
}

TEST(Parse, PrecedenceAndAssociativity) {
  EXPECT_EQ(P("1 - x - 2"), (integer(1) - var_x()) - integer(2));
  EXPECT_EQ(P("x/2*3"), (var_x() / integer(2)) * integer(3));
  EXPECT_EQ(P("x^2^3"), pow(var_x(), pow(integer(2), integer(3))));
  // Unary minus binds tighter than '^' in this grammar.
  EXPECT_EQ(P("-x^2"), pow(neg(var_x()), 2));
  EXPECT_EQ(P("-3"), integer(-3));
  EXPECT_EQ(P("2^-1"), pow(integer(2), integer(-1)));
}

TEST(Parse, Errors) {
  auto offset_of = [](const char* text, ParseOptions o = {}) -> long {
    try {
      parse(text, o);
    } catch (const ParseError& err) {
      return static_cast<long>(err.offset());
    }
    return -1;
  };
  EXPECT_EQ(offset_of("sin(x"), 5);
  EXPECT_EQ(offset_of("x + * 2"), 4);
  EXPECT_EQ(offset_of("x + t"), 4);
  EXPECT_EQ(offset_of(""), 0);
  EXPECT_EQ(offset_of("sin x"), 4);
  EXPECT_EQ(offset_of("99999999999999999999"), 0);
  ParseOptions no_c;
  no_c.allow_param = false;
  EXPECT_EQ(offset_of("x + c", no_c), 4);
  EXPECT_EQ(offset_of("y"), 0);
  ParseOptions ode;
  ode.allow_ode = true;
  EXPECT_EQ(parse("x*y' - y", ode), var_x() * var_dy() - var_y());
  EXPECT_NE(offset_of(std::string(2000, '(').c_str()), -1);
}

TEST(Print, Examples) {
  EXPECT_EQ(print_infix(var_x()), "x");
  Expr u = exp(exp(var_x()));
  EXPECT_EQ(print_infix(pow(sin(u), 2) + pow(cos(u), 2)),
            "sin(exp(exp(x)))^2 + cos(exp(exp(x)))^2");
  EXPECT_EQ(print_infix(neg(integer(3))), "-3");
  EXPECT_EQ(print_infix(neg(pow(var_x(), 2))), "-(x^2)");
  EXPECT_EQ(print_infix(var_x() - (var_x() - integer(1))), "x - (x - 1)");
  EXPECT_EQ(print_infix(pow(integer(-2), 3)), "(-2)^3");
  EXPECT_EQ(print_infix(var_x() * integer(-2)), "x*(-2)");
}

TEST(Tokens, Examples) {
  EXPECT_EQ(to_prefix_tokens(var_x() + integer(1)),
            (std::vector<std::string>{"add", "x", "1"}));
  EXPECT_EQ(to_prefix_tokens(integer(2) * sin(var_x())),
            (std::vector<std::string>{"mul", "2", "sin", "x"}));
  EXPECT_EQ(to_prefix_string(var_x() - integer(-3)), "sub x -3");
}

TEST(Tokens, BadSequences) {
  EXPECT_THROW(from_prefix_string("add x"), ParseError);
  EXPECT_THROW(from_prefix_string("x x"), ParseError);
  EXPECT_THROW(from_prefix_string("frob x"), ParseError);
}

TEST(RoundTrip, RandomTrees) {
  Rng rng(20240501);
  for (int i = 0; i < 10000; ++i) {
    Expr e = testing::random_tree(rng, 12, true);
    const std::string text = print_infix(e);
    ASSERT_EQ(parse(text), e) << text;
    ASSERT_EQ(from_prefix_tokens(to_prefix_tokens(e)), e) << text;
    const ExprMetrics m = metrics(e);
    ASSERT_EQ(m.token_count, to_prefix_tokens(e).size());
    ASSERT_GE(m.token_count, m.node_count);
    ASSERT_LE(m.depth, m.node_count);
  }
}

TEST(Eval, Examples) {
  Expr u = exp(exp(var_x()));
  auto v = eval_at(pow(sin(u), 2) + pow(cos(u), 2), 0.7);
  ASSERT_TRUE(v);
  EXPECT_NEAR(*v, 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(*eval_at(pow(var_x(), 2), 3.0), 9.0);
  EXPECT_FALSE(eval_at(log(var_x()), -1.0));
  EXPECT_FALSE(eval_at(sqrt(var_x()), -1.0));
  EXPECT_FALSE(eval_at(integer(1) / var_x(), 0.0));
  EXPECT_FALSE(eval_at(exp(exp(var_x())), 10.0));  // overflow
  EXPECT_FALSE(eval_at(pow(var_x(), P("1/3")), -8.0));
  EXPECT_FALSE(eval_at(param_c() + var_x(), 1.0));  // c not supplied
  EXPECT_DOUBLE_EQ(*eval_at(param_c() * var_x(), 2.0, 3.0), 6.0);
}

TEST(Canonicalize, Examples) {
  EXPECT_EQ(canonicalize(P("1 + x")), canonicalize(P("x + 1")));
  EXPECT_EQ(canonicalize(P("2*(3*x)")), P("6*x"));
  EXPECT_EQ(canonicalize(P("x - x")), integer(0));
  EXPECT_EQ(canonicalize(P("--x")), var_x());
  EXPECT_EQ(canonicalize(P("x*1 + 0")), var_x());
  EXPECT_EQ(canonicalize(P("x*0")), integer(0));
  EXPECT_EQ(canonicalize(P("x^1")), var_x());
  EXPECT_EQ(canonicalize(P("x*x/x")), var_x());
  EXPECT_EQ(canonicalize(P("exp(x)*exp(2*x)")), P("exp(3*x)"));
  EXPECT_EQ(canonicalize(P("exp(x)^2")), P("exp(2*x)"));
  EXPECT_EQ(canonicalize(P("x/2 + x/2")), var_x());
  EXPECT_EQ(canonicalize(P("2*x + 2")), P("2*x + 2"));
  EXPECT_EQ(canonicalize(P("(2*x + 2)*(x + 1)")), P("2*(x + 1)^2"));
  EXPECT_EQ(canonicalize(P("sin(-x)")), P("-sin(x)"));
  EXPECT_EQ(canonicalize(P("cos(-2*x)")), P("cos(2*x)"));
  EXPECT_EQ(canonicalize(P("sqrt(4)")), integer(2));
  EXPECT_EQ(canonicalize(P("1/0")), P("0^(-1)"));
}

TEST(Canonicalize, IdempotentAndValuePreserving) {
  Rng rng(7);
  int compared = 0;
  for (int i = 0; i < 3000; ++i) {
    Expr e = testing::random_tree(rng, 10);
    Expr c = canonicalize(e);
    ASSERT_EQ(canonicalize(c), c) << print_infix(e) << "  ->  " << print_infix(c);
    ASSERT_EQ(parse(print_infix(c)), c);
    for (double x : {-2.3, -0.4, 0.35, 1.7, 4.1}) {
      Point p;
      p.x = x;
      auto a = eval_scaled(e, p);
      // Skip ill-conditioned points (huge intermediates make trig noise).
      if (!a || a->scale > 1e8) continue;
      auto b = eval_at(c, x);
      ASSERT_TRUE(b) << print_infix(e) << " -> " << print_infix(c) << " at " << x;
      // Rounding error is bounded by the largest intermediate magnitude.
      const double tol = 1e-9 * (1.0 + std::fabs(a->value) + a->scale);
      ASSERT_NEAR(*b, a->value, tol)
          << print_infix(e) << " -> " << print_infix(c) << " at " << x;
      ++compared;
    }
  }
  EXPECT_GT(compared, 3000);
}

}  // namespace
}  // namespace calcforge
