#include "calcforge/expr.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <stdexcept>

namespace calcforge {

struct Node {
  Op op = Op::Int;
  std::int64_t value = 0;
  std::string name;
  Expr a = Expr(nullptr);
  Expr b = Expr(nullptr);
  std::size_t size = 1;
  std::size_t depth = 1;
  std::size_t hash = 0;
  std::uint8_t leaves = 0;
};

namespace {

std::size_t mix(std::size_t h, std::size_t v) {
  // boost::hash_combine constant, widened
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

const std::shared_ptr<const Node>& zero_node() {
  static const auto n = [] {
    auto node = std::make_shared<Node>();
    node->hash = mix(static_cast<std::size_t>(Op::Int), 0);
    return std::shared_ptr<const Node>(node);
  }();
  return n;
}

}  // namespace

std::string_view op_name(Op op) {
  switch (op) {
    case Op::Int: return "int";
    case Op::Var: return "x";
    case Op::Param: return "c";
    case Op::Y: return "y";
    case Op::DY: return "y'";
    case Op::Wild: return "?";
    case Op::Add: return "add";
    case Op::Sub: return "sub";
    case Op::Mul: return "mul";
    case Op::Div: return "div";
    case Op::Pow: return "pow";
    case Op::Neg: return "neg";
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
    case Op::Tan: return "tan";
    case Op::Asin: return "asin";
    case Op::Acos: return "acos";
    case Op::Atan: return "atan";
    case Op::Exp: return "exp";
    case Op::Log: return "log";
    case Op::Sqrt: return "sqrt";
  }
  return "?";
}

Expr::Expr() : node_(zero_node()) {}

Op Expr::op() const { return node_->op; }
std::int64_t Expr::value() const { return node_->value; }
const std::string& Expr::name() const { return node_->name; }
const Expr& Expr::lhs() const { return node_->a; }
const Expr& Expr::rhs() const { return node_->b; }
const Expr& Expr::child() const { return node_->a; }
const Expr& Expr::operand(int i) const { return i == 0 ? node_->a : node_->b; }
std::size_t Expr::size() const { return node_->size; }
std::size_t Expr::depth() const { return node_->depth; }
std::size_t Expr::hash() const { return node_->hash; }
std::uint8_t Expr::leaves() const { return node_->leaves; }

Expr make_node(Op op, std::int64_t value, std::string name, Expr a, Expr b) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->value = value;
  n->name = std::move(name);
  std::size_t h = mix(0, static_cast<std::size_t>(op));
  switch (arity(op)) {
    case 0:
      if (op == Op::Int) h = mix(h, static_cast<std::size_t>(value));
      if (op == Op::Wild) h = mix(h, std::hash<std::string>{}(n->name));
      if (op == Op::Var) n->leaves = kHasVar;
      if (op == Op::Param) n->leaves = kHasParam;
      if (op == Op::Y) n->leaves = kHasY;
      if (op == Op::DY) n->leaves = kHasDY;
      if (op == Op::Wild) n->leaves = kHasWild;
      break;
    case 1:
      n->size = 1 + a.size();
      n->depth = 1 + a.depth();
      n->leaves = a.leaves();
      h = mix(h, a.hash());
      n->a = std::move(a);
      break;
    default:
      n->size = 1 + a.size() + b.size();
      n->depth = 1 + std::max(a.depth(), b.depth());
      n->leaves = a.leaves() | b.leaves();
      h = mix(mix(h, a.hash()), b.hash());
      n->a = std::move(a);
      n->b = std::move(b);
      break;
  }
  n->hash = h;
  return Expr(std::shared_ptr<const Node>(std::move(n)));
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  if (a.hash() != b.hash() || a.size() != b.size() || a.op() != b.op())
    return false;
  switch (arity(a.op())) {
    case 0:
      return a.value() == b.value() && a.name() == b.name();
    case 1:
      return a.child() == b.child();
    default:
      return a.lhs() == b.lhs() && a.rhs() == b.rhs();
  }
}

std::strong_ordering operator<=>(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  if (a.op() != b.op()) return a.op() <=> b.op();
  switch (arity(a.op())) {
    case 0:
      if (a.op() == Op::Int) return a.value() <=> b.value();
      if (a.op() == Op::Wild) return a.name().compare(b.name()) <=> 0;
      return std::strong_ordering::equal;
    case 1:
      return a.child() <=> b.child();
    default: {
      if (auto c = a.lhs() <=> b.lhs(); c != 0) return c;
      return a.rhs() <=> b.rhs();
    }
  }
}

Expr integer(std::int64_t v) {
  if (v == 0) return Expr();
  return make_node(Op::Int, v, {}, Expr(), Expr());
}

Expr var_x() {
  static const Expr e = make_node(Op::Var, 0, {}, Expr(), Expr());
  return e;
}
Expr param_c() {
  static const Expr e = make_node(Op::Param, 0, {}, Expr(), Expr());
  return e;
}
Expr var_y() {
  static const Expr e = make_node(Op::Y, 0, {}, Expr(), Expr());
  return e;
}
Expr var_dy() {
  static const Expr e = make_node(Op::DY, 0, {}, Expr(), Expr());
  return e;
}
Expr wild(std::string name) {
  return make_node(Op::Wild, 0, std::move(name), Expr(), Expr());
}

Expr unary(Op op, Expr child) {
  if (!is_unary(op)) throw std::invalid_argument("unary: not a unary operator");
  if (op == Op::Neg && child.is_int() &&
      child.value() != std::numeric_limits<std::int64_t>::min())
    return integer(-child.value());
  return make_node(op, 0, {}, std::move(child), Expr());
}

Expr binary(Op op, Expr lhs, Expr rhs) {
  if (!is_binary(op))
    throw std::invalid_argument("binary: not a binary operator");
  return make_node(op, 0, {}, std::move(lhs), std::move(rhs));
}

Expr neg(Expr e) { return unary(Op::Neg, std::move(e)); }
Expr sin(Expr e) { return unary(Op::Sin, std::move(e)); }
Expr cos(Expr e) { return unary(Op::Cos, std::move(e)); }
Expr tan(Expr e) { return unary(Op::Tan, std::move(e)); }
Expr asin(Expr e) { return unary(Op::Asin, std::move(e)); }
Expr acos(Expr e) { return unary(Op::Acos, std::move(e)); }
Expr atan(Expr e) { return unary(Op::Atan, std::move(e)); }
Expr exp(Expr e) { return unary(Op::Exp, std::move(e)); }
Expr log(Expr e) { return unary(Op::Log, std::move(e)); }
Expr sqrt(Expr e) { return unary(Op::Sqrt, std::move(e)); }
Expr pow(Expr base, Expr exponent) {
  return binary(Op::Pow, std::move(base), std::move(exponent));
}
Expr pow(Expr base, std::int64_t exponent) {
  return binary(Op::Pow, std::move(base), integer(exponent));
}

Expr operator+(Expr a, Expr b) {
  return binary(Op::Add, std::move(a), std::move(b));
}
Expr operator-(Expr a, Expr b) {
  return binary(Op::Sub, std::move(a), std::move(b));
}
Expr operator*(Expr a, Expr b) {
  return binary(Op::Mul, std::move(a), std::move(b));
}
Expr operator/(Expr a, Expr b) {
  return binary(Op::Div, std::move(a), std::move(b));
}
Expr operator-(Expr a) { return neg(std::move(a)); }
Expr operator+(Expr a, std::int64_t b) { return std::move(a) + integer(b); }
Expr operator-(Expr a, std::int64_t b) { return std::move(a) - integer(b); }
Expr operator*(std::int64_t a, Expr b) { return integer(a) * std::move(b); }

ExprMetrics metrics(const Expr& e) {
  // One prefix token per node: operators, function names, leaves and signed
  // integers each count once.
  return ExprMetrics{e.size(), e.size(), e.depth()};
}

std::size_t count_leaf(const Expr& e, Op op) {
  switch (arity(e.op())) {
    case 0:
      return e.op() == op ? 1 : 0;
    case 1:
      return count_leaf(e.child(), op);
    default:
      return count_leaf(e.lhs(), op) + count_leaf(e.rhs(), op);
  }
}

Expr substitute(const Expr& e, Op leaf, const Expr& replacement) {
  switch (arity(e.op())) {
    case 0:
      return e.op() == leaf ? replacement : e;
    case 1: {
      Expr c = substitute(e.child(), leaf, replacement);
      return c.same_node(e.child()) ? e : unary(e.op(), std::move(c));
    }
    default: {
      Expr l = substitute(e.lhs(), leaf, replacement);
      Expr r = substitute(e.rhs(), leaf, replacement);
      if (l.same_node(e.lhs()) && r.same_node(e.rhs())) return e;
      return binary(e.op(), std::move(l), std::move(r));
    }
  }
}

namespace {
void collect(const Expr& e, std::vector<Expr>& out) {
  out.push_back(e);
  for (int i = 0; i < arity(e.op()); ++i) collect(e.operand(i), out);
}
}  // namespace

std::vector<Expr> subterms(const Expr& e) {
  std::vector<Expr> out;
  out.reserve(e.size());
  collect(e, out);
  return out;
}

Expr replace_at(const Expr& e, std::size_t index, const Expr& replacement) {
  if (index == 0) return replacement;
  if (index >= e.size()) throw std::out_of_range("replace_at: index");
  std::size_t offset = 1;
  if (is_unary(e.op()))
    return unary(e.op(), replace_at(e.child(), index - offset, replacement));
  if (index < offset + e.lhs().size())
    return binary(e.op(), replace_at(e.lhs(), index - offset, replacement),
                  e.rhs());
  offset += e.lhs().size();
  return binary(e.op(), e.lhs(), replace_at(e.rhs(), index - offset, replacement));
}

}  // namespace calcforge
