#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace calcforge {

/// Node operator. The declaration order is the node-kind rank used by the
/// canonical total order: leaves, then binary operators, then unary ones.
enum class Op : std::uint8_t {
  Int,
  Var,    // the integration variable x
  Param,  // the free parameter c
  Y,      // dependent variable y (ODE equations only)
  DY,     // y' (ODE equations only)
  Wild,   // pattern variable ?name (rewrite rules only)
  Add,
  Sub,
  Mul,
  Div,
  Pow,
  Neg,
  Sin,
  Cos,
  Tan,
  Asin,
  Acos,
  Atan,
  Exp,
  Log,
  Sqrt,
};

constexpr int arity(Op op) {
  if (op <= Op::Wild) return 0;
  if (op <= Op::Pow) return 2;
  return 1;
}
constexpr bool is_leaf(Op op) { return arity(op) == 0; }
constexpr bool is_unary(Op op) { return arity(op) == 1; }
constexpr bool is_binary(Op op) { return arity(op) == 2; }

/// Prefix-token spelling of an operator ("add", "sin", ...). Leaves map to
/// their printed symbol.
std::string_view op_name(Op op);

/// Bit flags describing which leaf kinds occur in a subtree.
enum LeafMask : std::uint8_t {
  kHasVar = 1,
  kHasParam = 2,
  kHasY = 4,
  kHasDY = 8,
  kHasWild = 16,
};

struct Node;

/// Immutable, shared expression tree. Copying an Expr copies a handle.
class Expr {
 public:
  Expr();  // IntConst 0

  Op op() const;
  std::int64_t value() const;      // Int only
  const std::string& name() const; // Wild only
  const Expr& lhs() const;         // binary
  const Expr& rhs() const;         // binary
  const Expr& child() const;       // unary
  const Expr& operand(int i) const;

  /// Number of prefix tokens (one per node).
  std::size_t size() const;
  std::size_t depth() const;
  std::size_t hash() const;
  std::uint8_t leaves() const;

  bool has_var() const { return leaves() & kHasVar; }
  bool has_param() const { return leaves() & kHasParam; }
  bool has_wild() const { return leaves() & kHasWild; }
  bool is_int() const { return op() == Op::Int; }
  bool is_int(std::int64_t v) const { return is_int() && value() == v; }

  bool same_node(const Expr& o) const { return node_ == o.node_; }
  /// Identity of the shared node; stable while any handle is alive.
  const void* id() const { return node_.get(); }

  friend bool operator==(const Expr& a, const Expr& b);
  friend std::strong_ordering operator<=>(const Expr& a, const Expr& b);

 private:
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;

  friend struct Node;
  friend Expr make_node(Op, std::int64_t, std::string, Expr, Expr);
};

struct ExprLess {
  bool operator()(const Expr& a, const Expr& b) const { return (a <=> b) < 0; }
};

struct ExprHash {
  std::size_t operator()(const Expr& e) const { return e.hash(); }
};

// Leaf factories.
Expr integer(std::int64_t v);
Expr var_x();
Expr param_c();
Expr var_y();
Expr var_dy();
Expr wild(std::string name);

/// Raw constructors: no simplification, except that negating an integer
/// literal yields the negative literal (so "-3" has a single tree).
Expr unary(Op op, Expr child);
Expr binary(Op op, Expr lhs, Expr rhs);

Expr neg(Expr e);
Expr sin(Expr e);
Expr cos(Expr e);
Expr tan(Expr e);
Expr asin(Expr e);
Expr acos(Expr e);
Expr atan(Expr e);
Expr exp(Expr e);
Expr log(Expr e);
Expr sqrt(Expr e);
Expr pow(Expr base, Expr exponent);
Expr pow(Expr base, std::int64_t exponent);

Expr operator+(Expr a, Expr b);
Expr operator-(Expr a, Expr b);
Expr operator*(Expr a, Expr b);
Expr operator/(Expr a, Expr b);
Expr operator-(Expr a);
Expr operator+(Expr a, std::int64_t b);
Expr operator-(Expr a, std::int64_t b);
Expr operator*(std::int64_t a, Expr b);

struct ExprMetrics {
  std::size_t token_count = 0;
  std::size_t node_count = 0;
  std::size_t depth = 0;
};

ExprMetrics metrics(const Expr& e);

/// Number of occurrences of leaf `op` in e.
std::size_t count_leaf(const Expr& e, Op op);

/// Replace every leaf of kind `leaf` with `replacement`.
Expr substitute(const Expr& e, Op leaf, const Expr& replacement);

/// Preorder enumeration of subtrees; index 0 is the root.
std::vector<Expr> subterms(const Expr& e);

/// Replace the subtree at preorder index `index` with `replacement`.
Expr replace_at(const Expr& e, std::size_t index, const Expr& replacement);

}  // namespace calcforge
