#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "calcforge/expr.hpp"
#include "calcforge/oracle.hpp"

namespace calcforge {

enum class RuleDirection { Simplify, Uglify };

/// pattern => replacement, both in the infix grammar with ?name variables.
/// A replacement may introduce variables absent from the pattern; those are
/// "fresh" and get instantiated by the caller (uglifying rules only).
struct RewriteRule {
  std::string name;
  Expr pattern;
  Expr replacement;
  RuleDirection direction = RuleDirection::Simplify;
  std::vector<std::string> nonneg;  // guard: these variables must be provably >= 0

  std::vector<std::string> fresh_variables() const;
};

class RuleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Ordered rule lists. Read-only once constructed.
class RuleSet {
 public:
  /// Parses the rule-file format: one "[name:] pattern => replacement
  /// [if nonneg(?a)]" per line, '#' comments, and [simplify] / [uglify]
  /// section headers (simplify is the default section). Throws RuleError
  /// with the line number on any malformed line.
  static RuleSet parse(const std::string& text);
  static RuleSet load_file(const std::string& path);

  /// The rules compiled into the binary.
  static const RuleSet& builtin();

  const std::vector<RewriteRule>& simplify_rules() const { return simplify_; }
  const std::vector<RewriteRule>& uglify_rules() const { return uglify_; }

  void add(RewriteRule rule);

 private:
  std::vector<RewriteRule> simplify_;
  std::vector<RewriteRule> uglify_;
};

const std::string& builtin_rules_text();

/// Rule set used by simplify() when none is passed: CALCFORGE_RULES if set
/// (loaded lazily, once), else the built-in set. set_active_rules overrides
/// both and must be called before any concurrent use.
std::shared_ptr<const RuleSet> active_rules();
void set_active_rules(std::shared_ptr<const RuleSet> rules);

/// Numeric check that both sides of a rule agree at random real values of
/// its variables (guarded variables sampled nonnegative).
EquivalenceVerdict check_rule(const RewriteRule& rule, std::uint64_t seed);

/// Oracle-check every rule; throws RuleError naming the first failure.
void validate_rules(const RuleSet& rules, std::uint64_t seed = 1);

using Subst = std::map<std::string, Expr>;

/// All bindings (up to `limit`) under which the canonical form of `pattern`
/// equals the canonical form of `target`, modulo associativity and
/// commutativity of + and *.
std::vector<Subst> match(const Expr& pattern, const Expr& target,
                         std::size_t limit = 16);

/// Substitute bindings for pattern variables and canonicalize.
Expr instantiate(const Expr& e, const Subst& s);

/// Conservative sign analysis: true only when e >= 0 wherever it is defined.
bool provably_nonneg(const Expr& e);

struct SimplifyOptions {
  std::size_t max_passes = 50;
};

/// Canonicalize, then rewrite innermost-first with the simplifying rules in
/// fixed order. A rewrite is kept only when it strictly lowers the token
/// count, so the loop terminates; the result is never larger than the input.
Expr simplify(const Expr& e);
Expr simplify(const Expr& e, const RuleSet& rules, const SimplifyOptions& opts = {});

/// Zero test: symbolic when simplify yields literal 0, otherwise a two-sided
/// numeric comparison of the positive and negative parts of the simplified
/// expression.
EquivalenceVerdict is_zero(const Expr& e, std::uint64_t seed,
                           const OracleOptions& opts = {});
EquivalenceVerdict is_zero(const Expr& e, std::uint64_t seed, const RuleSet& rules,
                           const OracleOptions& opts = {});

}  // namespace calcforge
