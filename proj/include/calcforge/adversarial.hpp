#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "calcforge/corpus.hpp"
#include "calcforge/expr.hpp"
#include "calcforge/generate.hpp"
#include "calcforge/rewrite.hpp"
#include "calcforge/rng.hpp"

namespace calcforge {

struct UglifyRecipe {
  int steps = 2;                        // rewrites to apply, at least 1
  std::vector<std::string> identities;  // uglify rule names; empty means all
  std::uint64_t seed = 0;
};

class UglifyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Applies `steps` uglifying identities at random subterms of the raw tree.
/// Each step must grow the token count; variables that appear only on a
/// rule's right side get small random expressions in x. The result is
/// oracle-checked against e and the whole recipe is redrawn if the check
/// is not Equivalent. Throws UglifyError when nothing applies.
Expr uglify(const Expr& e, const UglifyRecipe& recipe);
Expr uglify(const Expr& e, const UglifyRecipe& recipe, const RuleSet& rules);

/// UGLY pairs: small BWD-style bases (F of at most `base_nodes` internal
/// nodes, problem simplify(F')) with the problem uglified.
GenResult gen_trick_pairs(const GenConfig& cfg, std::size_t count, int steps = 2,
                          int base_nodes = 3);

/// One mutation of a BWD problem: an integer constant changed, sin and cos
/// swapped, an integer exponent changed, or add and mul swapped at one
/// node. The mutated problem must differ canonically and be NotEquivalent
/// to the original. The original solution becomes the wrong candidate.
std::optional<CorpusPair> perturb(const CorpusPair& p, Rng& rng);
GenResult gen_perturb(const GenConfig& cfg, const std::vector<CorpusPair>& bwd,
                      std::size_t count);

/// Permutations of the factors of the largest chain of nested mul nodes,
/// keeping the tree shape: all non-identity orders when there are at most
/// `cap` of them, else `cap` distinct seeded samples. Throws
/// std::invalid_argument when e has no mul node.
std::vector<Expr> reorder_products(const Expr& e, Rng& rng, std::size_t cap = 24);

/// (f + g, F + G), canonicalized and oracle-checked; nullopt on failure.
std::optional<CorpusPair> combine_pairs(const CorpusPair& fwd, const CorpusPair& bwd,
                                        std::uint64_t seed);
GenResult gen_combo(const GenConfig& cfg, const std::vector<CorpusPair>& fwd,
                    const std::vector<CorpusPair>& bwd, std::size_t count);

}  // namespace calcforge
