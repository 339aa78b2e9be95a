#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "calcforge/corpus.hpp"
#include "calcforge/expr.hpp"
#include "calcforge/oracle.hpp"

namespace calcforge {

struct MalformedInput {
  std::size_t offset = 0;
  std::string reason;
};

/// Parses under the expression grammar with leaves x, integers and, when
/// allowed, c. Never throws on bad input.
std::variant<Expr, MalformedInput> well_formed(std::string_view text, bool allow_param = true);

enum class CheckOutcome { Accept, Reject, Inconclusive, Malformed, Timeout };

std::string_view check_outcome_name(CheckOutcome o);

struct VerificationReport {
  std::string problem_id;
  std::string candidate_text;
  CheckOutcome outcome = CheckOutcome::Inconclusive;
  bool wellformed = true;
  std::optional<EquivalenceVerdict> verdict;  // present iff wellformed and not timed out
  std::optional<MalformedInput> malformed;
  bool simplifier_used = false;  // verdict reached by rewriting to literal 0
  double elapsed_ms = 0.0;
};

struct VerifyOptions {
  std::uint64_t seed = 0x5eed;
  std::chrono::milliseconds timeout{5000};  // zero disables the budget
};

/// Accepts when simplify(d candidate) - simplify(problem) is zero.
VerificationReport check_integral_candidate(const Expr& problem, const Expr& candidate,
                                            const VerifyOptions& opts = {});
VerificationReport check_integral_candidate(const Expr& problem, std::string_view candidate,
                                            const VerifyOptions& opts = {});

/// Accepts when the equation vanishes under y := candidate, y' := its
/// derivative, sampled over x and (if present) c.
VerificationReport check_ode_candidate(const Expr& equation, const Expr& candidate,
                                       const VerifyOptions& opts = {});
VerificationReport check_ode_candidate(const Expr& equation, std::string_view candidate,
                                       const VerifyOptions& opts = {});

/// Checks a corpus record against a candidate, by source: ODE1 records use
/// the substitution check, everything else the integral check.
VerificationReport check_record(const CorpusPair& problem, std::string_view candidate,
                                const VerifyOptions& opts = {});

struct CandidateLine {
  std::string id;
  std::string candidate;
};

/// "id<whitespace>candidate" per line; blank lines and '#' lines skipped.
std::vector<CandidateLine> read_candidates(std::istream& in);

/// Checks each candidate against the problem with its id, on `jobs`
/// workers; reports come back in input order. Unknown ids are malformed.
std::vector<VerificationReport> verify_batch(const std::vector<CorpusPair>& problems,
                                             const std::vector<CandidateLine>& candidates,
                                             const VerifyOptions& opts, std::size_t jobs = 1);

/// {id, outcome, witness?, reason?, ms}
std::string report_json_line(const VerificationReport& r);

}  // namespace calcforge
