#include "calcforge/verify.hpp"

#include <condition_variable>
#include <istream>
#include <memory>
#include <mutex>
#include <thread>
#include <unordered_map>

#include <json.hpp>

#include "calcforge/calculus.hpp"
#include "calcforge/canonical.hpp"
#include "calcforge/generate.hpp"
#include "calcforge/parse.hpp"
#include "calcforge/rewrite.hpp"

namespace calcforge {

namespace {

using Clock = std::chrono::steady_clock;

struct Shared {
  std::mutex m;
  std::condition_variable cv;
  bool done = false;
  EquivalenceVerdict verdict;
  std::exception_ptr error;
};

// Runs fn on a worker thread and waits up to the budget. On timeout the
// worker is detached; it owns copies of its inputs and finishes unobserved.
std::optional<EquivalenceVerdict> with_budget(std::function<EquivalenceVerdict()> fn,
                                              std::chrono::milliseconds budget) {
  if (budget.count() <= 0) return fn();
  auto shared = std::make_shared<Shared>();
  std::thread worker([shared, fn = std::move(fn)] {
    EquivalenceVerdict v;
    std::exception_ptr err;
    try {
      v = fn();
    } catch (...) {
      err = std::current_exception();
    }
    std::lock_guard<std::mutex> lock(shared->m);
    shared->verdict = v;
    shared->error = err;
    shared->done = true;
    shared->cv.notify_all();
  });
  std::unique_lock<std::mutex> lock(shared->m);
  if (!shared->cv.wait_for(lock, budget, [&] { return shared->done; })) {
    lock.unlock();
    worker.detach();
    return std::nullopt;
  }
  lock.unlock();
  worker.join();
  if (shared->error) std::rethrow_exception(shared->error);
  return shared->verdict;
}

VerificationReport finish(VerificationReport r, std::optional<EquivalenceVerdict> v,
                          Clock::time_point start) {
  r.elapsed_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  if (!v) {
    r.outcome = CheckOutcome::Timeout;
    return r;
  }
  r.verdict = *v;
  r.simplifier_used = v->symbolic;
  r.outcome = v->equivalent()       ? CheckOutcome::Accept
              : v->not_equivalent() ? CheckOutcome::Reject
                                    : CheckOutcome::Inconclusive;
  return r;
}

VerificationReport malformed_report(std::string_view text, MalformedInput m) {
  VerificationReport r;
  r.candidate_text = std::string(text);
  r.wellformed = false;
  r.outcome = CheckOutcome::Malformed;
  r.malformed = std::move(m);
  return r;
}

}  // namespace

std::variant<Expr, MalformedInput> well_formed(std::string_view text, bool allow_param) {
  ParseOptions po;
  po.allow_param = allow_param;
  try {
    return parse(text, po);
  } catch (const ParseError& e) {
    return MalformedInput{e.offset(), e.reason()};
  } catch (const std::exception& e) {
    return MalformedInput{0, e.what()};
  }
}

std::string_view check_outcome_name(CheckOutcome o) {
  switch (o) {
    case CheckOutcome::Accept: return "accept";
    case CheckOutcome::Reject: return "reject";
    case CheckOutcome::Inconclusive: return "inconclusive";
    case CheckOutcome::Malformed: return "malformed";
    case CheckOutcome::Timeout: return "timeout";
  }
  return "?";
}

VerificationReport check_integral_candidate(const Expr& problem, const Expr& candidate,
                                            const VerifyOptions& opts) {
  const auto start = Clock::now();
  VerificationReport r;
  r.candidate_text = print_infix(candidate);
  const std::uint64_t seed = opts.seed;
  auto v = with_budget(
      [problem, candidate, seed] {
        const Expr lhs = simplify(differentiate(candidate));
        const Expr rhs = simplify(problem);
        return is_zero(canonical_sub(lhs, rhs), seed);
      },
      opts.timeout);
  return finish(std::move(r), v, start);
}

VerificationReport check_integral_candidate(const Expr& problem, std::string_view candidate,
                                            const VerifyOptions& opts) {
  auto parsed = well_formed(candidate, false);
  if (auto* m = std::get_if<MalformedInput>(&parsed)) return malformed_report(candidate, *m);
  VerificationReport r = check_integral_candidate(problem, std::get<Expr>(parsed), opts);
  r.candidate_text = std::string(candidate);
  return r;
}

VerificationReport check_ode_candidate(const Expr& equation, const Expr& candidate,
                                       const VerifyOptions& opts) {
  if (count_leaf(candidate, Op::Param) > 1)
    return malformed_report(print_infix(candidate), {0, "candidate has more than one c"});
  const auto start = Clock::now();
  VerificationReport r;
  r.candidate_text = print_infix(candidate);
  const std::uint64_t seed = opts.seed;
  auto v = with_budget(
      [equation, candidate, seed] { return is_zero(ode_residual(equation, candidate), seed); },
      opts.timeout);
  return finish(std::move(r), v, start);
}

VerificationReport check_ode_candidate(const Expr& equation, std::string_view candidate,
                                       const VerifyOptions& opts) {
  auto parsed = well_formed(candidate, true);
  if (auto* m = std::get_if<MalformedInput>(&parsed)) return malformed_report(candidate, *m);
  VerificationReport r = check_ode_candidate(equation, std::get<Expr>(parsed), opts);
  r.candidate_text = std::string(candidate);
  return r;
}

VerificationReport check_record(const CorpusPair& problem, std::string_view candidate,
                                const VerifyOptions& opts) {
  VerificationReport r = problem.source == Source::ODE1
                             ? check_ode_candidate(problem.problem, candidate, opts)
                             : check_integral_candidate(problem.problem, candidate, opts);
  r.problem_id = problem.id;
  return r;
}

std::vector<CandidateLine> read_candidates(std::istream& in) {
  std::vector<CandidateLine> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto b = line.find_first_not_of(" \t");
    if (b == std::string::npos || line[b] == '#') continue;
    const auto sep = line.find_first_of(" \t", b);
    CandidateLine c;
    c.id = line.substr(b, sep == std::string::npos ? std::string::npos : sep - b);
    if (sep != std::string::npos) {
      const auto v = line.find_first_not_of(" \t", sep);
      if (v != std::string::npos) c.candidate = line.substr(v);
    }
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<VerificationReport> verify_batch(const std::vector<CorpusPair>& problems,
                                             const std::vector<CandidateLine>& candidates,
                                             const VerifyOptions& opts, std::size_t jobs) {
  std::unordered_map<std::string, const CorpusPair*> by_id;
  for (const CorpusPair& p : problems) by_id.emplace(p.id, &p);
  std::vector<VerificationReport> out(candidates.size());
  parallel_for(candidates.size(), jobs, [&](std::size_t i) {
    const CandidateLine& c = candidates[i];
    auto it = by_id.find(c.id);
    if (it == by_id.end()) {
      out[i] = malformed_report(c.candidate, {0, "unknown problem id"});
    } else {
      out[i] = check_record(*it->second, c.candidate, opts);
    }
    out[i].problem_id = c.id;
  });
  return out;
}

std::string report_json_line(const VerificationReport& r) {
  nlohmann::ordered_json j;
  j["id"] = r.problem_id;
  j["outcome"] = check_outcome_name(r.outcome);
  if (r.verdict && r.verdict->witness) {
    const Witness& w = *r.verdict->witness;
    nlohmann::ordered_json wj;
    wj["x"] = w.x;
    if (w.c) wj["c"] = *w.c;
    wj["lhs"] = w.lhs;
    wj["rhs"] = w.rhs;
    j["witness"] = wj;
  }
  if (r.malformed) {
    j["offset"] = r.malformed->offset;
    j["reason"] = r.malformed->reason;
  } else if (r.verdict && !r.verdict->reason.empty()) {
    j["reason"] = r.verdict->reason;
  }
  j["ms"] = static_cast<double>(static_cast<long long>(r.elapsed_ms * 1000)) / 1000.0;
  return j.dump();
}

}  // namespace calcforge
