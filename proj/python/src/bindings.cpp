#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "calcforge/adversarial.hpp"
#include "calcforge/analyze.hpp"
#include "calcforge/calculus.hpp"
#include "calcforge/canonical.hpp"
#include "calcforge/cli.hpp"
#include "calcforge/corpus.hpp"
#include "calcforge/generate.hpp"
#include "calcforge/parse.hpp"
#include "calcforge/rewrite.hpp"
#include "calcforge/verify.hpp"

namespace py = pybind11;
using namespace calcforge;

namespace {

py::dict verdict_dict(const EquivalenceVerdict& v) {
  py::dict d;
  d["outcome"] = std::string(outcome_name(v.outcome));
  d["points_tested"] = v.points_tested;
  d["reason"] = v.reason;
  if (v.witness) {
    py::dict w;
    w["x"] = v.witness->x;
    if (v.witness->c) w["c"] = *v.witness->c;
    w["lhs"] = v.witness->lhs;
    w["rhs"] = v.witness->rhs;
    d["witness"] = w;
  } else {
    d["witness"] = py::none();
  }
  return d;
}

py::dict report_dict(const VerificationReport& r) {
  py::dict d;
  d["outcome"] = std::string(check_outcome_name(r.outcome));
  d["wellformed"] = r.wellformed;
  d["verdict"] = r.verdict ? py::object(verdict_dict(*r.verdict)) : py::none();
  if (r.malformed) {
    d["offset"] = r.malformed->offset;
    d["reason"] = r.malformed->reason;
  }
  d["ms"] = r.elapsed_ms;
  return d;
}

std::vector<std::string> json_lines(const std::vector<CorpusPair>& pairs) {
  std::vector<std::string> out;
  out.reserve(pairs.size());
  for (const CorpusPair& p : pairs) out.push_back(to_json_line(p));
  return out;
}

GenConfig config(std::uint64_t seed, int max_ops, std::size_t jobs) {
  GenConfig c;
  c.seed = seed;
  c.max_internal_nodes = max_ops;
  c.jobs = jobs;
  return c;
}

Expr ode_parse(const std::string& text) {
  ParseOptions po;
  po.allow_ode = true;
  return parse(text, po);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Expression trees, calculus, corpus generation and answer checking.";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

  py::class_<Expr>(m, "Expr")
      .def(py::init([](const std::string& text) { return parse(text); }), py::arg("text"))
      .def("__str__", &print_infix)
      .def("__repr__", [](const Expr& e) { return "Expr('" + print_infix(e) + "')"; })
      .def("__eq__", [](const Expr& a, const Expr& b) { return a == b; })
      .def("__hash__", &Expr::hash)
      .def("__len__", &Expr::size)
      .def_property_readonly("size", &Expr::size)
      .def_property_readonly("depth", &Expr::depth)
      .def("prefix", &to_prefix_tokens);

  m.def("parse", [](const std::string& t) { return parse(t); }, py::arg("text"));
  m.def("parse_ode", &ode_parse, py::arg("text"), "Parse text over x, c, y and y'.");
  m.def("from_prefix", &from_prefix_tokens, py::arg("tokens"));
  m.def("canonicalize", [](const Expr& e) { return canonicalize(e); });
  m.def("simplify", [](const Expr& e) { return simplify(e); });
  m.def("differentiate", [](const Expr& e) { return differentiate(e); });
  m.def(
      "integrate", [](const Expr& e) { return integrate_heuristic(e); }, py::arg("e"),
      "Heuristic antiderivative, or None.");
  m.def(
      "numeric_equiv",
      [](const Expr& a, const Expr& b, std::uint64_t seed) {
        return verdict_dict(numeric_equiv(a, b, seed));
      },
      py::arg("a"), py::arg("b"), py::arg("seed") = 0);
  m.def(
      "uglify",
      [](const Expr& e, int steps, std::uint64_t seed, std::vector<std::string> identities) {
        UglifyRecipe r;
        r.steps = steps;
        r.seed = seed;
        r.identities = std::move(identities);
        return uglify(e, r);
      },
      py::arg("e"), py::arg("steps") = 2, py::arg("seed") = 0,
      py::arg("identities") = std::vector<std::string>{});
  m.def(
      "make_ode",
      [](const Expr& f) -> py::object {
        OdeResult r = make_first_order_ode(f);
        if (!r.ok()) return py::str(std::string(invert_failure_name(r.failure)));
        return py::cast(r.problem->equation);
      },
      py::arg("f"), "The first-order ODE for y = f(x, c), or the failure name.");

  m.def(
      "check_integral",
      [](const Expr& problem, const std::string& candidate, std::uint64_t seed) {
        VerifyOptions o;
        o.seed = seed;
        return report_dict(check_integral_candidate(problem, candidate, o));
      },
      py::arg("problem"), py::arg("candidate"), py::arg("seed") = 0x5eed);
  m.def(
      "check_ode",
      [](const Expr& equation, const std::string& candidate, std::uint64_t seed) {
        VerifyOptions o;
        o.seed = seed;
        return report_dict(check_ode_candidate(equation, candidate, o));
      },
      py::arg("equation"), py::arg("candidate"), py::arg("seed") = 0x5eed);

  auto gen = [&](const char* name, GenResult (*fn)(const GenConfig&, std::size_t)) {
    m.def(
        name,
        [fn](std::size_t count, std::uint64_t seed, int max_ops, std::size_t jobs) {
          GenResult r;
          {
            py::gil_scoped_release release;
            r = fn(config(seed, max_ops, jobs), count);
          }
          return json_lines(r.pairs);
        },
        py::arg("count"), py::arg("seed"), py::arg("max_ops") = 15, py::arg("jobs") = 1,
        "JSONL records, one string per pair.");
  };
  gen("gen_bwd", &gen_bwd);
  gen("gen_fwd", &gen_fwd);
  gen("gen_ode", &gen_ode);

  m.def(
      "corpus_stats",
      [](const std::vector<std::string>& lines) {
        std::vector<CorpusPair> recs;
        for (const auto& l : lines) recs.push_back(from_json_line(l));
        return stats_json(corpus_stats(recs));
      },
      py::arg("lines"), "Statistics of JSONL records, as a JSON document.");

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = cli::run(args, out, err);
        }
        return py::make_tuple(code, py::bytes(out.str()), err.str());
      },
      py::arg("args"), "Runs one command-line invocation; returns (exit code, stdout, stderr).");
}
