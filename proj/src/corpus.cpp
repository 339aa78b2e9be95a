#include "calcforge/corpus.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "calcforge/canonical.hpp"
#include "calcforge/parse.hpp"

namespace calcforge {

namespace {

using nlohmann::json;

constexpr const char* kSourceNames[] = {"FWD", "BWD", "IBP", "UGLY", "PERTURB", "COMBO", "ODE1"};

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

json token_array(const Expr& e) { return to_prefix_tokens(e); }

Expr read_expr(const json& obj, const char* tokens_key, const char* infix_key) {
  if (obj.contains(tokens_key) && obj[tokens_key].is_array())
    return from_prefix_tokens(obj[tokens_key].get<std::vector<std::string>>());
  ParseOptions po;
  po.allow_ode = true;
  return parse(obj.at(infix_key).get<std::string>(), po);
}

}  // namespace

std::string_view source_name(Source s) { return kSourceNames[static_cast<int>(s)]; }

std::optional<Source> source_from_name(std::string_view name) {
  for (int i = 0; i < 7; ++i)
    if (name == kSourceNames[i]) return static_cast<Source>(i);
  return std::nullopt;
}

std::string dedup_key(const Expr& problem) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a(to_prefix_string(canonicalize(problem)))));
  return buf;
}

std::string dedup_key(const CorpusPair& p) { return dedup_key(p.problem); }

CorpusError::CorpusError(std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

std::string to_json_line(const CorpusPair& p) {
  // ordered_json keeps the documented field order in the output.
  nlohmann::ordered_json j;
  j["id"] = p.id;
  j["source"] = source_name(p.source);
  j["problem"] = print_infix(p.problem);
  j["solution"] = p.solution ? json(print_infix(*p.solution)) : json(nullptr);
  j["problem_tokens"] = token_array(p.problem);
  j["solution_tokens"] = p.solution ? token_array(*p.solution) : json::array();
  j["problem_len"] = p.problem.size();
  j["solution_len"] = p.solution ? p.solution->size() : 0;
  j["seed"] = p.seed;
  if (p.raw_order) j["raw_order"] = true;
  if (p.wrong_candidate) j["wrong_candidate"] = print_infix(*p.wrong_candidate);
  return j.dump();
}

CorpusPair from_json_line(std::string_view line) {
  const json j = json::parse(line);
  CorpusPair p;
  p.id = j.at("id").get<std::string>();
  auto src = source_from_name(j.at("source").get<std::string>());
  if (!src) throw std::invalid_argument("unknown source " + j.at("source").dump());
  p.source = *src;
  p.problem = read_expr(j, "problem_tokens", "problem");
  if (j.contains("solution") && !j["solution"].is_null()) {
    if (j.contains("solution_tokens") && !j["solution_tokens"].empty())
      p.solution = read_expr(j, "solution_tokens", "solution");
    else
      p.solution = read_expr(j, "", "solution");
  }
  if (j.contains("wrong_candidate") && !j["wrong_candidate"].is_null())
    p.wrong_candidate = read_expr(j, "", "wrong_candidate");
  p.raw_order = j.value("raw_order", false);
  p.seed = j.value("seed", std::uint64_t{0});
  return p;
}

void write_jsonl(std::ostream& out, const std::vector<CorpusPair>& pairs) {
  for (const CorpusPair& p : pairs) out << to_json_line(p) << '\n';
}

std::vector<CorpusPair> read_jsonl(std::istream& in) {
  std::vector<CorpusPair> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(from_json_line(line));
    } catch (const std::exception& e) {
      throw CorpusError(n, e.what());
    }
  }
  return out;
}

std::vector<CorpusPair> read_jsonl_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CorpusError(0, "cannot open " + path);
  return read_jsonl(in);
}

}  // namespace calcforge
