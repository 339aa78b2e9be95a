#include "calcforge/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "calcforge/adversarial.hpp"
#include "calcforge/analyze.hpp"
#include "calcforge/corpus.hpp"
#include "calcforge/generate.hpp"
#include "calcforge/parse.hpp"
#include "calcforge/rewrite.hpp"
#include "calcforge/verify.hpp"

namespace calcforge::cli {

namespace {

using ordered_json = nlohmann::ordered_json;

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::uint64_t seed = 0;
  std::size_t count = 1000;
  std::optional<int> max_ops, const_min, const_max;
  std::string out = "-";
  std::optional<std::size_t> jobs;
  int timeout_ms = 5000;
  std::string rules;
  std::string config;
  // subcommand specific
  std::string mode;
  std::vector<std::string> inputs;
  std::string problems, answers, fwd, bwd;
  std::string expr;
  int steps = 2;
  std::vector<std::string> identities;
  std::string family = "composition";
  std::vector<int> sizes = {5, 10, 20, 40};
  std::size_t samples = 300;
};

// Output stream for --out; "-" is the caller's stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) {
    if (path.empty() || path == "-") {
      stream_ = &fallback;
      return;
    }
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file_) throw DataError("cannot write " + path);
    stream_ = file_.get();
  }
  std::ostream& operator*() { return *stream_; }
  void close() {
    stream_->flush();
    if (file_) {
      file_->close();
      if (!*file_) throw DataError("write failed");
    }
  }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_ = nullptr;
};

GenConfig make_config(const Options& o) {
  GenConfig cfg = o.config.empty() ? GenConfig{} : load_gen_config(o.config);
  // Flags override the file; constants given as flags are clamped.
  cfg.seed = o.seed;
  if (o.max_ops) cfg.max_internal_nodes = *o.max_ops;
  if (o.const_min) cfg.const_min = std::clamp(*o.const_min, -5, 5);
  if (o.const_max) cfg.const_max = std::clamp(*o.const_max, -5, 5);
  if (o.jobs) cfg.jobs = *o.jobs;
  cfg.validate();
  return cfg;
}

std::vector<CorpusPair> read_all(const std::vector<std::string>& paths) {
  std::vector<CorpusPair> out;
  for (const std::string& p : paths) {
    try {
      auto part = read_jsonl_file(p);
      out.insert(out.end(), part.begin(), part.end());
    } catch (const CorpusError& e) {
      throw DataError(p + ": " + e.what());
    }
  }
  return out;
}

void report(std::ostream& err, const char* event, const GenStats& s) {
  ordered_json j;
  j["event"] = event;
  j["attempts"] = s.attempts;
  j["emitted"] = s.emitted;
  j["yield"] = s.yield();
  j["discarded"] = s.discarded;
  err << j.dump() << '\n';
}

void emit(const Options& o, std::ostream& out, const std::vector<CorpusPair>& pairs) {
  Sink sink(o.out, out);
  write_jsonl(*sink, pairs);
  sink.close();
}

int cmd_gen(const Options& o, std::ostream& out, std::ostream& err) {
  const GenConfig cfg = make_config(o);
  GenResult r;
  if (o.mode == "bwd") {
    r = gen_bwd(cfg, o.count);
  } else if (o.mode == "fwd") {
    r = gen_fwd(cfg, o.count);
  } else if (o.mode == "ode1") {
    r = gen_ode(cfg, o.count);
  } else {
    Ledger ledger(cfg.ledger_cap, cfg.seed);
    if (!o.inputs.empty()) {
      ledger.add_all(read_all(o.inputs));
    } else {
      const std::size_t n = std::max<std::size_t>(o.count, 200);
      ledger.add_all(gen_bwd(cfg, n).pairs);
      ledger.add_all(gen_fwd(cfg, n).pairs);
    }
    r = gen_ibp(cfg, ledger, o.count);
  }
  emit(o, out, r.pairs);
  report(err, "gen", r.stats);
  return kOk;
}

int cmd_uglify(const Options& o, std::ostream& out, std::ostream& err) {
  if (!o.expr.empty()) {
    auto parsed = well_formed(o.expr);
    if (auto* m = std::get_if<MalformedInput>(&parsed))
      throw DataError("malformed expression at " + std::to_string(m->offset) + ": " + m->reason);
    UglifyRecipe recipe{o.steps, o.identities, o.seed};
    Sink sink(o.out, out);
    *sink << print_infix(uglify(std::get<Expr>(parsed), recipe)) << '\n';
    sink.close();
    return kOk;
  }
  GenConfig cfg = make_config(o);
  if (o.inputs.empty()) {
    GenResult r = gen_trick_pairs(cfg, o.count, o.steps);
    emit(o, out, r.pairs);
    report(err, "uglify", r.stats);
    return kOk;
  }
  std::vector<CorpusPair> recs = read_all(o.inputs);
  std::vector<std::optional<CorpusPair>> made(recs.size());
  parallel_for(recs.size(), cfg.jobs, [&](std::size_t i) {
    UglifyRecipe recipe{o.steps, o.identities, substream_seed(o.seed, i, 0x0691)};
    try {
      CorpusPair p = recs[i];
      p.problem = uglify(p.problem, recipe);
      p.source = Source::UGLY;
      p.id = recs[i].id + "-u";
      p.seed = recipe.seed;
      made[i] = std::move(p);
    } catch (const UglifyError&) {
    }
  });
  std::vector<CorpusPair> pairs;
  GenStats s;
  for (auto& m : made) {
    ++s.attempts;
    if (m) {
      pairs.push_back(std::move(*m));
      ++s.emitted;
    } else {
      ++s.discarded["no_identity"];
    }
  }
  emit(o, out, pairs);
  report(err, "uglify", s);
  return kOk;
}

int cmd_perturb(const Options& o, std::ostream& out, std::ostream& err) {
  const GenConfig cfg = make_config(o);
  auto bwd = read_all(o.inputs);
  bwd.erase(std::remove_if(bwd.begin(), bwd.end(),
                           [](const CorpusPair& p) { return p.source != Source::BWD; }),
            bwd.end());
  if (bwd.empty()) throw DataError("perturb needs BWD records on input");
  GenResult r = gen_perturb(cfg, bwd, o.count);
  emit(o, out, r.pairs);
  report(err, "perturb", r.stats);
  return kOk;
}

int cmd_reorder(const Options& o, std::ostream& out, std::ostream& err) {
  std::vector<CorpusPair> recs;
  if (!o.expr.empty()) {
    auto parsed = well_formed(o.expr);
    if (auto* m = std::get_if<MalformedInput>(&parsed))
      throw DataError("malformed expression at " + std::to_string(m->offset) + ": " + m->reason);
    CorpusPair p;
    p.id = "expr";
    p.source = Source::BWD;
    p.problem = std::get<Expr>(parsed);
    recs.push_back(p);
  } else {
    recs = read_all(o.inputs);
  }
  std::vector<CorpusPair> pairs;
  std::size_t skipped = 0;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    Rng rng(substream_seed(o.seed, i, 0x4e0));
    std::vector<Expr> perms;
    try {
      perms = reorder_products(recs[i].problem, rng);
    } catch (const std::invalid_argument&) {
      ++skipped;
      continue;
    }
    for (std::size_t k = 0; k < perms.size(); ++k) {
      CorpusPair p = recs[i];
      p.problem = perms[k];
      p.raw_order = true;
      p.id = recs[i].id + "-r" + std::to_string(k);
      pairs.push_back(std::move(p));
    }
  }
  if (!o.expr.empty() && pairs.empty()) throw DataError("expression has no product chain");
  emit(o, out, pairs);
  ordered_json j;
  j["event"] = "reorder";
  j["records"] = recs.size();
  j["emitted"] = pairs.size();
  j["no_product"] = skipped;
  err << j.dump() << '\n';
  return kOk;
}

int cmd_combine(const Options& o, std::ostream& out, std::ostream& err) {
  const GenConfig cfg = make_config(o);
  auto fwd = read_all({o.fwd});
  auto bwd = read_all({o.bwd});
  if (fwd.empty() || bwd.empty()) throw DataError("combine needs nonempty --fwd and --bwd corpora");
  GenResult r = gen_combo(cfg, fwd, bwd, o.count);
  emit(o, out, r.pairs);
  report(err, "combine", r.stats);
  return kOk;
}

int cmd_verify(const Options& o, std::ostream& out, std::ostream& err) {
  const auto problems = read_all({o.problems});
  std::ifstream in(o.answers);
  if (!in) throw DataError("cannot open " + o.answers);
  const auto candidates = read_candidates(in);
  VerifyOptions vo;
  vo.seed = o.seed;
  vo.timeout = std::chrono::milliseconds(std::max(0, o.timeout_ms));
  const auto reports = verify_batch(problems, candidates, vo, o.jobs.value_or(1));
  Sink sink(o.out, out);
  std::map<std::string, std::size_t> tally;
  for (const auto& r : reports) {
    *sink << report_json_line(r) << '\n';
    ++tally[std::string(check_outcome_name(r.outcome))];
  }
  sink.close();
  ordered_json j;
  j["event"] = "verify";
  j["checked"] = reports.size();
  j["outcomes"] = tally;
  err << j.dump() << '\n';
  return kOk;
}

int cmd_stats(const Options& o, std::ostream& out, std::ostream& err) {
  const CorpusStats s = corpus_stats(read_all(o.inputs));
  if (o.out == "-") {
    out << stats_csv(s);
    return kOk;
  }
  std::error_code ec;
  std::filesystem::create_directories(o.out, ec);
  if (ec) throw DataError("cannot create " + o.out);
  for (const auto& [name, text] : {std::pair<std::string, std::string>{"stats.csv", stats_csv(s)},
                                   {"stats.json", stats_json(s)}}) {
    Sink sink((std::filesystem::path(o.out) / name).string(), out);
    *sink << text;
    sink.close();
  }
  ordered_json j;
  j["event"] = "stats";
  j["records"] = s.all.count;
  err << j.dump() << '\n';
  return kOk;
}

int cmd_growth(const Options& o, std::ostream& out, std::ostream& err) {
  GenConfig cfg = o.family == "addition" ? addition_only_config(o.seed)
                                         : composition_heavy_config(o.seed);
  cfg.jobs = o.jobs.value_or(1);
  const GrowthReport r = derivative_growth(cfg, o.sizes, o.samples);
  Sink sink(o.out, out);
  *sink << growth_csv(r);
  sink.close();
  ordered_json j;
  j["event"] = "growth";
  j["family"] = o.family;
  j["slope"] = r.slope;
  err << j.dump() << '\n';
  return kOk;
}

int cmd_simplify(const Options& o, std::istream& in, std::ostream& out) {
  Sink sink(o.out, out);
  auto one = [&](const std::string& text) {
    auto parsed = well_formed(text);
    if (auto* m = std::get_if<MalformedInput>(&parsed))
      throw DataError("malformed expression at " + std::to_string(m->offset) + ": " + m->reason);
    *sink << print_infix(simplify(std::get<Expr>(parsed))) << '\n';
  };
  if (!o.expr.empty()) {
    one(o.expr);
  } else {
    std::string line;
    while (std::getline(in, line))
      if (line.find_first_not_of(" \t\r") != std::string::npos) one(line);
  }
  sink.close();
  return kOk;
}

void echo_command(std::ostream& err, const std::string& name, const std::vector<std::string>& args) {
  ordered_json j;
  j["event"] = "command";
  j["subcommand"] = name;
  j["args"] = args;
  err << j.dump() << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"calcforge: symbolic-integration corpus generation and checking"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");
  Options o;

  auto common = [&](CLI::App* sub, bool seeded) {
    auto* s = sub->add_option("--seed", o.seed, "Random seed");
    if (seeded) s->required();
    sub->add_option("--out", o.out, "Output path ('-' for standard output)");
    sub->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--rules", o.rules, "Rule file replacing the built-in rules");
  };
  auto generating = [&](CLI::App* sub) {
    common(sub, true);
    sub->add_option("--count", o.count, "Records to emit");
    sub->add_option("--max-ops", o.max_ops, "Maximum internal nodes per sampled tree")
        ->check(CLI::PositiveNumber);
    sub->add_option("--const-min", o.const_min, "Smallest integer leaf (clamped to -5)");
    sub->add_option("--const-max", o.const_max, "Largest integer leaf (clamped to 5)");
    sub->add_option("--config", o.config, "key = value generator configuration file");
  };

  auto* gen = app.add_subcommand("gen", "Generate a corpus (fwd, bwd, ibp, ode1)");
  generating(gen);
  gen->add_option("--mode", o.mode, "Pipeline")
      ->required()
      ->check(CLI::IsMember({"fwd", "bwd", "ibp", "ode1"}));
  gen->add_option("--ledger", o.inputs, "Known-pair corpora seeding the IBP ledger");

  auto* ugl = app.add_subcommand("uglify", "Uglify an expression, a corpus, or generate UGLY pairs");
  generating(ugl);
  ugl->add_option("--in", o.inputs, "Corpus whose problems are uglified");
  ugl->add_option("--expr", o.expr, "Single expression to uglify");
  ugl->add_option("--steps", o.steps, "Rewrites per expression")->check(CLI::PositiveNumber);
  ugl->add_option("--identities", o.identities, "Uglify rule names to enable")->delimiter(',');

  auto* per = app.add_subcommand("perturb", "Mutate BWD problems into PERTURB fixtures");
  generating(per);
  per->add_option("--in", o.inputs, "BWD corpus")->required();

  auto* reo = app.add_subcommand("reorder", "Emit product-factor reorderings (raw order)");
  common(reo, true);
  reo->add_option("--in", o.inputs, "Corpus");
  reo->add_option("--expr", o.expr, "Single expression");

  auto* com = app.add_subcommand("combine", "Sum FWD and BWD pairs into COMBO pairs");
  generating(com);
  com->add_option("--fwd", o.fwd, "FWD corpus")->required();
  com->add_option("--bwd", o.bwd, "BWD corpus")->required();

  auto* ver = app.add_subcommand("verify", "Check candidate answers against problems");
  common(ver, false);
  o.seed = 0x5eed;
  ver->add_option("--problems", o.problems, "Problems corpus (JSONL)")->required();
  ver->add_option("--answers", o.answers, "Candidates: 'id candidate' per line")->required();
  ver->add_option("--timeout-ms", o.timeout_ms, "Per-check wall-clock budget (0 disables)");

  auto* sta = app.add_subcommand("stats", "Corpus length statistics (stats.csv, stats.json)");
  sta->add_option("--in", o.inputs, "Corpus files")->required();
  sta->add_option("--out", o.out, "Output directory ('-' prints CSV to standard output)");

  auto* gro = app.add_subcommand("growth", "Derivative length growth experiment");
  common(gro, true);
  gro->add_option("--family", o.family, "Operator family")
      ->check(CLI::IsMember({"composition", "addition"}));
  gro->add_option("--sizes", o.sizes, "Internal node counts")->delimiter(',');
  gro->add_option("--samples", o.samples, "Samples per size")->check(CLI::PositiveNumber);

  auto* sim = app.add_subcommand("simplify", "Simplify expressions (one per line, or --expr)");
  sim->add_option("--expr", o.expr, "Single expression");
  sim->add_option("--out", o.out, "Output path");
  sim->add_option("--rules", o.rules, "Rule file replacing the built-in rules");

  for (CLI::App* sub : app.get_subcommands({})) sub->fallthrough(false);

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    err << app.help();
    return kUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  echo_command(err, name, args);
  try {
    if (!o.rules.empty())
      set_active_rules(std::make_shared<const RuleSet>(RuleSet::load_file(o.rules)));
    if (name == "gen") return cmd_gen(o, out, err);
    if (name == "uglify") return cmd_uglify(o, out, err);
    if (name == "perturb") return cmd_perturb(o, out, err);
    if (name == "reorder") return cmd_reorder(o, out, err);
    if (name == "combine") return cmd_combine(o, out, err);
    if (name == "verify") return cmd_verify(o, out, err);
    if (name == "stats") return cmd_stats(o, out, err);
    if (name == "growth") return cmd_growth(o, out, err);
    return cmd_simplify(o, std::cin, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kData;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace calcforge::cli
