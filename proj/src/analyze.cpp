#include "calcforge/analyze.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "calcforge/calculus.hpp"
#include "calcforge/canonical.hpp"
#include "calcforge/rewrite.hpp"

namespace calcforge {

namespace {

// Integer lengths: exact sums, so mean and deviation are order-free.
LengthStats of_counts(std::vector<std::uint64_t> v) {
  LengthStats s;
  s.count = v.size();
  if (v.empty()) return s;
  std::sort(v.begin(), v.end());
  unsigned __int128 sum = 0, sq = 0;
  for (std::uint64_t x : v) {
    sum += x;
    sq += static_cast<unsigned __int128>(x) * x;
  }
  const double n = static_cast<double>(v.size());
  s.mean = static_cast<double>(sum) / n;
  const unsigned __int128 num = static_cast<unsigned __int128>(v.size()) * sq - sum * sum;
  s.std = std::sqrt(static_cast<double>(num)) / n;
  const std::size_t m = v.size() / 2;
  s.median = v.size() % 2 ? double(v[m]) : (double(v[m - 1]) + double(v[m])) / 2;
  s.min = double(v.front());
  s.max = double(v.back());
  return s;
}

LengthStats of_reals(std::vector<double> v) {
  LengthStats s;
  s.count = v.size();
  if (v.empty()) return s;
  std::sort(v.begin(), v.end());
  double sum = 0;
  for (double x : v) sum += x;
  s.mean = sum / double(v.size());
  double sq = 0;
  for (double x : v) sq += (x - s.mean) * (x - s.mean);
  s.std = std::sqrt(sq / double(v.size()));
  const std::size_t m = v.size() / 2;
  s.median = v.size() % 2 ? v[m] : (v[m - 1] + v[m]) / 2;
  s.min = v.front();
  s.max = v.back();
  return s;
}

SourceStats summarize(const std::vector<const CorpusPair*>& recs) {
  std::vector<std::uint64_t> prob, sol;
  std::vector<double> ratio;
  for (const CorpusPair* p : recs) {
    prob.push_back(p->problem.size());
    if (p->solution) {
      sol.push_back(p->solution->size());
      ratio.push_back(double(p->problem.size()) / double(p->solution->size()));
    }
  }
  SourceStats s;
  s.count = recs.size();
  s.problem = of_counts(std::move(prob));
  s.solution = of_counts(std::move(sol));
  s.ratio = of_reals(std::move(ratio));
  return s;
}

double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * double(v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - double(lo)) * (v[hi] - v[lo]);
}

nlohmann::ordered_json length_json(const LengthStats& s) {
  if (!s.present()) return nullptr;
  nlohmann::ordered_json j;
  j["count"] = s.count;
  j["mean"] = s.mean;
  j["std"] = s.std;
  j["median"] = s.median;
  j["min"] = s.min;
  j["max"] = s.max;
  return j;
}

nlohmann::ordered_json source_json(const SourceStats& s) {
  nlohmann::ordered_json j;
  j["count"] = s.count;
  j["problem_len"] = length_json(s.problem);
  j["solution_len"] = length_json(s.solution);
  j["ratio"] = length_json(s.ratio);
  return j;
}

void csv_row(std::ostringstream& out, const std::string& source, const char* field,
             const LengthStats& s) {
  char buf[256];
  if (!s.present()) {
    std::snprintf(buf, sizeof buf, "%s,%s,0,,,,,\n", source.c_str(), field);
  } else {
    std::snprintf(buf, sizeof buf, "%s,%s,%zu,%.6g,%.6g,%.6g,%.6g,%.6g\n", source.c_str(), field,
                  s.count, s.mean, s.std, s.median, s.min, s.max);
  }
  out << buf;
}

}  // namespace

CorpusStats corpus_stats(const std::vector<CorpusPair>& records) {
  CorpusStats out;
  std::vector<const CorpusPair*> all;
  std::map<std::string, std::vector<const CorpusPair*>> groups;
  for (const CorpusPair& p : records) {
    all.push_back(&p);
    groups[std::string(source_name(p.source))].push_back(&p);
  }
  out.all = summarize(all);
  for (const auto& [name, recs] : groups) out.by_source[name] = summarize(recs);
  return out;
}

std::string stats_csv(const CorpusStats& s) {
  std::ostringstream out;
  out << "source,field,count,mean,std,median,min,max\n";
  auto rows = [&](const std::string& name, const SourceStats& ss) {
    csv_row(out, name, "problem_len", ss.problem);
    csv_row(out, name, "solution_len", ss.solution);
    csv_row(out, name, "ratio", ss.ratio);
  };
  rows("ALL", s.all);
  for (const auto& [name, ss] : s.by_source) rows(name, ss);
  return out.str();
}

std::string stats_json(const CorpusStats& s) {
  nlohmann::ordered_json j;
  j["all"] = source_json(s.all);
  nlohmann::ordered_json by = nlohmann::ordered_json::object();
  for (const auto& [name, ss] : s.by_source) by[name] = source_json(ss);
  j["by_source"] = by;
  return j.dump(2) + "\n";
}

GenConfig composition_heavy_config(std::uint64_t seed) {
  GenConfig c;
  c.seed = seed;
  c.var_weight = 0.9;
  c.op_weights = {{Op::Sin, 2}, {Op::Cos, 2}, {Op::Exp, 2}, {Op::Log, 1}, {Op::Tan, 1},
                  {Op::Sqrt, 1}, {Op::Atan, 1}, {Op::Mul, 1}, {Op::Add, 0.5}};
  return c;
}

GenConfig addition_only_config(std::uint64_t seed) {
  GenConfig c;
  c.seed = seed;
  c.op_weights = {{Op::Add, 1}, {Op::Sub, 1}};
  c.leaf_sampler = [](Rng& rng) {
    static constexpr Op kFns[] = {Op::Sin, Op::Cos, Op::Exp};
    const Op f = kFns[rng.index(3)];
    const std::int64_t k = rng.uniform_int(1, 5);
    const std::int64_t m = rng.uniform_int(-5, 5);
    return unary(f, integer(k) * var_x() + integer(m));
  };
  return c;
}

GrowthReport derivative_growth(const GenConfig& cfg, const std::vector<int>& sizes,
                               std::size_t samples) {
  if (sizes.size() < 3 || !std::is_sorted(sizes.begin(), sizes.end()))
    throw std::invalid_argument("growth needs at least three ascending sizes");
  cfg.validate();
  GrowthReport out;
  std::vector<double> lx, ly;
  for (int n : sizes) {
    std::vector<double> lens(samples);
    parallel_for(samples, cfg.jobs, [&](std::size_t i) {
      Rng rng(substream_seed(cfg.seed, i, static_cast<std::uint64_t>(n)));
      const Expr e = sample_expr_exact(cfg, n, rng);
      try {
        lens[i] = double(simplify(differentiate(e)).size());
      } catch (const ArithmeticOverflow&) {
        lens[i] = double(differentiate(e).size());
      }
    });
    GrowthRow row;
    row.n = n;
    row.median_len = quantile(lens, 0.5);
    row.p25 = quantile(lens, 0.25);
    row.p75 = quantile(lens, 0.75);
    out.rows.push_back(row);
    lx.push_back(std::log(double(n)));
    ly.push_back(std::log(row.median_len));
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= double(lx.size());
  my /= double(ly.size());
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  out.slope = sxy / sxx;
  return out;
}

std::string growth_csv(const GrowthReport& r) {
  std::ostringstream out;
  out << "n,median_len,p25,p75\n";
  char buf[128];
  for (const GrowthRow& row : r.rows) {
    std::snprintf(buf, sizeof buf, "%d,%.6g,%.6g,%.6g\n", row.n, row.median_len, row.p25, row.p75);
    out << buf;
  }
  std::snprintf(buf, sizeof buf, "# slope,%.6f\n", r.slope);
  out << buf;
  return out.str();
}

}  // namespace calcforge
