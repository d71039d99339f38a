#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "catlab/environments.hpp"
#include "catlab/harness.hpp"
#include "catlab/hedge.hpp"
#include "catlab/policies.hpp"

using namespace catlab;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

const BoundCheck* find_check(const RunRecord& r, const std::string& name) {
  for (const BoundCheck& c : r.bound_checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

// DBWRQ runs shared by criteria 1-3.

struct DbwrqRun {
  RunRecord record;
  double seconds = 0.0;
  std::string input;
};

// Inputs that hug every mentor boundary from alternating sides, sweeping the
// offset down towards zero, interleaved with full left-right sweeps.
std::vector<Input> boundary_script(const PayoffEnvironment& env, std::int64_t T) {
  std::vector<double> edges;
  for (const Piece& p : env.mentor().pieces()) {
    if (p.lo > 0.0) edges.push_back(p.lo);
  }
  if (edges.empty()) edges.push_back(0.5);
  std::vector<Input> out;
  out.reserve(static_cast<std::size_t>(T));
  for (std::int64_t t = 0; t < T; ++t) {
    double x = 0.0;
    if (t % 4 == 3) {
      const double phase = std::fmod(static_cast<double>(t) * 0.000731, 2.0);
      x = phase <= 1.0 ? phase : 2.0 - phase;
    } else {
      const double b = edges[static_cast<std::size_t>(t) % edges.size()];
      const double offset = 0.05 / (1.0 + static_cast<double>(t) / 97.0);
      x = (t % 2 == 0) ? b - offset : b + offset;
    }
    out.push_back(Input::scalar(std::clamp(x, 0.0, 1.0)));
  }
  return out;
}

std::vector<Input> triangle_script(std::int64_t T) {
  std::vector<Input> out;
  out.reserve(static_cast<std::size_t>(T));
  for (std::int64_t t = 0; t < T; ++t) {
    const double phase = std::fmod(static_cast<double>(t) * 0.0137, 2.0);
    out.push_back(Input::scalar(phase <= 1.0 ? phase : 2.0 - phase));
  }
  return out;
}

std::vector<DbwrqRun> dbwrq_runs() {
  static std::vector<DbwrqRun> runs = [] {
    std::vector<DbwrqRun> out;
    const int seeds = 4;
    for (std::int64_t T : {1000, 10000, 100000}) {
      for (std::size_t K : {2, 5}) {
        for (int s = 0; s < seeds; ++s) {
          for (const char* input : {"uniform", "boundary", "triangle"}) {
            ExperimentConfig c;
            c.algo = AlgoSpec::parse("dbwrq");
            c.env.kind = EnvKind::kSegments;
            c.env.K = K;
            c.T_list = {T};
            c.timing = true;
            const auto seed = static_cast<std::uint64_t>(100 + s);
            const std::string name = input;
            if (name != "uniform") {
              Rng env_rng = derive_rng_stream(seed, static_cast<std::uint64_t>(T), StreamTag::kEnvBits);
              const auto env = build_environment(c.env, c.algo, T, env_rng);
              c.input.kind = InputKind::kScripted;
              c.input.script = name == "boundary" ? boundary_script(*env, T) : triangle_script(T);
            }
            const auto start = Clock::now();
            DbwrqRun run;
            run.record = run_once(c, T, seed);
            run.seconds = seconds_since(start);
            run.input = name;
            out.push_back(std::move(run));
          }
        }
      }
    }
    return out;
  }();
  return runs;
}

Verdict ac1() {
  const auto runs = dbwrq_runs();
  int violations = 0;
  int missing = 0;
  double slowest = 0.0;
  double worst_ratio = 0.0;
  for (const DbwrqRun& r : runs) {
    const BoundCheck* c = find_check(r.record, "dbwrq_query_ceiling");
    if (!c) {
      ++missing;
      continue;
    }
    violations += c->pass ? 0 : 1;
    const std::int64_t g = dbwrq_default_g(r.record.T, 0.75);
    worst_ratio = std::max(worst_ratio, static_cast<double>(r.record.queries) /
                                            static_cast<double>(dbwrq_query_ceiling(r.record.diam_s, g)));
    if (r.record.T == 100000) slowest = std::max(slowest, r.seconds);
  }
  Verdict v;
  v.pass = violations == 0 && missing == 0 && slowest < 5.0;
  v.detail = fmt::format("{} runs, {} ceiling violations, max |Q|/ceiling {:.3f}, slowest T=1e5 run {:.3f}s",
                         runs.size(), violations, worst_ratio, slowest);
  return v;
}

Verdict ac2() {
  const auto runs = dbwrq_runs();
  int violations = 0;
  int missing = 0;
  int scripted = 0;
  double worst_add = 0.0;
  double worst_mul = 0.0;
  for (const DbwrqRun& r : runs) {
    const BoundCheck* add = find_check(r.record, "dbwrq_regret_add");
    const BoundCheck* mul = find_check(r.record, "dbwrq_regret_mul");
    if (!add || !mul) {
      ++missing;
      continue;
    }
    violations += (add->pass ? 0 : 1) + (mul->pass ? 0 : 1);
    scripted += r.input != "uniform" ? 1 : 0;
    const double g = static_cast<double>(dbwrq_default_g(r.record.T, 0.75));
    const double K = r.record.env == "segments5" ? 5.0 : 2.0;
    const double ceiling = 2.0 * K * static_cast<double>(r.record.T) / (g * g);
    worst_add = std::max(worst_add, r.record.regret_add / ceiling);
    worst_mul = std::max(worst_mul, r.record.regret_mul.to_double() / (2.0 * ceiling));
  }
  Verdict v;
  v.pass = violations == 0 && missing == 0 && scripted > 0;
  v.detail = fmt::format("{} runs ({} scripted), {} violations, max R+/ceiling {:.3f}, max Rmul/ceiling {:.3f}",
                         runs.size(), scripted, violations, worst_add, worst_mul);
  return v;
}

Verdict ac3() {
  const auto runs = dbwrq_runs();
  int failed = 0;
  int missing = 0;
  std::int64_t steps = 0;
  for (const DbwrqRun& r : runs) {
    const BoundCheck* c = find_check(r.record, "dbwrq_step_loss");
    if (!c) {
      ++missing;
      continue;
    }
    steps += r.record.T;
    if (!c->pass) {
      ++failed;
      std::fprintf(stderr, "  %s: %s\n", r.record.run_id.c_str(), c->detail.c_str());
    }
  }
  Verdict v;
  v.pass = failed == 0 && missing == 0;
  v.detail = fmt::format("{} steps over {} runs, {} runs with a step above L*len(B)+1e-12", steps, runs.size(), failed);
  return v;
}

Verdict ac4() {
  ExperimentConfig c;
  c.algo = AlgoSpec::parse("ood-hedge");
  c.env.kind = EnvKind::kSmoothThresholds;
  c.T_list = {16384};
  c.seeds = 32;
  c.master_seed = 400;
  c.timing = false;
  const SweepResult r = sweep(c);
  int failed = 0;
  int missing = 0;
  for (const RunRecord& rec : r.records) {
    const BoundCheck* check = find_check(rec, "ood_step_loss");
    if (!check) {
      ++missing;
      continue;
    }
    if (!check->pass) {
      ++failed;
      std::fprintf(stderr, "  %s: %s\n", rec.run_id.c_str(), check->detail.c_str());
    }
  }
  Verdict v;
  v.pass = failed == 0 && missing == 0 && r.records.size() == 32;
  v.detail = fmt::format("{} seeds at T=2^14, {} runs with a step above L*eps^(1/n)+1e-12", r.records.size(), failed);
  return v;
}

// Horizons where log16/p^2 is below the regret of never learning, so the
// bound is not met trivially.
Verdict ac5() {
  const auto start = Clock::now();
  const std::size_t N = 16;
  std::vector<Policy> experts;
  for (std::size_t i = 0; i < N; ++i) experts.push_back(Policy::threshold(static_cast<double>(i) / (N - 1)));
  const Policy mentor = Policy::threshold(0.37);

  Verdict v;
  for (std::int64_t T : {1024, 4096, 16384}) {
    // Fixed input script shared by every seed.
    std::vector<std::vector<double>> losses(static_cast<std::size_t>(T), std::vector<double>(N));
    std::vector<double> totals(N, 0.0);
    Rng script(2024);
    for (auto& row : losses) {
      const Input x = Input::scalar(uniform01(script));
      for (std::size_t i = 0; i < N; ++i) {
        row[i] = experts[i](x) == mentor(x) ? 0.0 : 1.0;
        totals[i] += row[i];
      }
    }
    const double best = *std::min_element(totals.begin(), totals.end());
    for (double p : {0.1, 0.3, 1.0}) {
      std::vector<double> regrets;
      for (int seed = 0; seed < 200; ++seed) {
        HedgeWithQueries hedge(N, p, T);
        Rng rng = derive_rng_stream(static_cast<std::uint64_t>(seed), static_cast<std::uint64_t>(T), StreamTag::kHedge);
        double incurred = 0.0;
        for (const auto& l : losses) {
          const HedgeWithQueries::Proposal prop = hedge.propose(rng);
          const std::size_t chosen = prop.query ? hedge.update(l) : prop.index;
          incurred += l[chosen];
        }
        regrets.push_back(incurred - best);
      }
      const MeanStderr m = mean_stderr(regrets);
      const double bound = std::log(static_cast<double>(N)) / (p * p);
      const bool ok = m.mean <= bound + 3.0 * m.stderr_;
      v.pass = v.pass && ok;
      v.detail += fmt::format("T={} p={}: {:.1f}+-{:.1f} vs {:.1f}{}; ", T, p, m.mean, m.stderr_, bound,
                              ok ? "" : " over");
    }
  }
  const double elapsed = seconds_since(start);
  v.pass = v.pass && elapsed < 60.0;
  v.detail += fmt::format("{:.1f}s", elapsed);
  return v;
}

Verdict ac6() {
  const auto start = Clock::now();
  ExperimentConfig c;
  c.algo = AlgoSpec::parse("ood-hedge");
  c.env.kind = EnvKind::kSmoothThresholds;
  c.T_list = {1 << 10, 1 << 11, 1 << 12, 1 << 13, 1 << 14, 1 << 15, 1 << 16};
  c.seeds = 32;
  c.master_seed = 600;
  c.timing = false;
  const SweepResult r = sweep(c);
  const double elapsed = seconds_since(start);
  Verdict v;
  if (!r.trend) {
    v.pass = false;
    v.detail = "no trend computed";
    return v;
  }
  bool all_ok = true;
  for (const RunRecord& rec : r.records) all_ok = all_ok && rec.bounds_ok();
  const AggregateRow& lo = r.aggregates.front();
  const AggregateRow& hi = r.aggregates.back();
  v.pass = r.trend->regret_decreasing && r.trend->queries_per_T_decreasing && all_ok && elapsed < 600.0;
  v.detail = fmt::format(
      "R+ {:.4f}+-{:.4f} at T=2^10 -> {:.4f}+-{:.4f} at T=2^16; |Q|/T {:.4f} -> {:.4f}; means monotone: R+ {}, |Q|/T "
      "{}; {:.1f}s",
      lo.mean_regret_add, lo.stderr_regret_add, hi.mean_regret_add, hi.stderr_regret_add, lo.mean_queries_per_T,
      hi.mean_queries_per_T, r.trend->regret_means_monotone, r.trend->queries_per_T_means_monotone, elapsed);
  return v;
}

// Mean per-step penalty of the wrong action over one section, by midpoint rule.
double lowerbound_oracle(double L, std::int64_t f, std::int64_t T) {
  LowerBoundEnv env;
  env.f = f;
  env.L = L;
  env.bits.assign(static_cast<std::size_t>(f), ActionId(0));
  const int samples = 200000;
  double penalty = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double x = (static_cast<double>(i) + 0.5) / samples / static_cast<double>(f);
    penalty += 1.0 - lowerbound_payoff(env, x, ActionId(1));
  }
  penalty /= samples;
  // A uniformly random action is wrong half the time.
  return 0.5 * penalty * static_cast<double>(T);
}

Verdict ac7() {
  Verdict v;
  std::vector<std::int64_t> Ts;
  for (int k = 12; k <= 20; ++k) Ts.push_back(std::int64_t{1} << k);
  for (const char* algo : {"budget:64", "never-random"}) {
    ExperimentConfig c;
    c.algo = AlgoSpec::parse(algo);
    c.env.kind = EnvKind::kLowerBound;
    c.env.budget_hint = 64;
    c.T_list = Ts;
    c.seeds = 16;
    c.master_seed = 700;
    c.timing = false;
    const SweepResult r = sweep(c);
    std::vector<double> x;
    std::vector<double> y;
    for (const AggregateRow& a : r.aggregates) {
      x.push_back(static_cast<double>(a.T));
      y.push_back(a.mean_regret_add);
    }
    const double slope = loglog_slope(x, y);
    std::int64_t max_queries = 0;
    for (const RunRecord& rec : r.records) max_queries = std::max(max_queries, rec.queries);
    v.pass = v.pass && slope >= 0.4;
    v.detail += fmt::format("{} slope {:.3f} (max queries {}); ", algo, slope, max_queries);
  }

  const std::int64_t T = 100000;
  const double oracle = lowerbound_oracle(1.0, 100, T);
  ExperimentConfig c;
  c.algo = AlgoSpec::parse("never-random");
  c.env.kind = EnvKind::kLowerBound;
  c.env.f = 100;
  c.T_list = {T};
  c.seeds = 64;
  c.master_seed = 770;
  c.timing = false;
  const SweepResult r = sweep(c);
  const AggregateRow& a = r.aggregates.front();
  const bool close = std::abs(a.mean_regret_add - oracle) <= 3.0 * a.stderr_regret_add;
  v.pass = v.pass && close && std::abs(oracle - 125.0) < 1e-6;
  v.detail += fmt::format("never-random f=100 T=1e5: mean R+ {:.2f}+-{:.2f} vs oracle {:.4f}", a.mean_regret_add,
                          a.stderr_regret_add, oracle);
  return v;
}

Verdict ac8() {
  const auto start = Clock::now();
  Verdict v;
  for (const PolicyClass& cls : {PolicyClass::thresholds(), PolicyClass::intervals()}) {
    for (double eps : {0.2, 0.1, 0.05, 0.02}) {
      const Cover cover = build_smooth_cover(cls, eps);
      const CoverReport rep = verify_smooth_cover(cover, make_probe_policies(cls, eps, 500, 88));
      const double ceiling = cover.size_ceiling();
      const bool ok = rep.pass && static_cast<double>(cover.size()) <= ceiling;
      v.pass = v.pass && ok;
      v.detail += fmt::format("{} eps={}: size {} <= {:.0f}, max min-disagreement {:.4f}{}; ", cls.name(), eps,
                              cover.size(), ceiling, rep.max_min_disagreement, ok ? "" : " FAIL");
    }
  }
  const double elapsed = seconds_since(start);
  v.pass = v.pass && elapsed < 10.0;
  v.detail += fmt::format("{:.2f}s", elapsed);
  return v;
}

Verdict ac9() {
  Verdict v;
  Rng rng = derive_rng_stream(900, 0, StreamTag::kCertify);
  for (double L : {1.0, 0.5}) {
    Rng env_rng(91);
    const LowerBoundPayoff env(make_lowerbound_env(10000, 64, L, env_rng));
    const LgCertificate c = certify_local_generalization(env, 100000, rng);
    const bool ok = c.pass && c.max_ratio <= L * (1.0 + 1e-9);
    v.pass = v.pass && ok;
    v.detail += fmt::format("lowerbound L={} f={}: ratio {:.6f}; ", L, env.params().f, c.max_ratio);
  }
  NoLgEnv e;
  e.f = 80;
  e.j_m = 33;
  const NoLgPayoff nolg(e);
  const LgCertificate n = certify_local_generalization(nolg, 100000, rng);
  const bool fails = !n.pass && n.max_ratio > 10.0 * n.declared;
  v.pass = v.pass && fails;
  v.detail += fmt::format("nolg: ratio {:.1f} > 10L, certification {}", n.max_ratio, n.pass ? "passed" : "failed");
  return v;
}

Verdict ac10() {
  std::mt19937_64 rng(1010);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int counterexamples = 0;
  int checked_first = 0;
  int checked_second = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t len = 1 + static_cast<std::size_t>(u(rng) * 60);
    std::vector<double> mentor(len);
    std::vector<double> agent(len);
    const int mode = trial % 4;
    for (std::size_t i = 0; i < len; ++i) {
      mentor[i] = std::max(1e-6, u(rng));
      switch (mode) {
        case 0: agent[i] = mentor[i] * u(rng); break;
        case 1: agent[i] = mentor[i] * (u(rng) < 0.9 ? 1.0 : u(rng)); break;
        case 2: agent[i] = u(rng) < 0.05 ? 0.0 : mentor[i] * u(rng); break;
        default: agent[i] = u(rng); break;
      }
    }
    // Direct evaluation, independent of the library's regret functions.
    bool dominated = true;
    double min_agent = std::numeric_limits<double>::infinity();
    double add = 0.0;
    double mul = 0.0;
    bool mul_inf = false;
    for (std::size_t i = 0; i < len; ++i) {
      dominated = dominated && mentor[i] >= agent[i];
      min_agent = std::min(min_agent, agent[i]);
      add += mentor[i] - agent[i];
      if (agent[i] == 0.0) {
        mul_inf = true;
      } else {
        mul += std::log(mentor[i]) - std::log(agent[i]);
      }
    }
    const double tol = 1e-9;
    if (dominated) {
      ++checked_first;
      if (!mul_inf && add > mul + tol * std::max(1.0, std::abs(mul))) ++counterexamples;
      if (min_agent > 0.0) {
        ++checked_second;
        if (mul > add / min_agent + tol * std::max(1.0, std::abs(add / min_agent))) ++counterexamples;
      }
    }
    const ProdVsAdd lib = check_prod_vs_add(mentor, agent);
    if (lib.additive_le_multiplicative == CheckResult::kFail) ++counterexamples;
    if (lib.multiplicative_le_scaled_additive == CheckResult::kFail) ++counterexamples;
    if (dominated != (lib.additive_le_multiplicative != CheckResult::kNotApplicable)) ++counterexamples;
  }
  Verdict v;
  v.pass = counterexamples == 0 && checked_first > 1000 && checked_second > 1000;
  v.detail = fmt::format("10000 series, first inequality applicable {} times, second {} times, {} counterexamples",
                         checked_first, checked_second, counterexamples);
  return v;
}

Verdict ac11() {
  const auto run_sweep = [](const char* algo, std::size_t actions, std::vector<std::int64_t> Ts) {
    ExperimentConfig c;
    c.algo = AlgoSpec::parse(algo);
    c.env.kind = EnvKind::kExplicit;
    c.env.actions = actions;
    c.env.cells = 8;
    c.env.policies = 16;
    c.T_list = std::move(Ts);
    c.seeds = 16;
    c.master_seed = 1100;
    c.timing = false;
    return sweep(c);
  };
  const SweepResult multi = run_sweep("multi", 4, {1 << 14});
  const SweepResult binary = run_sweep("ood-hedge", 2, {1 << 14});
  std::int64_t multi_mismatch = 0;
  std::int64_t binary_mismatch = 0;
  bool ok = true;
  for (const RunRecord& r : multi.records) {
    multi_mismatch += r.mismatches;
    ok = ok && r.bounds_ok();
  }
  for (const RunRecord& r : binary.records) {
    binary_mismatch += r.mismatches;
    ok = ok && r.bounds_ok();
  }
  const SweepResult trend = run_sweep("multi", 4, {1 << 10, 1 << 11, 1 << 12, 1 << 13, 1 << 14});
  std::string per_t;
  for (const AggregateRow& a : trend.aggregates) per_t += fmt::format(" {:.4f}", a.mean_queries_per_T);
  Verdict v;
  v.pass = ok && multi_mismatch <= 4 * binary_mismatch && trend.trend && trend.trend->queries_per_T_decreasing;
  v.detail = fmt::format("mismatches: 4-action {} vs binary {} (limit {}); queries/T over 2^10..2^14:{}; monotone {}",
                         multi_mismatch, binary_mismatch, 4 * binary_mismatch, per_t,
                         trend.trend && trend.trend->queries_per_T_means_monotone);
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<int, std::function<Verdict()>>> criteria{
      {1, ac1}, {2, ac2}, {3, ac3}, {4, ac4}, {5, ac5}, {6, ac6},
      {7, ac7}, {8, ac8}, {9, ac9}, {10, ac10}, {11, ac11},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  int failures = 0;
  for (const auto& [id, fn] : criteria) {
    if (!only.empty() && !only.count(id)) continue;
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = fmt::format("aborted: {}", e.what());
    }
    failures += v.pass ? 0 : 1;
    std::printf("AC%d %s: %s\n", id, v.pass ? "PASS" : "FAIL", v.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
