#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "catlab/csv.hpp"
#include "catlab/harness.hpp"

using namespace catlab;

namespace {

ExperimentConfig config(const std::string& algo, EnvKind env, std::int64_t T) {
  ExperimentConfig c;
  c.algo = AlgoSpec::parse(algo);
  c.env.kind = env;
  c.T_list = {T};
  c.timing = false;
  c.threads = 1;
  return c;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("algo and env parsing") {
    CHECK(AlgoSpec::parse("dbwrq").kind == AlgoKind::kDbwrq);
    const AlgoSpec b = AlgoSpec::parse("budget:64");
    CHECK(b.kind == AlgoKind::kBudget);
    CHECK(b.budget == 64);
    CHECK(b.name() == "budget:64");
    CHECK(AlgoSpec::parse("budget:5:ood-hedge").inner == AlgoKind::kOodHedge);
    CHECK_THROWS_AS(AlgoSpec::parse("nosuch"), ArgumentError);
    CHECK_THROWS_AS(AlgoSpec::parse("budget:x"), ArgumentError);
    CHECK(EnvSpec::parse_kind("nolg") == EnvKind::kNoLg);
    CHECK_THROWS_AS(EnvSpec::parse_kind("moon"), ArgumentError);
    CHECK(default_epsilon(1024, 1) == doctest::Approx(std::pow(1024.0, -2.0 / 3.0)));
  }

  TEST_CASE("always-query run has zero regret") {
    const RunRecord r = run_once(config("always", EnvKind::kSmoothThresholds, 100), 100, 3);
    CHECK(r.queries == 100);
    CHECK(r.regret_add == 0.0);
    CHECK(r.regret_mul == ExtendedReal(0.0));
    CHECK(r.bounds_ok());
  }

  TEST_CASE("dbwrq on the lower-bound environment respects its query ceiling") {
    const RunRecord r = run_once(config("dbwrq", EnvKind::kLowerBound, 10000), 10000, 7);
    CHECK(r.queries <= 5000);
    CHECK(r.bounds_ok());
    bool saw_ceiling = false;
    for (const auto& c : r.bound_checks) saw_ceiling = saw_ceiling || c.name == "dbwrq_query_ceiling";
    CHECK(saw_ceiling);
  }

  TEST_CASE("scoring recomputes from the trace") {
    RunTrace trace;
    const RunRecord r = run_once(config("ood-hedge", EnvKind::kSmoothThresholds, 2000), 2000, 5, &trace);
    REQUIRE(trace.steps.size() == 2000);
    double mentor = 0.0;
    double agent = 0.0;
    std::int64_t queries = 0;
    for (const StepRecord& s : trace.steps) {
      mentor += trace.env->mentor_payoff(s.t, s.x);
      if (s.decision.is_query()) {
        ++queries;
        agent += trace.env->mentor_payoff(s.t, s.x);
      } else {
        agent += trace.env->payoff(s.t, s.x, s.decision.action());
      }
    }
    CHECK(r.regret_add == doctest::Approx(mentor - agent).epsilon(1e-12));
    CHECK(r.queries == queries);
    CHECK(r.bounds_ok());
  }

  TEST_CASE("runs are deterministic") {
    ExperimentConfig c = config("ood-hedge", EnvKind::kIntervals, 3000);
    const RunRecord a = run_once(c, 3000, 21);
    const RunRecord b = run_once(c, 3000, 21);
    CHECK(runs_row(a, false) == runs_row(b, false));
    const RunRecord other = run_once(c, 3000, 22);
    CHECK(runs_row(a, false) != runs_row(other, false));
  }

  TEST_CASE("sweeps write byte-identical CSVs") {
    const auto dir = std::filesystem::temp_directory_path() / "catlab_sweep_test";
    std::filesystem::remove_all(dir);
    ExperimentConfig c = config("dbwrq", EnvKind::kSegments, 1000);
    c.T_list = {500, 1000};
    c.seeds = 3;
    c.threads = 2;
    const SweepResult one = sweep(c);
    const SweepResult two = sweep(c);
    append_runs((dir / "a.csv").string(), one.records, false);
    append_runs((dir / "b.csv").string(), two.records, false);
    CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
    CHECK(one.records.size() == 6);
    CHECK(one.aggregates.size() == 2);
    CHECK(one.trend.has_value());

    const CsvTable t = read_csv((dir / "a.csv").string());
    CHECK(t.header.size() == 11);
    CHECK(t.rows.size() == 6);
    CHECK(t.numbers("T") == std::vector<double>{500, 500, 500, 1000, 1000, 1000});
    CHECK_THROWS_AS(t.column("regret"), ArgumentError);
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("rng streams") {
    Rng a = derive_rng_stream(1, 2, StreamTag::kInputs);
    Rng b = derive_rng_stream(1, 2, StreamTag::kInputs);
    for (int i = 0; i < 100; ++i) CHECK(a() == b());

    Rng x = derive_rng_stream(1, 2, StreamTag::kInputs);
    Rng y = derive_rng_stream(1, 2, StreamTag::kLearner);
    const int n = 100000;
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
      const double u = uniform01(x);
      const double v = uniform01(y);
      sx += u;
      sy += v;
      sxx += u * u;
      syy += v * v;
      sxy += u * v;
    }
    const double cov = sxy / n - (sx / n) * (sy / n);
    const double corr = cov / std::sqrt((sxx / n - (sx / n) * (sx / n)) * (syy / n - (sy / n) * (sy / n)));
    CHECK(std::abs(corr) < 0.01);

    std::vector<std::uint64_t> firsts;
    for (std::uint64_t run = 0; run < 1000; ++run) firsts.push_back(derive_rng_stream(9, run, StreamTag::kHedge)());
    std::sort(firsts.begin(), firsts.end());
    CHECK(std::adjacent_find(firsts.begin(), firsts.end()) == firsts.end());
  }

  TEST_CASE("statistics helpers") {
    const MeanStderr m = mean_stderr({1.0, 2.0, 3.0, 4.0});
    CHECK(m.mean == doctest::Approx(2.5));
    CHECK(m.stderr_ == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
    CHECK(loglog_slope({1, 10, 100}, {3, 3 * std::sqrt(10.0), 30}) == doctest::Approx(0.5));
    CHECK_THROWS_AS(loglog_slope({1}, {1}), ArgumentError);
  }

  TEST_CASE("nolg environment skips certification but still scores") {
    const RunRecord r = run_once(config("dbwrq", EnvKind::kNoLg, 2000), 2000, 1);
    CHECK(r.error.empty());
    for (const auto& c : r.bound_checks) CHECK(c.name.rfind("dbwrq_regret", 0) != 0);
  }

  TEST_CASE("configuration errors surface as argument errors") {
    ExperimentConfig c = config("ood-hedge", EnvKind::kSmoothThresholds, 100);
    c.algo.epsilon = 1e-9;
    CHECK_THROWS_AS(run_once(c, 100, 1), ArgumentError);
    ExperimentConfig d = config("ood-hedge", EnvKind::kExplicit, 100);
    CHECK_THROWS_AS(run_once(d, 100, 1), ArgumentError);
    ExperimentConfig e = config("dbwrq", EnvKind::kSmoothThresholds, 100);
    e.T_list.clear();
    CHECK_THROWS_AS(e.validate(), ArgumentError);
  }

  TEST_CASE("hostile inputs still satisfy the per-step bound") {
    ExperimentConfig c = config("ood-hedge", EnvKind::kSmoothThresholds, 4096);
    c.input.kind = InputKind::kAdaptiveSmoothHostile;
    c.input.sigma = 0.2;
    const RunRecord r = run_once(c, 4096, 2);
    CHECK(r.bounds_ok());
  }
}
