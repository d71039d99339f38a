#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "catlab/core.hpp"
#include "catlab/environments.hpp"
#include "catlab/learners.hpp"

namespace catlab {

enum class AlgoKind { kOodHedge, kDbwrq, kMulti, kAlways, kNeverRandom, kNeverMajority, kBudget };

struct AlgoSpec {
  AlgoKind kind = AlgoKind::kOodHedge;
  std::int64_t budget = 0;             // kBudget only
  AlgoKind inner = AlgoKind::kAlways;  // learner wrapped by kBudget
  std::optional<double> epsilon;       // OOD-Hedge / multi; default T^(-2n/(2n+1))
  double g_exponent = 0.75;            // DBWRQ g(T) = ceil(T^c)
  std::optional<std::int64_t> g;       // explicit g(T), overrides the exponent

  // ood-hedge | dbwrq | multi | always | never-random | never-majority |
  // budget:<Q> | budget:<Q>:<inner>
  static AlgoSpec parse(const std::string& s);
  std::string name() const;
};

enum class EnvKind { kLowerBound, kNoLg, kSmoothThresholds, kIntervals, kSegments, kExplicit };

struct EnvSpec {
  EnvKind kind = EnvKind::kLowerBound;
  std::optional<std::int64_t> f;            // lowerbound / nolg section count
  std::optional<std::int64_t> budget_hint;  // f = ceil(sqrt(hint * T)) when f is unset
  double L = 1.0;
  std::optional<std::uint64_t> bits_seed;   // fixes the random construction across runs
  std::optional<std::int64_t> j_m;          // nolg mentor section
  std::size_t K = 2;                        // segments env
  std::size_t actions = 4;                  // explicit env
  std::size_t cells = 8;                    // explicit env grid points per axis
  std::size_t policies = 16;                // explicit env class size
  std::size_t n = 1;                        // explicit env input dimension

  // lowerbound | nolg | smooth-thresholds | intervals | segments | explicit
  static EnvKind parse_kind(const std::string& s);
  std::string name() const;
};

struct InputSpec {
  InputKind kind = InputKind::kIIDUniform;
  double sigma = 1.0;
  double offset = 0.0;
  std::string script_path;
  std::vector<Input> script;  // takes precedence over script_path when nonempty

  // uniform | smooth | scripted | hostile
  static InputKind parse_kind(const std::string& s);
};

struct ExperimentConfig {
  AlgoSpec algo;
  EnvSpec env;
  InputSpec input;
  std::vector<std::int64_t> T_list;
  int seeds = 1;
  std::uint64_t master_seed = 0;
  std::string out;
  bool timing = true;     // wall_ms column; off gives byte-identical reruns
  unsigned threads = 0;   // 0: hardware concurrency
  std::int64_t certify_pairs = 2000;

  void validate() const;
};

struct BoundCheck {
  std::string name;
  bool pass = true;
  std::string detail;
};

struct RunRecord {
  std::string run_id;
  std::string algo;
  std::string env;
  std::int64_t T = 0;
  std::uint64_t seed = 0;
  double regret_add = 0.0;
  ExtendedReal regret_mul;
  std::int64_t queries = 0;
  double diam_s = 0.0;
  double wall_ms = 0.0;
  std::vector<BoundCheck> bound_checks;
  // Steps whose action was neither a query nor the mentor's action.
  std::int64_t mismatches = 0;
  std::string error;  // nonempty when the run aborted

  bool bounds_ok() const;
};

// Everything a test may want to inspect after a run.
struct RunTrace {
  std::vector<StepRecord> steps;
  std::vector<std::optional<double>> support_radius;
  std::shared_ptr<const PayoffEnvironment> env;
  std::shared_ptr<const Learner> learner;
};

std::unique_ptr<PayoffEnvironment> build_environment(const EnvSpec& spec, const AlgoSpec& algo, std::int64_t T,
                                                     Rng& env_rng);
std::unique_ptr<Learner> build_learner(const AlgoSpec& spec, const PayoffEnvironment& env, std::int64_t T);
InputProcess build_input_process(const InputSpec& spec, std::size_t n, std::int64_t T);

// Default OOD radius parameter eps = T^(-2n/(2n+1)).
double default_epsilon(std::int64_t T, std::size_t n);

// Simulates one (algo, env, T, seed) cell. Deterministic given its arguments
// apart from wall_ms.
RunRecord run_once(const ExperimentConfig& config, std::int64_t T, std::uint64_t seed, RunTrace* trace = nullptr);

struct AggregateRow {
  std::string algo;
  std::string env;
  std::int64_t T = 0;
  int n_seeds = 0;
  double mean_regret_add = 0.0;
  double stderr_regret_add = 0.0;
  double mean_queries = 0.0;
  double stderr_queries = 0.0;
  double mean_queries_per_T = 0.0;
  double stderr_queries_per_T = 0.0;
};

struct TrendVerdict {
  // largest-T mean + stderr < smallest-T mean - stderr
  bool regret_decreasing = false;
  bool queries_per_T_decreasing = false;
  // Means strictly decreasing across every consecutive T.
  bool regret_means_monotone = false;
  bool queries_per_T_means_monotone = false;
  // Least-squares slope of log(mean regret_add) against log T.
  std::optional<double> regret_loglog_slope;
};

struct SweepResult {
  std::vector<RunRecord> records;
  std::vector<AggregateRow> aggregates;
  std::optional<TrendVerdict> trend;  // set when at least two T values ran
};

SweepResult sweep(const ExperimentConfig& config);

std::vector<AggregateRow> aggregate(const std::vector<RunRecord>& records);
TrendVerdict trend_verdict(const std::vector<AggregateRow>& rows);

struct MeanStderr {
  double mean = 0.0;
  double stderr_ = 0.0;
};
MeanStderr mean_stderr(const std::vector<double>& xs);

// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace catlab
