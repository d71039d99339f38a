#include "catlab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <thread>

#include <fmt/format.h>

namespace catlab {

namespace {

std::string algo_kind_name(AlgoKind k) {
  switch (k) {
    case AlgoKind::kOodHedge: return "ood-hedge";
    case AlgoKind::kDbwrq: return "dbwrq";
    case AlgoKind::kMulti: return "multi";
    case AlgoKind::kAlways: return "always";
    case AlgoKind::kNeverRandom: return "never-random";
    case AlgoKind::kNeverMajority: return "never-majority";
    case AlgoKind::kBudget: return "budget";
  }
  return "unknown";
}

const char* kAlgoChoices = "ood-hedge, dbwrq, multi, always, never-random, never-majority, budget:<Q>[:<inner>]";

AlgoKind parse_plain_algo(const std::string& s) {
  if (s == "ood-hedge") return AlgoKind::kOodHedge;
  if (s == "dbwrq") return AlgoKind::kDbwrq;
  if (s == "multi") return AlgoKind::kMulti;
  if (s == "always") return AlgoKind::kAlways;
  if (s == "never-random") return AlgoKind::kNeverRandom;
  if (s == "never-majority") return AlgoKind::kNeverMajority;
  throw ArgumentError(fmt::format("unknown algo '{}'; valid: {}", s, kAlgoChoices));
}

class EnvMentor final : public MentorChannel {
 public:
  explicit EnvMentor(const PayoffEnvironment& env) : env_(env) {}
  std::optional<ActionId> ask(const Input& x) override {
    ++answered_;
    return env_.mentor_action(x);
  }
  std::int64_t answered() const { return answered_; }

 private:
  const PayoffEnvironment& env_;
  std::int64_t answered_ = 0;
};

std::vector<Input> make_grid(std::size_t cells, std::size_t n) {
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= cells;
  std::vector<Input> pts;
  pts.reserve(total);
  for (std::size_t code = 0; code < total; ++code) {
    std::vector<double> c(n);
    std::size_t rest = code;
    for (std::size_t k = 0; k < n; ++k) {
      c[k] = (static_cast<double>(rest % cells) + 0.5) / static_cast<double>(cells);
      rest /= cells;
    }
    pts.emplace_back(std::move(c));
  }
  return pts;
}

// Exact for 1-D; for n-D exact up to 4096 points, otherwise the bounding-box
// diagonal (an upper bound).
class DiameterTracker {
 public:
  void add(const Input& x) {
    if (lo_.empty()) {
      lo_.assign(x.coords().begin(), x.coords().end());
      hi_ = lo_;
    }
    for (std::size_t i = 0; i < x.dim(); ++i) {
      lo_[i] = std::min(lo_[i], x[i]);
      hi_[i] = std::max(hi_[i], x[i]);
    }
    if (x.dim() > 1 && points_.size() <= kExactLimit) points_.push_back(x);
  }

  double value() const {
    if (lo_.empty()) return 0.0;
    if (lo_.size() == 1) return hi_[0] - lo_[0];
    if (points_.size() <= kExactLimit) {
      double d = 0.0;
      for (std::size_t i = 0; i < points_.size(); ++i) {
        for (std::size_t j = i + 1; j < points_.size(); ++j) d = std::max(d, distance(points_[i], points_[j]));
      }
      return d;
    }
    double s = 0.0;
    for (std::size_t i = 0; i < lo_.size(); ++i) s += (hi_[i] - lo_[i]) * (hi_[i] - lo_[i]);
    return std::sqrt(s);
  }

 private:
  static constexpr std::size_t kExactLimit = 4096;
  std::vector<double> lo_;
  std::vector<double> hi_;
  std::vector<Input> points_;
};

Cover cover_for(const PolicyClass& cls, double epsilon) {
  if (cls.kind == ClassKind::kFiniteExplicit) return build_adversarial_cover(cls);
  return build_smooth_cover(cls, std::min(epsilon, 1.0));
}

std::int64_t budget_hint_for(const EnvSpec& env, const AlgoSpec& algo) {
  if (env.budget_hint) return *env.budget_hint;
  if (algo.kind == AlgoKind::kBudget) return algo.budget;
  return 64;
}

std::int64_t sections_for(const EnvSpec& env, const AlgoSpec& algo, std::int64_t T) {
  if (env.f) return *env.f;
  const double v = std::sqrt(static_cast<double>(budget_hint_for(env, algo)) * static_cast<double>(T));
  auto f = static_cast<std::int64_t>(std::ceil(v - 1e-9));
  return std::max<std::int64_t>(f, 1);
}

}  // namespace

AlgoSpec AlgoSpec::parse(const std::string& s) {
  AlgoSpec spec;
  if (s.rfind("budget:", 0) == 0) {
    spec.kind = AlgoKind::kBudget;
    const std::string rest = s.substr(7);
    const auto colon = rest.find(':');
    const std::string q = rest.substr(0, colon);
    try {
      std::size_t used = 0;
      spec.budget = std::stoll(q, &used);
      if (used != q.size() || spec.budget < 0) throw ArgumentError("bad budget");
    } catch (const std::exception&) {
      throw ArgumentError(fmt::format("bad query budget in '{}'; expected budget:<Q> with Q >= 0", s));
    }
    if (colon != std::string::npos) {
      spec.inner = parse_plain_algo(rest.substr(colon + 1));
    }
    return spec;
  }
  spec.kind = parse_plain_algo(s);
  return spec;
}

std::string AlgoSpec::name() const {
  if (kind == AlgoKind::kBudget) {
    return inner == AlgoKind::kAlways ? fmt::format("budget:{}", budget)
                                      : fmt::format("budget:{}:{}", budget, algo_kind_name(inner));
  }
  return algo_kind_name(kind);
}

EnvKind EnvSpec::parse_kind(const std::string& s) {
  if (s == "lowerbound") return EnvKind::kLowerBound;
  if (s == "nolg") return EnvKind::kNoLg;
  if (s == "smooth-thresholds" || s == "thresholds") return EnvKind::kSmoothThresholds;
  if (s == "intervals") return EnvKind::kIntervals;
  if (s == "segments") return EnvKind::kSegments;
  if (s == "explicit") return EnvKind::kExplicit;
  throw ArgumentError(fmt::format(
      "unknown env '{}'; valid: lowerbound, nolg, smooth-thresholds, intervals, segments, explicit", s));
}

std::string EnvSpec::name() const {
  switch (kind) {
    case EnvKind::kLowerBound: return "lowerbound";
    case EnvKind::kNoLg: return "nolg";
    case EnvKind::kSmoothThresholds: return "smooth-thresholds";
    case EnvKind::kIntervals: return "intervals";
    case EnvKind::kSegments: return fmt::format("segments{}", K);
    case EnvKind::kExplicit: return fmt::format("explicit{}", actions);
  }
  return "unknown";
}

InputKind InputSpec::parse_kind(const std::string& s) {
  if (s == "uniform") return InputKind::kIIDUniform;
  if (s == "smooth") return InputKind::kIIDSmooth;
  if (s == "scripted") return InputKind::kScripted;
  if (s == "hostile") return InputKind::kAdaptiveSmoothHostile;
  throw ArgumentError(fmt::format("unknown input process '{}'; valid: uniform, smooth, scripted, hostile", s));
}

void ExperimentConfig::validate() const {
  if (T_list.empty()) throw ArgumentError("T list is empty");
  for (std::int64_t T : T_list) {
    if (T < 1) throw ArgumentError(fmt::format("T must be at least 1, got {}", T));
  }
  if (seeds < 1) throw ArgumentError("need at least one seed");
  if (!(env.L > 0.0)) throw ArgumentError("L must be positive");
}

double default_epsilon(std::int64_t T, std::size_t n) {
  const double nn = static_cast<double>(n);
  return std::pow(static_cast<double>(T), -2.0 * nn / (2.0 * nn + 1.0));
}

std::unique_ptr<PayoffEnvironment> build_environment(const EnvSpec& spec, const AlgoSpec& algo, std::int64_t T,
                                                     Rng& env_rng) {
  Rng rng = spec.bits_seed ? derive_rng_stream(*spec.bits_seed, 0, StreamTag::kEnvBits) : env_rng;
  switch (spec.kind) {
    case EnvKind::kLowerBound: {
      LowerBoundEnv env = make_lowerbound_env(T, 0, spec.L, rng);
      env.f = sections_for(spec, algo, T);
      env.bits.resize(static_cast<std::size_t>(env.f));
      std::bernoulli_distribution coin(0.5);
      for (auto& b : env.bits) b = ActionId(coin(rng) ? 1U : 0U);
      return std::make_unique<LowerBoundPayoff>(std::move(env));
    }
    case EnvKind::kNoLg: {
      NoLgEnv env;
      env.f = sections_for(spec, algo, T);
      env.j_m = spec.j_m ? *spec.j_m : std::uniform_int_distribution<std::int64_t>(1, env.f)(rng);
      return std::make_unique<NoLgPayoff>(env);
    }
    case EnvKind::kSmoothThresholds: {
      const double theta = 0.1 + 0.8 * uniform01(rng);
      return std::make_unique<DistancePayoff>("smooth-thresholds", Policy::threshold(theta), spec.L,
                                              PolicyClass::thresholds());
    }
    case EnvKind::kIntervals: {
      const double a = uniform01(rng);
      const double b = uniform01(rng);
      return std::make_unique<DistancePayoff>("intervals", Policy::interval(std::min(a, b), std::max(a, b)), spec.L,
                                              PolicyClass::intervals());
    }
    case EnvKind::kSegments: {
      if (spec.K < 1) throw ArgumentError("segments env needs K >= 1");
      std::vector<double> b;
      while (b.size() + 1 < spec.K) {
        const double v = uniform01(rng);
        if (v > 0.0 && std::find(b.begin(), b.end(), v) == b.end()) b.push_back(v);
      }
      std::sort(b.begin(), b.end());
      std::vector<ActionId> labels(spec.K);
      const std::uint32_t start = std::bernoulli_distribution(0.5)(rng) ? 1U : 0U;
      for (std::size_t i = 0; i < spec.K; ++i) labels[i] = ActionId((start + static_cast<std::uint32_t>(i)) % 2U);
      return std::make_unique<DistancePayoff>(spec.name(), Policy::k_segment(std::move(b), std::move(labels)),
                                              spec.L, PolicyClass::k_segments(spec.K));
    }
    case EnvKind::kExplicit: {
      if (spec.actions < 2 || spec.cells < 1 || spec.policies < 1 || spec.n < 1) {
        throw ArgumentError("explicit env needs actions >= 2, cells >= 1, policies >= 1, n >= 1");
      }
      auto grid = std::make_shared<InputGrid>();
      grid->points = make_grid(spec.cells, spec.n);
      std::uniform_int_distribution<std::uint32_t> label(0, static_cast<std::uint32_t>(spec.actions - 1));
      std::vector<Policy> members;
      for (std::size_t i = 0; i < spec.policies; ++i) {
        std::vector<ActionId> labels(grid->points.size());
        for (auto& l : labels) l = ActionId(label(rng));
        members.push_back(Policy::explicit_table(grid, std::move(labels)));
      }
      const auto mentor_index =
          std::uniform_int_distribution<std::size_t>(0, members.size() - 1)(rng);
      Policy mentor = members[mentor_index];
      return std::make_unique<VoronoiPayoff>(spec.name(), std::move(mentor), spec.L,
                                             PolicyClass::finite(std::move(members), spec.actions), spec.actions);
    }
  }
  throw ArgumentError("unknown environment kind");
}

std::unique_ptr<Learner> build_learner(const AlgoSpec& spec, const PayoffEnvironment& env, std::int64_t T) {
  const std::size_t n = env.dim();
  const auto make_plain = [&](AlgoKind kind) -> std::unique_ptr<Learner> {
    switch (kind) {
      case AlgoKind::kOodHedge:
      case AlgoKind::kMulti: {
        const double eps = spec.epsilon.value_or(default_epsilon(T, n));
        hedge_query_probability(eps, T);  // range check before any cover is built
        const Cover cover = cover_for(env.natural_class(), eps);
        if (kind == AlgoKind::kMulti) {
          return std::make_unique<MultiActionLearner>(cover, env.action_count(), T, eps, n);
        }
        if (env.action_count() != 2) {
          throw ArgumentError("ood-hedge is binary; use --algo multi for environments with more actions");
        }
        return std::make_unique<OodHedgeLearner>(cover, T, eps, n);
      }
      case AlgoKind::kDbwrq: {
        if (n != 1) throw ArgumentError("dbwrq needs a 1-D environment");
        const std::int64_t g = spec.g.value_or(dbwrq_default_g(T, spec.g_exponent));
        return std::make_unique<DbwrqLearner>(T, g);
      }
      case AlgoKind::kAlways: return std::make_unique<AlwaysQueryLearner>(n);
      case AlgoKind::kNeverRandom: return std::make_unique<NeverQueryRandomLearner>(env.action_count());
      case AlgoKind::kNeverMajority: return std::make_unique<NeverQueryMajorityLearner>(env.action_count());
      case AlgoKind::kBudget: break;
    }
    throw ArgumentError("budget caps cannot be nested");
  };
  if (spec.kind == AlgoKind::kBudget) return std::make_unique<BudgetCappedLearner>(spec.budget, make_plain(spec.inner));
  return make_plain(spec.kind);
}

InputProcess build_input_process(const InputSpec& spec, std::size_t n, std::int64_t T) {
  switch (spec.kind) {
    case InputKind::kIIDUniform: return InputProcess::uniform(n);
    case InputKind::kIIDSmooth: return InputProcess::smooth_slab(spec.sigma, spec.offset, n);
    case InputKind::kAdaptiveSmoothHostile: return InputProcess::hostile(spec.sigma, n);
    case InputKind::kScripted: {
      std::vector<Input> script = spec.script.empty() ? load_script(spec.script_path) : spec.script;
      if (static_cast<std::int64_t>(script.size()) < T) {
        throw ArgumentError(fmt::format("input script has {} inputs but T = {}", script.size(), T));
      }
      if (script.front().dim() != n) throw ArgumentError("input script dimension does not match the environment");
      return InputProcess::scripted(std::move(script));
    }
  }
  throw ArgumentError("unknown input kind");
}

bool RunRecord::bounds_ok() const {
  if (!error.empty()) return false;
  return std::all_of(bound_checks.begin(), bound_checks.end(), [](const BoundCheck& c) { return c.pass; });
}

RunRecord run_once(const ExperimentConfig& config, std::int64_t T, std::uint64_t seed, RunTrace* trace) {
  const auto started = std::chrono::steady_clock::now();
  const auto run_index = static_cast<std::uint64_t>(T);
  Rng env_rng = derive_rng_stream(seed, run_index, StreamTag::kEnvBits);
  Rng input_rng = derive_rng_stream(seed, run_index, StreamTag::kInputs);
  Rng learner_rng = derive_rng_stream(seed, run_index, StreamTag::kLearner);
  Rng certify_rng = derive_rng_stream(seed, run_index, StreamTag::kCertify);

  std::shared_ptr<const PayoffEnvironment> env = build_environment(config.env, config.algo, T, env_rng);
  if (env->has_local_generalization()) {
    const LgCertificate cert = certify_local_generalization(*env, config.certify_pairs, certify_rng);
    if (!cert.pass) {
      throw InvariantError(fmt::format("environment {} fails local generalization: ratio {} > {}", env->name(),
                                       cert.max_ratio, cert.ceiling));
    }
  }
  InputProcess inputs = build_input_process(config.input, env->dim(), T);
  std::shared_ptr<Learner> learner = build_learner(config.algo, *env, T);

  RunRecord rec;
  rec.algo = config.algo.name();
  rec.env = env->name();
  rec.T = T;
  rec.seed = seed;
  rec.run_id = fmt::format("{}/{}/T{}/s{}", rec.algo, rec.env, T, seed);

  EnvMentor mentor(*env);
  DiameterTracker diam;
  std::vector<StepRecord> steps;
  steps.reserve(static_cast<std::size_t>(T));
  std::vector<std::optional<double>> radii;
  if (trace) radii.reserve(static_cast<std::size_t>(T));

  const double L = env->local_generalization();
  const bool lg = env->has_local_generalization();
  const bool uncapped = config.algo.kind == AlgoKind::kOodHedge || config.algo.kind == AlgoKind::kDbwrq;
  std::int64_t support_violations = 0;
  std::int64_t unsupported_actions = 0;
  double worst_support_excess = -std::numeric_limits<double>::infinity();
  double mentor_sum = 0.0;
  double agent_sum = 0.0;

  for (std::int64_t t = 1; t <= T; ++t) {
    if (inputs.kind() == InputKind::kAdaptiveSmoothHostile) inputs.set_focus(learner->boundary_hint());
    Input x = inputs.sample(t, input_rng);
    diam.add(x);
    const std::int64_t answered_before = mentor.answered();
    const StepDecision d = learner->step(t, x, mentor, learner_rng);
    const bool answered = mentor.answered() > answered_before;

    StepRecord s;
    s.t = t;
    s.decision = d.decision;
    s.mentor_payoff = validate_payoff(env->mentor_payoff(t, x));
    if (s.mentor_payoff < env->mentor_floor() - kPayoffSlack) {
      throw InvariantError(fmt::format("mentor payoff {} below floor {}", s.mentor_payoff, env->mentor_floor()));
    }
    if (d.decision.is_query()) {
      if (!answered || !d.mentor_action) throw InvariantError("learner reported a query the mentor never answered");
      s.queried = true;
      s.mentor_action = d.mentor_action;
      s.payoff = s.mentor_payoff;
    } else {
      s.payoff = validate_payoff(env->payoff(t, x, d.decision.action()));
      if (d.decision.action() != env->mentor_action(x)) ++rec.mismatches;
      if (lg && d.support_radius) {
        const double excess = (s.mentor_payoff - s.payoff) - L * *d.support_radius;
        worst_support_excess = std::max(worst_support_excess, excess);
        if (excess > kPayoffSlack) ++support_violations;
      } else if (!d.support_radius) {
        ++unsupported_actions;
      }
    }
    mentor_sum += s.mentor_payoff;
    agent_sum += s.payoff;
    s.x = std::move(x);
    steps.push_back(std::move(s));
    if (trace) radii.push_back(d.support_radius);
  }

  const RegretReport report = make_regret_report(steps);
  rec.regret_add = report.additive;
  rec.regret_mul = report.multiplicative;
  rec.queries = report.query_count;
  rec.diam_s = diam.value();

  const auto add_check = [&rec](std::string name, bool pass, std::string detail) {
    rec.bound_checks.push_back({std::move(name), pass, std::move(detail)});
  };
  add_check("scoring", std::abs((mentor_sum - agent_sum) - report.additive) <= 1e-9 && report.query_count == mentor.answered(),
            fmt::format("sum gap {} vs additive {}, {} queries vs {} answers", mentor_sum - agent_sum, report.additive,
                        report.query_count, mentor.answered()));
  {
    const ProdVsAdd pva = check_prod_vs_add(
        [&] { std::vector<double> v; for (const auto& s : steps) v.push_back(s.mentor_payoff); return v; }(),
        [&] { std::vector<double> v; for (const auto& s : steps) v.push_back(s.payoff); return v; }());
    add_check("prod_vs_add",
              pva.additive_le_multiplicative != CheckResult::kFail &&
                  pva.multiplicative_le_scaled_additive != CheckResult::kFail,
              "additive/multiplicative sandwich");
  }

  if (lg && (config.algo.kind == AlgoKind::kDbwrq || config.algo.kind == AlgoKind::kOodHedge)) {
    const std::string name = config.algo.kind == AlgoKind::kDbwrq ? "dbwrq_step_loss" : "ood_step_loss";
    add_check(name, support_violations == 0 && (!uncapped || unsupported_actions == 0),
              fmt::format("{} violations, {} unsupported actions, worst excess {}", support_violations,
                          unsupported_actions, worst_support_excess));
  }
  if (config.algo.kind == AlgoKind::kDbwrq) {
    const auto& db = dynamic_cast<const DbwrqLearner&>(*learner);
    const std::int64_t ceiling = dbwrq_query_ceiling(rec.diam_s, db.g());
    add_check("dbwrq_query_ceiling", rec.queries <= ceiling, fmt::format("{} queries <= {}", rec.queries, ceiling));
    const auto K = env->mentor_segments();
    const double g = static_cast<double>(db.g());
    if (lg && K && g >= 2.0 * L / env->mentor_floor()) {
      const double Kd = static_cast<double>(*K);
      const double Td = static_cast<double>(T);
      const double add_ceiling = 2.0 * L * Kd * Td / (g * g);
      const double mul_ceiling = 4.0 * L * Kd * Td / (g * g * env->mentor_floor());
      add_check("dbwrq_regret_add", rec.regret_add <= add_ceiling * (1.0 + 1e-9) + 1e-12,
                fmt::format("R+ {} <= {}", rec.regret_add, add_ceiling));
      add_check("dbwrq_regret_mul", rec.regret_mul <= ExtendedReal(mul_ceiling * (1.0 + 1e-9) + 1e-12),
                fmt::format("Rmul {} <= {}", rec.regret_mul.to_string(), mul_ceiling));
    }
  }

  rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
  if (trace) {
    trace->steps = std::move(steps);
    trace->support_radius = std::move(radii);
    trace->env = env;
    trace->learner = learner;
  }
  return rec;
}

MeanStderr mean_stderr(const std::vector<double>& xs) {
  MeanStderr out;
  if (xs.empty()) return out;
  const double n = static_cast<double>(xs.size());
  out.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.stderr_ = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  return out;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ArgumentError("slope fit needs at least two matched points");
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw ArgumentError("log-log fit needs positive values");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / static_cast<double>(lx.size());
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / static_cast<double>(ly.size());
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  return sxy / sxx;
}

std::vector<AggregateRow> aggregate(const std::vector<RunRecord>& records) {
  std::map<std::tuple<std::string, std::string, std::int64_t>, std::vector<const RunRecord*>> cells;
  for (const RunRecord& r : records) {
    if (r.error.empty()) cells[{r.algo, r.env, r.T}].push_back(&r);
  }
  std::vector<AggregateRow> rows;
  for (const auto& [key, runs] : cells) {
    std::vector<double> regret;
    std::vector<double> queries;
    std::vector<double> per_t;
    for (const RunRecord* r : runs) {
      regret.push_back(r->regret_add);
      queries.push_back(static_cast<double>(r->queries));
      per_t.push_back(static_cast<double>(r->queries) / static_cast<double>(r->T));
    }
    AggregateRow row;
    std::tie(row.algo, row.env, row.T) = key;
    row.n_seeds = static_cast<int>(runs.size());
    const MeanStderr ra = mean_stderr(regret);
    const MeanStderr q = mean_stderr(queries);
    const MeanStderr qt = mean_stderr(per_t);
    row.mean_regret_add = ra.mean;
    row.stderr_regret_add = ra.stderr_;
    row.mean_queries = q.mean;
    row.stderr_queries = q.stderr_;
    row.mean_queries_per_T = qt.mean;
    row.stderr_queries_per_T = qt.stderr_;
    rows.push_back(row);
  }
  return rows;
}

TrendVerdict trend_verdict(const std::vector<AggregateRow>& rows_in) {
  if (rows_in.size() < 2) throw ArgumentError("trend verdicts need at least two T values");
  std::vector<AggregateRow> rows = rows_in;
  std::sort(rows.begin(), rows.end(), [](const AggregateRow& a, const AggregateRow& b) { return a.T < b.T; });
  const AggregateRow& lo = rows.front();
  const AggregateRow& hi = rows.back();
  TrendVerdict v;
  v.regret_decreasing = hi.mean_regret_add + hi.stderr_regret_add < lo.mean_regret_add - lo.stderr_regret_add;
  v.queries_per_T_decreasing =
      hi.mean_queries_per_T + hi.stderr_queries_per_T < lo.mean_queries_per_T - lo.stderr_queries_per_T;
  v.regret_means_monotone = true;
  v.queries_per_T_means_monotone = true;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    v.regret_means_monotone = v.regret_means_monotone && rows[i].mean_regret_add < rows[i - 1].mean_regret_add;
    v.queries_per_T_means_monotone =
        v.queries_per_T_means_monotone && rows[i].mean_queries_per_T < rows[i - 1].mean_queries_per_T;
  }
  std::vector<double> ts;
  std::vector<double> rs;
  bool positive = true;
  for (const AggregateRow& r : rows) {
    ts.push_back(static_cast<double>(r.T));
    rs.push_back(r.mean_regret_add);
    positive = positive && r.mean_regret_add > 0.0;
  }
  if (positive) v.regret_loglog_slope = loglog_slope(ts, rs);
  return v;
}

SweepResult sweep(const ExperimentConfig& config) {
  config.validate();
  struct Cell {
    std::int64_t T;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (std::int64_t T : config.T_list) {
    for (int k = 0; k < config.seeds; ++k) cells.push_back({T, config.master_seed + static_cast<std::uint64_t>(k)});
  }
  SweepResult result;
  result.records.resize(cells.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      try {
        result.records[i] = run_once(config, cells[i].T, cells[i].seed);
      } catch (const std::exception& e) {
        RunRecord& r = result.records[i];
        r.algo = config.algo.name();
        r.env = config.env.name();
        r.T = cells[i].T;
        r.seed = cells[i].seed;
        r.run_id = fmt::format("{}/{}/T{}/s{}", r.algo, r.env, r.T, r.seed);
        r.regret_add = std::numeric_limits<double>::quiet_NaN();
        r.error = e.what();
      }
    }
  };
  unsigned threads = config.threads ? config.threads : std::max(1U, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(cells.size()));
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  result.aggregates = aggregate(result.records);
  if (result.aggregates.size() >= 2) result.trend = trend_verdict(result.aggregates);
  return result;
}

}  // namespace catlab
