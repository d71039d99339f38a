#include "catlab/commands.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "catlab/csv.hpp"
#include "catlab/harness.hpp"
#include "catlab/plot.hpp"

namespace catlab {

namespace {

struct Flags {
  // run / sweep
  std::string algo = "ood-hedge";
  std::string env = "smooth-thresholds";
  std::string T;
  std::uint64_t seed = 0;
  int seeds = 1;
  double eps = 0.0;
  double g_exponent = 0.75;
  std::int64_t g = 0;
  std::string out;
  std::string config;
  std::string input = "uniform";
  double sigma = 1.0;
  double offset = 0.0;
  std::string script;
  double L = 1.0;
  std::int64_t f = 0;
  std::int64_t budget_hint = 0;
  std::uint64_t bits_seed = 0;
  std::int64_t j_m = 0;
  std::size_t K = 2;
  std::size_t actions = 4;
  std::size_t cells = 8;
  std::size_t policies = 16;
  std::size_t n = 1;
  unsigned threads = 0;
  bool no_timing = false;
  std::int64_t certify_pairs = 2000;

  // verify-cover
  std::string cls;
  std::size_t probes = 200;

  // plot
  std::string csv;
  std::string x = "T";
  std::vector<std::string> y;
  std::string scale = "loglog";
  std::vector<std::string> overlays;
  double c = 0.75;
  double diam = 1.0;
  double hint = 64.0;
};

struct Cli {
  CLI::App app{"Simulation lab for online learning with mentor queries"};
  CLI::App* run = nullptr;
  CLI::App* sweep = nullptr;
  CLI::App* verify = nullptr;
  CLI::App* plot = nullptr;
};

void add_experiment_options(CLI::App* sub, Flags& f) {
  sub->add_option("--algo", f.algo,
                  "ood-hedge | dbwrq | multi | always | never-random | never-majority | budget:<Q>[:<inner>]");
  sub->add_option("--env", f.env, "lowerbound | nolg | smooth-thresholds | intervals | segments | explicit");
  sub->add_option("--T", f.T, "horizon; sweep also takes a,b,c or lo:hi:factor");
  sub->add_option("--seed", f.seed, "master seed");
  sub->add_option("--eps", f.eps, "OOD-Hedge eps (default T^(-2n/(2n+1)))");
  sub->add_option("--g-exponent", f.g_exponent, "DBWRQ g(T) = ceil(T^c)");
  sub->add_option("--g", f.g, "explicit DBWRQ g(T)");
  sub->add_option("--out", f.out, "runs CSV path");
  sub->add_option("--config", f.config, "JSON file with flag values; flags win");
  sub->add_option("--input", f.input, "uniform | smooth | scripted | hostile");
  sub->add_option("--sigma", f.sigma, "smoothness of smooth/hostile inputs");
  sub->add_option("--offset", f.offset, "slab offset for smooth inputs");
  sub->add_option("--script", f.script, "input script for scripted inputs");
  sub->add_option("--L", f.L, "local generalization constant of the environment");
  sub->add_option("--f", f.f, "lowerbound/nolg section count");
  sub->add_option("--budget-hint", f.budget_hint, "sections f = ceil(sqrt(hint T))");
  sub->add_option("--bits-seed", f.bits_seed, "fixes the random environment construction");
  sub->add_option("--j-m", f.j_m, "nolg mentor section");
  sub->add_option("--K", f.K, "segments env piece count");
  sub->add_option("--actions", f.actions, "explicit env action count");
  sub->add_option("--cells", f.cells, "explicit env grid points per axis");
  sub->add_option("--policies", f.policies, "explicit env class size");
  sub->add_option("--n", f.n, "explicit env input dimension");
  sub->add_option("--threads", f.threads, "worker threads (0: all cores)");
  sub->add_option("--certify-pairs", f.certify_pairs, "pairs used to certify local generalization");
  sub->add_flag("--no-timing", f.no_timing, "write wall_ms as 0 for byte-identical reruns");
}

std::unique_ptr<Cli> make_cli(Flags& f) {
  auto cli = std::make_unique<Cli>();
  cli->app.require_subcommand(1);
  cli->run = cli->app.add_subcommand("run", "simulate one (algo, env, T, seed) cell");
  cli->sweep = cli->app.add_subcommand("sweep", "simulate a grid of T values and seeds");
  cli->verify = cli->app.add_subcommand("verify-cover", "build and check a smooth eps-cover");
  cli->plot = cli->app.add_subcommand("plot", "render a CSV column against T as SVG");
  add_experiment_options(cli->run, f);
  add_experiment_options(cli->sweep, f);
  cli->sweep->add_option("--seeds", f.seeds, "seeds per T");

  cli->verify->add_option("--class", f.cls, "thresholds | intervals | segments")->required();
  cli->verify->add_option("--eps", f.eps, "cover radius")->required();
  cli->verify->add_option("--K", f.K, "segments class piece count");
  cli->verify->add_option("--probes", f.probes, "random probe policies on top of the grid");
  cli->verify->add_option("--seed", f.seed, "probe seed");

  cli->plot->add_option("--csv", f.csv, "input CSV")->required();
  cli->plot->add_option("--x", f.x, "x column");
  cli->plot->add_option("--y", f.y, "y column(s)")->required();
  cli->plot->add_option("--scale", f.scale, "linear | loglog");
  cli->plot->add_option("--overlay", f.overlays, "2LKT/g^2 | (diam+4)T^c | LT/8f | power:<a>:<b>");
  cli->plot->add_option("--out", f.out, "SVG path");
  cli->plot->add_option("--L", f.L, "overlay L");
  cli->plot->add_option("--K", f.K, "overlay K");
  cli->plot->add_option("--c", f.c, "overlay exponent c");
  cli->plot->add_option("--diam", f.diam, "overlay diam");
  cli->plot->add_option("--hint", f.hint, "overlay budget hint");
  return cli;
}

std::string json_scalar(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
  if (v.is_number_float()) return fmt::format("{}", v.get<double>());
  throw ArgumentError(fmt::format("config value {} is not a scalar", v.dump()));
}

// Flags absent from the command line, as read from the config file.
std::vector<std::string> config_args(const std::string& path, CLI::App* sub) {
  std::ifstream in(path);
  if (!in) throw ArgumentError(fmt::format("cannot read config {}", path));
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError(fmt::format("config {} is not valid JSON: {}", path, e.what()));
  }
  if (!doc.is_object()) throw ArgumentError(fmt::format("config {} must hold a JSON object", path));
  std::vector<std::string> out;
  for (const auto& [key, value] : doc.items()) {
    const std::string flag = "--" + key;
    CLI::Option* opt = nullptr;
    try {
      opt = sub->get_option(flag);
    } catch (const CLI::OptionNotFound&) {
      throw ArgumentError(fmt::format("unknown config key '{}'", key));
    }
    if (key == "config" || opt->count() > 0) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) out.push_back(flag);
      continue;
    }
    if (value.is_array()) {
      std::string joined;
      for (const auto& item : value) joined += (joined.empty() ? "" : ",") + json_scalar(item);
      out.push_back(flag);
      out.push_back(joined);
      continue;
    }
    out.push_back(flag);
    out.push_back(json_scalar(value));
  }
  return out;
}

ExperimentConfig make_config(const Flags& f, const CLI::App* sub) {
  const auto given = [sub](const char* name) { return sub->get_option(name)->count() > 0; };
  ExperimentConfig cfg;
  cfg.algo = AlgoSpec::parse(f.algo);
  if (given("--eps")) cfg.algo.epsilon = f.eps;
  cfg.algo.g_exponent = f.g_exponent;
  if (given("--g")) cfg.algo.g = f.g;
  cfg.env.kind = EnvSpec::parse_kind(f.env);
  cfg.env.L = f.L;
  if (given("--f")) cfg.env.f = f.f;
  if (given("--budget-hint")) cfg.env.budget_hint = f.budget_hint;
  if (given("--bits-seed")) cfg.env.bits_seed = f.bits_seed;
  if (given("--j-m")) cfg.env.j_m = f.j_m;
  cfg.env.K = f.K;
  cfg.env.actions = f.actions;
  cfg.env.cells = f.cells;
  cfg.env.policies = f.policies;
  cfg.env.n = f.n;
  cfg.input.kind = InputSpec::parse_kind(f.input);
  cfg.input.sigma = f.sigma;
  cfg.input.offset = f.offset;
  cfg.input.script_path = f.script;
  if (cfg.input.kind == InputKind::kScripted && f.script.empty()) {
    throw ArgumentError("--input scripted needs --script");
  }
  cfg.T_list = parse_T_list(f.T);
  cfg.master_seed = f.seed;
  cfg.seeds = f.seeds;
  cfg.timing = !f.no_timing;
  cfg.threads = f.threads;
  cfg.certify_pairs = f.certify_pairs;
  cfg.validate();
  return cfg;
}

std::string runs_path(const Flags& f) {
  return f.out.empty() ? (std::filesystem::path(default_out_dir()) / "runs.csv").string() : f.out;
}

// Builds every (env, learner) pair once so configuration errors surface as
// usage errors before any simulation starts.
void precheck(const ExperimentConfig& cfg, std::ostream& err) {
  for (std::int64_t T : cfg.T_list) {
    Rng rng = derive_rng_stream(cfg.master_seed, static_cast<std::uint64_t>(T), StreamTag::kEnvBits);
    const auto env = build_environment(cfg.env, cfg.algo, T, rng);
    build_learner(cfg.algo, *env, T);
    build_input_process(cfg.input, env->dim(), T);
    const bool hedge_based = cfg.algo.kind == AlgoKind::kOodHedge || cfg.algo.kind == AlgoKind::kMulti ||
                             (cfg.algo.kind == AlgoKind::kBudget &&
                              (cfg.algo.inner == AlgoKind::kOodHedge || cfg.algo.inner == AlgoKind::kMulti));
    if (hedge_based && env->has_local_generalization()) {
      const double eps = cfg.algo.epsilon.value_or(default_epsilon(T, env->dim()));
      const double ceiling = std::pow(env->mentor_floor() / (2.0 * env->local_generalization()),
                                      static_cast<double>(env->dim()));
      if (eps > ceiling) {
        err << fmt::format("warning: eps {} above (mu_min/2L)^n = {} at T = {}; regret guarantees do not apply\n",
                           eps, ceiling, T);
      }
    }
  }
}

void print_failed_checks(const RunRecord& r, std::ostream& err) {
  if (!r.error.empty()) err << fmt::format("{}: aborted: {}\n", r.run_id, r.error);
  for (const BoundCheck& c : r.bound_checks) {
    if (!c.pass) err << fmt::format("{}: bound check {} failed: {}\n", r.run_id, c.name, c.detail);
  }
}

int cmd_run(const Flags& f, const CLI::App* sub, std::ostream& out, std::ostream& err) {
  const ExperimentConfig cfg = make_config(f, sub);
  if (cfg.T_list.size() != 1) throw ArgumentError("run takes a single T; use sweep for several");
  precheck(cfg, err);
  const RunRecord r = run_once(cfg, cfg.T_list.front(), cfg.master_seed);
  const std::string path = runs_path(f);
  append_runs(path, {r}, cfg.timing);
  out << fmt::format("{} regret_add={} regret_mul={} queries={} diam_s={} bounds_ok={} -> {}\n", r.run_id,
                     r.regret_add, r.regret_mul.to_string(), r.queries, r.diam_s, r.bounds_ok(), path);
  print_failed_checks(r, err);
  return r.bounds_ok() ? kExitOk : kExitBoundFailure;
}

int cmd_sweep(const Flags& f, const CLI::App* sub, std::ostream& out, std::ostream& err) {
  const ExperimentConfig cfg = make_config(f, sub);
  precheck(cfg, err);
  const SweepResult result = sweep(cfg);
  const std::string path = runs_path(f);
  append_runs(path, result.records, cfg.timing);
  std::filesystem::path agg_path(path);
  agg_path.replace_filename(agg_path.stem().string() + "_aggregates.csv");
  write_aggregates(agg_path.string(), result.aggregates);

  bool ok = true;
  for (const RunRecord& r : result.records) {
    if (!r.bounds_ok()) {
      ok = false;
      print_failed_checks(r, err);
    }
  }
  for (const AggregateRow& a : result.aggregates) {
    out << fmt::format("T={} seeds={} regret_add={:.6g}+-{:.3g} queries={:.6g}+-{:.3g} queries/T={:.4g}\n", a.T,
                       a.n_seeds, a.mean_regret_add, a.stderr_regret_add, a.mean_queries, a.stderr_queries,
                       a.mean_queries_per_T);
  }
  if (result.trend) {
    const TrendVerdict& v = *result.trend;
    out << fmt::format("regret trend: {}\n", v.regret_decreasing ? "decreasing" : "not decreasing");
    out << fmt::format("queries/T trend: {}\n", v.queries_per_T_decreasing ? "decreasing" : "not decreasing");
    if (v.regret_loglog_slope) {
      out << fmt::format("regret log-log slope: {:.3f} ({})\n", *v.regret_loglog_slope,
                         *v.regret_loglog_slope > 0.0 ? "regret grows with T" : "regret does not grow with T");
    }
  }
  out << fmt::format("{} runs -> {}, {}\n", result.records.size(), path, agg_path.string());
  return ok ? kExitOk : kExitBoundFailure;
}

int cmd_verify_cover(const Flags& f, std::ostream& out) {
  PolicyClass cls;
  if (f.cls == "thresholds") {
    cls = PolicyClass::thresholds();
  } else if (f.cls == "intervals") {
    cls = PolicyClass::intervals();
  } else if (f.cls == "segments") {
    cls = PolicyClass::k_segments(f.K);
  } else {
    throw ArgumentError(fmt::format("unsupported class '{}'; valid: thresholds, intervals, segments", f.cls));
  }
  const Cover cover = build_smooth_cover(cls, f.eps);
  const std::vector<Policy> probes = make_probe_policies(cls, f.eps, f.probes, f.seed);
  const CoverReport report = verify_smooth_cover(cover, probes);
  const double ceiling = cover.size_ceiling();
  const bool pass = report.pass && static_cast<double>(cover.size()) <= ceiling;
  out << fmt::format("class={} eps={} size={} ceiling={:.6g} max_min_disagreement={:.6g} probes={} {}\n", cls.name(),
                     f.eps, cover.size(), ceiling, report.max_min_disagreement, report.probes,
                     pass ? "pass" : "fail");
  return pass ? kExitOk : kExitBoundFailure;
}

int cmd_plot(const Flags& f, const CLI::App* sub, std::ostream& out) {
  PlotSpec spec;
  spec.csv = f.csv;
  spec.x = f.x;
  spec.y = f.y;
  if (f.scale == "linear") {
    spec.scale = PlotScale::kLinear;
  } else if (f.scale == "loglog") {
    spec.scale = PlotScale::kLogLog;
  } else {
    throw ArgumentError(fmt::format("unknown scale '{}'; valid: linear, loglog", f.scale));
  }
  spec.overlays = f.overlays;
  spec.out = sub->get_option("--out")->count() > 0
                 ? f.out
                 : (std::filesystem::path(default_out_dir()) / "plot.svg").string();
  spec.L = f.L;
  spec.K = static_cast<double>(f.K);
  spec.c = f.c;
  spec.diam = f.diam;
  spec.hint = f.hint;
  const auto written = render_plot(spec);
  out << fmt::format("wrote {} and {}\n", written[0], written[1]);
  return kExitOk;
}

}  // namespace

std::vector<std::int64_t> parse_T_list(const std::string& s) {
  if (s.empty()) throw ArgumentError("--T is empty");
  const auto to_int = [&s](const std::string& part) {
    try {
      std::size_t used = 0;
      const double v = std::stod(part, &used);
      if (used == part.size() && v >= 1.0 && v == std::floor(v) && v < 9.2e18) return static_cast<std::int64_t>(v);
    } catch (const std::exception&) {
    }
    throw ArgumentError(fmt::format("bad T value '{}' in '{}'", part, s));
  };
  std::vector<std::int64_t> out;
  if (s.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::string part;
    std::istringstream in(s);
    while (std::getline(in, part, ':')) parts.push_back(part);
    if (parts.size() != 3) throw ArgumentError(fmt::format("geometric T spec '{}' must be lo:hi:factor", s));
    const std::int64_t lo = to_int(parts[0]);
    const std::int64_t hi = to_int(parts[1]);
    const std::int64_t factor = to_int(parts[2]);
    if (factor < 2) throw ArgumentError("geometric T factor must be at least 2");
    if (hi < lo) throw ArgumentError(fmt::format("T spec '{}' has hi < lo", s));
    for (std::int64_t T = lo; T <= hi; T *= factor) {
      out.push_back(T);
      if (T > hi / factor) break;
    }
    return out;
  }
  std::string part;
  std::istringstream in(s);
  while (std::getline(in, part, ',')) out.push_back(to_int(part));
  return out;
}

std::string default_out_dir() {
  const char* dir = std::getenv("CATLAB_OUT_DIR");
  return dir && *dir ? dir : "out";
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    Flags flags;
    auto cli = make_cli(flags);
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    cli->app.parse(reversed);

    CLI::App* sub = cli->run->parsed() ? cli->run : cli->sweep->parsed() ? cli->sweep : nullptr;
    if (sub && !flags.config.empty()) {
      std::vector<std::string> merged{args.front()};
      const std::vector<std::string> extra = config_args(flags.config, sub);
      merged.insert(merged.end(), extra.begin(), extra.end());
      merged.insert(merged.end(), args.begin() + 1, args.end());
      flags = Flags{};
      cli = make_cli(flags);
      std::vector<std::string> again(merged.rbegin(), merged.rend());
      cli->app.parse(again);
      sub = cli->run->parsed() ? cli->run : cli->sweep;
    }

    if (cli->run->parsed()) return cmd_run(flags, cli->run, out, err);
    if (cli->sweep->parsed()) return cmd_sweep(flags, cli->sweep, out, err);
    if (cli->verify->parsed()) return cmd_verify_cover(flags, out);
    return cmd_plot(flags, cli->plot, out);
  } catch (const CLI::CallForHelp& e) {
    out << "usage: catlab <run|sweep|verify-cover|plot> [options]; use <subcommand> --help\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UnsupportedError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InvariantError& e) {
    err << "invariant violated: " << e.what() << '\n';
    return kExitBoundFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace catlab
