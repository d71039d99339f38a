#include "catlab/environments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <fmt/format.h>

namespace catlab {

namespace {

void require_unit(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw ArgumentError(fmt::format("input {} outside [0, 1]", x));
}

std::int64_t section_of(double x, std::int64_t f) {
  const auto j = static_cast<std::int64_t>(std::floor(x * static_cast<double>(f))) + 1;
  return std::clamp<std::int64_t>(j, 1, f);
}

// Smallest r with r*r >= v.
std::int64_t ceil_sqrt(std::int64_t v) {
  if (v <= 0) return 0;
  auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(v)));
  while (r * r > v) --r;
  while (r * r < v) ++r;
  return r;
}

double distance_to_piece(double x, const Piece& p) {
  if (x < p.lo) return p.lo - x;
  if (x > p.hi) return x - p.hi;
  return 0.0;
}

}  // namespace

std::int64_t lowerbound_section(const LowerBoundEnv& env, double x) {
  require_unit(x);
  return section_of(x, env.f);
}

double lowerbound_payoff(const LowerBoundEnv& env, double x, ActionId y) {
  const std::int64_t j = lowerbound_section(env, x);
  if (y == env.bits[static_cast<std::size_t>(j - 1)]) return 1.0;
  const double f = static_cast<double>(env.f);
  const double midpoint = (static_cast<double>(j) - 0.5) / f;
  return 1.0 - env.L * (1.0 / (2.0 * f) - std::abs(midpoint - x));
}

Policy lowerbound_mentor(const LowerBoundEnv& env) {
  std::vector<double> boundaries;
  boundaries.reserve(static_cast<std::size_t>(env.f - 1));
  for (std::int64_t j = 1; j < env.f; ++j) boundaries.push_back(static_cast<double>(j) / static_cast<double>(env.f));
  return Policy::k_segment(std::move(boundaries), env.bits);
}

LowerBoundEnv make_lowerbound_env(std::int64_t T, std::int64_t query_budget_hint, double L, Rng& rng) {
  if (T < 1) throw ArgumentError("T must be at least 1");
  if (query_budget_hint < 0) throw ArgumentError("query budget hint must be non-negative");
  if (!(L > 0.0) || L > 1.0) throw ArgumentError(fmt::format("L must lie in (0, 1], got {}", L));
  LowerBoundEnv env;
  env.f = std::max<std::int64_t>(ceil_sqrt(query_budget_hint * T), 1);
  env.L = L;
  env.bits.resize(static_cast<std::size_t>(env.f));
  std::bernoulli_distribution coin(0.5);
  for (auto& b : env.bits) b = ActionId(coin(rng) ? 1U : 0U);
  return env;
}

double nolg_payoff(const NoLgEnv& env, double x, ActionId y) {
  require_unit(x);
  const ActionId mentor(section_of(x, env.f) == env.j_m ? 1U : 0U);
  return y == mentor ? 1.0 : 0.0;
}

Policy nolg_mentor(const NoLgEnv& env) {
  const double f = static_cast<double>(env.f);
  std::vector<double> b;
  std::vector<ActionId> labels;
  if (env.j_m > 1) {
    b.push_back(static_cast<double>(env.j_m - 1) / f);
    labels.emplace_back(0U);
  }
  labels.emplace_back(1U);
  if (env.j_m < env.f) {
    b.push_back(static_cast<double>(env.j_m) / f);
    labels.emplace_back(0U);
  }
  return Policy::k_segment(std::move(b), std::move(labels));
}

PayoffEnvironment::PayoffEnvironment(Policy mentor, double declared, LgBasis basis, double mu_min,
                                     std::size_t dim, std::size_t action_count, PolicyClass natural_class)
    : mentor_(std::move(mentor)),
      declared_(declared),
      lg_basis_(basis),
      mu_min_(mu_min),
      dim_(dim),
      action_count_(action_count),
      natural_class_(std::move(natural_class)) {
  if (!(mu_min_ > 0.0) || mu_min_ > 1.0) throw ArgumentError("mentor floor must lie in (0, 1]");
}

double PayoffEnvironment::local_generalization() const {
  return lg_basis_ == LgBasis::kLipschitzOptimalMentor ? 2.0 * declared_ : declared_;
}

std::optional<std::size_t> PayoffEnvironment::mentor_segments() const {
  if (!mentor_.is_analytic()) return std::nullopt;
  return mentor_.segment_count();
}

LowerBoundPayoff::LowerBoundPayoff(LowerBoundEnv env)
    : PayoffEnvironment(lowerbound_mentor(env), env.L, LgBasis::kDirect, 1.0, 1, 2,
                        PolicyClass::k_segments(static_cast<std::size_t>(env.f))),
      env_(std::move(env)) {
  if (env_.bits.size() != static_cast<std::size_t>(env_.f)) throw ArgumentError("need one bit per section");
  if (!(env_.L > 0.0) || env_.L > 1.0) throw ArgumentError("lower-bound construction assumes L in (0, 1]");
}

double LowerBoundPayoff::payoff(std::int64_t, const Input& x, ActionId y) const {
  return lowerbound_payoff(env_, x.front(), y);
}

NoLgPayoff::NoLgPayoff(NoLgEnv env)
    : PayoffEnvironment(nolg_mentor(env), 1.0, LgBasis::kNone, 1.0, 1, 2, PolicyClass::intervals()),
      env_(env) {
  if (env_.f < 1 || env_.j_m < 1 || env_.j_m > env_.f) throw ArgumentError("need 1 <= j_m <= f");
}

double NoLgPayoff::payoff(std::int64_t, const Input& x, ActionId y) const {
  return nolg_payoff(env_, x.front(), y);
}

DistancePayoff::DistancePayoff(std::string name, Policy mentor, double L, PolicyClass natural_class,
                               std::size_t action_count)
    : PayoffEnvironment(mentor, L, LgBasis::kDirect, 1.0, 1, action_count, std::move(natural_class)),
      name_(std::move(name)),
      pieces_(mentor.pieces()),
      slope_(L) {
  if (!(L > 0.0)) throw ArgumentError("slope L must be positive");
}

double DistancePayoff::payoff(std::int64_t, const Input& x, ActionId y) const {
  double d = std::numeric_limits<double>::infinity();
  for (const Piece& p : pieces_) {
    if (p.action == y) d = std::min(d, distance_to_piece(x.front(), p));
  }
  return std::max(0.0, 1.0 - slope_ * d);
}

VoronoiPayoff::VoronoiPayoff(std::string name, Policy mentor, double L, PolicyClass natural_class,
                             std::size_t action_count)
    : PayoffEnvironment(mentor, L, LgBasis::kLipschitzOptimalMentor, 1.0,
                        std::get<Explicit>(mentor.descriptor()).grid->points.front().dim(), action_count,
                        std::move(natural_class)),
      name_(std::move(name)),
      slope_(L) {
  if (!(L > 0.0)) throw ArgumentError("slope L must be positive");
  if (this->mentor().indicator_target()) throw ArgumentError("voronoi mentor must be a plain table");
}

double VoronoiPayoff::payoff(std::int64_t, const Input& x, ActionId y) const {
  const auto& table = std::get<Explicit>(mentor().descriptor());
  double d_all = std::numeric_limits<double>::infinity();
  double d_y = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < table.labels.size(); ++i) {
    const double d = distance(table.grid->points[i], x);
    d_all = std::min(d_all, d);
    if (table.labels[i] == y) d_y = std::min(d_y, d);
  }
  if (!std::isfinite(d_y)) return 0.0;
  return std::max(0.0, 1.0 - 0.5 * slope_ * (d_y - d_all));
}

ConstantPayoff::ConstantPayoff(double value, Policy mentor, std::size_t dim)
    : PayoffEnvironment(std::move(mentor), 0.0, LgBasis::kDirect, value, dim, 2, PolicyClass::thresholds()),
      value_(value) {}

InputProcess InputProcess::uniform(std::size_t n) {
  InputProcess p;
  p.kind_ = InputKind::kIIDUniform;
  p.n_ = n;
  return p;
}

InputProcess InputProcess::smooth_slab(double sigma, double offset, std::size_t n) {
  if (!(sigma > 0.0) || sigma > 1.0) throw ArgumentError(fmt::format("sigma must lie in (0, 1], got {}", sigma));
  if (offset < 0.0 || offset + sigma > 1.0 + 1e-12) throw ArgumentError("smooth slab must lie inside [0, 1]");
  InputProcess p;
  p.kind_ = InputKind::kIIDSmooth;
  p.n_ = n;
  p.sigma_ = sigma;
  p.offset_ = offset;
  return p;
}

InputProcess InputProcess::scripted(std::vector<Input> sequence) {
  if (sequence.empty()) throw ArgumentError("scripted input sequence is empty");
  InputProcess p;
  p.kind_ = InputKind::kScripted;
  p.n_ = sequence.front().dim();
  p.script_ = std::move(sequence);
  return p;
}

InputProcess InputProcess::hostile(double sigma, std::size_t n) {
  if (!(sigma > 0.0) || sigma > 1.0) throw ArgumentError(fmt::format("sigma must lie in (0, 1], got {}", sigma));
  InputProcess p;
  p.kind_ = InputKind::kAdaptiveSmoothHostile;
  p.n_ = n;
  p.sigma_ = sigma;
  return p;
}

Input InputProcess::sample(std::int64_t t, Rng& rng) {
  if (kind_ == InputKind::kScripted) {
    if (t < 1 || static_cast<std::size_t>(t) > script_.size()) {
      throw ArgumentError(fmt::format("scripted input sequence exhausted at t = {} (length {})", t, script_.size()));
    }
    return script_[static_cast<std::size_t>(t - 1)];
  }
  std::vector<double> c(n_);
  for (double& v : c) v = uniform01(rng);
  if (kind_ == InputKind::kIIDSmooth) {
    c[0] = std::min(1.0, offset_ + sigma_ * c[0]);
  } else if (kind_ == InputKind::kAdaptiveSmoothHostile) {
    const double centre = focus_.value_or(0.5);
    const double lo = std::clamp(centre - sigma_ / 2.0, 0.0, 1.0 - sigma_);
    c[0] = std::min(1.0, lo + sigma_ * c[0]);
  }
  return Input(std::move(c));
}

std::vector<Input> load_script(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError(fmt::format("cannot open input script '{}'", path));
  std::vector<Input> out;
  std::string line;
  while (std::getline(in, line)) {
    std::replace(line.begin(), line.end(), ',', ' ');
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ss(line);
    std::vector<double> coords;
    double v = 0.0;
    while (ss >> v) coords.push_back(v);
    if (!ss.eof()) throw ArgumentError(fmt::format("malformed line in input script: '{}'", line));
    if (!out.empty() && coords.size() != out.front().dim()) {
      throw ArgumentError("input script mixes dimensions");
    }
    out.emplace_back(std::move(coords));
  }
  return out;
}

LgCertificate certify_local_generalization(const PayoffEnvironment& env, std::int64_t pairs, Rng& rng) {
  if (pairs < 1) throw ArgumentError("need at least one pair");
  LgCertificate cert;
  cert.declared = env.declared_constant();
  cert.ceiling = env.local_generalization();
  const std::size_t n = env.dim();
  std::uniform_real_distribution<double> jitter(-0.01, 0.01);
  for (std::int64_t i = 0; i < pairs; ++i) {
    std::vector<double> a(n);
    std::vector<double> b(n);
    for (std::size_t k = 0; k < n; ++k) {
      a[k] = uniform01(rng);
      b[k] = (i % 2 == 0) ? uniform01(rng) : std::clamp(a[k] + jitter(rng), 0.0, 1.0);
    }
    const Input x(std::move(a));
    const Input xp(std::move(b));
    const double d = distance(x, xp);
    if (d == 0.0) continue;
    const double gap = std::abs(env.mentor_payoff(1, x) - env.payoff(1, x, env.mentor_action(xp)));
    cert.max_ratio = std::max(cert.max_ratio, gap / d);
    ++cert.pairs_evaluated;
  }
  cert.pass = env.has_local_generalization() && cert.max_ratio <= cert.ceiling * (1.0 + 1e-9) + 1e-12;
  return cert;
}

}  // namespace catlab
