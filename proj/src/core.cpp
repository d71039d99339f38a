#include "catlab/core.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace catlab {

Input::Input(std::vector<double> coords) : coords_(std::move(coords)) {
  if (coords_.empty()) throw ArgumentError("input must have at least one coordinate");
  for (double c : coords_) {
    if (!std::isfinite(c)) throw ArgumentError("input coordinates must be finite");
  }
}

Input::Input(std::initializer_list<double> coords) : Input(std::vector<double>(coords)) {}

double distance(const Input& a, const Input& b) {
  if (a.dim() != b.dim()) throw ArgumentError("distance between inputs of different dimension");
  if (a.dim() == 1) return std::abs(a[0] - b[0]);
  double s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

ActionId Decision::action() const {
  if (!action_) throw InvariantError("decision is a query, not an action");
  return *action_;
}

double ExtendedReal::value() const {
  if (infinite_) throw InvariantError("ExtendedReal is +inf");
  return value_;
}

double ExtendedReal::to_double() const {
  return infinite_ ? std::numeric_limits<double>::infinity() : value_;
}

std::string ExtendedReal::to_string() const {
  if (infinite_) return "inf";
  return fmt::format("{}", value_);
}

ExtendedReal ExtendedReal::parse(const std::string& s) {
  if (s == "inf") return infinity();
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ArgumentError(fmt::format("not an extended real: '{}'", s));
  }
  return ExtendedReal(v);
}

ExtendedReal operator+(ExtendedReal a, ExtendedReal b) {
  if (a.infinite_ || b.infinite_) return ExtendedReal::infinity();
  return ExtendedReal(a.value_ + b.value_);
}

bool operator<=(ExtendedReal a, ExtendedReal b) {
  if (b.infinite_) return true;
  if (a.infinite_) return false;
  return a.value_ <= b.value_;
}

bool operator<(ExtendedReal a, ExtendedReal b) { return !(b <= a); }

bool operator==(ExtendedReal a, ExtendedReal b) {
  if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
  return a.value_ == b.value_;
}

double validate_payoff(double v) {
  if (!(v >= -kPayoffSlack && v <= 1.0 + kPayoffSlack)) {
    throw InvariantError(fmt::format("payoff {} outside [0,1]", v));
  }
  return std::clamp(v, 0.0, 1.0);
}

namespace {

void require_same_length(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ArgumentError(fmt::format("payoff series lengths differ ({} vs {})", a.size(), b.size()));
  }
  if (a.empty()) throw ArgumentError("payoff series must be nonempty");
}

}  // namespace

double regret_additive(std::span<const double> mentor_payoffs,
                       std::span<const double> agent_payoffs) {
  require_same_length(mentor_payoffs, agent_payoffs);
  double mentor = 0.0;
  double agent = 0.0;
  for (std::size_t i = 0; i < mentor_payoffs.size(); ++i) {
    mentor += mentor_payoffs[i];
    agent += agent_payoffs[i];
  }
  return mentor - agent;
}

ExtendedReal regret_multiplicative(std::span<const double> mentor_payoffs,
                                   std::span<const double> agent_payoffs) {
  require_same_length(mentor_payoffs, agent_payoffs);
  double total = 0.0;
  bool infinite = false;
  for (std::size_t i = 0; i < mentor_payoffs.size(); ++i) {
    if (!(mentor_payoffs[i] > 0.0)) {
      throw InvariantError(fmt::format("mentor payoff {} at step {} is not positive",
                                       mentor_payoffs[i], i + 1));
    }
    if (agent_payoffs[i] <= 0.0) {
      infinite = true;
      continue;
    }
    if (mentor_payoffs[i] != agent_payoffs[i]) {
      total += std::log(mentor_payoffs[i]) - std::log(agent_payoffs[i]);
    }
  }
  if (infinite) return ExtendedReal::infinity();
  return ExtendedReal(total);
}

ProdVsAdd check_prod_vs_add(std::span<const double> mentor_payoffs,
                            std::span<const double> agent_payoffs, double rel_tol) {
  const double add = regret_additive(mentor_payoffs, agent_payoffs);
  const ExtendedReal mul = regret_multiplicative(mentor_payoffs, agent_payoffs);
  const auto le = [rel_tol](double lhs, double rhs) {
    return lhs <= rhs + rel_tol * std::max({1.0, std::abs(lhs), std::abs(rhs)});
  };

  ProdVsAdd out;
  bool mentor_dominates = true;
  double min_agent = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < mentor_payoffs.size(); ++i) {
    mentor_dominates = mentor_dominates && mentor_payoffs[i] >= agent_payoffs[i];
    min_agent = std::min(min_agent, agent_payoffs[i]);
  }
  if (mentor_dominates) {
    const bool ok = mul.is_infinite() || le(add, mul.value());
    out.additive_le_multiplicative = ok ? CheckResult::kPass : CheckResult::kFail;
  }
  if (mentor_dominates && min_agent > 0.0) {
    const bool ok = le(mul.value(), add / min_agent);
    out.multiplicative_le_scaled_additive = ok ? CheckResult::kPass : CheckResult::kFail;
  }
  return out;
}

RegretReport make_regret_report(std::span<const StepRecord> steps) {
  if (steps.empty()) throw ArgumentError("cannot report regret over zero steps");
  RegretReport r;
  r.T = static_cast<std::int64_t>(steps.size());
  std::vector<double> mentor;
  std::vector<double> agent;
  mentor.reserve(steps.size());
  agent.reserve(steps.size());
  r.cumulative_additive.reserve(steps.size());
  r.cumulative_queries.reserve(steps.size());
  double running = 0.0;
  std::int64_t queries = 0;
  for (const StepRecord& s : steps) {
    mentor.push_back(s.mentor_payoff);
    agent.push_back(s.payoff);
    running += s.mentor_payoff - s.payoff;
    queries += s.queried ? 1 : 0;
    r.cumulative_additive.push_back(running);
    r.cumulative_queries.push_back(queries);
  }
  r.additive = regret_additive(mentor, agent);
  r.multiplicative = regret_multiplicative(mentor, agent);
  r.query_count = queries;
  // The running series and the two-sum form can differ in the last ulp.
  r.cumulative_additive.back() = r.additive;
  return r;
}

}  // namespace catlab
