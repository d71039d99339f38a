#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "catlab/learners.hpp"

namespace catlab {

std::int64_t dbwrq_default_g(std::int64_t T, double exponent) {
  if (T < 1) throw ArgumentError("T must be at least 1");
  if (!(exponent > 0.0)) throw ArgumentError("g exponent must be positive");
  // Guard against pow() landing a hair above an exact integer.
  const double v = std::pow(static_cast<double>(T), exponent);
  const double r = std::round(v);
  const double g = std::abs(v - r) < 1e-9 * r ? r : std::ceil(v);
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(g));
}

std::int64_t dbwrq_query_ceiling(double diam, std::int64_t g_T) {
  if (!(diam >= 0.0)) throw ArgumentError("diameter must be non-negative");
  return static_cast<std::int64_t>(std::ceil((diam + 4.0) * static_cast<double>(g_T)));
}

DbwrqLearner::DbwrqLearner(std::int64_t T, std::int64_t g)
    : T_(T), g_(g), split_at_(static_cast<double>(T) / static_cast<double>(g)) {
  if (T < 1) throw ArgumentError("T must be at least 1");
  if (g < 1) throw ArgumentError("g(T) must be at least 1");
}

std::int32_t DbwrqLearner::new_bucket(double lo, double hi, int depth) {
  Bucket b;
  b.lo = lo;
  b.hi = hi;
  b.depth = depth;
  buckets_.push_back(b);
  return static_cast<std::int32_t>(buckets_.size() - 1);
}

std::int32_t DbwrqLearner::locate_leaf(double x) {
  const double scaled = x * static_cast<double>(g_);
  const auto j = static_cast<std::int64_t>(std::ceil(scaled));
  auto it = roots_.find(j);
  // A point exactly on j/g also lies in the closed bucket to its right.
  if (it == roots_.end() && scaled == std::ceil(scaled)) it = roots_.find(j + 1);
  std::int32_t node = 0;
  if (it != roots_.end()) {
    node = it->second;
  } else {
    const double g = static_cast<double>(g_);
    node = new_bucket(static_cast<double>(j - 1) / g, static_cast<double>(j) / g, 0);
    roots_.emplace(j, node);
  }
  while (!buckets_[static_cast<std::size_t>(node)].is_leaf()) {
    const Bucket& b = buckets_[static_cast<std::size_t>(node)];
    node = x <= buckets_[static_cast<std::size_t>(b.left)].hi ? b.left : b.right;
  }
  return node;
}

std::optional<std::pair<double, ActionId>> DbwrqLearner::first_queried_in(double lo, double hi) const {
  std::optional<std::pair<double, ActionId>> out;
  std::uint64_t best_order = std::numeric_limits<std::uint64_t>::max();
  for (auto it = queried_.lower_bound(lo); it != queried_.end() && it->first <= hi; ++it) {
    if (it->second.order < best_order) {
      best_order = it->second.order;
      out = std::make_pair(it->first, it->second.action);
    }
  }
  return out;
}

std::optional<ActionId> DbwrqLearner::nearest_queried(double x) const {
  if (queried_.empty()) return std::nullopt;
  const auto it = queried_.lower_bound(x);
  if (it == queried_.end()) return std::prev(it)->second.action;
  if (it == queried_.begin()) return it->second.action;
  const auto before = std::prev(it);
  return (x - before->first) <= (it->first - x) ? before->second.action : it->second.action;
}

StepDecision DbwrqLearner::evaluate(double x, const Input& input, MentorChannel& mentor) {
  const std::int32_t id = locate_leaf(x);
  last_bucket_ = id;
  auto& b = buckets_[static_cast<std::size_t>(id)];
  if (!b.sample) b.sample = first_queried_in(b.lo, b.hi);

  StepDecision out;
  if (!b.sample) {
    const std::optional<ActionId> label = mentor.ask(input);
    ++b.visits;
    if (!label) {
      out.decision = Decision::act(nearest_queried(x).value_or(ActionId(0)));
      return out;
    }
    queried_.emplace(x, Queried{*label, queried_.size()});
    b.sample = std::make_pair(x, *label);
    out.decision = Decision::query();
    out.mentor_action = label;
    return out;
  }
  if (static_cast<double>(b.visits) < split_at_) {
    ++b.visits;
    out.decision = Decision::act(b.sample->second);
    out.support_radius = b.length();
    return out;
  }
  const double lo = b.lo;
  const double hi = b.hi;
  const double mid = (lo + hi) / 2.0;
  const int depth = b.depth + 1;
  // `b` may dangle once new buckets are appended.
  const std::int32_t left = new_bucket(lo, mid, depth);
  const std::int32_t right = new_bucket(mid, hi, depth);
  buckets_[static_cast<std::size_t>(id)].left = left;
  buckets_[static_cast<std::size_t>(id)].right = right;
  return evaluate(x, input, mentor);
}

StepDecision DbwrqLearner::step(std::int64_t, const Input& x, MentorChannel& mentor, Rng&) {
  if (x.dim() != 1) throw ArgumentError("DBWRQ needs 1-D inputs");
  return evaluate(x[0], x, mentor);
}

std::size_t DbwrqLearner::active_bucket_count() const {
  std::size_t n = 0;
  for (const Bucket& b : buckets_) n += b.is_leaf() ? 1 : 0;
  return n;
}

}  // namespace catlab
